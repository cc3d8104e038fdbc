"""Seeded synthetic fixtures: Gaussian class blobs, random vocabularies and corpora."""
from __future__ import annotations

import numpy as np

from .augmentation import LabeledDataset, make_rng
from .store import EmbeddingTable


def gaussian_blobs(n_classes: int = 30, per_class: int = 100, dim: int = 50,
                   noise: float = 16.0, seed: int = 0) -> LabeledDataset:
    """Isotropic blobs around standard-normal centers.

    ``noise`` is the expected norm of the per-point perturbation (per
    coordinate standard deviation ``noise / sqrt(dim)``).
    """
    rng = make_rng(seed)
    centers = rng.standard_normal((n_classes, dim))
    which = np.repeat(np.arange(n_classes), per_class)
    X = centers[which] + (noise / np.sqrt(dim)) * rng.standard_normal((which.size, dim))
    width = len(str(n_classes - 1))
    labels = [f"c{i:0{width}d}" for i in which]
    keys = [f"p{j}" for j in range(which.size)]
    return LabeledDataset.from_arrays(labels, X, keys)


def random_table(size: int = 500, dim: int = 50, seed: int = 0) -> EmbeddingTable:
    rng = make_rng(seed)
    tokens = tuple(f"tok{i}" for i in range(size))
    return EmbeddingTable(tokens, rng.standard_normal((size, dim)), source=f"random(seed={seed})")


def random_corpus(table: EmbeddingTable, n_sentences: int = 100, min_len: int = 2,
                  max_len: int = 12, seed: int = 0) -> list[list[str]]:
    """Sentences of distinct tokens drawn uniformly from ``table``."""
    rng = make_rng(seed)
    out = []
    for _ in range(n_sentences):
        length = int(rng.integers(min_len, max_len + 1))
        out.append([table.tokens[i] for i in rng.choice(len(table), size=length, replace=False)])
    return out
