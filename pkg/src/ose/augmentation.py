"""Labeled datasets, stratified splits and synthetic-exemplar augmentation."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import TextIO

import numpy as np

from .composer import compose_bov, compose_vectors, tokenize
from .equidistant import ose
from .errors import ClassTooSmall, DimMismatch, ExhaustedSubsets, Infeasible, ParseError, SynthesisFailed
from .linalg import RANK_TOL, as_vector
from .store import EmbeddingTable, format_vector

log = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Record:
    label: str
    key: str
    vector: np.ndarray


@dataclass(frozen=True)
class LabeledDataset:
    records: tuple[Record, ...]

    def __post_init__(self):
        recs = tuple(self.records)
        dims = {r.vector.shape for r in recs}
        if len(dims) > 1:
            raise DimMismatch(f"records have differing vector shapes {sorted(dims)}")
        object.__setattr__(self, "records", recs)

    @classmethod
    def from_arrays(cls, labels, vectors, keys=None) -> "LabeledDataset":
        vectors = np.asarray(vectors, dtype=np.float64)
        if keys is None:
            keys = [str(i) for i in range(len(labels))]
        return cls(tuple(Record(str(l), str(k), as_vector(v)) for l, k, v in zip(labels, keys, vectors)))

    def __len__(self):
        return len(self.records)

    @property
    def labels(self) -> list[str]:
        return sorted({r.label for r in self.records})

    @property
    def dim(self) -> int:
        return self.records[0].vector.size if self.records else 0

    @property
    def label_array(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=object)

    @property
    def matrix(self) -> np.ndarray:
        if not self.records:
            return np.zeros((0, 0))
        return np.vstack([r.vector for r in self.records])

    def indices_by_label(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for i, r in enumerate(self.records):
            out.setdefault(r.label, []).append(i)
        return out

    def class_sizes(self) -> dict[str, int]:
        return {k: len(v) for k, v in sorted(self.indices_by_label().items())}


@dataclass(frozen=True)
class AugmentationConfig:
    k: int = 5
    K: int = 1
    method: str = "ose"
    seed: int = 0
    rank_tol: float = RANK_TOL

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.method not in ("ose", "bov"):
            raise ValueError(f"method must be 'ose' or 'bov', got {self.method!r}")


def _draw_subsets(rng: np.random.Generator, size: int, k: int, K: int) -> list[tuple[int, ...]]:
    total = math.comb(size, k)
    if K > total:
        raise ExhaustedSubsets(f"{K} draws requested but only C({size}, {k}) = {total} subsets exist")
    if total <= 4 * K:
        # dense regime: rejection sampling would stall, sample the enumeration instead
        combos = list(combinations(range(size), k))
        picks = rng.choice(total, size=K, replace=False)
        return [combos[i] for i in picks]
    seen: set[tuple[int, ...]] = set()
    out = []
    while len(out) < K:
        sub = tuple(sorted(int(i) for i in rng.choice(size, size=k, replace=False)))
        if sub in seen:
            continue
        seen.add(sub)
        out.append(sub)
    return out


def augment(train: LabeledDataset, config: AugmentationConfig) -> LabeledDataset:
    """Append ``K`` synthesized exemplars per class.

    Each exemplar combines ``k`` distinct records of one class (drawn
    without replacement); no two exemplars of a class share the same
    k-subset. Classes are visited in sorted label order, which together
    with the seeded generator fixes the output exactly.
    """
    groups = train.indices_by_label()
    for label in sorted(groups):
        if len(groups[label]) < config.k:
            raise ClassTooSmall(label, len(groups[label]), config.k)
    rng = make_rng(config.seed)
    new: list[Record] = []
    for label in sorted(groups):
        idx = groups[label]
        for j, sub in enumerate(_draw_subsets(rng, len(idx), config.k, config.K)):
            seeds = np.vstack([train.records[idx[i]].vector for i in sub])
            if config.method == "bov":
                vec = compose_bov(seeds)
            else:
                try:
                    vec = ose(seeds, config.rank_tol).solution
                except Infeasible as exc:
                    raise SynthesisFailed(label, j, exc) from exc
            new.append(Record(label, f"aug:{label}:{j}", vec))
    return LabeledDataset(train.records + tuple(new))


def split_dataset(data: LabeledDataset, fraction: float = 0.5,
                  seed: int = 0) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified shuffle split; ``fraction`` is the train share per class.

    Each class sends ``floor(size * (1 - fraction))`` records to test. Both
    halves keep the input's record order.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    rng = make_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    groups = data.indices_by_label()
    for label in sorted(groups):
        idx = np.array(groups[label])
        n_test = int(math.floor(idx.size * (1.0 - fraction) + 1e-12))
        n_train = idx.size - n_test
        if n_test == 0 or n_train == 0:
            raise ClassTooSmall(label, int(idx.size), 2)
        perm = rng.permutation(idx.size)
        test_idx.extend(idx[perm[:n_test]].tolist())
        train_idx.extend(idx[perm[n_test:]].tolist())
    recs = data.records
    return (LabeledDataset(tuple(recs[i] for i in sorted(train_idx))),
            LabeledDataset(tuple(recs[i] for i in sorted(test_idx))))


def filter_min_class_size(data: LabeledDataset, min_class_size: int = 100) -> LabeledDataset:
    """Deduplicate keys within each class, then drop classes below ``min_class_size``."""
    seen: set[tuple[str, str]] = set()
    deduped = []
    for r in data.records:
        if (r.label, r.key) in seen:
            continue
        seen.add((r.label, r.key))
        deduped.append(r)
    sizes: dict[str, int] = {}
    for r in deduped:
        sizes[r.label] = sizes.get(r.label, 0) + 1
    keep = {l for l, s in sizes.items() if s >= min_class_size}
    dropped = sorted(set(sizes) - keep)
    if dropped:
        log.info("dropping %d classes below %d records", len(dropped), min_class_size)
    return LabeledDataset(tuple(r for r in deduped if r.label in keep))


def load_labeled_dataset(path, table: EmbeddingTable | None = None, lowercase: bool = False,
                         method: str = "ose", fallback: str = "none",
                         rank_tol: float = RANK_TOL) -> tuple[LabeledDataset, int]:
    """Read a labeled dataset; returns ``(dataset, skipped_count)``.

    Formats, chosen by the header line:

    * ``label,word`` CSV: each word is looked up in ``table``.
    * ``label<TAB>sentence`` TSV: sentences are tokenized and composed
      with ``method``.
    * ``label,key,vector`` CSV: vectors given inline (space separated),
      as written by :func:`write_labeled_dataset`.

    Records whose word or sentence cannot be resolved are skipped.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\r\n")
        if "\t" in first:
            mode, reader = "sentence", csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        else:
            header = [h.strip().lower() for h in first.split(",")]
            if header == ["label", "word"]:
                mode = "word"
            elif header == ["label", "key", "vector"]:
                mode = "vector"
            else:
                raise ParseError(f"{path}: unrecognized header {first!r}", 1)
            reader = csv.reader(fh)
        if mode != "vector" and table is None:
            raise ValueError(f"{mode} datasets need an embedding table")
        records = []
        skipped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ParseError(f"{path}: expected at least 2 fields", lineno)
            label = row[0].strip()
            if mode == "vector":
                if len(row) != 3:
                    raise ParseError(f"{path}: expected label,key,vector", lineno)
                try:
                    vec = np.array([float(v) for v in row[2].split()], dtype=np.float64)
                except ValueError as exc:
                    raise ParseError(f"{path}: bad float ({exc})", lineno) from None
                records.append(Record(label, row[1], vec))
                continue
            text = row[1] if mode == "word" else "\t".join(row[1:])
            if mode == "word":
                word = text.strip().lower() if lowercase else text.strip()
                vec = table.get(word)
                if vec is None or not np.any(vec):
                    skipped += 1
                    continue
                records.append(Record(label, word, vec))
            else:
                vecs = [table[t] for t in tokenize(text, lowercase) if t in table and np.any(table[t])]
                if not vecs:
                    skipped += 1
                    continue
                try:
                    vec, _ = compose_vectors(vecs, method, fallback, rank_tol)
                except Infeasible:
                    skipped += 1
                    continue
                records.append(Record(label, text, vec))
    if skipped:
        log.warning("%s: skipped %d unresolved records", path, skipped)
    return LabeledDataset(tuple(records)), skipped


def write_labeled_dataset(data: LabeledDataset, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["label", "key", "vector"])
    for r in data.records:
        writer.writerow([r.label, r.key, format_vector(r.vector)])
