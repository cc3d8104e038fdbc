"""Sentence vectors from token vectors: bag-of-vectors mean or equidistant synthesis."""
from __future__ import annotations

import logging
import math
import string
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .equidistant import ose
from .errors import EmptyAfterFiltering, EmptyInput, Infeasible, OOVToken, ParseError
from .linalg import RANK_TOL, as_rows
from .store import EmbeddingTable

log = logging.getLogger(__name__)

METHODS = ("bov", "ose")
OOV_POLICIES = ("skip", "error")
FALLBACKS = ("none", "bov")


@dataclass(frozen=True)
class CompositionRequest:
    tokens: tuple[str, ...]
    method: str = "ose"
    oov_policy: str = "skip"
    fallback: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.oov_policy not in OOV_POLICIES:
            raise ValueError(f"oov_policy must be one of {OOV_POLICIES}")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}")


@dataclass(frozen=True)
class CompositionReport:
    token_count: int
    oov_count: int
    method_used: str
    oov_tokens: tuple[str, ...] = ()


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    """Whitespace split with ASCII punctuation stripped from token ends."""
    out = []
    for tok in text.split():
        tok = tok.strip(string.punctuation)
        if tok:
            out.append(tok.lower() if lowercase else tok)
    return out


def compose_bov(vectors) -> np.ndarray:
    """Arithmetic mean of the raw (unnormalized) vectors.

    Column sums are correctly rounded, so the result does not depend on
    the order of the inputs.
    """
    rows = as_rows(vectors)
    if rows.shape[0] == 0:
        raise EmptyInput("cannot average an empty list of vectors")
    return np.array([math.fsum(col) for col in rows.T]) / rows.shape[0]


def compose_vectors(vectors, method: str = "ose", fallback: str = "none",
                    rank_tol: float = RANK_TOL) -> tuple[np.ndarray, str]:
    """Compose already-resolved token vectors; returns ``(vector, method_used)``."""
    if method == "bov":
        return compose_bov(vectors), "bov"
    rows = as_rows(vectors)
    if rows.shape[0] == 0:
        raise EmptyInput("cannot compose an empty list of vectors")
    try:
        return ose(rows, rank_tol).solution, "ose"
    except Infeasible:
        if fallback == "bov":
            log.info("equidistant synthesis infeasible for %d vectors; using bov", rows.shape[0])
            return compose_bov(rows), "bov"
        raise


def compose_sentence(table: EmbeddingTable, request: CompositionRequest,
                     rank_tol: float = RANK_TOL) -> tuple[np.ndarray, CompositionReport]:
    vectors = []
    oov = []
    for tok in request.tokens:
        vec = table.get(tok)
        if vec is None:
            if request.oov_policy == "error":
                raise OOVToken(f"token {tok!r} not in vocabulary")
            oov.append(tok)
            continue
        if not np.any(vec):
            # cosine geometry is undefined for zero vectors
            oov.append(tok)
            continue
        vectors.append(vec)
    if not vectors:
        raise EmptyAfterFiltering(
            f"no in-vocabulary tokens among {len(request.tokens)} input tokens"
        )
    vec, used = compose_vectors(vectors, request.method, request.fallback, rank_tol)
    return vec, CompositionReport(len(request.tokens), len(oov), used, tuple(oov))


def read_token_vector_blocks(lines: Iterable[str]) -> Iterator[list[tuple[str, np.ndarray]]]:
    """Blank-line separated blocks of ``<token> <f1> ... <fn>`` lines.

    Used for precomputed contextual token vectors, one block per sentence.
    """
    block: list[tuple[str, np.ndarray]] = []
    dim = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n").rstrip(" ")
        if not line.strip():
            if block:
                yield block
                block = []
            continue
        fields = line.split(" ")
        try:
            vec = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"bad float ({exc})", lineno) from None
        if vec.size == 0:
            raise ParseError(f"token {fields[0]!r} has no vector components", lineno)
        if dim is None:
            dim = vec.size
        elif vec.size != dim:
            raise ParseError(f"expected {dim} components, got {vec.size}", lineno)
        block.append((fields[0], vec))
    if block:
        yield block
