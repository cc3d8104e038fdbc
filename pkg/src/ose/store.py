"""Word-embedding tables: text-format loading, serialization and exact retrieval."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import DimMismatch, EmptyFile, EmptyTable, InconsistentDim, ParseError, ZeroVector
from .linalg import as_vector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable token -> vector map with a fixed dimension.

    Zero vectors are stored but never returned by retrieval.
    """

    tokens: tuple[str, ...]
    matrix: np.ndarray
    source: str = "<memory>"
    _index: dict = field(init=False, repr=False, compare=False)
    _unit: np.ndarray = field(init=False, repr=False, compare=False)
    _nonzero: np.ndarray = field(init=False, repr=False, compare=False)
    _lex_rank: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        mat = np.array(self.matrix, dtype=np.float64, copy=True)
        if mat.ndim != 2 or mat.shape[0] != len(tokens):
            raise DimMismatch(f"matrix shape {mat.shape} does not match {len(tokens)} tokens")
        if not np.all(np.isfinite(mat)):
            raise ValueError("embedding table contains NaN or Inf")
        index = {}
        for i, t in enumerate(tokens):
            if t in index:
                raise ValueError(f"duplicate token {t!r}")
            index[t] = i
        norms = np.linalg.norm(mat, axis=1)
        nonzero = norms > 0
        unit = np.zeros_like(mat)
        unit[nonzero] = mat[nonzero] / norms[nonzero, None]
        mat.setflags(write=False)
        unit.setflags(write=False)
        lex = np.empty(len(tokens), dtype=np.int64)
        lex[np.argsort(np.array(tokens, dtype=object), kind="stable")] = np.arange(len(tokens))
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_unit", unit)
        object.__setattr__(self, "_nonzero", nonzero)
        object.__setattr__(self, "_lex_rank", lex)

    @classmethod
    def from_dict(cls, entries: dict, source: str = "<memory>") -> "EmbeddingTable":
        tokens = list(entries)
        if not tokens:
            raise EmptyTable("no entries")
        return cls(tuple(tokens), np.vstack([as_vector(entries[t]) for t in tokens]), source)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def zero_count(self) -> int:
        return int(np.count_nonzero(~self._nonzero))

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def __getitem__(self, token: str) -> np.ndarray:
        return self.matrix[self._index[token]]

    def get(self, token: str, default=None):
        i = self._index.get(token)
        return default if i is None else self.matrix[i]

    def items(self):
        return zip(self.tokens, self.matrix)


def _is_header(fields: list[str]) -> bool:
    if len(fields) != 2:
        return False
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def parse_embeddings(lines: Iterable[str], limit: int | None = None,
                     lowercase: bool = False, source: str = "<stream>") -> EmbeddingTable:
    """Parse word2vec/GloVe/fastText text exports.

    An optional ``<count> <dim>`` header is recognized on the first line.
    Duplicate tokens keep their first occurrence.
    """
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim = None
    header_dim = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.rstrip(" ").split(" ")
        if lineno == 1 and _is_header(fields):
            header_dim = int(fields[1])
            continue
        if limit is not None and len(tokens) >= limit:
            break
        token, values = fields[0], fields[1:]
        if not token:
            raise ParseError("empty token", lineno)
        if not values:
            raise ParseError(f"token {token!r} has no vector components", lineno)
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"bad float ({exc})", lineno) from None
        if not np.all(np.isfinite(vec)):
            raise ParseError("non-finite vector component", lineno)
        if dim is None:
            dim = vec.size
            if header_dim is not None and header_dim != dim:
                raise InconsistentDim(f"header declares dim {header_dim}, line has {dim}", lineno)
        elif vec.size != dim:
            raise InconsistentDim(f"expected {dim} components, got {vec.size}", lineno)
        if lowercase:
            token = token.lower()
        if token in seen:
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(vec)
    if not tokens:
        raise EmptyFile(f"{source}: no embedding entries")
    table = EmbeddingTable(tuple(tokens), np.vstack(rows), source)
    if table.zero_count:
        log.warning("%s: %d zero vectors excluded from retrieval", source, table.zero_count)
    return table


def load_embeddings(path, limit: int | None = None, lowercase: bool = False) -> EmbeddingTable:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        return parse_embeddings(fh, limit=limit, lowercase=lowercase, source=str(path))


def format_float(v: float, digits: int = 8) -> str:
    """``digits`` significant digits, always with a decimal point or exponent."""
    s = format(float(v) + 0.0, f".{digits}g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def format_vector(vec, digits: int = 8) -> str:
    return " ".join(format_float(v, digits) for v in vec)


def write_embeddings(table: EmbeddingTable, fh: TextIO, header: bool = True) -> None:
    if header:
        fh.write(f"{len(table)} {table.dim}\n")
    for token, vec in table.items():
        fh.write(f"{token} {format_vector(vec)}\n")


def retrieve(table: EmbeddingTable, x, top_k: int = 1) -> list[tuple[str, float]]:
    """The ``top_k`` tokens closest to ``x`` in cosine distance.

    Sorted ascending by distance, ties broken by token order.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    x = as_vector(x)
    if x.size != table.dim:
        raise DimMismatch(f"query has dim {x.size}, table has {table.dim}")
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ZeroVector("query vector is zero")
    cand = np.flatnonzero(table._nonzero)
    if cand.size == 0:
        raise EmptyTable("table has no nonzero vectors")
    dist = 1.0 - np.clip(table._unit[cand] @ (x / nrm), -1.0, 1.0)
    order = np.lexsort((table._lex_rank[cand], dist))[:top_k]
    return [(table.tokens[cand[i]], float(dist[i])) for i in order]


def classify_by_partition(table: EmbeddingTable, x) -> str:
    """Token whose cell of the induced Voronoi-like partition contains ``x``."""
    return retrieve(table, x, 1)[0][0]
