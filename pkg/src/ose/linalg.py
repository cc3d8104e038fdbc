"""Dense vector primitives: cosine distance, Gram-Schmidt, projections, Gram solves.

Vectors are 1-D ``float64`` numpy arrays. Lists of vectors are accepted
anywhere a matrix of row vectors is expected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NonFiniteVector, SingularGram, ZeroVector

RANK_TOL = 1e-10


def as_vector(x) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimMismatch(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteVector("vector has NaN or Inf components")
    return v


def as_rows(vectors) -> np.ndarray:
    """Stack vectors into an ``(N, n)`` float64 matrix, checking a common dim."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        rows = np.asarray(vectors, dtype=np.float64)
    else:
        vecs = [as_vector(v) for v in vectors]
        if not vecs:
            return np.zeros((0, 0))
        dims = {v.size for v in vecs}
        if len(dims) != 1:
            raise DimMismatch(f"vectors have differing dimensions {sorted(dims)}")
        rows = np.vstack(vecs)
    if not np.all(np.isfinite(rows)):
        raise NonFiniteVector("matrix has NaN or Inf entries")
    return rows


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimMismatch(f"dimension mismatch: {x.size} vs {y.size}")


def normalize(x) -> np.ndarray:
    x = as_vector(x)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return x / nrm


def normalize_rows(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector(f"zero vector at position {int(np.argmin(norms))}")
    return rows / norms[:, None]


def cosine_distance(x, y) -> float:
    """``1 - <x, y> / (|x| |y|)``, a value in ``[0, 2]``."""
    x, y = as_vector(x), as_vector(y)
    _check_same_dim(x, y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVector("cosine distance is undefined for the zero vector")
    cos = float(np.dot(x, y) / (nx * ny))
    return 1.0 - min(1.0, max(-1.0, cos))


def cosine_distances(rows, x) -> np.ndarray:
    """Cosine distance from ``x`` to every row of ``rows`` (rows must be nonzero)."""
    rows = as_rows(rows)
    x = normalize(x)
    if rows.shape[1] != x.size:
        raise DimMismatch(f"dimension mismatch: {rows.shape[1]} vs {x.size}")
    cos = normalize_rows(rows) @ x
    return 1.0 - np.clip(cos, -1.0, 1.0)


def half_sq_norm_identity_check(x, y) -> float:
    """``0.5 * |x/|x| - y/|y||^2``; equal to :func:`cosine_distance` for nonzero inputs."""
    x, y = as_vector(x), as_vector(y)
    _check_same_dim(x, y)
    diff = normalize(x) - normalize(y)
    return 0.5 * float(np.dot(diff, diff))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal rows spanning a subspace of R^dim."""

    vectors: np.ndarray  # shape (rank, dim)
    dim: int

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def empty(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.zeros((0, dim)), dim)

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return self.rank


def orthonormalize(vectors, rank_tol: float = RANK_TOL, dim: int | None = None) -> OrthonormalBasis:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A candidate is dropped when its residual, after projecting out the basis
    built so far, has norm at most ``rank_tol * max_input_norm``.

    Parameters
    ----------
    vectors : sequence of array_like or (N, n) ndarray
    rank_tol : float
        Relative rank-detection tolerance.
    dim : int, optional
        Ambient dimension; only needed when ``vectors`` is empty.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    rows = as_rows(vectors)
    if rows.shape[0] == 0:
        return OrthonormalBasis.empty(dim or 0)
    n = rows.shape[1]
    scale = float(np.max(np.linalg.norm(rows, axis=1)))
    if scale == 0.0:
        return OrthonormalBasis.empty(n)
    threshold = rank_tol * scale
    basis: list[np.ndarray] = []
    for row in rows:
        r = row.copy()
        for _ in range(2):
            for b in basis:
                r -= np.dot(b, r) * b
        nrm = np.linalg.norm(r)
        if nrm > threshold:
            basis.append(r / nrm)
    if not basis:
        return OrthonormalBasis.empty(n)
    return OrthonormalBasis(np.vstack(basis), n)


def project_onto_span(x, span_basis: OrthonormalBasis) -> np.ndarray:
    x = as_vector(x)
    if span_basis.rank == 0:
        return np.zeros_like(x)
    if span_basis.dim != x.size:
        raise DimMismatch(f"dimension mismatch: {x.size} vs basis dim {span_basis.dim}")
    B = span_basis.vectors
    return B.T @ (B @ x)


def project_onto_complement(x, span_basis: OrthonormalBasis) -> np.ndarray:
    """``x - sum_i <x, b_i> b_i``: the component of ``x`` orthogonal to the span."""
    x = as_vector(x)
    if span_basis.rank == 0:
        if span_basis.dim not in (0, x.size):
            raise DimMismatch(f"dimension mismatch: {x.size} vs basis dim {span_basis.dim}")
        return x.copy()
    if span_basis.dim != x.size:
        raise DimMismatch(f"dimension mismatch: {x.size} vs basis dim {span_basis.dim}")
    r = x.copy()
    # two sweeps keep the residual orthogonal to working precision
    for _ in range(2):
        for b in span_basis.vectors:
            r -= np.dot(b, r) * b
    return r


def complement_basis(span_basis: OrthonormalBasis, count: int | None = None) -> OrthonormalBasis:
    """Orthonormal basis of the orthogonal complement of ``span_basis``.

    Deterministic: each step completes the basis with the standard basis
    vector whose residual is largest (first index on ties). That residual
    has squared norm at least ``(n - rank) / n``, so no cancellation issue.
    ``count`` caps the number of vectors returned.
    """
    n = span_basis.dim
    B = span_basis.vectors.copy()
    want = n - span_basis.rank if count is None else min(count, n - span_basis.rank)
    extra: list[np.ndarray] = []
    for _ in range(want):
        resid = 1.0 - np.sum(B * B, axis=0)
        i = int(np.argmax(resid))
        r = np.zeros(n)
        r[i] = 1.0
        for _ in range(2):
            r -= B.T @ (B @ r)
        r /= np.linalg.norm(r)
        extra.append(r)
        B = np.vstack([B, r])
    if not extra:
        return OrthonormalBasis.empty(n)
    return OrthonormalBasis(np.vstack(extra), n)


def solve_gram(V, w, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Solve ``(V V^t) z = w`` by Cholesky.

    The diagonal of the Cholesky factor equals the Gram-Schmidt residual
    norms of the rows of ``V``, so a pivot at or below
    ``rank_tol * max_row_norm`` is reported as :class:`SingularGram`, the
    same rule :func:`orthonormalize` uses to drop a vector.
    """
    V = as_rows(V)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if V.shape[0] != w.size:
        raise DimMismatch(f"{V.shape[0]} rows but {w.size} right-hand-side entries")
    if V.shape[0] == 0:
        return np.zeros(0)
    G = V @ V.T
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise SingularGram("Gram matrix is not positive definite") from exc
    pivots = np.diag(L)
    scale = float(np.max(np.linalg.norm(V, axis=1)))
    if not np.all(np.isfinite(pivots)) or np.min(pivots) <= rank_tol * scale:
        raise SingularGram(
            f"Gram matrix is numerically singular (smallest pivot {np.min(pivots):.3e})"
        )
    y = _forward(L, w)
    return _backward(L.T, y)


def _forward(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    y = np.empty_like(b)
    for i in range(b.size):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def _backward(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.empty_like(b)
    for i in range(b.size - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def min_norm_solution(V, w, rank_tol: float = RANK_TOL) -> np.ndarray:
    """``V^t (V V^t)^{-1} w``, the minimum-norm solution of ``Vx = w``."""
    V = as_rows(V)
    return V.T @ solve_gram(V, w, rank_tol)
