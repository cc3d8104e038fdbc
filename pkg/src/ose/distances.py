"""Synthesis at prescribed cosine distances.

Finding a unit ``x`` with ``d(x, v_i) = alpha_i`` is the same as finding a
unit solution of ``V x = w``, where the rows of ``V`` are the normalized
``v_i`` and ``w_i = 1 - alpha_i``. The minimum-norm solution
``q = V^t (V V^t)^{-1} w`` decides feasibility (``|q| <= 1``); any unit
solution is ``q + t x1`` with ``x1`` in the null space of ``V``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDirection,
    DependentRows,
    DimMismatch,
    InconsistentSystem,
    Infeasible,
    NullspaceEmpty,
    TargetOutOfRange,
    UnsupportedCase,
)
from .linalg import (
    RANK_TOL,
    as_rows,
    complement_basis,
    normalize_rows,
    orthonormalize,
    project_onto_span,
    solve_gram,
)

FEAS_TOL = 1e-9
CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class DistanceSpec:
    """Source vectors paired with target cosine distances."""

    vectors: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        rows = normalize_rows(as_rows(self.vectors))  # also rejects zero vectors
        targets = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        if rows.shape[0] != targets.size:
            raise DimMismatch(f"{rows.shape[0]} vectors but {targets.size} targets")
        if rows.shape[0] == 0:
            raise ValueError("DistanceSpec needs at least one vector")
        if not np.all(np.isfinite(targets)):
            raise ValueError("targets must be finite")
        bad = np.flatnonzero((targets < 0.0) | (targets > 2.0))
        if bad.size:
            raise TargetOutOfRange(
                f"target {targets[bad[0]]!r} at position {int(bad[0])} is outside [0, 2]"
            )
        object.__setattr__(self, "vectors", as_rows(self.vectors))
        object.__setattr__(self, "targets", targets)

    @property
    def unit_rows(self) -> np.ndarray:
        return normalize_rows(self.vectors)

    @property
    def rhs(self) -> np.ndarray:
        return 1.0 - self.targets

    def __len__(self):
        return self.targets.size


@dataclass(frozen=True)
class FeasibleInterval:
    """Range of common distances attainable from every vector at once."""

    lower: float
    upper: float
    gram_norm: float


def reduce_dependent_rows(spec: DistanceSpec, rank_tol: float = RANK_TOL) -> DistanceSpec:
    """Drop rows of ``[V | w]`` that are combinations of earlier rows.

    A dependent row whose target disagrees with the combination of the
    kept rows' targets makes ``V x = w`` unsolvable.
    """
    V = spec.unit_rows
    w = spec.rhs
    keep: list[int] = []
    basis = orthonormalize(V[:0], rank_tol, dim=V.shape[1])
    for i, row in enumerate(V):
        if keep:
            resid = np.linalg.norm(row - project_onto_span(row, basis))
        else:
            resid = 1.0
        if resid > rank_tol:
            keep.append(i)
            basis = orthonormalize(V[keep], rank_tol)
            continue
        coeffs = solve_gram(V[keep], V[keep] @ row, rank_tol)
        induced = float(coeffs @ w[keep])
        tol = CONSISTENCY_TOL * (1.0 + float(np.sum(np.abs(coeffs))))
        if abs(induced - w[i]) > tol:
            raise InconsistentSystem(
                f"row {i} is a combination of earlier rows but its target "
                f"{spec.targets[i]:.10g} disagrees with the induced {1.0 - induced:.10g}"
            )
    if len(keep) == len(spec):
        return spec
    return DistanceSpec(spec.vectors[keep], spec.targets[keep])


def _null_direction(V: np.ndarray, q: np.ndarray, rank_tol: float) -> np.ndarray:
    n = V.shape[1]
    row_basis = orthonormalize(V, rank_tol)
    # P_{S0}(x0) vanishes for the minimum-norm x0, so this branch is a
    # guard for callers passing a non-minimal particular solution
    p = q - project_onto_span(q, row_basis)
    if np.linalg.norm(p) > rank_tol:
        return p
    if row_basis.rank >= n:
        raise NullspaceEmpty("V is square and invertible; the null space is {0}")
    return complement_basis(row_basis, count=1).vectors[0]


def min_norm_point(spec: DistanceSpec, rank_tol: float = RANK_TOL) -> np.ndarray:
    """``q = V^t (V V^t)^{-1} w`` for the reduced system."""
    reduced = reduce_dependent_rows(spec, rank_tol)
    V = reduced.unit_rows
    return V.T @ solve_gram(V, reduced.rhs, rank_tol)


def solve_at_distances(spec: DistanceSpec, rank_tol: float = RANK_TOL) -> np.ndarray:
    """A unit vector ``x`` with ``d(x, v_i) = alpha_i`` for every i.

    When several solutions exist the one with non-negative coefficient
    along the chosen null-space direction is returned.

    Raises
    ------
    Infeasible
        ``|q| > 1``: no unit vector satisfies the linear system.
    InconsistentSystem
        Dependent rows with incompatible targets.
    NullspaceEmpty
        ``N == n`` and the unique solution is not a unit vector.
    """
    reduced = reduce_dependent_rows(spec, rank_tol)
    V = reduced.unit_rows
    w = reduced.rhs
    if V.shape[0] > V.shape[1]:
        raise InconsistentSystem(
            f"{V.shape[0]} independent rows in R^{V.shape[1]} after reduction"
        )
    q = V.T @ solve_gram(V, w, rank_tol)
    qn = float(np.linalg.norm(q))
    if qn > 1.0 + FEAS_TOL:
        raise Infeasible(f"minimum-norm solution has norm {qn:.12g} > 1")
    if abs(qn - 1.0) <= FEAS_TOL:
        return q
    x1 = _null_direction(V, q, rank_tol)
    t = p_of_t_root(q, x1)
    return q + t * x1


def p_of_t_check(q, x1, t: float) -> float:
    """``|q + t x1|^2`` expanded as ``t^2 |x1|^2 + |q|^2`` (``x1`` orthogonal to ``q``)."""
    q = np.asarray(q, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    return t * t * float(x1 @ x1) + float(q @ q)


def p_of_t_root(q, x1) -> float:
    """Non-negative ``t`` with ``p(t) = 1``."""
    q = np.asarray(q, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    return math.sqrt(max(0.0, 1.0 - float(q @ q)) / float(x1 @ x1))


def _gram_e(V: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    if orthonormalize(V, rank_tol).rank < V.shape[0]:
        raise DependentRows("normalized vectors are linearly dependent")
    z = solve_gram(V, np.ones(V.shape[0]), rank_tol)
    return z, V.T @ z


def equal_distance_interval(vectors, rank_tol: float = RANK_TOL) -> FeasibleInterval:
    """Common distances ``alpha`` for which all-equal targets are feasible."""
    V = normalize_rows(as_rows(vectors))
    _, qe = _gram_e(V, rank_tol)
    g = float(np.linalg.norm(qe))
    return FeasibleInterval(max(0.0, 1.0 - 1.0 / g), min(2.0, 1.0 + 1.0 / g), g)


@dataclass(frozen=True)
class VaryingCoefficients:
    """Feasibility of targets ``alpha_low + t u_i`` reads ``a t^2 - b t <= 0``."""

    a: float
    b: float
    alpha_low: float


def varying_distance_coefficients(vectors, u, rank_tol: float = RANK_TOL) -> VaryingCoefficients:
    V = normalize_rows(as_rows(vectors))
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    if u.size != V.shape[0]:
        raise DimMismatch(f"{V.shape[0]} vectors but {u.size} entries in u")
    if u.size > 1 and not np.all(np.diff(u) > 0):
        raise ValueError("u must be strictly increasing")
    ze, qe = _gram_e(V, rank_tol)
    g = float(np.linalg.norm(qe))
    alpha_low = max(0.0, 1.0 - 1.0 / g)
    if alpha_low <= 1e-12:
        raise UnsupportedCase("the minimal common distance is 0; the t-range is undefined")
    qu = V.T @ solve_gram(V, u, rank_tol)
    a = float(qu @ qu)
    if math.sqrt(a) <= rank_tol:
        raise DegenerateDirection("V^t (V V^t)^{-1} u vanishes")
    # <u, G^{-1} e> = <G^{-1} u, e> since G is symmetric
    b = 2.0 * float(u @ ze) / g
    return VaryingCoefficients(a, b, alpha_low)


def varying_distance_range(vectors, u, rank_tol: float = RANK_TOL) -> tuple[float, float]:
    """Interval of ``t`` for which targets ``alpha_low + t u_i`` are feasible.

    The squared minimum-norm solution is ``1 - b t + a t^2``, so the
    feasible set is ``[0, b/a]`` for ``b >= 0`` and ``[b/a, 0]`` otherwise.
    """
    c = varying_distance_coefficients(vectors, u, rank_tol)
    end = c.b / c.a
    return (0.0, end) if c.b >= 0 else (end, 0.0)
