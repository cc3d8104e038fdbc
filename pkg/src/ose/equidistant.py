"""Equidistant synthesis: the unit vector at minimal common cosine distance.

Given nonzero ``v_1..v_N`` with normalized forms ``u_i``, the vectors
equidistant from all of them form the orthogonal complement of
``S1 = span{u_N - u_j}``. The closest such unit vector is the normalized
projection of ``u_N`` onto that complement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AntipodalPair, DependentRows, Infeasible, ZeroVector
from .linalg import (
    RANK_TOL,
    as_rows,
    complement_basis,
    cosine_distance,
    min_norm_solution,
    normalize,
    normalize_rows,
    orthonormalize,
    project_onto_complement,
)

METHODS = ("projection", "gram_alternative", "closed_form_n2", "degenerate_identical")


@dataclass(frozen=True)
class SynthesisResult:
    solution: np.ndarray
    common_distance: float
    difference_rank: int
    ambient_dim: int
    method: str = "projection"
    diagnostics: dict = field(default_factory=dict)


def _unit_rows(vectors) -> np.ndarray:
    rows = as_rows(vectors)
    if rows.shape[0] == 0:
        raise ValueError("need at least one vector")
    try:
        return normalize_rows(rows)
    except ZeroVector as exc:
        raise ZeroVector(f"input contains a zero vector ({exc})") from None


def dedupe_unit_rows(units: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Drop rows that coincide (within ``rank_tol``) with an earlier row."""
    kept: list[np.ndarray] = []
    for u in units:
        if all(np.linalg.norm(u - k) > rank_tol for k in kept):
            kept.append(u)
    return np.vstack(kept)


def ose(vectors, rank_tol: float = RANK_TOL) -> SynthesisResult:
    """Optimal synthesis embedding of ``vectors``.

    Raises
    ------
    ZeroVector, DimMismatch
        On malformed input.
    Infeasible
        When the difference vectors span the whole space (no nonzero vector
        is equidistant from all inputs).
    """
    units = _unit_rows(vectors)
    n_input, n = units.shape
    distinct = dedupe_unit_rows(units, rank_tol)
    if distinct.shape[0] == 1:
        x = distinct[0].copy()
        return SynthesisResult(
            x, 0.0, 0, n, "degenerate_identical",
            {"n_input": n_input, "n_distinct": 1},
        )

    ref = distinct[-1]
    diffs = ref[None, :] - distinct[:-1]
    s1 = orthonormalize(diffs, rank_tol)
    m = s1.rank
    if m >= n:
        raise Infeasible(
            f"difference vectors span R^{n}; no nonzero equidistant vector exists"
        )
    p = project_onto_complement(ref, s1)
    pnorm = float(np.linalg.norm(p))
    if pnorm <= rank_tol:
        raise Infeasible("reference vector is numerically inside the difference span")
    x = p / pnorm
    dists = 1.0 - np.clip(distinct @ x, -1.0, 1.0)
    return SynthesisResult(
        x,
        float(dists[-1]),
        m,
        n,
        "projection",
        {
            "n_input": n_input,
            "n_distinct": int(distinct.shape[0]),
            "projection_norm": pnorm,
            "distance_spread": float(dists.max() - dists.min()),
        },
    )


def ose_closed_form_pair(v1, v2, rank_tol: float = RANK_TOL) -> np.ndarray:
    """``(u1 + u2) / |u1 + u2|`` for the normalized pair ``u1, u2``."""
    s = normalize(v1) + normalize(v2)
    nrm = np.linalg.norm(s)
    if nrm <= rank_tol:
        raise AntipodalPair("normalized vectors are antipodal; their sum vanishes")
    return s / nrm


def ose_gram_alternative(vectors, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Normalized ``V^t (V V^t)^{-1} e`` with ``V`` the normalized input rows.

    Only defined when the normalized vectors are linearly independent.
    """
    V = _unit_rows(vectors)
    if orthonormalize(V, rank_tol).rank < V.shape[0]:
        raise DependentRows("normalized input vectors are linearly dependent")
    q = min_norm_solution(V, np.ones(V.shape[0]), rank_tol)
    return q / np.linalg.norm(q)


def kkt_solution(vectors, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Rebuild the optimum in coordinates of an orthonormal basis of S1-perp.

    With ``beta_j = <w_j, u_N>`` for basis vectors ``w_j`` the optimum is
    ``sum beta_j w_j / sqrt(sum beta_j^2)``.
    """
    distinct = dedupe_unit_rows(_unit_rows(vectors), rank_tol)
    ref = distinct[-1]
    n = ref.size
    if distinct.shape[0] == 1:
        return ref.copy()
    s1 = orthonormalize(ref[None, :] - distinct[:-1], rank_tol)
    if s1.rank >= n:
        raise Infeasible(f"difference vectors span R^{n}")
    W = complement_basis(s1).vectors
    beta = W @ ref
    return (beta @ W) / math.sqrt(float(beta @ beta))


def kkt_cross_check(vectors, rank_tol: float = RANK_TOL) -> float:
    """Cosine distance between :func:`ose` and the basis-coordinate route."""
    x = ose(vectors, rank_tol).solution
    return cosine_distance(x, kkt_solution(vectors, rank_tol))


MEAN_COUNTEREXAMPLE = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 1.0))


def mean_counterexample_value(vectors=MEAN_COUNTEREXAMPLE) -> float:
    """``<mean(u_i), u_last - u_first>`` for the normalized inputs.

    Zero means the mean of normalized vectors is equidistant from the first
    and last input. The default triple gives ``sqrt(3)/9``.
    """
    units = _unit_rows(vectors)
    mean = units.mean(axis=0)
    return float(mean @ (units[-1] - units[0]))
