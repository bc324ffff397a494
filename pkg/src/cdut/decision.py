"""Separation-gated decision procedure: is CDuT(A, B) <= R?

When every pair of points in B is at least (c+1)(1 + 2/m) R apart, any
translation close enough to an optimal one induces the same nearest
neighbors as the optimum, and each winner beats the runner-up by a factor
c.  Under that assumption the per-point difference vectors at a good
candidate translation all point at the optimal translation, so their
geometric median recovers it: the procedure samples a few anchors, forms
the difference vectors at every candidate b - a, and answers YES exactly
when some median's total distance stays below R(1 + eps).

The total distance of any induced difference set can never fall below the
Chamfer cost at the probed point, so a NO answer is sound unconditionally;
the separation assumption is what makes YES reliable.  It is checked, not
trusted: calls on non-separated inputs are refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ann import build_ladder
from .core import (
    L2,
    ChamferReport,
    Metric,
    PointSet,
    bbox_diameter,
    build_index,
)

__all__ = [
    "SeparationCertificate",
    "SeparationError",
    "AssumptionError",
    "DifferenceSet",
    "MedianResult",
    "DecisionResult",
    "check_separation",
    "geometric_median",
    "difference_set",
    "total_distance",
    "decide_cdut",
    "verify_emd_equivalence",
]


class SeparationError(ValueError):
    """B is not separated enough for the decision guarantee to hold."""

    def __init__(self, certificate: "SeparationCertificate"):
        self.certificate = certificate
        super().__init__(
            f"separation violated: min pairwise distance {certificate.min_pairwise_b:.6g} "
            f"< required {certificate.threshold:.6g}"
        )


class AssumptionError(ValueError):
    """An extra structural assumption failed, so the answer would be undefined."""


@dataclass(frozen=True)
class SeparationCertificate:
    c: float
    radius: float
    min_pairwise_b: float
    threshold: float
    holds: bool


@dataclass(frozen=True)
class DifferenceSet:
    """Per-point difference vectors b_assigned - a at one translation."""

    deltas: np.ndarray
    translation: np.ndarray
    assignment: np.ndarray


@dataclass(frozen=True)
class MedianResult:
    point: np.ndarray
    total_distance: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class DecisionResult:
    answer: str  # "YES" or "NO"
    certificate: SeparationCertificate
    evidence: ChamferReport
    translations_tested: int

    @property
    def yes(self) -> bool:
        return self.answer == "YES"


def _min_pairwise(points: np.ndarray, metric: Metric) -> float:
    n = len(points)
    if n < 2:
        return math.inf
    best = math.inf
    for i in range(n - 1):
        d = metric.norms(points[i + 1 :] - points[i])
        best = min(best, float(d.min()))
    return best


def check_separation(
    b: PointSet, c: float, radius: float, m: int, metric: Metric = L2
) -> SeparationCertificate:
    """Exact all-pairs check of the separation assumption on B."""
    if not c > 1.0:
        raise ValueError("separation factor c must exceed 1")
    if not radius > 0.0:
        raise ValueError("decision radius must be positive")
    if m < 1:
        raise ValueError("m must be a positive point count")
    threshold = (c + 1.0) * (1.0 + 2.0 / m) * radius
    min_pairwise = _min_pairwise(b.points, metric)
    return SeparationCertificate(
        c=c,
        radius=radius,
        min_pairwise_b=min_pairwise,
        threshold=threshold,
        holds=min_pairwise >= threshold,
    )


def geometric_median(points, additive_accuracy: float, max_iter: Optional[int] = None) -> MedianResult:
    """Iteratively reweighted least squares for the geometric median.

    Starts at the coordinate-wise mean and stops once the iterate moves less
    than additive_accuracy / 2.  If the iterate lands exactly on an input
    point, the subgradient condition decides whether that point is optimal;
    otherwise the step deflects off the singularity and continues.
    """
    p = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if p.shape[0] == 0:
        raise ValueError("point list must be nonempty")
    if not additive_accuracy > 0.0:
        raise ValueError("additive accuracy must be positive")
    k, d = p.shape
    cap = max_iter if max_iter is not None else 10 * k * d + 1000
    x = p.mean(axis=0)
    converged = False
    it = 0
    for it in range(1, cap + 1):
        dist = np.sqrt(np.sum((p - x) ** 2, axis=-1))
        on_point = dist == 0.0
        hits = int(on_point.sum())
        if hits == k:
            converged = True
            break
        away = p[~on_point]
        d_away = dist[~on_point]
        # weights scaled by the smallest distance so reciprocals cannot
        # overflow when an iterate creeps within a few ulps of a point
        scaled = d_away.min() / d_away
        pull = (away * scaled[:, None]).sum(axis=0) / scaled.sum()
        if hits:
            # at a data point: optimal iff the pull from the remaining
            # points is no stronger than the point's own multiplicity
            residual = ((away - x) / d_away[:, None]).sum(axis=0)
            r = float(np.sqrt(np.sum(residual**2)))
            if r <= hits:
                converged = True
                break
            beta = hits / r
            new_x = (1.0 - beta) * pull + beta * x
        else:
            new_x = pull
        step = float(np.sqrt(np.sum((new_x - x) ** 2)))
        x = new_x
        if step < additive_accuracy / 2.0:
            converged = True
            break
    total = float(np.sum(np.sqrt(np.sum((p - x) ** 2, axis=-1))))
    return MedianResult(point=x, total_distance=total, iterations=it, converged=converged)


def difference_set(a: PointSet, b: PointSet, t, metric: Metric = L2) -> DifferenceSet:
    """Difference vectors induced by the exact nearest-neighbor assignment at t."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    index = build_index(b, metric)
    _, idx = index.query_many(a.points + t)
    return DifferenceSet(deltas=b.points[idx] - a.points, translation=t, assignment=idx)


def total_distance(deltas: np.ndarray, point: np.ndarray, metric: Metric = L2) -> float:
    """Sum of metric distances from the difference vectors to ``point``."""
    return float(np.sum(metric.norms(np.asarray(deltas) - np.asarray(point))))


def decide_cdut(
    a: PointSet,
    b: PointSet,
    radius: float,
    epsilon: float,
    c: float,
    seed: int = 0,
    anchors: int = 6,
    metric: Metric = L2,
) -> DecisionResult:
    """YES if CDuT(A,B) <= R, NO if it exceeds R(1 + eps); either in between.

    Requires the separation assumption on B and refuses to run without it.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    m = len(a)
    certificate = check_separation(b, c, radius, m, metric)
    if not certificate.holds:
        raise SeparationError(certificate)

    rng = np.random.default_rng(seed)
    anchor_idx = rng.integers(0, m, size=max(1, anchors))
    translations = (b.points[None, :, :] - a.points[anchor_idx][:, None, :]).reshape(-1, a.dim)
    ladder = build_ladder(
        b,
        c,
        U=bbox_diameter(a, metric) + bbox_diameter(b, metric),
        seed=seed,
        metric=metric,
        miss_prob=min(0.1, 1.0 / (4.0 * m)),
    )
    queries = (translations[:, None, :] + a.points[None, :, :]).reshape(-1, a.dim)
    _, nn_idx = ladder.query_batch(queries)
    nn_idx = nn_idx.reshape(len(translations), m)

    accuracy = epsilon * radius / m
    bound = radius * (1.0 + epsilon)
    best_s = math.inf
    best_evidence = None
    for row, t in enumerate(translations):
        deltas = b.points[nn_idx[row]] - a.points
        median = geometric_median(deltas, accuracy)
        s = total_distance(deltas, median.point, metric)
        if s < best_s:
            best_s = s
            best_evidence = ChamferReport(
                value=s,
                translation=median.point,
                assignment=nn_idx[row],
                algorithm="decide",
                epsilon=epsilon,
                c=c,
                seed=seed,
                extras={"candidate": t.tolist(), "median_converged": median.converged},
            )
        if s <= bound:
            return DecisionResult("YES", certificate, best_evidence, row + 1)
    return DecisionResult("NO", certificate, best_evidence, len(translations))


def verify_emd_equivalence(a: PointSet, b: PointSet, radius: float, epsilon: float, t_star) -> bool:
    """Whether the nearest-neighbor assignment at ``t_star`` is injective.

    Requires all pairwise distances within A to exceed R(1 + eps); under
    that assumption a Chamfer assignment of cost at most R(1 + eps) is also
    a valid one-to-one transport plan, so the Chamfer and one-to-one
    variants agree on the decision.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    bound = radius * (1.0 + epsilon)
    if len(a) > 1:
        min_a = _min_pairwise(a.points, L2)
        if not min_a > bound:
            raise AssumptionError(
                f"pairwise distances in A must exceed {bound:.6g}; found {min_a:.6g}"
            )
    ds = difference_set(a, b, t_star)
    return int(np.unique(ds.assignment).size) == len(a)
