"""Multi-scale locality-sensitive hashing for approximate nearest neighbors.

The ladder keeps one LSH structure per radius R_i = c^(i-1) * L up to U,
plus an exact hash table for distance-0 lookups.  A query walks the scales
for the smallest radius at which some point of B lands in its bucket within
c * R_i, recomputing every candidate distance exactly, so the reported
distance is the true distance to a real point of B and can never
underestimate the nearest-neighbor distance.  If every scale misses, the
query falls back to an exact linear scan.

Hash families: quantized Gaussian projections for l2, Cauchy projections
for l1, and quantized coordinate sampling for linf.  Widths, concatenation
depth and table counts are sized from the family's collision probabilities
so a single scale answers its (R, cR) near-neighbor question with
probability at least 1 - miss_prob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import L2, Metric, PointSet, bbox_diameter, build_index

__all__ = ["ScaleLadder", "AnnAnswer", "build_ladder"]

_MAX_SCALES = 80
_MAX_HASHES = 40
_MAX_TABLES = 160


@dataclass(frozen=True)
class AnnAnswer:
    """Reported neighbor: index into B (or None) and its exact distance."""

    index: Optional[int]
    distance: float


def _phi(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _collision_prob(family: str, s: float) -> float:
    """Single-hash collision probability at bucket-width-to-distance ratio s."""
    if family == "gaussian":
        return max(
            1e-9,
            1.0 - 2.0 * _phi(-s) - (2.0 / (math.sqrt(2.0 * math.pi) * s)) * (1.0 - math.exp(-s * s / 2.0)),
        )
    if family == "cauchy":
        return max(1e-9, 2.0 * math.atan(s) / math.pi - math.log(1.0 + s * s) / (math.pi * s))
    # coordinate sampling: a pair within distance r collides on one
    # quantized coordinate with probability at least 1 - r/w
    return max(1e-9, 1.0 - 1.0 / s)


def _family_for(metric: Metric) -> str:
    return {1.0: "cauchy", 2.0: "gaussian", math.inf: "coord"}[metric.p]


def _row_hash(points: np.ndarray, mults: np.ndarray) -> np.ndarray:
    bits = np.ascontiguousarray(points).view(np.uint64)
    return (bits * mults).sum(axis=1, dtype=np.uint64)


class _Table:
    """One hash table: K concatenated quantized projections over B."""

    def __init__(self, points: np.ndarray, width: float, family: str, k: int, rng):
        d = points.shape[1]
        if family == "gaussian":
            proj = rng.standard_normal((d, k))
        elif family == "cauchy":
            proj = rng.standard_cauchy((d, k))
        else:
            proj = np.zeros((d, k))
            proj[rng.integers(0, d, size=k), np.arange(k)] = 1.0
        self.proj = proj
        self.offsets = rng.uniform(0.0, width, size=k)
        self.width = width
        self.combiner = (rng.integers(1, 2**62, size=k, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
        ids = self.hash_points(points)
        self.order = np.argsort(ids, kind="stable")
        self.sorted_ids = ids[self.order]

    def hash_points(self, pts: np.ndarray) -> np.ndarray:
        codes = np.floor((pts @ self.proj + self.offsets) / self.width).astype(np.int64)
        return (codes.astype(np.uint64) * self.combiner).sum(axis=1, dtype=np.uint64)

    def candidates(self, qids: np.ndarray):
        """Ragged bucket lookup: (query row repeats, member indices into B)."""
        left = np.searchsorted(self.sorted_ids, qids, side="left")
        right = np.searchsorted(self.sorted_ids, qids, side="right")
        counts = right - left
        nz = np.flatnonzero(counts)
        if nz.size == 0:
            return None, None
        c = counts[nz]
        rep = np.repeat(nz, c)
        ends = np.cumsum(c)
        flat = np.arange(ends[-1]) - np.repeat(ends - c, c) + np.repeat(left[nz], c)
        return rep, self.order[flat]


class _Scale:
    def __init__(self, radius: float, tables: list[_Table]):
        self.radius = radius
        self.tables = tables


class ScaleLadder:
    """Immutable multi-scale near-neighbor structure over one point set."""

    def __init__(
        self,
        source: PointSet,
        metric: Metric,
        c: float,
        L: float,
        U: float,
        scales: list[_Scale],
        seed: int,
    ):
        self.source = source
        self.metric = metric
        self.c = c
        self.L = L
        self.U = U
        self.scales = scales
        self.seed = seed
        pts = source.points
        mults = np.random.default_rng(seed ^ 0x5EED).integers(
            1, 2**63, size=pts.shape[1], dtype=np.uint64
        )
        self._row_mults = mults
        hashes = _row_hash(pts, mults)
        order = np.argsort(hashes, kind="stable")
        keep = np.ones(order.size, dtype=bool)
        keep[1:] = hashes[order][1:] != hashes[order][:-1]
        self._exact_ids = hashes[order][keep]
        self._exact_idx = order[keep]  # lowest index per hash (stable sort)
        self._fallback = build_index(source, metric)

    @property
    def scale_radii(self) -> list[float]:
        return [s.radius for s in self.scales]

    # -- queries -------------------------------------------------------------

    def _exact_lookup(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Distance-0 seeds from the exact table (inf / -1 where absent)."""
        ids = _row_hash(q, self._row_mults)
        pos = np.searchsorted(self._exact_ids, ids)
        pos = np.minimum(pos, self._exact_ids.size - 1)
        hit = self._exact_ids[pos] == ids
        idx = np.where(hit, self._exact_idx[pos], -1)
        dist = np.full(len(q), np.inf)
        if np.any(hit):
            rows = np.flatnonzero(hit)
            d = self.metric.norms(q[rows] - self.source.points[idx[rows]])
            zero = d == 0.0
            dist[rows[zero]] = 0.0
            idx[rows[~zero]] = -1
        return dist, idx.astype(np.int64)

    def _probe_table(self, table: _Table, q: np.ndarray, rows: np.ndarray, best_d, best_i) -> None:
        rep, cand = table.candidates(table.hash_points(q[rows]))
        if rep is None:
            return
        d = self.metric.norms(q[rows][rep] - self.source.points[cand])
        order = np.lexsort((cand, d, rep))
        first = np.ones(order.size, dtype=bool)
        first[1:] = rep[order][1:] != rep[order][:-1]
        sel = order[first]
        qrows = rows[rep[sel]]
        dd, ii = d[sel], cand[sel]
        better = (dd < best_d[qrows]) | ((dd == best_d[qrows]) & (ii < best_i[qrows]))
        qrows, dd, ii = qrows[better], dd[better], ii[better]
        best_d[qrows] = dd
        best_i[qrows] = ii

    def query_batch(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Reported (distance, index) per query row; exact-scan fallback on miss.

        Walks the scales in increasing radius, retiring a query as soon as a
        verified candidate lies within c * R_i.  Earlier candidates carry
        forward, so the success predicate is monotone in the scale.
        """
        q = np.ascontiguousarray(np.asarray(queries, dtype=np.float64))
        if q.ndim != 2 or q.shape[1] != self.source.dim:
            raise ValueError(f"queries must have shape (*, {self.source.dim})")
        best_d, best_i = self._exact_lookup(q)
        active = np.flatnonzero(best_d > 0.0)
        for scale in self.scales:
            if active.size == 0:
                break
            cutoff = self.c * scale.radius
            for table in scale.tables:
                self._probe_table(table, q, active, best_d, best_i)
                active = active[best_d[active] > cutoff]
                if active.size == 0:
                    break
        # queries that never met a scale's cutoff missed every scale: exact scan
        if active.size:
            d, i = self._fallback.query_many(q[active])
            best_d[active] = d
            best_i[active] = i
        return best_d, best_i

    def query(self, point) -> AnnAnswer:
        """Single query via binary search over the scales."""
        q = np.ascontiguousarray(np.asarray(point, dtype=np.float64).reshape(1, -1))
        if q.shape[1] != self.source.dim:
            raise ValueError(f"query has dimension {q.shape[1]}, expected {self.source.dim}")
        best_d, best_i = self._exact_lookup(q)
        if best_d[0] == 0.0:
            return AnnAnswer(int(best_i[0]), 0.0)
        rows = np.array([0])
        lo, hi = 0, len(self.scales) - 1
        succeeded = False
        while lo <= hi:
            mid = (lo + hi) // 2
            scale = self.scales[mid]
            for table in scale.tables:
                self._probe_table(table, q, rows, best_d, best_i)
                if best_d[0] <= self.c * scale.radius:
                    break
            if best_d[0] <= self.c * scale.radius:
                succeeded = True
                hi = mid - 1
            else:
                lo = mid + 1
        if not succeeded:
            d, i = self._fallback.query_many(q)
            return AnnAnswer(int(i[0]), float(d[0]))
        return AnnAnswer(int(best_i[0]), float(best_d[0]))

    def scale_hits(self, point) -> list[bool]:
        """Per-scale success flags with candidates carried across scales."""
        q = np.ascontiguousarray(np.asarray(point, dtype=np.float64).reshape(1, -1))
        best_d, best_i = self._exact_lookup(q)
        rows = np.array([0])
        hits = []
        for scale in self.scales:
            for table in scale.tables:
                self._probe_table(table, q, rows, best_d, best_i)
            hits.append(bool(best_d[0] <= self.c * scale.radius))
        return hits


def _scale_parameters(family: str, n: int, c: float, width_factor: float, miss_prob: float):
    p1 = _collision_prob(family, width_factor)
    p2 = _collision_prob(family, width_factor / c)
    k = max(1, min(_MAX_HASHES, math.ceil(math.log(max(n, 2)) / math.log(1.0 / p2))))
    hit = p1**k
    tables = max(1, min(_MAX_TABLES, math.ceil(math.log(1.0 / miss_prob) / -math.log1p(-hit))))
    return k, tables


def _build_scale(points, radius, family, n, c, width_factor, miss_prob, rng) -> _Scale:
    k, tables = _scale_parameters(family, n, c, width_factor, miss_prob)
    width = width_factor * radius
    return _Scale(radius, [_Table(points, width, family, k, rng) for _ in range(tables)])


def _has_close_bucket_pair(scale: _Scale, points: np.ndarray, metric: Metric, cutoff: float) -> bool:
    """Whether any table puts two distinct points in one bucket within cutoff."""
    for table in scale.tables:
        ids = table.sorted_ids
        order = table.order
        start = 0
        for end in range(1, ids.size + 1):
            if end == ids.size or ids[end] != ids[start]:
                if end - start > 1:
                    members = points[order[start:end]]
                    diffs = metric.norms(members[:, None, :] - members[None, :, :])
                    close = diffs[(diffs > 0.0) & (diffs <= cutoff)]
                    if close.size:
                        return True
                start = end
    return False


def build_ladder(
    b: PointSet,
    c: float,
    L: Optional[float] = None,
    U: Optional[float] = None,
    seed: int = 0,
    metric: Metric = L2,
    miss_prob: float = 0.1,
    width_factor: float = 4.0,
) -> ScaleLadder:
    """Build the multi-scale structure over ``b``.

    ``U`` defaults to the bounding-box diameter of ``b``; callers comparing
    against a second set should pass diam(A) + diam(B).  When ``L`` is not
    given, scales are grown downward from U and construction stops at the
    first scale where no two distinct points share a bucket within c * R,
    below which any query has at most one candidate anyway.
    """
    if not c > 1.0:
        raise ValueError("approximation factor c must exceed 1")
    if not 0.0 < miss_prob < 1.0:
        raise ValueError("miss_prob must lie in (0, 1)")
    family = _family_for(metric)
    pts = b.points
    n = len(b)
    distinct = np.unique(pts, axis=0)
    if U is None:
        U = bbox_diameter(b, metric)
    if distinct.shape[0] < 2 or U <= 0.0:
        return ScaleLadder(b, metric, c, L or 0.0, U or 0.0, [], seed)
    rng = np.random.default_rng(seed)
    scales: list[_Scale] = []
    if L is not None:
        if not 0.0 < L <= U:
            raise ValueError("bounds must satisfy 0 < L <= U")
        count = max(1, math.ceil(math.log(U / L) / math.log(c))) if U > L else 1
        if count > _MAX_SCALES:
            raise ValueError(f"{count} scales requested; cap is {_MAX_SCALES}")
        for i in range(count):
            scales.append(_build_scale(pts, (c**i) * L, family, n, c, width_factor, miss_prob, rng))
    else:
        radius = float(U)
        for _ in range(_MAX_SCALES):
            scale = _build_scale(pts, radius, family, n, c, width_factor, miss_prob, rng)
            scales.append(scale)
            if not _has_close_bucket_pair(scale, pts, metric, c * radius):
                break
            radius /= c
        scales.reverse()
        L = scales[0].radius
    return ScaleLadder(b, metric, c, float(L), float(U), scales, seed)
