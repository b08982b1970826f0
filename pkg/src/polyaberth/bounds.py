"""A-posteriori certificates: inclusion disks and cluster analysis.

Around a set of N approximations x_i to the roots of p = det P, the disks of
radius N |p(x_i) / (p_N prod_{j != i} (x_i - x_j))| (Smith) cover the whole
root set, and every connected component of c overlapping disks contains
exactly c roots.  The cheaper Henrici disk N |p(x_i)/p'(x_i)| contains at
least one root but has neither covering nor counting property.  All radius
arithmetic is carried in the log domain: the distance products and |p(x_i)|
overflow or underflow long before the radii become meaningless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import lu_factor, point_diagnostics, rank_lower_bound
from .matpoly import MatrixPolynomial

__all__ = [
    "DiskKind",
    "InclusionDisk",
    "ClusterReport",
    "SingularLeadingError",
    "smith_disks",
    "henrici_disks",
    "cluster_analysis",
]

_EPS = float(np.finfo(np.float64).eps)


class SingularLeadingError(ValueError):
    """det P_k = 0: the Smith family is unavailable.

    Use Henrici disks, or solve through a Moebius substitution that moves the
    infinite eigenvalues into the finite plane first.
    """


class DiskKind(str, Enum):
    SMITH = "smith"
    HENRICI = "henrici"

    def __str__(self) -> str:
        return self.value


@dataclass
class InclusionDisk:
    """Disk D(center, exp(log_radius)); log_radius -inf marks an exact root."""

    center: complex
    log_radius: float
    kind: DiskKind
    cluster_id: int | None = None

    @property
    def radius(self) -> float:
        """Linear radius, saturating to +inf on overflow."""
        try:
            return math.exp(self.log_radius)
        except OverflowError:
            return math.inf

    def contains(self, x: complex) -> bool:
        d = abs(x - self.center)
        if d == 0.0:
            return True
        return math.log(d) <= self.log_radius


@dataclass
class ClusterReport:
    """Connected components of the disk-overlap graph."""

    clusters: list[tuple[list[int], int]]
    isolated: list[int]


def _log_abs_det_coeff(A: np.ndarray) -> float:
    f = lu_factor(A)
    d = np.abs(np.diagonal(f.lu))
    if (d == 0.0).any():
        return -math.inf
    return float(np.log(d).sum())


def smith_disks(P: MatrixPolynomial, xs) -> list[InclusionDisk]:
    """Inclusion disks around xs; requires nonsingular P_k and len(xs) = n*k.

    log r_i = log N + log|p(x_i)| - log|det P_k| - sum_{j != i} log|x_i - x_j|
    with |p(x_i)| taken from the pivots of the one factorization of P(x_i).
    """
    n, k = P.n, P.k
    N = n * k
    tol = n * max(k, 1) * _EPS
    if rank_lower_bound(P.coeffs[k], tol)[1] > 0:
        raise SingularLeadingError(
            "P_k is numerically singular; Smith disks need the full degree"
        )
    xs = [complex(x) for x in xs]
    if len(xs) != N:
        raise ValueError(f"need exactly n*k = {N} approximations, got {len(xs)}")
    log_pn = _log_abs_det_coeff(P.coeffs[k])
    log_n = math.log(N)
    xarr = np.asarray(xs, dtype=np.complex128)
    disks = []
    for i, x in enumerate(xs):
        d = point_diagnostics(P, x)
        dist = np.abs(x - xarr)
        dist[i] = 1.0
        if (dist == 0.0).any():
            raise ValueError("approximations must be pairwise distinct")
        log_prod = float(np.log(dist).sum())
        log_r = log_n + d.log_abs_det - log_pn - log_prod
        disks.append(InclusionDisk(x, log_r, DiskKind.SMITH))
    return disks


def henrici_disks(P: MatrixPolynomial, xs) -> list[InclusionDisk]:
    """Disks of radius N |p(x_i)/p'(x_i)|; each contains at least one root.

    Works with a singular leading coefficient, but the family has no covering
    or per-component counting property.
    """
    N = P.n * P.k
    disks = []
    for x in xs:
        x = complex(x)
        d = point_diagnostics(P, x)
        nc = abs(d.newton_correction)
        log_r = -math.inf if nc == 0.0 else math.log(N) + math.log(nc)
        disks.append(InclusionDisk(x, log_r, DiskKind.HENRICI))
    return disks


def _log_add(a: float, b: float) -> float:
    """log(exp(a) + exp(b)) without leaving the log domain."""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def cluster_analysis(disks: list[InclusionDisk]) -> ClusterReport:
    """Union-find over pairwise disk overlap; assigns cluster_id in place.

    Meaningful for the Smith family only: a component of c disks is certified
    to contain exactly c eigenvalues.
    """
    m = len(disks)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i in range(m):
        for j in range(i + 1, m):
            dist = abs(disks[i].center - disks[j].center)
            log_dist = -math.inf if dist == 0.0 else math.log(dist)
            if log_dist <= _log_add(disks[i].log_radius, disks[j].log_radius):
                union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    clusters = []
    isolated = []
    for cid, members in enumerate(sorted(groups.values(), key=lambda g: g[0])):
        for i in members:
            disks[i].cluster_id = cid
        clusters.append((members, len(members)))
        if len(members) == 1:
            isolated.append(members[0])
    return ClusterReport(clusters, isolated)
