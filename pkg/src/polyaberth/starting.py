"""Starting approximations on circles, and annulus bounds for the spectrum.

The circle radii come from the Newton polygon of the coefficient-norm
polynomial sum_i ||C_i||_2 x^i: each edge of the upper convex hull of
(i, log||C_i||) contributes one circle whose radius is the exponential of the
negated slope, carrying (i_hi - i_lo) of the scalar degree.  The annulus
bounds implement a matrix Rouche test: x^m C_m dominates the rest of the
polynomial on |x| = r when C_m^* C_m r^{2m} - Q(x)^* Q(x) is positive
definite there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .linalg import rank_lower_bound
from .matpoly import MatrixPolynomial, coeff_norms, eval_at

__all__ = [
    "PolygonSegment",
    "Annulus",
    "newton_polygon",
    "initial_points",
    "rouche_annulus",
]

_EPS = float(np.finfo(np.float64).eps)

# fixed angular offsets: break spectrum symmetries without randomness
_BASE_OFFSET = 0.4
_SEGMENT_OFFSET = 0.3


@dataclass(frozen=True)
class PolygonSegment:
    """One edge of the Newton polygon: indices [i_lo, i_hi], circle radius."""

    i_lo: int
    i_hi: int
    radius: float

    @property
    def count(self) -> int:
        return self.i_hi - self.i_lo


@dataclass
class Annulus:
    """r_lower <= |eigenvalue| <= r_upper for every finite nonzero eigenvalue.

    A bound is ``certified`` only when the scalar norm criterion (which holds
    for all points of the circle, not just samples) established it; bounds
    accepted from finitely many sample points are reported uncertified.
    """

    r_lower: float
    r_upper: float
    lower_certified: bool = False
    upper_certified: bool = False

    @property
    def certified(self) -> bool:
        return self.lower_certified and self.upper_certified


def newton_polygon(norms) -> list[PolygonSegment]:
    """Upper-hull segments of (i, log norms[i]) over indices with norms[i] > 0.

    Zero norms are minus infinity and can never be hull vertices; radii are
    strictly increasing across the returned segments.
    """
    norms = np.asarray(norms, dtype=np.float64)
    if norms.ndim != 1 or norms.size < 1:
        raise ValueError("norms must be a 1-d sequence")
    if (norms < 0).any():
        raise ValueError("norms must be nonnegative")
    idx = np.flatnonzero(norms > 0)
    if idx.size == 0:
        raise ValueError("zero polynomial: all coefficient norms vanish")
    pts = [(int(i), math.log(norms[i])) for i in idx]
    # Andrew-monotone-chain upper hull; points already sorted by abscissa
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or below the chord
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    segments = []
    for (i_lo, v_lo), (i_hi, v_hi) in zip(hull, hull[1:]):
        radius = math.exp((v_lo - v_hi) / (i_hi - i_lo))
        segments.append(PolygonSegment(i_lo, i_hi, radius))
    if not segments:
        # single vertex (monomial c x^m): all finite information collapses;
        # fall back to the unit circle carrying no finite roots
        segments.append(PolygonSegment(pts[0][0], pts[0][0] + 1, 1.0))
    return segments


def initial_points(
    segments: list[PolygonSegment],
    n: int,
    count_total: int,
    *,
    drop_smallest: int = 0,
) -> list[complex]:
    """Equally spaced points on the polygon circles, n * count per segment.

    Points are returned sorted by modulus.  When more points are generated
    than requested, ``drop_smallest`` of the smallest-radius points go first
    (deflated zero eigenvalues) and the surplus is then trimmed from the
    largest radii (deflated infinite eigenvalues).  If too few are generated
    the largest circle is topped up with interleaved angles.
    """
    if count_total < 0:
        raise ValueError("count_total must be nonnegative")
    pts: list[complex] = []
    for s, seg in enumerate(segments):
        m = n * seg.count
        if m <= 0:
            continue
        off = _BASE_OFFSET + _SEGMENT_OFFSET * s
        for j in range(m):
            theta = 2.0 * math.pi * j / m + off
            pts.append(seg.radius * cmath.exp(1j * theta))
    pts.sort(key=abs)
    if drop_smallest:
        pts = pts[drop_smallest:]
    while len(pts) < count_total:
        seg = segments[-1]
        m = n * max(seg.count, 1)
        extra = len(pts)
        theta = math.pi * (2 * extra + 1) / m + _BASE_OFFSET
        pts.append(seg.radius * cmath.exp(1j * theta))
        pts.sort(key=abs)
    return pts[:count_total]


def _tail_polynomial(P: MatrixPolynomial, m: int) -> MatrixPolynomial:
    """P with coefficient m zeroed (the Q of the Rouche split)."""
    coeffs = P.coeffs.copy()
    coeffs[m] = 0.0
    return MatrixPolynomial(coeffs)


def _dominates_at_radius(
    P: MatrixPolynomial,
    m: int,
    r: float,
    samples: int,
    nullity: int,
) -> bool:
    """Sampled positive-definiteness of C_m^* C_m r^{2m} - Q^* Q on |x| = r.

    With a rank-deficient C_m the test can never hold along null directions,
    so the ``nullity`` smallest eigenvalues are exempted; such bounds are
    reported uncertified by the caller.
    """
    Cm = P.coeffs[m]
    S = Cm.conj().T @ Cm * (r ** (2 * m))
    Q = _tail_polynomial(P, m)
    margin_base = float(np.linalg.norm(Cm) ** 2) * (r ** (2 * m))
    for j in range(samples):
        x = r * cmath.exp(2j * math.pi * j / samples)
        Qx = eval_at(Q, x)
        M = S - Qx.conj().T @ Qx
        if not np.isfinite(M).all():
            return False
        margin = 10.0 * _EPS * (margin_base + float(np.linalg.norm(Qx) ** 2))
        w = np.linalg.eigvalsh((M + M.conj().T) / 2.0)
        if w[nullity] < margin:
            return False
    return True


def _scalar_certificate(
    P: MatrixPolynomial, m: int, r: float, norms: np.ndarray, sigma_min: float
) -> bool:
    """Norm-based sufficient condition valid on the whole circle |x| = r."""
    if sigma_min <= 0.0:
        return False
    tail = sum(norms[j] * r**j for j in range(len(norms)) if j != m)
    return sigma_min * r**m > tail


def _boundary_scan(
    accept,
    anchor: float,
    want_smallest: bool,
    max_steps: int = 60,
) -> float | None:
    """Geometric factor-2 scan plus log-bisection refinement.

    Finds the smallest accepted radius at or above the transition
    (want_smallest=True) or the largest accepted radius below it.  Returns
    None when no radius in the scanned range is accepted.
    """
    r = anchor
    if accept(r):
        # walk toward the rejection boundary to tighten the bound
        step = 0.5 if want_smallest else 2.0
        good, bad = r, None
        for _ in range(max_steps):
            r *= step
            if accept(r):
                good = r
            else:
                bad = r
                break
        if bad is None:
            return good
        lo, hi = (bad, good) if want_smallest else (good, bad)
    else:
        step = 2.0 if want_smallest else 0.5
        bad, good = r, None
        for _ in range(max_steps):
            r *= step
            if accept(r):
                good = r
                break
            bad = r
        if good is None:
            return None
        lo, hi = (bad, good) if want_smallest else (good, bad)
    # bisect in log radius; keep the accepted side
    for _ in range(20):
        mid = math.sqrt(lo * hi)
        if accept(mid) == want_smallest:
            hi = mid
        else:
            lo = mid
    return hi if want_smallest else lo


def rouche_annulus(P: MatrixPolynomial, samples: int = 32) -> Annulus:
    """Annulus containing every finite nonzero eigenvalue.

    The upper bound applies the dominance test with m = k (all eigenvalues in
    the disk), the lower bound with m = 0 (no eigenvalues in the disk),
    scanning radii geometrically from Newton-polygon anchors with bisection
    refinement.  Bounds are certified only via the scalar norm criterion;
    sampled acceptance is reported uncertified.
    """
    if samples < 8:
        raise ValueError("need at least 8 samples per circle")
    k, n = P.k, P.n
    norms = coeff_norms(P)
    segments = newton_polygon(norms)
    tol = n * k * _EPS if k else n * _EPS
    annulus = Annulus(0.0, math.inf)

    for m, want_smallest in ((k, True), (0, False)):
        Cm = P.coeffs[m]
        nullity = rank_lower_bound(Cm, tol)[1] if Cm.any() else n
        if nullity >= n:
            continue  # no information from an all-zero extreme coefficient
        sig = np.linalg.svd(Cm, compute_uv=False)
        sigma_min = float(sig[-1]) if nullity == 0 else 0.0

        def accept(r: float, m=m, nullity=nullity) -> bool:
            return _dominates_at_radius(P, m, r, samples, nullity)

        anchor = segments[-1].radius if m == k else segments[0].radius
        r = _boundary_scan(accept, anchor, want_smallest)
        if r is None:
            continue
        if m == k:
            annulus.r_upper = r
            annulus.upper_certified = _scalar_certificate(P, m, r, norms, sigma_min)
        else:
            annulus.r_lower = r
            annulus.lower_certified = _scalar_certificate(P, m, r, norms, sigma_min)
    return annulus
