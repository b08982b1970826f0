"""Brute-force reference path: explicit det coefficients and scalar roots.

This module exists to check the production solver, never to feed it.  The
determinant coefficients are recovered by evaluation at scaled roots of unity
followed by an inverse DFT (the numerically fragile route the solver itself
avoids), the roots are then found by a self-contained scalar Aberth iteration
on those coefficients, and spectra are compared by greedy matching.  Trust it
only at desk scale (n*k <= 64): the interpolation radius is clamped to keep
the Vandermonde system sane, nothing more.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .matpoly import MatrixPolynomial
from .starting import initial_points, newton_polygon

__all__ = ["ScalarPoly", "MatchReport", "det_poly", "scalar_roots", "match_spectra"]

_EPS = float(np.finfo(np.float64).eps)
_TRIM_REL = 1e-10
_MAX_DEGREE = 64


@dataclass
class ScalarPoly:
    """Scalar polynomial, ascending coefficients, trailing zeros trimmed."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: complex) -> complex:
        acc = 0.0 + 0.0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc


@dataclass
class MatchReport:
    """Greedy pairing of two spectra with floored relative errors."""

    max_rel_err: float
    avg_rel_err: float
    pairing: list[tuple[int, int]]


def det_poly(P: MatrixPolynomial) -> ScalarPoly:
    """Coefficients of det P(x) by evaluation-interpolation.

    Evaluates the determinant at n*k + 1 points r * omega^j and inverts the
    DFT; r is the geometric mean of the Newton-polygon radii clamped to
    [1e-2, 1e2].  Trailing coefficients below 1e-10 of the largest are
    trimmed; the trimmed count is the number of eigenvalues at infinity.
    """
    n, k = P.n, P.k
    N = n * k
    if N > _MAX_DEGREE:
        raise ValueError(f"evaluation-interpolation is trusted only up to n*k = {_MAX_DEGREE}")
    norms = [float(np.linalg.norm(C, 2)) for C in P.coeffs]
    if not any(v > 0 for v in norms):
        raise ValueError("zero polynomial")
    segments = newton_polygon(norms)
    r = math.exp(sum(math.log(s.radius) for s in segments) / len(segments))
    r = min(max(r, 1e-2), 1e2)
    M = N + 1
    pts = r * np.exp(2j * math.pi * np.arange(M) / M)
    vals = np.empty(M, dtype=np.complex128)
    for j, x in enumerate(pts):
        acc = P.coeffs[-1].copy()
        for i in range(k - 1, -1, -1):
            acc = acc * x + P.coeffs[i]
        vals[j] = np.linalg.det(acc)
    scaled = np.fft.fft(vals) / M  # b_m = c_m r^m
    coeffs = scaled / r ** np.arange(M)
    top = np.abs(coeffs).max()
    keep = M
    while keep > 1 and abs(coeffs[keep - 1]) <= _TRIM_REL * top:
        keep -= 1
    return ScalarPoly(coeffs[:keep].copy())


def _eval_with_deriv(coeffs: np.ndarray, x: complex) -> tuple[complex, complex]:
    p = complex(coeffs[-1])
    d = 0.0 + 0.0j
    for c in coeffs[-2::-1]:
        d = d * x + p
        p = p * x + complex(c)
    return p, d


def scalar_roots(q: ScalarPoly) -> list[complex]:
    """All roots of q by a scalar Aberth iteration from polygon starts.

    Exact roots at the origin (leading zero coefficients) are split off
    first.  Stops each point on a relative correction below 4 eps or after
    500 sweeps; multiple roots converge linearly and land within about the
    usual sqrt-of-eps cluster radius.
    """
    coeffs = np.asarray(q.coeffs, dtype=np.complex128)
    if len(coeffs) < 2:
        return []
    top = np.abs(coeffs).max()
    lead = 0
    while lead < len(coeffs) - 1 and abs(coeffs[lead]) <= 1e-13 * top:
        lead += 1
    roots = [0.0 + 0.0j] * lead
    coeffs = coeffs[lead:]
    deg = len(coeffs) - 1
    if deg == 0:
        return roots
    segments = newton_polygon(np.abs(coeffs))
    y = np.array(initial_points(segments, 1, deg), dtype=np.complex128)
    halted = np.zeros(deg, dtype=bool)
    for _ in range(500):
        if halted.all():
            break
        for j in range(deg):
            if halted[j]:
                continue
            p, d = _eval_with_deriv(coeffs, y[j])
            if p == 0:
                halted[j] = True
                continue
            diffs = y[j] - y
            diffs[j] = np.inf
            with np.errstate(divide="ignore", invalid="ignore"):
                A = complex((1.0 / diffs).sum())
            den = d / p - A
            c = (p / d) if den == 0 else 1.0 / den
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                continue
            y[j] -= c
            if abs(c) <= 4.0 * _EPS * abs(y[j]):
                halted[j] = True
    return roots + list(y)


def _rel_distance(a: complex | None, b: complex | None) -> float:
    if b is None or a is None:
        return 0.0 if a is b else math.inf
    ab = abs(b)
    if ab == 0.0:
        return abs(a - b)  # absolute distance against an exact zero
    return abs(a - b) / max(ab, 1e-300)


def match_spectra(a, b) -> MatchReport:
    """Greedy nearest-neighbour matching of two equal-length spectra.

    ``None`` entries are eigenvalues at infinity and are matched to each
    other first.  Every matched error is floored at eps/2 before the maximum
    and the geometric mean are formed, so exact agreement reports the floor.
    """
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        raise ValueError(f"spectra have different sizes: {len(a)} vs {len(b)}")
    free_a = set(range(len(a)))
    free_b = set(range(len(b)))
    pairing: list[tuple[int, int]] = []
    errors: list[float] = []
    for i in sorted(free_a):
        if a[i] is None:
            for j in sorted(free_b):
                if b[j] is None:
                    pairing.append((i, j))
                    errors.append(0.0)
                    free_a.discard(i)
                    free_b.discard(j)
                    break
    while free_a:
        best = None
        for i in free_a:
            for j in free_b:
                d = _rel_distance(a[i], b[j])
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        pairing.append((i, j))
        errors.append(d)
        free_a.discard(i)
        free_b.discard(j)
    floored = [max(e, _EPS / 2.0) for e in errors]
    max_err = max(floored)
    if any(math.isinf(e) for e in floored):
        avg = math.inf
    else:
        avg = math.exp(sum(math.log(e) for e in floored) / len(floored))
    pairing.sort()
    return MatchReport(max_err, avg, pairing)
