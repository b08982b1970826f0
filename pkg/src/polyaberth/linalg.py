"""Complex dense LU/QR kernels and the per-point quantities the solver needs.

Everything here works on one point x at a time: factor P(x) once, then derive
the Newton correction through the trace identity
(log det P)'(x) = tr(P(x)^{-1} P'(x)), the log-magnitude of det P(x) from the
pivots, and a 1-norm reciprocal-condition estimate used by the stop test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr as _qr
from scipy.linalg import solve_triangular as _trisolve

__all__ = [
    "LUFactors",
    "PointDiagnostics",
    "lu_factor",
    "lu_solve",
    "lu_solve_adjoint",
    "point_diagnostics",
    "rank_lower_bound",
    "null_vector",
    "norm1",
]

_EPS = float(np.finfo(np.float64).eps)


def norm1(A: np.ndarray) -> float:
    """Induced 1-norm (maximum column sum of magnitudes)."""
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=0).max())


@dataclass
class LUFactors:
    """Packed partial-pivoting LU: perm selects rows so A[perm] = L @ U.

    ``lu`` stores the unit-lower factor strictly below the diagonal and U on
    and above it.  ``swap_count`` tracks pivoting parity (for determinant
    signs) and ``zero_pivots`` records columns whose pivot was exactly zero;
    elimination continues past them so downstream code can treat the point as
    an exact eigenvalue hit instead of an error.
    """

    lu: np.ndarray
    perm: np.ndarray
    swap_count: int
    zero_pivots: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(A: np.ndarray) -> LUFactors:
    """Partial-pivoting LU of a square complex matrix."""
    A = np.array(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    perm = np.arange(n)
    swaps = 0
    zero_pivots: list[int] = []
    for j in range(n):
        p = j + int(np.argmax(np.abs(A[j:, j])))
        if A[p, j] == 0:
            # whole remaining column is zero; record and move on
            zero_pivots.append(j)
            continue
        if p != j:
            A[[j, p]] = A[[p, j]]
            perm[[j, p]] = perm[[p, j]]
            swaps += 1
        A[j + 1 :, j] /= A[j, j]
        if j + 1 < n:
            A[j + 1 :, j + 1 :] -= np.outer(A[j + 1 :, j], A[j, j + 1 :])
    return LUFactors(A, perm, swaps, tuple(zero_pivots))


def lu_solve(f: LUFactors, b: np.ndarray) -> np.ndarray:
    """Solve A x = b given the factorization of A."""
    y = _trisolve(f.lu, b[f.perm], lower=True, unit_diagonal=True, check_finite=False)
    return _trisolve(f.lu, y, lower=False, check_finite=False)


def lu_solve_adjoint(f: LUFactors, b: np.ndarray) -> np.ndarray:
    """Solve A^H x = b given the factorization of A."""
    y = _trisolve(f.lu, b, lower=False, trans="C", check_finite=False)
    t = _trisolve(f.lu, y, lower=True, unit_diagonal=True, trans="C", check_finite=False)
    out = np.empty_like(t)
    out[f.perm] = t
    return out


def _inv_norm1_estimate(f: LUFactors, A: np.ndarray) -> float:
    """Estimate of ||A^{-1}||_1 from the LU factors.

    Exact for n <= 2 (closed-form inverse); otherwise a Hager-style 1-norm
    estimator capped at 5 iterations, O(n^2) per solve.
    """
    n = f.n
    if n == 1:
        return 1.0 / abs(A[0, 0])
    if n == 2:
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        c0 = abs(A[1, 1]) + abs(A[1, 0])
        c1 = abs(A[0, 0]) + abs(A[0, 1])
        return max(c0, c1) / abs(det)
    x = np.full(n, 1.0 / n, dtype=np.complex128)
    est = 0.0
    for it in range(5):
        y = lu_solve(f, x)
        g = float(np.abs(y).sum())
        if it > 0 and g <= est:
            break
        est = max(est, g)
        ay = np.abs(y)
        xi = np.where(ay > 0, y / np.where(ay > 0, ay, 1.0), 1.0 + 0.0j)
        z = lu_solve_adjoint(f, xi)
        jmax = int(np.argmax(np.abs(z)))
        if np.abs(z[jmax]) <= float(np.real(np.vdot(z, x))) + _EPS * est:
            break
        x = np.zeros(n, dtype=np.complex128)
        x[jmax] = 1.0
    return est


@dataclass
class PointDiagnostics:
    """Everything the iteration wants to know about one evaluation point.

    ``dlog`` is p'(x)/p(x) = tr(P(x)^{-1} P'(x)) and ``newton_correction`` its
    reciprocal p(x)/p'(x).  ``exact_root`` marks an exactly singular P(x)
    (zero pivot); in that case the correction is 0 and rcond is 0.
    ``trace_zero`` marks a vanishing trace (critical point of det P), where
    the Newton correction is infinite.
    """

    newton_correction: complex
    log_abs_det: float
    rcond: float
    dlog: complex = 0.0 + 0.0j
    exact_root: bool = False
    trace_zero: bool = False
    finite: bool = True
    norm1: float = math.nan
    inv_norm1: float = math.nan
    eta: float = math.nan


_NONFINITE = PointDiagnostics(
    newton_correction=complex(math.nan, math.nan),
    log_abs_det=math.nan,
    rcond=0.0,
    dlog=complex(math.nan, math.nan),
    finite=False,
)


def point_diagnostics(
    P,
    x: complex,
    *,
    alpha: float | None = None,
) -> PointDiagnostics:
    """Factor P(x) once and derive correction, log|det| and rcond.

    O(n^3 + k n^2) per call.  When ``alpha`` (the backward-error weight at x)
    is supplied, the backward error eta = 1 / (||P(x)^{-1}||_2 (1 + alpha)) is
    estimated as well, approximating the 2-norm by the 1-norm estimate over
    sqrt(n).
    """
    from .matpoly import eval_pair

    V, D = eval_pair(P, x)
    if not (np.isfinite(V).all() and np.isfinite(D).all()):
        return _NONFINITE
    f = lu_factor(V)
    udiag = np.abs(np.diagonal(f.lu))
    if f.zero_pivots:
        return PointDiagnostics(
            newton_correction=0.0 + 0.0j,
            log_abs_det=-math.inf,
            rcond=0.0,
            dlog=complex(math.inf, 0.0),
            exact_root=True,
            norm1=norm1(V),
            inv_norm1=math.inf,
            eta=0.0,
        )
    log_abs_det = float(np.log(udiag).sum())
    X = lu_solve(f, D)
    tr = complex(np.trace(X))
    n1 = norm1(V)
    invn = _inv_norm1_estimate(f, V)
    rcond = 0.0 if invn == 0.0 else 1.0 / (n1 * invn)
    rcond = min(1.0, max(0.0, rcond))
    if tr == 0:
        newton = complex(math.inf, 0.0)
        trace_zero = True
    else:
        newton = 1.0 / tr
        trace_zero = False
    eta = math.nan
    if alpha is not None:
        inv2 = invn / math.sqrt(f.n)
        eta = 1.0 / (inv2 * (1.0 + alpha)) if inv2 > 0 else math.inf
    return PointDiagnostics(
        newton_correction=newton,
        log_abs_det=log_abs_det,
        rcond=rcond,
        dlog=tr,
        trace_zero=trace_zero,
        norm1=n1,
        inv_norm1=invn,
        eta=eta,
    )


def rank_lower_bound(A: np.ndarray, tol: float) -> tuple[int, int]:
    """(rank, nullity) from a column-pivoted QR.

    Counts diagonal entries of R above tol * |r_11|; the nullity of a
    constant coefficient lower-bounds the corresponding eigenvalue
    multiplicity at zero (for P_0) or infinity (for P_k).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    A = np.asarray(A, dtype=np.complex128)
    n = min(A.shape)
    if not A.any():
        return 0, A.shape[1]
    R = _qr(A, mode="r", pivoting=True, check_finite=False)[0]
    d = np.abs(np.diagonal(R))
    if d[0] == 0.0:
        return 0, A.shape[1]
    rank = int((d > tol * d[0]).sum())
    return rank, A.shape[1] - rank


def null_vector(P, lam: complex) -> np.ndarray:
    """Approximate unit null vector of P(lam) by two inverse-iteration steps.

    Exact singularity is regularized with a relative eps shift; the returned
    vector is the iterate with the smallest residual ||P(lam) v||_2.  No error
    is raised when lam is far from the spectrum; the residual is simply large.
    """
    from .matpoly import eval_at

    V = eval_at(P, lam)
    n = V.shape[0]
    W = V
    f = lu_factor(W)
    if f.zero_pivots:
        shift = _EPS * (norm1(V) or 1.0)
        W = V + shift * np.eye(n)
        f = lu_factor(W)
    rng = np.random.default_rng(0x5EED0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    best = v
    best_res = float(np.linalg.norm(V @ v))
    for _ in range(2):
        w = lu_solve(f, v)
        nw = np.linalg.norm(w)
        if nw == 0 or not np.isfinite(nw):
            break
        w = w / nw
        res = float(np.linalg.norm(V @ w))
        if res < best_res:
            best, best_res = w, res
        v = w
    return best
