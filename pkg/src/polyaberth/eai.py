"""Ehrlich-Aberth driver for matrix polynomials.

The solver maintains one approximation per finite eigenvalue and refines them
simultaneously: each scalar step takes the Newton correction of det P (from
the trace identity, never from explicit determinant coefficients) divided by
the repulsion term sum 1/(y_j - y_l) over the other approximations.  Known
zero eigenvalues are pinned at the origin and eigenvalues at infinity are
removed from the vector altogether; both continue to influence the repulsion
sums so the remaining points converge to the remaining roots.

Sweep bookkeeping follows three rules: a halted component is never revisited
within one solve, its frozen value still contributes to the repulsion sums,
and active approximations are kept pairwise distinct by a tiny angular
perturbation whenever two collide.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .linalg import PointDiagnostics, point_diagnostics, rank_lower_bound
from .matpoly import MatrixPolynomial, MobiusMap, coeff_norms
from .starting import PolygonSegment, initial_points, newton_polygon

if TYPE_CHECKING:  # pragma: no cover
    from .structured import StructureSpec

__all__ = [
    "Status",
    "SolverConfig",
    "EigenEstimate",
    "SpectrumResult",
    "aberth_sum",
    "scalar_step",
    "stricter_stop",
    "detect_deflation",
    "solve",
]

_EPS = float(np.finfo(np.float64).eps)


class Status(str, Enum):
    """Why a component stopped iterating (or never started)."""

    CONVERGED_RCOND = "converged_rcond"
    CONVERGED_CORRECTION = "converged_correction"
    CONVERGED_BACKWARD = "converged_backward"
    EXACT_ROOT = "exact_root"
    DEFLATED_ZERO = "deflated_zero"
    DEFLATED_INFINITY = "deflated_infinity"
    MAX_ITERS = "max_iters"

    def __str__(self) -> str:  # cleaner in reports
        return self.value


_CONVERGED = {
    Status.CONVERGED_RCOND,
    Status.CONVERGED_CORRECTION,
    Status.CONVERGED_BACKWARD,
    Status.EXACT_ROOT,
}


@dataclass(frozen=True)
class SolverConfig:
    """Iteration variant, tolerances and deflation knobs.

    ``tau1`` (reciprocal-condition stop) defaults to n*eps and ``tau2``
    (relative-correction stop) to 4*eps when left as None.  The backward-error
    stop is off unless ``backward_tol`` is set.  ``tau1_defective_exponent``
    optionally strengthens the condition stop to tau1**m for suspected Jordan
    chains of length m; it is never applied automatically.
    """

    variant: str = "gauss_seidel"
    tau1: float | None = None
    tau2: float | None = None
    backward_tol: float | None = None
    backward_alpha_weighted: bool = False
    max_vector_iters: int = 400
    starting: str = "newton_polygon"
    circle_radius: float = 1.0
    rank_tol: float | None = None
    tau1_defective_exponent: float = 1.0
    mobius_fallback: bool = False
    threads: int = 1
    seed: int = 0
    structure: "StructureSpec | None" = None

    def __post_init__(self) -> None:
        if self.variant not in ("jacobi", "gauss_seidel"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.starting not in ("newton_polygon", "single_circle"):
            raise ValueError(f"unknown starting strategy {self.starting!r}")
        for name in ("tau1", "tau2"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.max_vector_iters < 1:
            raise ValueError("max_vector_iters must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    def resolved_tau1(self, n: int) -> float:
        base = self.tau1 if self.tau1 is not None else n * _EPS
        return base**self.tau1_defective_exponent

    def resolved_tau2(self) -> float:
        return self.tau2 if self.tau2 is not None else 4.0 * _EPS


@dataclass(frozen=True)
class EigenEstimate:
    """One approximated eigenvalue; ``value`` None encodes infinity."""

    value: complex | None
    status: Status
    iterations: int = 0
    last_correction: float = math.nan
    rcond: float = math.nan
    log_abs_det: float = math.nan

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def converged(self) -> bool:
        return self.status in _CONVERGED


@dataclass
class SpectrumResult:
    """All n*k eigenvalue estimates plus iteration accounting."""

    estimates: list[EigenEstimate]
    total_scalar_iterations: int
    vector_iterations: int
    config: SolverConfig

    @property
    def at_infinity_count(self) -> int:
        return sum(1 for e in self.estimates if e.is_infinite)

    def finite_values(self) -> list[complex]:
        return [e.value for e in self.estimates if e.value is not None]

    def values(self) -> list[complex | None]:
        return [e.value for e in self.estimates]

    @property
    def fully_converged(self) -> bool:
        return all(e.status is not Status.MAX_ITERS for e in self.estimates)


# ----------------------------------------------------------------------------
# scalar building blocks


def aberth_sum(
    y: Sequence[complex | None],
    j: int,
    split: int = 0,
    updated: Sequence[complex | None] | None = None,
    *,
    deflated_zeros: int = 0,
) -> complex:
    """Repulsion term sum_{l != j} 1/(y_j - y_l).

    In Gauss-Seidel sweeps the first ``split`` entries are taken from
    ``updated`` (the already-refreshed prefix).  ``None`` entries are
    eigenvalues at infinity and contribute nothing; ``deflated_zeros`` known
    roots pinned at the origin contribute 1/y_j each.
    """
    yj = y[j]
    if yj is None:
        raise ValueError("cannot form the repulsion sum at an infinite entry")
    total = 0.0 + 0.0j
    for ell in range(len(y)):
        if ell == j:
            continue
        v = updated[ell] if (updated is not None and ell < split) else y[ell]
        if v is None:
            continue
        d = yj - v
        if d == 0:
            raise ValueError(f"coincident approximations at indices {j} and {ell}")
        total += 1.0 / d
    if deflated_zeros:
        if yj == 0:
            raise ValueError("active approximation collided with a deflated zero")
        total += deflated_zeros / yj
    return total


def _stricter_halt(
    ac: float, ay: float, rcond: float, tau1: float, tau2: float
) -> Status | None:
    """Compound stop used near suspected clusters at 0 or infinity."""
    if ac <= tau2 * ay:
        return Status.CONVERGED_CORRECTION
    if ac <= math.sqrt(tau2) * ay and rcond < tau1:
        return Status.CONVERGED_RCOND
    return None


def stricter_stop(
    y_j: complex,
    bounds: tuple[float | None, float | None],
    diag: PointDiagnostics,
    c: complex,
    config: SolverConfig,
    n: int = 1,
) -> Status | None:
    """Stop decision for points below/above the small/large modulus bounds.

    Only meaningful when zero or infinite eigenvalues were deflated; the plain
    reciprocal-condition stop is suspended in these zones and a point halts
    only on the relative correction, or on the weakened sqrt(tau2) correction
    combined with the condition test.
    """
    small, large = bounds
    ay = abs(y_j)
    in_zone = (small is not None and ay < small) or (large is not None and ay > large)
    if not in_zone:
        return None
    return _stricter_halt(
        abs(c), ay, diag.rcond, config.resolved_tau1(n), config.resolved_tau2()
    )


def _correction(d: PointDiagnostics, A: complex) -> complex:
    """EAI correction 1/(p'/p - A); falls back to the plain Newton step."""
    den = d.dlog - A
    if den != 0 and math.isfinite(den.real) and math.isfinite(den.imag):
        c = 1.0 / den
    elif not d.trace_zero:
        c = d.newton_correction
    else:
        c = 0.0 + 0.0j
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        c = 0.0 + 0.0j
    return c


def scalar_step(
    P: MatrixPolynomial,
    y: Sequence[complex | None],
    j: int,
    diag: PointDiagnostics,
    config: SolverConfig,
    *,
    deflated_zeros: int = 0,
    small_bound: float | None = None,
    large_bound: float | None = None,
) -> tuple[complex, Status | None]:
    """One EAI update of component j with its halting decision.

    Checks run in order: exact singularity, reciprocal condition (suspended
    inside the stricter zones), relative correction, optional backward error,
    stricter compound rule.  The returned value is unchanged when the halt
    fires before the update.
    """
    tau1 = config.resolved_tau1(P.n)
    tau2 = config.resolved_tau2()
    yj = y[j]
    if diag.exact_root:
        return yj, Status.EXACT_ROOT
    ay = abs(yj)
    in_zone = (small_bound is not None and ay < small_bound) or (
        large_bound is not None and ay > large_bound
    )
    if not in_zone and diag.rcond < tau1:
        return yj, Status.CONVERGED_RCOND
    A = aberth_sum(y, j, deflated_zeros=deflated_zeros)
    c = _correction(diag, A)
    new = yj - c
    ac = abs(c)
    if in_zone:
        return new, _stricter_halt(ac, ay, diag.rcond, tau1, tau2)
    if ac <= tau2 * ay:
        return new, Status.CONVERGED_CORRECTION
    if (
        config.backward_tol is not None
        and math.isfinite(diag.eta)
        and diag.eta <= config.backward_tol
    ):
        return new, Status.CONVERGED_BACKWARD
    return new, None


# ----------------------------------------------------------------------------
# deflation of manifest zero / infinite eigenvalues


def detect_deflation(P: MatrixPolynomial, rank_tol: float) -> tuple[int, int]:
    """Lower bounds (m_zero, m_inf) on eigenvalue multiplicities at 0 and inf.

    Each bound is the nullity of the extreme coefficient plus the number of
    rows or columns that are exactly zero in both that coefficient and its
    neighbour (each such line raises the multiplicity by one more).
    """

    def _zero_lines(A: np.ndarray, B: np.ndarray) -> int:
        rows = int((~A.any(axis=1) & ~B.any(axis=1)).sum())
        cols = int((~A.any(axis=0) & ~B.any(axis=0)).sum())
        return max(rows, cols)

    n, k = P.n, P.k
    m_zero = rank_lower_bound(P.coeffs[0], rank_tol)[1]
    if m_zero and k >= 1:
        m_zero += _zero_lines(P.coeffs[0], P.coeffs[1])
    m_inf = rank_lower_bound(P.coeffs[k], rank_tol)[1]
    if m_inf and k >= 1:
        m_inf += _zero_lines(P.coeffs[k], P.coeffs[k - 1])
    total = n * k
    if m_zero + m_inf > total:  # cannot exceed the full eigenvalue count
        m_inf = min(m_inf, total)
        m_zero = min(m_zero, total - m_inf)
    return m_zero, m_inf


# ----------------------------------------------------------------------------
# the shared sweep engine


@dataclass
class CoreResult:
    """Raw engine output for the iterated (finite, non-pinned) components."""

    values: np.ndarray
    status: list[Status]
    iterations: np.ndarray
    last_correction: np.ndarray
    rcond: np.ndarray
    log_abs_det: np.ndarray
    total_scalar_iterations: int
    vector_iterations: int


def _enforce_distinct(
    y: np.ndarray,
    halted: Sequence[Status | None],
    fixed_vals: np.ndarray,
    scale_hint: float,
) -> None:
    """Perturb colliding active approximations by a relative 1e-3 rotation.

    Frozen (halted) values and pinned roots are never moved; when an active
    point collides with one of those only the active point is rotated.
    """
    m = y.size
    if m == 0:
        return
    for _attempt in range(3):
        moved = False
        allv = np.concatenate([y, fixed_vals]) if fixed_vals.size else y
        absv = np.abs(allv)
        diff = np.abs(allv[:m, None] - allv[None, :])
        thr = _EPS * (absv[:m, None] + absv[None, :])
        ii, jj = np.nonzero(diff <= thr)
        for i, j in zip(ii, jj):
            if i >= j and j < m:
                continue  # visit each pair once
            if i == j:
                continue
            i_active = halted[i] is None
            j_active = j < m and halted[j] is None
            if not (i_active or j_active):
                continue
            rot = 1e-3
            if y[i] == 0 and i_active:
                y[i] = rot * scale_hint * cmath.exp(0.4j)
                moved = True
                continue
            if i_active:
                y[i] *= 1.0 + 1j * rot
                moved = True
            if j_active:
                y[j] *= 1.0 - 1j * rot
                moved = True
        if not moved:
            return


def _sweep_engine(
    diag_fn: Callable[[complex], PointDiagnostics],
    starts: Sequence[complex],
    config: SolverConfig,
    *,
    tau1: float,
    tau2: float,
    fixed: Sequence[tuple[complex, int]] = (),
    strict_small: float | None = None,
    strict_large: float | None = None,
    scale_hint: float = 1.0,
    sweep_callback=None,
) -> CoreResult:
    """Run Jacobi or Gauss-Seidel sweeps until every component halts.

    ``fixed`` pins known roots (value, multiplicity); they are never updated
    but repel the active points.  The per-point diagnostics of one sweep are
    all taken at the sweep-start vector, which matches both variants: the
    Gauss-Seidel refinement enters only through the repulsion sums over the
    already-updated prefix.
    """
    y = np.asarray(starts, dtype=np.complex128).copy()
    m = y.size
    status: list[Status | None] = [None] * m
    iterations = np.zeros(m, dtype=np.int64)
    last_corr = np.full(m, math.nan)
    rcond_arr = np.full(m, math.nan)
    logdet_arr = np.full(m, math.nan)
    t = 0
    sweeps = 0
    jacobi = config.variant == "jacobi"
    fixed_vals = np.array([v for v, _ in fixed], dtype=np.complex128)
    fixed_mults = np.array([mu for _, mu in fixed], dtype=np.float64)
    sqrt_tau2 = math.sqrt(tau2)
    pool = (
        ThreadPoolExecutor(max_workers=config.threads)
        if jacobi and config.threads > 1 and m > 1
        else None
    )
    try:
        for sweep in range(config.max_vector_iters):
            active = [j for j in range(m) if status[j] is None]
            if not active:
                break
            sweeps = sweep + 1
            _enforce_distinct(y, status, fixed_vals, scale_hint)
            src = y.copy() if jacobi else y
            if pool is not None:
                diags = list(pool.map(diag_fn, [complex(y[j]) for j in active]))
            else:
                diags = [diag_fn(complex(y[j])) for j in active]
            for j, d in zip(active, diags):
                t += 1
                iterations[j] += 1
                if not d.finite:
                    y[j] *= 0.75  # overflowed evaluation: pull inward, retry
                    continue
                rcond_arr[j] = d.rcond
                logdet_arr[j] = d.log_abs_det
                if d.exact_root:
                    status[j] = Status.EXACT_ROOT
                    last_corr[j] = 0.0
                    continue
                yj = complex(y[j])
                ay = abs(yj)
                in_zone = (strict_small is not None and ay < strict_small) or (
                    strict_large is not None and ay > strict_large
                )
                if not in_zone and d.rcond < tau1:
                    status[j] = Status.CONVERGED_RCOND
                    continue
                diffs = yj - src
                diffs[j] = np.inf  # self term drops out
                with np.errstate(divide="ignore", invalid="ignore"):
                    A = complex((1.0 / diffs).sum())
                    if fixed_vals.size:
                        A += complex((fixed_mults / (yj - fixed_vals)).sum())
                if not (math.isfinite(A.real) and math.isfinite(A.imag)):
                    continue  # mid-sweep collision; the guard fixes it next sweep
                c = _correction(d, A)
                new = yj - c
                if not (math.isfinite(new.real) and math.isfinite(new.imag)):
                    y[j] *= 0.75
                    continue
                ac = abs(c)
                y[j] = new
                last_corr[j] = ac
                if in_zone:
                    status[j] = _stricter_halt(ac, ay, d.rcond, tau1, tau2)
                elif ac <= tau2 * ay:
                    status[j] = Status.CONVERGED_CORRECTION
                elif (
                    config.backward_tol is not None
                    and math.isfinite(d.eta)
                    and d.eta <= config.backward_tol
                ):
                    status[j] = Status.CONVERGED_BACKWARD
            if sweep_callback is not None:
                sweep_callback(sweep, y.copy(), list(status))
    finally:
        if pool is not None:
            pool.shutdown()
    final = [s if s is not None else Status.MAX_ITERS for s in status]
    return CoreResult(y, final, iterations, last_corr, rcond_arr, logdet_arr, t, sweeps)


# ----------------------------------------------------------------------------
# top-level unstructured solve


def _segments_for(P: MatrixPolynomial, config: SolverConfig, norms) -> list[PolygonSegment]:
    if config.starting == "single_circle":
        return [PolygonSegment(0, P.k, config.circle_radius)]
    return newton_polygon(norms)


def _alpha_factory(P: MatrixPolynomial, config: SolverConfig):
    """Backward-error weight alpha(x); plain sum of |x|^l by default."""
    if config.backward_tol is None:
        return None
    if config.backward_alpha_weighted:
        w = coeff_norms(P)
    else:
        w = np.ones(P.k + 1)

    def alpha(x: complex) -> float:
        ax = abs(x)
        acc = 0.0
        for c in w[::-1]:
            acc = acc * ax + c
        return float(acc)

    return alpha


def solve(
    P: MatrixPolynomial,
    config: SolverConfig | None = None,
    *,
    sweep_callback=None,
) -> SpectrumResult:
    """Approximate all n*k eigenvalues of P (zeros and infinities included).

    Manifest zero/infinite eigenvalues found by rank tests on the extreme
    coefficients are deflated up front: zeros are pinned at the origin,
    infinite ones shorten the approximation vector.  The remaining points are
    seeded on Newton-polygon circles and refined until every component halts
    or ``max_vector_iters`` is reached (reported per component, not raised).
    """
    config = config or SolverConfig()
    if P.k < 1:
        raise ValueError("the solver needs a polynomial of degree at least 1")
    if not P.coeffs.any():
        raise ValueError("zero polynomial has no eigenvalues")
    n, k = P.n, P.k
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    if config.mobius_fallback and rank_lower_bound(P.coeffs[k], rank_tol)[1] > 0:
        return _solve_mobius_fallback(P, config, sweep_callback)
    m_zero, m_inf = detect_deflation(P, rank_tol)
    norms = coeff_norms(P)
    segments = _segments_for(P, config, norms)
    count = n * k - m_zero - m_inf
    starts = initial_points(segments, n, count, drop_smallest=m_zero)
    r_min = segments[0].radius
    r_max = segments[-1].radius
    tau1 = config.resolved_tau1(n)
    tau2 = config.resolved_tau2()
    alpha = _alpha_factory(P, config)

    def diag_fn(x: complex) -> PointDiagnostics:
        return point_diagnostics(P, x, alpha=(alpha(x) if alpha else None))

    core = _sweep_engine(
        diag_fn,
        starts,
        config,
        tau1=tau1,
        tau2=tau2,
        fixed=[(0.0 + 0.0j, m_zero)] if m_zero else [],
        strict_small=r_min / 10.0 if m_zero else None,
        strict_large=r_max * 10.0 if m_inf else None,
        scale_hint=r_min,
        sweep_callback=sweep_callback,
    )
    estimates = [
        EigenEstimate(
            value=complex(core.values[j]),
            status=core.status[j],
            iterations=int(core.iterations[j]),
            last_correction=float(core.last_correction[j]),
            rcond=float(core.rcond[j]),
            log_abs_det=float(core.log_abs_det[j]),
        )
        for j in range(core.values.size)
    ]
    estimates += [
        EigenEstimate(0.0 + 0.0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
    ] * m_zero
    estimates += [EigenEstimate(None, Status.DEFLATED_INFINITY)] * m_inf
    return SpectrumResult(
        estimates, core.total_scalar_iterations, core.vector_iterations, config
    )


def _solve_mobius_fallback(
    P: MatrixPolynomial, config: SolverConfig, sweep_callback
) -> SpectrumResult:
    """Solve through a random Moebius substitution when P_k is singular.

    Eigenvalues at infinity of P become regular roots of the transformed
    polynomial near the image of infinity and are classified back afterwards.
    Triggered only by the explicit ``mobius_fallback`` flag.
    """
    n, k = P.n, P.k
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m_zero, _ = detect_deflation(P, rank_tol)
    norms = coeff_norms(P)
    segments = _segments_for(P, config, norms)
    r_gm = math.exp(sum(math.log(s.radius) for s in segments) / len(segments))
    rng = np.random.default_rng(config.seed)
    c = r_gm * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    M = MobiusMap(c, 1.0, 1.0, -c.conjugate())
    det_m = M.alpha * M.delta - M.gamma * M.beta
    pole = -M.delta / M.gamma  # = conj(c); images of infinite eigenvalues
    count = n * k - m_zero
    x_starts = initial_points(segments, n, count, drop_smallest=m_zero)
    z_starts = [M.inverse(x) for x in x_starts]
    fixed = [(M.inverse(0.0), m_zero)] if m_zero else []
    tau1 = config.resolved_tau1(n)
    tau2 = config.resolved_tau2()
    nonfinite = PointDiagnostics(
        newton_correction=complex(math.nan, math.nan),
        log_abs_det=math.nan,
        rcond=0.0,
        finite=False,
    )

    def diag_fn(z: complex) -> PointDiagnostics:
        den = M.gamma * z + M.delta
        if den == 0:
            return nonfinite
        d = point_diagnostics(P, (M.alpha * z + M.beta) / den)
        if not d.finite or d.exact_root:
            return d
        dlog_q = n * k * M.gamma / den + d.dlog * det_m / den**2
        return replace(
            d,
            dlog=dlog_q,
            newton_correction=(1.0 / dlog_q) if dlog_q != 0 else complex(math.inf, 0),
            trace_zero=dlog_q == 0,
        )

    core = _sweep_engine(
        diag_fn,
        z_starts,
        config,
        tau1=tau1,
        tau2=tau2,
        fixed=fixed,
        scale_hint=r_gm,
        sweep_callback=sweep_callback,
    )
    estimates: list[EigenEstimate] = []
    inf_scale = max(1.0, segments[-1].radius)
    for j in range(core.values.size):
        z = complex(core.values[j])
        diagnostics = dict(
            status=core.status[j],
            iterations=int(core.iterations[j]),
            last_correction=float(core.last_correction[j]),
            rcond=float(core.rcond[j]),
            log_abs_det=float(core.log_abs_det[j]),
        )
        if abs(z - pole) <= 1e-8 * max(1.0, abs(pole)):
            estimates.append(
                EigenEstimate(None, Status.DEFLATED_INFINITY, **{**diagnostics, "status": Status.DEFLATED_INFINITY})
            )
            continue
        x = M(z)
        if abs(x) > 1e14 * inf_scale:
            estimates.append(EigenEstimate(None, Status.DEFLATED_INFINITY))
            continue
        estimates.append(EigenEstimate(value=x, **diagnostics))
    estimates += [
        EigenEstimate(0.0 + 0.0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
    ] * m_zero
    return SpectrumResult(
        estimates, core.total_scalar_iterations, core.vector_iterations, config
    )
