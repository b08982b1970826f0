"""Structured Ehrlich-Aberth solves for spectra paired as {x, f(x)}.

For a self-inverse analytic f the eigenvalues of a structured problem come in
pairs {x, f(x)}.  Writing f(x) = (a x + b)/(c x - a), the substitution
z = x f(x) (for a != 0) or z = x + f(x) (for a = 0) folds each pair onto a
single point, so the iteration runs on a vector of half the length and the
pairs are recovered exactly as the two roots of a quadratic in x.  The Newton
correction of the folded polynomial comes from the unfolded trace identity by
the chain rule; the transformed polynomial is never formed.

Fixed points of f (exceptional eigenvalues) do not pair and are deflated a
priori: -1 for palindromic problems of odd scalar degree, 0 or infinity for
even/odd ones.  Skew-symmetric input is special: det P is a perfect square,
so the same driver runs on the square root with every root reported twice.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .eai import (
    CoreResult,
    EigenEstimate,
    SolverConfig,
    Status,
    _sweep_engine,
    detect_deflation,
)
from .linalg import _NONFINITE, PointDiagnostics, point_diagnostics, rank_lower_bound
from .matpoly import MatrixPolynomial, coeff_norms
from .starting import PolygonSegment, initial_points, newton_polygon

__all__ = [
    "StructureKind",
    "StructureSpec",
    "StructureMismatchError",
    "NearExceptionalError",
    "PairedSpectrum",
    "f_apply",
    "z_of_x",
    "x_branches_of_z",
    "q_newton_correction",
    "palindromic_newton_correction",
    "even_odd_newton_correction",
    "verify_structure",
    "hamiltonian_to_even_odd",
    "solve_structured",
]

_EPS = float(np.finfo(np.float64).eps)
_FIXED_POINT_TOL = 1e-6


class StructureMismatchError(ValueError):
    """Declared structure is not satisfied by the coefficients."""


class NearExceptionalError(ArithmeticError):
    """Branch point of the fold: x is too close to a fixed point of f."""


class StructureKind(str, Enum):
    NONE = "none"
    PALINDROMIC_FAMILY = "palindromic_family"
    EVEN_ODD_FAMILY = "even_odd_family"
    SKEW_SQUARE = "skew_square"
    MOBIUS_GENERAL = "mobius_general"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class StructureSpec:
    """Declared spectral symmetry {x, f(x)} with f(x) = (a x + b)/(c x - a).

    ``transpose``/``anti`` select the palindromic flavor (Rev P = +-P or
    +-P^T), ``parity`` says which coefficient index parity is symmetric for
    the even/odd family.  ``exceptional`` declares fixed points of f with odd
    multiplicity for general Moebius symmetries, where no coefficient test
    can reveal them.
    """

    kind: StructureKind
    f_coeffs: tuple[complex, complex, complex] = (0j, 1 + 0j, 1 + 0j)
    transpose: bool = True
    anti: bool = False
    parity: str = "even"
    exceptional: tuple[tuple[complex, int], ...] = ()
    verify_tol: float = 1e-12

    def __post_init__(self) -> None:
        a, b, c = self.f_coeffs
        if self.kind is StructureKind.MOBIUS_GENERAL and a * a + b * c == 0:
            raise ValueError("f is self-inverse only when a^2 + b*c != 0")
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")

    # -- constructors ------------------------------------------------------
    @classmethod
    def none(cls) -> "StructureSpec":
        return cls(StructureKind.NONE)

    @classmethod
    def palindromic(cls, transpose: bool = True, anti: bool = False) -> "StructureSpec":
        return cls(
            StructureKind.PALINDROMIC_FAMILY,
            (0j, 1 + 0j, 1 + 0j),
            transpose=transpose,
            anti=anti,
        )

    @classmethod
    def even(cls) -> "StructureSpec":
        return cls(StructureKind.EVEN_ODD_FAMILY, (1 + 0j, 0j, 0j), parity="even")

    @classmethod
    def odd(cls) -> "StructureSpec":
        return cls(StructureKind.EVEN_ODD_FAMILY, (1 + 0j, 0j, 0j), parity="odd")

    @classmethod
    def skew(cls) -> "StructureSpec":
        return cls(StructureKind.SKEW_SQUARE)

    @classmethod
    def mobius(
        cls,
        a: complex,
        b: complex,
        c: complex,
        exceptional: tuple[tuple[complex, int], ...] = (),
    ) -> "StructureSpec":
        return cls(
            StructureKind.MOBIUS_GENERAL,
            (complex(a), complex(b), complex(c)),
            exceptional=exceptional,
        )


# ----------------------------------------------------------------------------
# the fold z(x) and its inverse branches


def f_apply(spec: StructureSpec, x: complex) -> complex:
    """The pairing map f itself."""
    if spec.kind is StructureKind.SKEW_SQUARE:
        return x
    a, b, c = spec.f_coeffs
    den = c * x - a
    if den == 0:
        raise ZeroDivisionError(f"x={x} is the pole of f")
    return (a * x + b) / den


def z_of_x(spec: StructureSpec, x: complex) -> complex:
    """Forward fold: z = x f(x) when a != 0, z = x + f(x) when a = 0."""
    if spec.kind is StructureKind.SKEW_SQUARE:
        return x
    a, b, c = spec.f_coeffs
    if a != 0:
        den = c * x - a
        if den == 0:
            raise ZeroDivisionError(f"x={x} is the pole of f")
        return (a * x * x + b * x) / den
    if x == 0:
        raise ZeroDivisionError("x=0 is the pole of f for a = 0")
    return x + b / (c * x)


def _quadratic_pair(A: complex, B: complex, C: complex) -> tuple[complex, complex]:
    """Roots of A x^2 + B x + C with the product relation x1*x2 = C/A exact.

    The second root is derived from the first through the product, so the
    pair-closure identity holds to a couple of rounding errors.
    """
    if A == 0:
        raise ValueError("degenerate quadratic: leading coefficient is zero")
    if C == 0:
        return -B / A, 0.0 + 0.0j
    disc = cmath.sqrt(B * B - 4.0 * A * C)
    if (B.conjugate() * disc).real >= 0.0:
        q = -0.5 * (B + disc)
    else:
        q = -0.5 * (B - disc)
    # q = 0 would need disc = -+B, impossible here since A, C are nonzero
    x1 = q / A
    x2 = C / q
    return (x1, x2) if abs(x1) >= abs(x2) else (x2, x1)


def x_branches_of_z(spec: StructureSpec, z: complex) -> tuple[complex, complex]:
    """The two x with z(x) = z, larger modulus first; their product is exact."""
    if spec.kind is StructureKind.SKEW_SQUARE:
        return z, z
    a, b, c = spec.f_coeffs
    if a != 0:
        return _quadratic_pair(a, b - z * c, z * a)
    return _quadratic_pair(c, -z * c, b)


def _z_derivative(spec: StructureSpec, x: complex) -> complex:
    a, b, c = spec.f_coeffs
    if a != 0:
        den = c * x - a
        return a * (c * x * x - 2.0 * a * x - b) / (den * den)
    return 1.0 - b / (c * x * x)


# ----------------------------------------------------------------------------
# Newton corrections in the folded variable


def _fold_correction(
    spec: StructureSpec,
    x: complex,
    dlog: complex,
    deg: int,
) -> complex:
    """q(z)/q'(z) from p'/p at a branch x, via the chain rule.

    ``deg`` is the scalar degree of the polynomial whose roots are being
    paired (after any implicit multiplications or quotients).
    """
    a, b, c = spec.f_coeffs
    zp = _z_derivative(spec, x)
    if a != 0:
        extra = 0.0 if c == 0 else (deg / 2.0) * c / (c * x - a)
    else:
        extra = (deg / 2.0) / x
    den = dlog - extra
    if den == 0:
        return complex(math.inf, 0.0)
    return zp / den


def q_newton_correction(
    P: MatrixPolynomial,
    spec: StructureSpec,
    z: complex,
    x_branch: complex,
) -> complex:
    """Newton correction of the folded polynomial at z, evaluated through P.

    Uses the unified convention z = x f(x) (z = x + f(x) for a = 0); for the
    even/odd family this is z = -x^2, a sign flip away from the classical
    z = x^2 convention whose correction is ``even_odd_newton_correction``.
    Raises NearExceptionalError within the ill-conditioned neighbourhood of a
    fixed point of f, where unstructured refinement should take over.
    """
    d = point_diagnostics(P, x_branch)
    if spec.kind is StructureKind.SKEW_SQUARE:
        return 2.0 * d.newton_correction
    if abs(_z_derivative(spec, x_branch)) < _FIXED_POINT_TOL * (1.0 + abs(x_branch)):
        raise NearExceptionalError(
            f"x={x_branch} is too close to a fixed point of the pairing map"
        )
    return _fold_correction(spec, x_branch, d.dlog, P.n * P.k)


def palindromic_newton_correction(dlog: complex, x: complex, deg: int) -> complex:
    """Folded correction (1 - 1/x^2) / (p'/p - deg/(2x)) for z = x + 1/x."""
    return (1.0 - 1.0 / (x * x)) / (dlog - deg / (2.0 * x))


def even_odd_newton_correction(dlog: complex, x: complex) -> complex:
    """Folded correction 2 x p(x)/p'(x) in the classical z = x^2 convention."""
    return 2.0 * x / dlog


# ----------------------------------------------------------------------------
# structure verification


def _frob(A: np.ndarray) -> float:
    return float(np.linalg.norm(A))


def verify_structure(P: MatrixPolynomial, spec: StructureSpec) -> None:
    """Check the declared coefficient symmetry; raise naming the violation.

    General Moebius declarations have no coefficient-level characterization;
    they are checked through the determinant functional equation
    p(f(x)) (c x - a)^{nk} = const * p(x) sampled at random points, and
    skipped when an extreme coefficient is rank deficient.
    """
    C = P.coeffs
    k = P.k
    scale = max(_frob(A) for A in C)
    if scale == 0.0:
        raise StructureMismatchError("zero polynomial")
    tol = spec.verify_tol * scale
    kind = spec.kind
    if kind is StructureKind.PALINDROMIC_FAMILY:
        s = -1.0 if spec.anti else 1.0
        name = ("anti-" if spec.anti else "") + (
            "T-palindromic" if spec.transpose else "palindromic"
        )
        for j in range(k + 1):
            R = C[k - j].T if spec.transpose else C[k - j]
            if _frob(C[j] - s * R) > tol:
                raise StructureMismatchError(
                    f"coefficient {j} violates the {name} symmetry"
                )
        return
    if kind is StructureKind.EVEN_ODD_FAMILY:
        sym_even = spec.parity == "even"
        for j in range(k + 1):
            symmetric = (j % 2 == 0) == sym_even
            sign = 1.0 if symmetric else -1.0
            if _frob(C[j] - sign * C[j].T) > tol:
                want = "symmetric" if symmetric else "skew-symmetric"
                raise StructureMismatchError(
                    f"coefficient {j} of the {spec.parity} polynomial is not {want}"
                )
        return
    if kind is StructureKind.SKEW_SQUARE:
        if P.n % 2 != 0:
            raise StructureMismatchError(
                "odd-dimensional skew-symmetric polynomials are singular"
            )
        for j in range(k + 1):
            if _frob(C[j] + C[j].T) > tol:
                raise StructureMismatchError(f"coefficient {j} is not skew-symmetric")
        return
    if kind is StructureKind.MOBIUS_GENERAL:
        rank_tol = P.n * max(P.k, 1) * _EPS
        if (
            rank_lower_bound(C[0], rank_tol)[1] > 0
            or rank_lower_bound(C[k], rank_tol)[1] > 0
        ):
            return  # degree deficit breaks the sampled identity; trust the caller
        _verify_mobius_sampled(P, spec)
        return
    raise StructureMismatchError("no structure declared")


def _verify_mobius_sampled(P: MatrixPolynomial, spec: StructureSpec) -> None:
    a, b, c = spec.f_coeffs
    nk = P.n * P.k
    rng = np.random.default_rng(7)
    logs = []
    for _ in range(12):
        x = complex(rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi)))
        den = c * x - a
        if abs(den) < 1e-8:
            continue
        fx = (a * x + b) / den
        d1 = point_diagnostics(P, x)
        d2 = point_diagnostics(P, fx)
        if not (d1.finite and d2.finite) or d1.exact_root or d2.exact_root:
            continue
        if min(d1.rcond, d2.rcond) < 1e-10:
            continue  # too close to the spectrum for a clean sample
        logs.append(d2.log_abs_det + nk * math.log(abs(den)) - d1.log_abs_det)
        if len(logs) >= 4:
            break
    if len(logs) < 4:
        raise StructureMismatchError("could not sample the Moebius symmetry test")
    spread = max(logs) - min(logs)
    if spread > 1e-6 * (1.0 + abs(sum(logs) / len(logs))):
        raise StructureMismatchError(
            "determinant is not invariant under the declared Moebius symmetry"
        )


def hamiltonian_to_even_odd(P: MatrixPolynomial) -> MatrixPolynomial:
    """Left-multiply every coefficient by J = [[0, I], [-I, 0]].

    Maps alternating Hamiltonian / skew-Hamiltonian coefficients onto an
    even/odd polynomial with the same spectrum (det J = 1 moves no roots).
    """
    n = P.n
    if n % 2 != 0:
        raise ValueError("Hamiltonian structure requires even dimension")
    m = n // 2
    J = np.zeros((n, n), dtype=np.complex128)
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return MatrixPolynomial(np.array([J @ C for C in P.coeffs]))


# ----------------------------------------------------------------------------
# paired results


@dataclass
class PairedSpectrum:
    """Structured solve output: folded roots, recovered pairs, exceptionals.

    ``pairs`` holds the recovered (x, f(x)) values with None for infinity;
    ``pair_estimates`` the matching EigenEstimate twins; ``exceptional`` the
    a-priori deflated fixed-point eigenvalues.  ``z_roots``/``z_estimates``
    expose the folded-variable iteration, including pinned entries.
    """

    z_roots: list[complex]
    z_estimates: list[EigenEstimate]
    pairs: list[tuple[complex | None, complex | None]]
    pair_estimates: list[tuple[EigenEstimate, EigenEstimate]]
    exceptional: list[EigenEstimate]
    total_scalar_iterations: int
    vector_iterations: int
    config: SolverConfig

    def all_estimates(self) -> list[EigenEstimate]:
        out: list[EigenEstimate] = []
        for e1, e2 in self.pair_estimates:
            out.append(e1)
            out.append(e2)
        out.extend(self.exceptional)
        return out

    def values(self) -> list[complex | None]:
        return [e.value for e in self.all_estimates()]

    @property
    def fully_converged(self) -> bool:
        return all(e.status is not Status.MAX_ITERS for e in self.all_estimates())


def _twin(est: EigenEstimate, x1: complex | None, x2: complex | None):
    a = replace(est, value=x1)
    b = replace(est, value=x2)
    return a, b


# ----------------------------------------------------------------------------
# folded-variable starting points


def _z_probe(spec: StructureSpec, radius: float) -> float:
    """Representative |z| for x on the circle of the given radius."""
    for ang in (0.77, 1.31, 2.09):
        try:
            v = abs(z_of_x(spec, radius * cmath.exp(1j * ang)))
        except ZeroDivisionError:
            continue
        if math.isfinite(v) and v > 0.0:
            return v
    return max(radius, 1.0)


def _z_starting_points(
    segments: list[PolygonSegment],
    n: int,
    spec: StructureSpec,
    total: int,
) -> list[complex]:
    """Circle starts in the folded variable, allocated across polygon circles."""
    if total <= 0:
        return []
    weights = [max(n * s.count, 1) for s in segments]
    wsum = sum(weights)
    alloc = [w * total // wsum for w in weights]
    i = 0
    while sum(alloc) < total:
        alloc[i % len(alloc)] += 1
        i += 1
    pts: list[complex] = []
    for s, (seg, m) in enumerate(zip(segments, alloc)):
        if m <= 0:
            continue
        rz = _z_probe(spec, seg.radius)
        off = 0.4 + 0.3 * s
        for j in range(m):
            theta = 2.0 * math.pi * j / m + off
            pts.append(rz * cmath.exp(1j * theta))
    pts.sort(key=abs)
    return pts[:total]


# ----------------------------------------------------------------------------
# fold diagnostics plumbing


def _pick_branch(spec: StructureSpec, z: complex) -> complex:
    """Deterministic branch choice: the larger-modulus preimage."""
    x1, _ = x_branches_of_z(spec, z)
    return x1


def _make_fold_diag(
    P: MatrixPolynomial,
    spec: StructureSpec,
    deg: int,
    adjustments: tuple[tuple[complex, float], ...],
):
    """diag_fn for the folded iteration.

    ``adjustments`` are (pole, weight) terms added to p'/p, implementing
    implicit multiplications/quotients such as the (x+1)P(x) device or the
    division by x^m after zero deflation.
    """

    def diag(z: complex) -> PointDiagnostics:
        try:
            x = _pick_branch(spec, z)
        except ValueError:
            return _NONFINITE
        d = point_diagnostics(P, x)
        if not d.finite or d.exact_root:
            return d
        dl = d.dlog
        for pole, w in adjustments:
            den = x - pole
            if den == 0:
                return replace(d, finite=False)
            dl = dl + w / den
        nq = _fold_correction(spec, x, dl, deg)
        if nq == 0 or not (math.isfinite(nq.real) and math.isfinite(nq.imag)):
            return replace(
                d,
                dlog=complex(math.inf, 0.0),
                newton_correction=0j,
                trace_zero=False,
            )
        return replace(d, dlog=1.0 / nq, newton_correction=nq, trace_zero=False)

    return diag


def _newton_polish(P: MatrixPolynomial, x: complex, steps: int = 3) -> complex:
    """Plain Newton refinement on det P; used near fixed points of the fold."""
    for _ in range(steps):
        d = point_diagnostics(P, x)
        if not d.finite or d.exact_root or d.trace_zero:
            return x
        x = x - d.newton_correction
    return x


def _recover_pair(
    P: MatrixPolynomial, spec: StructureSpec, z: complex
) -> tuple[complex, complex, complex]:
    """Branches of z, Newton-polished when they sit near a fixed point of f."""
    x1, x2 = x_branches_of_z(spec, z)
    if abs(_z_derivative(spec, x1)) < _FIXED_POINT_TOL * (1.0 + abs(x1)):
        x1 = _newton_polish(P, x1)
        try:
            z = z_of_x(spec, x1)
        except ZeroDivisionError:
            return x1, x2, z
        # partner through the exact product/sum relation keeps closure exact
        a, b, c = spec.f_coeffs
        if a != 0:
            x2 = z / x1 if x1 != 0 else -(b - z * c) / a
        else:
            x2 = (b / c) / x1 if x1 != 0 else z
    return x1, x2, z


# ----------------------------------------------------------------------------
# kind-specific drivers


def solve_structured(
    P: MatrixPolynomial,
    spec: StructureSpec,
    config: SolverConfig | None = None,
    *,
    naive: bool = False,
    sweep_callback=None,
) -> PairedSpectrum:
    """Structured EAI solve honoring the declared pairing exactly.

    The structure is verified against the coefficients first.  The iteration
    runs on the folded variable with a vector of half the paired degree;
    exceptional eigenvalues are deflated a priori.  ``naive`` instead updates
    half of an unfolded vector and mirrors through f each sweep, for
    comparison only.
    """
    config = config or SolverConfig()
    if P.k < 1:
        raise ValueError("the solver needs a polynomial of degree at least 1")
    verify_structure(P, spec)
    if naive:
        if spec.kind is StructureKind.SKEW_SQUARE:
            raise ValueError("the naive mirrored iteration needs a pairing map")
        return _solve_naive(P, spec, config)
    if spec.kind is StructureKind.SKEW_SQUARE:
        return _solve_skew(P, spec, config, sweep_callback)
    if spec.kind is StructureKind.PALINDROMIC_FAMILY:
        return _solve_palindromic(P, spec, config, sweep_callback)
    if spec.kind is StructureKind.EVEN_ODD_FAMILY:
        return _solve_even_odd(P, spec, config, sweep_callback)
    if spec.kind is StructureKind.MOBIUS_GENERAL:
        return _solve_mobius(P, spec, config, sweep_callback)
    raise ValueError("no structure declared; use the unstructured solver")


def _core_estimates(core: CoreResult) -> list[EigenEstimate]:
    return [
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


def _check_fold_stall(spec: StructureSpec, estimates: list[EigenEstimate]) -> None:
    """Undeclared odd-multiplicity fixed points stall the folded iteration."""
    for e in estimates:
        if e.status is not Status.MAX_ITERS or e.value is None:
            continue
        try:
            x = _pick_branch(spec, e.value)
        except ValueError:
            continue
        if abs(_z_derivative(spec, x)) < _FIXED_POINT_TOL * (1.0 + abs(x)):
            raise StructureMismatchError(
                "folded iteration stalled at a fixed point of f: declare the "
                "exceptional eigenvalue and its multiplicity"
            )


def _solve_skew(P, spec, config, sweep_callback) -> PairedSpectrum:
    n, k = P.n, P.k
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m0, mi = detect_deflation(P, rank_tol)
    z0 = (m0 + 1) // 2  # skew nullities are even; defensive rounding
    zi = (mi + 1) // 2
    deg_q = n * k // 2
    norms = coeff_norms(P)
    segments = newton_polygon(norms)
    active = deg_q - z0 - zi
    starts = initial_points(segments, n // 2, active, drop_smallest=z0)
    tau1 = config.resolved_tau1(n)
    tau2 = config.resolved_tau2()

    def diag(x: complex) -> PointDiagnostics:
        d = point_diagnostics(P, x)
        if not d.finite or d.exact_root:
            return d
        dl = d.dlog / 2.0
        return replace(
            d,
            dlog=dl,
            newton_correction=(1.0 / dl) if dl != 0 else complex(math.inf, 0.0),
            trace_zero=dl == 0,
        )

    core = _sweep_engine(
        diag,
        starts,
        config,
        tau1=tau1,
        tau2=tau2,
        fixed=[(0.0 + 0.0j, z0)] if z0 else [],
        strict_small=segments[0].radius / 10.0 if z0 else None,
        strict_large=segments[-1].radius * 10.0 if zi else None,
        scale_hint=segments[0].radius,
        sweep_callback=sweep_callback,
    )
    z_estimates = _core_estimates(core)
    pair_estimates = [_twin(e, e.value, e.value) for e in z_estimates]
    zero_est = EigenEstimate(0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
    inf_est = EigenEstimate(None, Status.DEFLATED_INFINITY)
    pair_estimates += [_twin(zero_est, 0j, 0j)] * z0
    pair_estimates += [_twin(inf_est, None, None)] * zi
    z_roots = [e.value for e in z_estimates] + [0j] * z0
    return PairedSpectrum(
        z_roots=z_roots,
        z_estimates=z_estimates,
        pairs=[(a.value, b.value) for a, b in pair_estimates],
        pair_estimates=pair_estimates,
        exceptional=[],
        total_scalar_iterations=core.total_scalar_iterations,
        vector_iterations=core.vector_iterations,
        config=config,
    )


def _run_fold(
    P: MatrixPolynomial,
    spec: StructureSpec,
    config: SolverConfig,
    *,
    deg: int,
    adjustments: tuple[tuple[complex, float], ...],
    fixed: list[tuple[complex, int]],
    active: int,
    strict_small: float | None,
    strict_large: float | None,
    sweep_callback,
) -> CoreResult:
    segments = newton_polygon(coeff_norms(P))
    starts = _z_starting_points(segments, P.n, spec, active)
    diag = _make_fold_diag(P, spec, deg, adjustments)
    scale = abs(fixed[0][0]) if fixed and fixed[0][0] != 0 else _z_probe(spec, segments[0].radius)
    return _sweep_engine(
        diag,
        starts,
        config,
        tau1=config.resolved_tau1(P.n),
        tau2=config.resolved_tau2(),
        fixed=fixed,
        strict_small=strict_small,
        strict_large=strict_large,
        scale_hint=scale,
        sweep_callback=sweep_callback,
    )


def _paired_output(
    P,
    spec,
    config,
    core: CoreResult,
    *,
    extra_pairs: list[tuple[EigenEstimate, EigenEstimate]] | None = None,
    extra_z_roots: list[complex] | None = None,
    exceptional: list[EigenEstimate] | None = None,
) -> PairedSpectrum:
    """Expand folded estimates into (x, f(x)) twins, polishing near folds."""
    z_estimates = _core_estimates(core)
    _check_fold_stall(spec, z_estimates)
    pair_estimates: list[tuple[EigenEstimate, EigenEstimate]] = []
    z_roots: list[complex] = []
    for e in z_estimates:
        x1, x2, z = _recover_pair(P, spec, e.value)
        z_roots.append(z)
        pair_estimates.append(_twin(e, x1, x2))
    z_roots.extend(extra_z_roots or [])
    pair_estimates.extend(extra_pairs or [])
    return PairedSpectrum(
        z_roots=z_roots,
        z_estimates=z_estimates,
        pairs=[(a.value, b.value) for a, b in pair_estimates],
        pair_estimates=pair_estimates,
        exceptional=list(exceptional or []),
        total_scalar_iterations=core.total_scalar_iterations,
        vector_iterations=core.vector_iterations,
        config=config,
    )


def _solve_palindromic(P, spec, config, sweep_callback) -> PairedSpectrum:
    n, k = P.n, P.k
    nk = n * k
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m0, mi = detect_deflation(P, rank_tol)
    # zero and infinite eigenvalues pair with each other under x -> 1/x
    mpairs = max(m0, mi)
    adjustments: list[tuple[complex, float]] = []
    exceptional: list[EigenEstimate] = []
    extra_pairs: list[tuple[EigenEstimate, EigenEstimate]] = []
    deg = nk - 2 * mpairs
    if mpairs:
        adjustments.append((0j, -float(mpairs)))
        zero_est = EigenEstimate(0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
        inf_est = EigenEstimate(None, Status.DEFLATED_INFINITY)
        extra_pairs += [(zero_est, inf_est)] * mpairs
    scalar_anti = spec.anti and (n % 2 == 1)
    if scalar_anti:
        # det P = (x - 1) times a palindromic polynomial; +1 is always a root,
        # and -1 as well when the grade is even
        adjustments.append((1.0 + 0j, -1.0))
        exceptional.append(EigenEstimate(1.0 + 0j, Status.EXACT_ROOT))
        deg -= 1
        if nk % 2 == 0:
            adjustments.append((-1.0 + 0j, -1.0))
            exceptional.append(EigenEstimate(-1.0 + 0j, Status.EXACT_ROOT))
            deg -= 1
    fixed: list[tuple[complex, int]] = []
    if deg % 2 == 1:
        # odd paired degree: -1 is an eigenvalue; fold (x+1)^n P implicitly
        exceptional.append(EigenEstimate(-1.0 + 0j, Status.EXACT_ROOT))
        adjustments.append((-1.0 + 0j, float(n)))
        deg += n
        fixed.append((-2.0 + 0j, (n + 1) // 2))
    active = deg // 2 - sum(m for _, m in fixed)
    segments = newton_polygon(coeff_norms(P))
    strict_large = None
    if mpairs:
        strict_large = min(
            _z_probe(spec, segments[-1].radius * 10.0),
            _z_probe(spec, segments[0].radius / 10.0),
        )
    core = _run_fold(
        P,
        spec,
        config,
        deg=deg,
        adjustments=tuple(adjustments),
        fixed=fixed,
        active=active,
        strict_small=None,
        strict_large=strict_large,
        sweep_callback=sweep_callback,
    )
    return _paired_output(
        P,
        spec,
        config,
        core,
        extra_pairs=extra_pairs,
        exceptional=exceptional,
    )


def _solve_even_odd(P, spec, config, sweep_callback) -> PairedSpectrum:
    n, k = P.n, P.k
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m0, mi = detect_deflation(P, rank_tol)
    s0, r0 = divmod(m0, 2)
    si, ri = divmod(mi, 2)
    adjustments: list[tuple[complex, float]] = []
    exceptional: list[EigenEstimate] = []
    extra_pairs: list[tuple[EigenEstimate, EigenEstimate]] = []
    if r0:
        # odd zero multiplicity: one exceptional eigenvalue at the fixed point 0
        adjustments.append((0j, -1.0))
        exceptional.append(
            EigenEstimate(0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
        )
    if ri:
        exceptional.append(EigenEstimate(None, Status.DEFLATED_INFINITY))
    if s0:
        zero_est = EigenEstimate(0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
        extra_pairs += [_twin(zero_est, 0j, 0j)] * s0
    if si:
        inf_est = EigenEstimate(None, Status.DEFLATED_INFINITY)
        extra_pairs += [_twin(inf_est, None, None)] * si
    deg = n * k - r0 - ri  # paired scalar degree; the c = 0 fold needs no term
    active = deg // 2 - s0 - si
    segments = newton_polygon(coeff_norms(P))
    core = _run_fold(
        P,
        spec,
        config,
        deg=deg,
        adjustments=tuple(adjustments),
        fixed=[(0j, s0)] if s0 else [],
        active=active,
        strict_small=_z_probe(spec, segments[0].radius / 10.0) if m0 else None,
        strict_large=_z_probe(spec, segments[-1].radius * 10.0) if mi else None,
        sweep_callback=sweep_callback,
    )
    return _paired_output(
        P,
        spec,
        config,
        core,
        extra_pairs=extra_pairs,
        extra_z_roots=[0j] * s0,
        exceptional=exceptional,
    )


def _solve_mobius(P, spec, config, sweep_callback) -> PairedSpectrum:
    n, k = P.n, P.k
    a, b, c = spec.f_coeffs
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m0, mi = detect_deflation(P, rank_tol)
    adjustments: list[tuple[complex, float]] = []
    exceptional: list[EigenEstimate] = []
    extra_pairs: list[tuple[EigenEstimate, EigenEstimate]] = []
    fixed: list[tuple[complex, int]] = []
    deg = n * k
    for val, mult in spec.exceptional:
        adjustments.append((complex(val), -float(mult)))
        exceptional += [EigenEstimate(complex(val), Status.EXACT_ROOT)] * mult
        deg -= mult
    if a == 0:
        if m0 or mi:
            raise StructureMismatchError(
                "zero/infinite eigenvalues of an a = 0 Moebius symmetry need "
                "explicit exceptional declarations"
            )
    else:
        if b == 0 or c == 0:
            if (b == 0 and m0) or (c == 0 and mi):
                raise StructureMismatchError(
                    "0 or infinity is a fixed point here; declare its multiplicity"
                )
        if m0:
            # zeros pair with f(0) = -b/a at the folded root z = 0
            fixed.append((0j, m0))
            zero_est = EigenEstimate(0j, Status.DEFLATED_ZERO, rcond=0.0, log_abs_det=-math.inf)
            mate = EigenEstimate(-b / a, Status.EXACT_ROOT)
            extra_pairs += [(zero_est, mate)] * m0
        if mi:
            # infinities pair with f(inf) = a/c, their folded root is infinite
            partner = a / c if c != 0 else None
            inf_est = EigenEstimate(None, Status.DEFLATED_INFINITY)
            mate = EigenEstimate(partner, Status.EXACT_ROOT)
            extra_pairs += [(inf_est, mate)] * mi
            deg -= 2 * mi
    active = deg // 2 - sum(m for _, m in fixed)
    if deg % 2 == 1:
        raise StructureMismatchError(
            "odd paired degree: an exceptional eigenvalue is missing from the "
            "declaration"
        )
    core = _run_fold(
        P,
        spec,
        config,
        deg=deg,
        adjustments=tuple(adjustments),
        fixed=fixed,
        active=active,
        strict_small=None,
        strict_large=None,
        sweep_callback=sweep_callback,
    )
    return _paired_output(
        P,
        spec,
        config,
        core,
        extra_pairs=extra_pairs,
        extra_z_roots=[0j] * (fixed[0][1] if fixed else 0),
        exceptional=exceptional,
    )


def _solve_naive(P, spec, config) -> PairedSpectrum:
    """Mirrored unfolded iteration: update half the vector, reflect through f.

    Comparison baseline only; requires a non-degenerate pairing with no
    zero/infinite deflation.
    """
    from .eai import aberth_sum as _asum
    from .eai import _correction

    n, k = P.n, P.k
    nk = n * k
    if nk % 2 != 0:
        raise ValueError("naive mirrored iteration needs an even eigenvalue count")
    rank_tol = config.rank_tol if config.rank_tol is not None else n * k * _EPS
    m0, mi = detect_deflation(P, rank_tol)
    if m0 or mi:
        raise ValueError("naive mirrored iteration does not support deflation")
    half = nk // 2
    segments = newton_polygon(coeff_norms(P))
    starts = initial_points(segments, n, nk)
    y: list[complex] = list(starts)
    for j in range(half):
        try:
            y[half + j] = f_apply(spec, y[j])
        except ZeroDivisionError:
            y[half + j] = f_apply(spec, y[j] * (1 + 1e-3j))
    status: list[Status | None] = [None] * half
    iters = [0] * half
    lastc = [math.nan] * half
    rconds = [math.nan] * half
    logdets = [math.nan] * half
    tau1 = config.resolved_tau1(n)
    tau2 = config.resolved_tau2()
    t = 0
    sweeps = 0
    for sweep in range(config.max_vector_iters):
        if all(s is not None for s in status):
            break
        sweeps = sweep + 1
        for j in range(half):
            if status[j] is not None:
                continue
            d = point_diagnostics(P, y[j])
            t += 1
            iters[j] += 1
            if not d.finite:
                y[j] *= 0.75
                continue
            rconds[j] = d.rcond
            logdets[j] = d.log_abs_det
            if d.exact_root:
                status[j] = Status.EXACT_ROOT
                lastc[j] = 0.0
                continue
            if d.rcond < tau1:
                status[j] = Status.CONVERGED_RCOND
                continue
            try:
                A = _asum(y, j)
            except ValueError:
                y[j] *= 1 + 1e-3j
                continue
            cstep = _correction(d, A)
            y[j] = y[j] - cstep
            lastc[j] = abs(cstep)
            try:
                y[half + j] = f_apply(spec, y[j])
            except ZeroDivisionError:
                pass
            if abs(cstep) <= tau2 * abs(y[j]):
                status[j] = Status.CONVERGED_CORRECTION
    pair_estimates = []
    for j in range(half):
        e = EigenEstimate(
            value=y[j],
            status=status[j] or Status.MAX_ITERS,
            iterations=iters[j],
            last_correction=lastc[j],
            rcond=rconds[j],
            log_abs_det=logdets[j],
        )
        pair_estimates.append(_twin(e, y[j], y[half + j]))
    return PairedSpectrum(
        z_roots=[z_of_x(spec, v) for v in y[:half]],
        z_estimates=[e for e, _ in pair_estimates],
        pairs=[(e1.value, e2.value) for e1, e2 in pair_estimates],
        pair_estimates=pair_estimates,
        exceptional=[],
        total_scalar_iterations=t,
        vector_iterations=sweeps,
        config=config,
    )
