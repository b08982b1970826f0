"""Dense complex matrix polynomials and their evaluation primitives."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MatrixPolynomial",
    "MobiusMap",
    "MobiusPoleError",
    "eval_at",
    "eval_deriv",
    "eval_pair",
    "reversal",
    "eval_mobius",
    "coeff_norm2",
    "coeff_norms",
]


class MobiusPoleError(ValueError):
    """Evaluation of a Moebius substitution at the pole of the map."""


class MatrixPolynomial:
    """A degree-k polynomial P(x) = sum_j C_j x^j with n x n complex coefficients.

    Coefficients are stored as a single (k+1, n, n) complex array with index j
    holding the coefficient of x^j.  The leading coefficient is taken at face
    value: a (numerically) zero C_k is legal here and surfaces later as
    eigenvalues at infinity.  Instances are treated as immutable; callers must
    not write into ``coeffs``.
    """

    __slots__ = ("coeffs", "n", "k")

    def __init__(self, coeffs) -> None:
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(
                f"coefficients must form a (k+1, n, n) array, got shape {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("need at least one coefficient of positive dimension")
        self.coeffs = arr
        self.k = arr.shape[0] - 1
        self.n = arr.shape[1]

    def __repr__(self) -> str:
        return f"MatrixPolynomial(n={self.n}, k={self.k})"

    @classmethod
    def from_scalar(cls, coeffs) -> "MatrixPolynomial":
        """Wrap scalar polynomial coefficients (ascending) as a 1 x 1 instance."""
        c = np.asarray(coeffs, dtype=np.complex128)
        return cls(c.reshape(-1, 1, 1))


@dataclass(frozen=True)
class MobiusMap:
    """x(z) = (alpha z + beta) / (gamma z + delta), with nonzero determinant."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self) -> None:
        if self.alpha * self.delta - self.gamma * self.beta == 0:
            raise ValueError("degenerate Moebius map: alpha*delta - gamma*beta == 0")

    def __call__(self, z: complex) -> complex:
        den = self.gamma * z + self.delta
        if den == 0:
            raise MobiusPoleError(f"z={z} is the pole of the Moebius map")
        return (self.alpha * z + self.beta) / den

    def inverse(self, x: complex) -> complex:
        den = -self.gamma * x + self.alpha
        if den == 0:
            raise MobiusPoleError(f"x={x} is the pole of the inverse Moebius map")
        return (self.delta * x - self.beta) / den


def eval_at(P: MatrixPolynomial, x: complex) -> np.ndarray:
    """Evaluate P(x) by Horner's scheme; O(k n^2)."""
    acc = P.coeffs[-1].copy()
    for j in range(P.k - 1, -1, -1):
        acc *= x
        acc += P.coeffs[j]
    return acc


def eval_deriv(P: MatrixPolynomial, x: complex) -> np.ndarray:
    """Evaluate P'(x) by Horner on the derivative coefficients j*C_j."""
    if P.k == 0:
        return np.zeros_like(P.coeffs[0])
    dc = P.coeffs[1:] * np.arange(1, P.k + 1, dtype=np.float64)[:, None, None]
    acc = dc[-1].copy()
    for j in range(P.k - 2, -1, -1):
        acc *= x
        acc += dc[j]
    return acc


def eval_pair(P: MatrixPolynomial, x: complex) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate (P(x), P'(x)) in a single fused Horner recurrence."""
    acc = P.coeffs[-1].copy()
    der = np.zeros_like(acc)
    for j in range(P.k - 1, -1, -1):
        der *= x
        der += acc
        acc *= x
        acc += P.coeffs[j]
    return acc, der


def reversal(P: MatrixPolynomial) -> MatrixPolynomial:
    """Coefficient-reversed polynomial x^k P(1/x); an involution when C_0 != 0."""
    return MatrixPolynomial(P.coeffs[::-1].copy())


def eval_mobius(
    P: MatrixPolynomial, M: MobiusMap, z: complex
) -> tuple[np.ndarray, complex]:
    """Evaluate (gamma z + delta)^k * P(x(z)) implicitly.

    Returns the scaled value together with the scale factor (gamma z + delta)^k.
    The transformed coefficients are never formed.
    """
    den = M.gamma * z + M.delta
    if den == 0:
        raise MobiusPoleError(f"z={z} is the pole of the Moebius map")
    x = (M.alpha * z + M.beta) / den
    scale = den**P.k
    return scale * eval_at(P, x), scale


def coeff_norm2(A: np.ndarray) -> float:
    """Spectral-norm estimate of a single matrix via power iteration on A*A.

    Runs at most 30 iterations, stopping early on relative change below 1e-4;
    accurate to about a percent, which is all the starting-radius machinery
    needs.  Returns 0.0 for the zero matrix.
    """
    A = np.asarray(A, dtype=np.complex128)
    if not A.any():
        return 0.0
    n = A.shape[0]
    # deterministic start with a mild tilt so it is not orthogonal to the
    # dominant singular vector for simple patterned matrices
    v = (1.0 + 0.01 * np.arange(n)).astype(np.complex128)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(30):
        w = A.conj().T @ (A @ v)
        new = np.linalg.norm(w)
        if new == 0.0:
            return 0.0
        if lam > 0.0 and abs(new - lam) < 1e-4 * new:
            lam = new
            break
        lam = new
        v = w / new
    return math.sqrt(lam)


def coeff_norms(P: MatrixPolynomial) -> np.ndarray:
    """Spectral-norm estimates of all k+1 coefficients, index j for x^j."""
    return np.array([coeff_norm2(C) for C in P.coeffs])
