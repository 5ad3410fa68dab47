"""Asymmetric cloning machines as explicit isometries.

Blank and machine inputs are fixed, so each cloner is stored as an
isometry from the input register to clones plus machine, never completed
to a full unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qbroadcast.qcore import Isometry

CONSTRAINT_TOL = 1e-12
NORM_TOL = 1e-9


class InfeasibleAsymmetryError(ValueError):
    """No real gamma satisfies the 1->3 normalization constraint."""


class ClonerConfigError(ValueError):
    """Cloner parameters are inconsistent with the normalization constraint."""


@dataclass(frozen=True)
class Asym12:
    """Asymmetry of a 1->2 cloner; the first clone gets weight p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def pq(self) -> float:
        return self.p * self.q

    @property
    def mu(self) -> float:
        return 1.0 / (1.0 - self.pq)

    @property
    def eta(self) -> float:
        return 2.0 - 3.0 * self.pq

    @property
    def kappa1(self) -> float:
        return self.p * (1.0 + self.p) / self.eta

    @property
    def kappa2(self) -> float:
        return self.q * (2.0 - self.p) / self.eta

    def swapped(self) -> Asym12:
        return Asym12(self.q)


@dataclass(frozen=True)
class SuccessiveParams:
    """Asymmetries of the first and second cloner in a two-step broadcast."""

    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def q1(self) -> float:
        return 1.0 - self.p1

    @property
    def q2(self) -> float:
        return 1.0 - self.p2

    def step(self, i: int) -> Asym12:
        return Asym12(self.p1 if i == 1 else self.p2)

    # local shrink factors, P = p/(q + p^2)
    def P(self, i: int) -> float:
        a = self.step(i)
        return a.p * a.mu

    def Q(self, i: int) -> float:
        a = self.step(i)
        return a.q * a.mu

    def eta(self, i: int) -> float:
        return self.step(i).eta

    def tau(self, i: int) -> float:
        return self.step(i).kappa1

    def zeta(self, i: int) -> float:
        return self.step(i).kappa2


def shrink_from_k(k):
    """K = 2k - 1, the Bloch z-component of nme(k)."""
    return 2.0 * np.asarray(k) - 1.0


def constraint_residual(alpha, beta, gamma, d) -> float:
    return alpha**2 + beta**2 + gamma**2 + (2.0 / d) * (alpha * beta + beta * gamma + alpha * gamma) - 1.0


@dataclass(frozen=True)
class Asym13:
    """Weights of the three clones of a 1->3 cloner on a d-level input."""

    alpha: float
    beta: float
    gamma: float
    d: int = 2

    def __post_init__(self):
        if self.d not in (2, 4):
            raise ValueError(f"d={self.d}; only 2 and 4 are supported")
        res = constraint_residual(self.alpha, self.beta, self.gamma, self.d)
        if abs(res) > CONSTRAINT_TOL:
            raise ClonerConfigError(
                f"(alpha, beta, gamma) = ({self.alpha}, {self.beta}, {self.gamma}) "
                f"violates the d={self.d} normalization by {res:.3e}"
            )

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.d / (2.0 * (self.d + 1.0))))

    @classmethod
    def symmetric(cls, d: int) -> Asym13:
        w = 1.0 / np.sqrt(6.0) if d == 2 else np.sqrt(2.0) / 3.0
        return cls(w, w, w, d)

    @classmethod
    def from_pair(cls, alpha: float, beta: float, d: int) -> Asym13:
        """Complete (alpha, beta) with the largest root gamma."""
        return cls(alpha, beta, max(solve_gamma(alpha, beta, d)), d)

    def permuted(self, order: tuple[int, int, int]) -> Asym13:
        w = (self.alpha, self.beta, self.gamma)
        return Asym13(w[order[0]], w[order[1]], w[order[2]], self.d)


def solve_gamma(alpha: float, beta: float, d: int) -> list[float]:
    """Real roots gamma of the 1->3 constraint, largest first.

    The constraint is symmetric in the three weights, so the same call
    solves for any one weight given the other two.
    """
    b = (2.0 / d) * (alpha + beta)
    c = alpha**2 + beta**2 + (2.0 / d) * alpha * beta - 1.0
    disc = b * b - 4.0 * c
    if disc < 0:
        raise InfeasibleAsymmetryError(
            f"no real gamma for alpha={alpha}, beta={beta}, d={d} (discriminant {disc:.6g})"
        )
    r = np.sqrt(disc)
    return [(-b + r) / 2.0, (-b - r) / 2.0]


def solve_gamma_batched(alpha, beta, d: int) -> np.ndarray:
    """Largest root for arrays of weights; NaN where no real root exists."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    b = (2.0 / d) * (alpha + beta)
    c = alpha**2 + beta**2 + (2.0 / d) * alpha * beta - 1.0
    disc = b * b - 4.0 * c
    with np.errstate(invalid="ignore"):
        return np.where(disc >= 0, (-b + np.sqrt(disc)) / 2.0, np.nan)


def local_cloner_isometry(a: Asym12) -> Isometry:
    """Qubit cloner, 2 -> 8, output order (clone 1, clone 2, machine)."""
    p, q = a.p, a.q
    v = np.zeros((8, 2))
    v[0b000, 0], v[0b011, 0], v[0b101, 0] = 1.0, p, q
    v[0b111, 1], v[0b100, 1], v[0b010, 1] = 1.0, p, q
    return Isometry(v / np.sqrt(1.0 + p * p + q * q))


def nonlocal_cloner_isometry(a: Asym12) -> Isometry:
    """Two-qubit cloner, 4 -> 64, output registers (clone 1, clone 2, machine).

    Each register is two qubits with value 2*first + second. Shifts run
    over all four register values.
    """
    p, q = a.p, a.q
    v = np.zeros((64, 4))
    for j in range(4):
        v[16 * j + 4 * j + j, j] = 1.0
        for r in range(1, 4):
            s = (j + r) % 4
            v[16 * j + 4 * s + s, j] += p
            v[16 * s + 4 * j + s, j] += q
    return Isometry(v / np.sqrt(1.0 + 3.0 * (p * p + q * q)))


def direct13_isometry(a: Asym13) -> Isometry:
    """1->3 cloner, d -> d^5, registers in the order (A, B, C, E, F).

    A, B, C are the clones and E, F the ancillas. Columns are normalized
    numerically; the norm must agree with the closed-form constant.
    """
    d = a.d
    phi = np.eye(d) / np.sqrt(d)
    cols = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        t = a.alpha * (
            np.einsum("a,be,cf->abcef", e, phi, phi) + np.einsum("a,bf,ce->abcef", e, phi, phi)
        )
        t += a.beta * (
            np.einsum("b,ae,cf->abcef", e, phi, phi) + np.einsum("b,af,ce->abcef", e, phi, phi)
        )
        t += a.gamma * (
            np.einsum("c,ae,bf->abcef", e, phi, phi) + np.einsum("c,af,be->abcef", e, phi, phi)
        )
        cols.append(t.reshape(-1))
    v = np.array(cols).T
    norms = np.linalg.norm(v, axis=0)
    expected = 1.0 / a.norm
    dev = np.abs(norms - expected).max()
    if dev > NORM_TOL:
        raise ClonerConfigError(f"column norm differs from the expected {expected:.12g} by {dev:.3e}")
    return Isometry(v / norms)
