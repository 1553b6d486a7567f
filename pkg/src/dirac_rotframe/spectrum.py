"""Characteristic equations, cubic roots and singular expansions.

With the pole cleared, every state kind leads to the monic cubic

    (E - P) (E^2 + Lambda E - 1 - a) - E h^2 = 0

where P is the pole (e0, or -e0 for the sign-flipped family), ``a`` the
extra constant of the second excited state (2 omega_n e0, zero otherwise)
and Lambda the kind-dependent momentum parameter.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Branch, FieldSign, NormalizedConfig, NumericalError, UnsupportedCase

ROOT_TOL = 1e-10


class StateKind(enum.Enum):
    GROUND = "ground"
    EXCITED1 = "excited1"
    EXCITED2 = "excited2"

    @classmethod
    def parse(cls, value) -> "StateKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())

    @property
    def degree(self) -> int:
        """Degree of the spinor polynomial."""
        return 0 if self is StateKind.GROUND else 1


# offsets of hbar*Omega inside Lambda
_LAMBDA_OFFSET = {StateKind.GROUND: -1.0, StateKind.EXCITED1: -3.0, StateKind.EXCITED2: 1.0}


def _plus_family(config: NormalizedConfig, plus: bool | None) -> bool:
    return config.d_sign is FieldSign.POSITIVE if plus is None else plus


def _check_plus(kind: StateKind, plus: bool):
    if plus and kind is not StateKind.GROUND:
        raise UnsupportedCase(f"sign-flipped family is only known for the ground state, not {kind.value}")


def pole(config: NormalizedConfig, plus: bool | None = None) -> float:
    """Singular point of the characteristic equation."""
    return -config.e0 if _plus_family(config, plus) else config.e0


def lambda_param(kind: StateKind, p_tilde: float, config: NormalizedConfig,
                 plus: bool | None = None) -> float:
    kind = StateKind.parse(kind)
    plus = _plus_family(config, plus)
    _check_plus(kind, plus)
    if plus:
        # ground state of the eH3 > 0 family: the spin term enters with opposite sign
        return 2.0 * config.epsilon * p_tilde + config.omega_n
    return 2.0 * config.epsilon * p_tilde + _LAMBDA_OFFSET[kind] * config.omega_n


def extra_term(kind: StateKind, config: NormalizedConfig) -> float:
    return config.varsigma if StateKind.parse(kind) is StateKind.EXCITED2 else 0.0


def singular_momentum(kind: StateKind, config: NormalizedConfig,
                      plus: bool | None = None) -> float:
    """Longitudinal momentum p~ that makes the pole a double root at h = 0."""
    kind = StateKind.parse(kind)
    plus = _plus_family(config, plus)
    _check_plus(kind, plus)
    eps, e0, w = config.epsilon, config.e0, config.omega_n
    p = eps / (2.0 * e0) - eps * e0 / 2.0 + eps * w / 2.0
    if plus:
        return -p
    if kind is StateKind.EXCITED1:
        p += eps * w
    return p


@dataclass(frozen=True)
class CharacteristicPoly:
    """Monic cubic c3 E^3 + c2 E^2 + c1 E + c0 with its factored data."""

    c3: float
    c2: float
    c1: float
    c0: float
    pole: float
    lam: float
    extra: float
    h: float

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c3, self.c2, self.c1, self.c0])

    def __call__(self, E):
        return np.polyval(self.coeffs, E)

    def derivative(self, E):
        return np.polyval(np.polyder(self.coeffs), E)

    def factored(self, E):
        """Same polynomial, evaluated without expanding around the pole."""
        return (E - self.pole) * (E * E + self.lam * E - 1.0 - self.extra) - E * self.h ** 2

    def shifted_coeffs(self) -> np.ndarray:
        """Monic cubic in delta = E - pole."""
        P, L = self.pole, self.lam
        qP = P * P + L * P - 1.0 - self.extra
        return np.array([1.0, 2.0 * P + L, qP - self.h ** 2, -P * self.h ** 2])


def characteristic_poly(kind: StateKind, config: NormalizedConfig, lam: float,
                        plus: bool | None = None) -> CharacteristicPoly:
    kind = StateKind.parse(kind)
    plus = _plus_family(config, plus)
    _check_plus(kind, plus)
    P = pole(config, plus)
    a = extra_term(kind, config)
    h2 = config.h ** 2
    return CharacteristicPoly(c3=1.0, c2=lam - P, c1=-1.0 - a - lam * P - h2,
                              c0=P * (1.0 + a), pole=P, lam=lam, extra=a, h=config.h)


@dataclass(frozen=True)
class EnergyRoots:
    roots: np.ndarray
    singular_pair: tuple[int, int]
    far_root: int
    residuals: np.ndarray
    pole: float

    def branch_root(self, branch: Branch) -> complex:
        """Singular root whose offset from the pole matches ``branch``.

        PLUS means (root - pole) has the sign of the pole, i.e. the root
        moves away from zero.
        """
        branch = Branch(branch) if not isinstance(branch, Branch) else branch
        i, j = self.singular_pair
        di = (self.roots[i] - self.pole).real * math.copysign(1.0, self.pole)
        dj = (self.roots[j] - self.pole).real * math.copysign(1.0, self.pole)
        hi, lo = (i, j) if di >= dj else (j, i)
        return self.roots[hi] if branch is Branch.PLUS else self.roots[lo]


def companion_matrix(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    n = len(c) - 1
    M = np.zeros((n, n), dtype=complex)
    M[0, :] = -c[1:]
    M[1:, :-1] = np.eye(n - 1)
    return M


def _polish(shifted: np.ndarray, delta: complex, iters: int = 50) -> complex:
    # Newton on the pole-shifted cubic; steps are only accepted when |f| shrinks
    dcoef = np.polyder(shifted)
    f = np.polyval(shifted, delta)
    for _ in range(iters):
        fp = np.polyval(dcoef, delta)
        if fp == 0 or f == 0:
            break
        step = f / fp
        trial = delta - step
        ft = np.polyval(shifted, trial)
        if abs(ft) >= abs(f):
            break
        delta, f = trial, ft
        if abs(step) <= 1e-17 * max(1.0, abs(delta)):
            break
    return delta


def characteristic_roots(kind: StateKind, config: NormalizedConfig, lam: float,
                         plus: bool | None = None, tol: float = ROOT_TOL) -> EnergyRoots:
    """All three roots of the cleared characteristic cubic.

    Companion-matrix eigenvalues of the cubic in E - pole, each refined by
    Newton iteration.
    """
    poly = characteristic_poly(kind, config, lam, plus)
    shifted = poly.shifted_coeffs()
    deltas = np.linalg.eigvals(companion_matrix(shifted))
    deltas = np.array([_polish(shifted, complex(d)) for d in deltas])
    # drop round-off imaginary parts of real roots
    deltas = np.where(np.abs(deltas.imag) <= 1e-14 * (1 + np.abs(deltas.real)),
                      deltas.real + 0j, deltas)
    roots = poly.pole + deltas
    scale = np.maximum(1.0, np.polyval(np.abs(poly.coeffs), np.abs(roots)))
    residuals = np.abs(poly.factored(roots)) / scale
    if np.any(residuals > tol):
        raise NumericalError(f"root polishing failed, residual {residuals.max():.3e}",
                             achieved=float(residuals.max()))
    pair, far = _classify(deltas)
    return EnergyRoots(roots=roots, singular_pair=pair, far_root=far,
                       residuals=residuals, pole=poly.pole)


def _classify(deltas: np.ndarray) -> tuple[tuple[int, int], int]:
    order = np.argsort(np.abs(deltas), kind="stable")
    cand = [tuple(sorted((int(order[0]), int(order[1]))))]
    # tie between 2nd and 3rd closest: take the tighter pair
    if np.isclose(abs(deltas[order[1]]), abs(deltas[order[2]]), rtol=1e-12, atol=0):
        alt = tuple(sorted((int(order[0]), int(order[2]))))
        if abs(deltas[alt[0]] - deltas[alt[1]]) < abs(deltas[cand[0][0]] - deltas[cand[0][1]]):
            cand = [alt]
    pair = cand[0]
    far = ({0, 1, 2} - set(pair)).pop()
    return pair, far


def cardano_roots(coeffs) -> np.ndarray:
    """Closed-form roots of a cubic (cross-check only, loses digits near double roots)."""
    a, b, c, d = (complex(x) for x in coeffs)
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sq = disc ** 0.5
    u = (-q / 2.0 + sq)
    if abs(u) < abs(-q / 2.0 - sq):
        u = -q / 2.0 - sq
    u = u ** (1.0 / 3.0) if u != 0 else 0.0
    w = complex(-0.5, math.sqrt(3) / 2)
    out = []
    for kk in range(3):
        uk = u * w ** kk
        vk = -p / (3.0 * uk) if uk != 0 else 0.0
        out.append(uk + vk - b / 3.0)
    return np.array(out)


@dataclass(frozen=True)
class SeriesExpansion:
    """E(h) ~ c0 + c1 h + c2 h^2 for one branch."""

    c0: float
    c1: float
    c2: float
    branch: Branch

    def __call__(self, h):
        return self.c0 + self.c1 * h + self.c2 * h * h


def singular_series(kind: StateKind, config: NormalizedConfig,
                    plus: bool | None = None) -> SeriesExpansion:
    kind = StateKind.parse(kind)
    plus = _plus_family(config, plus)
    _check_plus(kind, plus)
    e0, s = config.e0, config.branch.sign
    if kind is StateKind.EXCITED2:
        zeta = config.varsigma
        den = e0 * e0 + 1.0 + zeta
        c1 = s * e0 / math.sqrt(den)
        c2 = e0 * (1.0 + zeta) / (2.0 * den * den)
    else:
        den = e0 * e0 + 1.0
        c1 = s * e0 / math.sqrt(den)
        c2 = e0 / (2.0 * den * den)
    sign = -1.0 if plus else 1.0
    return SeriesExpansion(c0=sign * e0, c1=sign * c1, c2=sign * c2, branch=config.branch)


def singular_roots(kind: StateKind, config: NormalizedConfig,
                   plus: bool | None = None) -> EnergyRoots:
    """Roots at the singular momentum of ``kind``."""
    kind = StateKind.parse(kind)
    lam = lambda_param(kind, singular_momentum(kind, config, plus), config, plus)
    return characteristic_roots(kind, config, lam, plus)


def series_vs_root_error(kind: StateKind, config: NormalizedConfig,
                         plus: bool | None = None) -> float:
    """|exact singular root - second-order series| on the configured branch."""
    roots = singular_roots(kind, config, plus)
    exact = roots.branch_root(config.branch)
    return float(abs(exact - singular_series(kind, config, plus)(config.h)))
