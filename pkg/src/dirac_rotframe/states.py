"""Gaussian-envelope spinor states in the rotating and initial frames.

A state in the rotating frame is

    Psi~ = N exp(-i E~ t + i p~ z - d r^2 / 2 + d1 x + d2 y) * P(x, y)

with P a spinor polynomial of degree 0 or 1.  Because d2 is O(1) while d
is O(omega_n), the envelope centre sits at distance d2/d from the axis, so
all magnitudes are handled in log space around that centre.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import ALGEBRA, Branch, DomainError, NormalizedConfig, NumericalError, rotation_factor
from .spectrum import (EnergyRoots, StateKind, _plus_family, lambda_param, pole,
                       singular_momentum, singular_roots)

# sign of the (i x - y) term of the second excited state; the printed
# formula carries +1, the Dirac equation requires -1 (see dirac_residual)
EXCITED2_LINEAR_SIGN = -1


class Frame(enum.Enum):
    ROTATING = "rotating"
    INITIAL = "initial"

    @classmethod
    def parse(cls, value) -> "Frame":
        return value if isinstance(value, cls) else cls(str(value).strip().lower())


@dataclass(frozen=True)
class EnvelopeParams:
    d: float
    d1: complex
    d2: complex

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError("envelope requires d > 0")

    @property
    def center(self) -> tuple[float, float]:
        """Peak of |envelope|^2."""
        return (self.d1.real / self.d, self.d2.real / self.d)

    @property
    def log_weight(self) -> float:
        """log of the integral of |envelope|^2 over the plane."""
        cx, cy = self.center
        return math.log(math.pi / self.d) + self.d * (cx * cx + cy * cy)


def envelope_params(energy_e: complex, p_tilde: float, config: NormalizedConfig,
                    plus: bool | None = None) -> EnvelopeParams:
    """d, d1, d2 for a state of energy ``energy_e``.

    ``p_tilde`` does not enter once the denominator is written in
    normalised units; it is accepted to keep the call symmetric with the
    other constructors.
    """
    plus = _plus_family(config, plus)
    d = config.d
    P = pole(config, plus)
    if config.h == 0:
        d2 = 0j
    else:
        if energy_e == P:
            raise DomainError("energy at the pole of the envelope relation")
        d2 = complex(config.h * d / (config.omega_n * (energy_e - P)))
    d1 = 1j * d2 if plus else -1j * d2
    return EnvelopeParams(d=d, d1=d1, d2=d2)


def gaussian_moment(mx: int, my: int, envelope: EnvelopeParams) -> float:
    """Integral of x^mx y^my exp(-d r^2 + 2 Re(d1) x + 2 Re(d2) y) over the plane.

    Closed form via moments about the shifted centre.  Overflows to inf for
    envelopes displaced by many widths; use :func:`normalized_moment` there.
    """
    return math.exp(envelope.log_weight) * normalized_moment(mx, my, envelope)


def normalized_moment(mx: int, my: int, envelope: EnvelopeParams) -> float:
    """gaussian_moment divided by the zeroth moment."""
    if mx < 0 or my < 0:
        raise DomainError("moment orders must be non-negative")
    cx, cy = envelope.center
    return _shifted_moment(mx, cx, envelope.d) * _shifted_moment(my, cy, envelope.d)


def _shifted_moment(m: int, x0: float, d: float) -> float:
    total = 0.0
    for j in range(0, m + 1, 2):
        # E[u^j] for u ~ N(0, 1/(2d))
        total += math.comb(m, j) * x0 ** (m - j) * _double_factorial(j - 1) / (2.0 * d) ** (j // 2)
    return total


def _double_factorial(n: int) -> int:
    return 1 if n <= 0 else n * _double_factorial(n - 2)


@dataclass(frozen=True)
class StateSolution:
    kind: StateKind
    config: NormalizedConfig
    energy_e: complex
    p_tilde: float
    lam: float
    envelope: EnvelopeParams
    psi0: np.ndarray
    psi_linear: tuple[np.ndarray, np.ndarray] | None
    log_norm_centered: float
    plus: bool = False
    n: int = 0
    roots: EnergyRoots | None = field(default=None, repr=False, compare=False)

    @property
    def log_norm(self) -> float:
        """log of the normalisation constant N of the uncentred form."""
        cx, cy = self.envelope.center
        return self.log_norm_centered - 0.5 * self.envelope.d * (cx * cx + cy * cy)

    @property
    def norm_const(self) -> float:
        return math.exp(self.log_norm)

    @property
    def degree(self) -> int:
        return self.kind.degree

    @property
    def labels(self) -> tuple[int, int]:
        """(angular integer n, polynomial degree)."""
        return (self.n, self.degree)

    @property
    def branch(self) -> Branch:
        return self.config.branch

    @property
    def energy_tilde(self) -> float:
        """Rotating-frame energy E~ = E + epsilon p~ (natural units)."""
        return (self.energy_e + self.config.epsilon * self.p_tilde).real

    @property
    def field_sign(self) -> int:
        """Sign of e*H3."""
        return 1 if self.plus else -1

    def centered_coefficients(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Spinor polynomial re-expanded about the envelope centre."""
        cx, cy = self.envelope.center
        if self.psi_linear is None:
            z = np.zeros(4, dtype=complex)
            return self.psi0, z, z
        px, py = self.psi_linear
        return self.psi0 + cx * px + cy * py, px, py

    # -- evaluation -------------------------------------------------------

    def phase(self, x, y, z, t):
        """Phase of the scalar factor.

        The z and t parts are reduced mod 2 pi first: E~ t reaches 1e10 rad
        over a beat period and would otherwise add rounding noise point by point.
        """
        env = self.envelope
        tz = np.fmod(self.p_tilde * z - self.energy_tilde * t, 2.0 * math.pi)
        return env.d1.imag * x + env.d2.imag * y + tz

    def rotating(self, x, y, z=0.0, t=0.0) -> np.ndarray:
        """Psi~ at rotating-frame coordinates; returns shape ``(..., 4)``."""
        x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
        env = self.envelope
        cx, cy = env.center
        ux, uy = x - cx, y - cy
        log_amp = -0.5 * env.d * (ux * ux + uy * uy) + self.log_norm_centered
        scalar = np.exp(log_amp + 1j * self.phase(x, y, z, t))
        a0, px, py = self.centered_coefficients()
        spin = a0 + ux[..., None] * px + uy[..., None] * py
        return scalar[..., None] * spin

    def initial(self, x, y, z=0.0, t=0.0) -> np.ndarray:
        """Psi in the laboratory frame."""
        x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
        theta = self.config.omega_n * t - self.config.k * z
        c, s = np.cos(theta), np.sin(theta)
        xr = x * c + y * s
        yr = -x * s + y * c
        psi_r = self.rotating(xr, yr, z, t)
        return np.einsum("...ij,...j->...i", rotation_factor(theta), psi_r)

    def vector_potential(self, x, y, z=0.0, t=0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """e*A in natural units at laboratory coordinates."""
        return field_vector_potential(self.config, self.field_sign, x, y, z, t)

    def center_lab(self, t: float = 0.0, z: float = 0.0) -> tuple[float, float]:
        theta = self.config.omega_n * t - self.config.k * z
        cx, cy = self.envelope.center
        return (cx * math.cos(theta) - cy * math.sin(theta),
                cx * math.sin(theta) + cy * math.cos(theta))


def field_vector_potential(config: NormalizedConfig, field_sign: int, x, y, z=0.0, t=0.0):
    """e*A for the static field (e H3 = field_sign * 2 d) plus the rotating wave."""
    x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
    eH3 = field_sign * 2.0 * config.d
    theta = config.omega_n * t - config.k * z
    a1 = -0.5 * eH3 * y + config.h * np.cos(theta)
    a2 = 0.5 * eH3 * x + config.h * np.sin(theta)
    return a1, a2, np.zeros_like(a1)


def _ground_spinor(E: complex, P: float, h: float, eps: int) -> np.ndarray:
    return np.array([h * E, -eps * (E + 1) * (E - P), eps * h * E, -(E - 1) * (E - P)],
                    dtype=complex)


def _excited2_spinors(E: complex, P: float, h: float, eps: int, k: float, sign: int):
    const = np.array([(E * P + 1) * (E - P), -eps * (E + 1) * P * h,
                      eps * (E * P + 1) * (E - P), -(E - 1) * P * h], dtype=complex)
    # coefficient of (i x - y)
    lin = sign * np.array([-eps * h * k * E * P, (E + 1) * P * k * (E - P),
                           -h * k * E * P, eps * (E - 1) * P * k * (E - P)], dtype=complex)
    return const, (1j * lin, -lin)


_PLUS_MATRIX = ALGEBRA.alpha[0] @ ALGEBRA.alpha[2] @ ALGEBRA.beta


def build_state(kind: StateKind, config: NormalizedConfig, use_plus_transform: bool | None = None,
                energy_e: complex | None = None, excited2_sign: int = EXCITED2_LINEAR_SIGN,
                n: int = 0) -> StateSolution:
    """Singular state of ``kind`` on ``config.branch``.

    ``use_plus_transform`` selects the e*H3 > 0 family (default: follow
    ``config.d_sign``); it is only available for the ground state.
    ``energy_e`` overrides the exact singular root, e.g. with a series value.
    """
    kind = StateKind.parse(kind)
    plus = _plus_family(config, use_plus_transform)
    p = singular_momentum(kind, config, plus)
    lam = lambda_param(kind, p, config, plus)
    roots = singular_roots(kind, config, plus)
    E = roots.branch_root(config.branch) if energy_e is None else complex(energy_e)
    if abs(E.imag) < 1e-15:
        E = complex(E.real)
    P = pole(config, plus)
    if config.h > 0 and E == P:
        raise DomainError("singular root coincides with the pole")
    env = envelope_params(E, p, config, plus)
    eps, h = config.epsilon, config.h

    if kind is StateKind.GROUND:
        psi0 = _ground_spinor(E, P, h, eps)
        lin = None
    elif kind is StateKind.EXCITED1:
        if env.d2 == 0:
            raise DomainError("first excited state needs h > 0 (d2 = 0)")
        psi0 = _ground_spinor(E, P, h, eps)
        r = env.d / env.d2
        lin = (psi0 * (-1j * r), psi0 * (-r))
    else:
        psi0, lin = _excited2_spinors(E, P, h, eps, config.k, excited2_sign)

    if plus:
        T = eps * _PLUS_MATRIX
        psi0 = T @ psi0
        if lin is not None:
            lin = (T @ lin[0], T @ lin[1])

    return StateSolution(kind=kind, config=config, energy_e=E, p_tilde=p, lam=lam,
                         envelope=env, psi0=psi0, psi_linear=lin,
                         log_norm_centered=_log_norm_centered(psi0, lin, env),
                         plus=plus, n=int(n), roots=roots)


def _log_norm_centered(psi0, lin, env: EnvelopeParams) -> float:
    """-1/2 log of the norm of the centred form, from closed-form Gaussian moments.

    The factor exp(d |c|^2) of the full weight is left out; it cancels
    against the envelope evaluated about its centre.
    """
    cx, cy = env.center
    centred = EnvelopeParams(d=env.d, d1=0j, d2=0j)
    if lin is None:
        a0, px, py = psi0, np.zeros(4), np.zeros(4)
    else:
        px, py = lin
        a0 = psi0 + cx * px + cy * py
    m00 = normalized_moment(0, 0, centred)
    m20 = normalized_moment(2, 0, centred)
    m02 = normalized_moment(0, 2, centred)
    # odd central moments vanish
    bracket = (np.vdot(a0, a0).real * m00 + np.vdot(px, px).real * m20
               + np.vdot(py, py).real * m02)
    if not bracket > 0:
        raise DomainError("state spinor vanishes identically")
    return -0.5 * (math.log(math.pi / env.d) + math.log(bracket))


# --------------------------------------------------------------------------
# quadrature oracle


@dataclass(frozen=True)
class GridSpec:
    """Tensor Gauss-Legendre grid of half-width ``width_factor / sqrt(d)``."""

    nodes: int = 256
    width_factor: float = 6.0
    check: bool = True
    tol: float = 1e-10


def gauss_legendre_grid(center: tuple[float, float], half_width: float, nodes: int):
    g, w = np.polynomial.legendre.leggauss(nodes)
    xs = center[0] + half_width * g
    ys = center[1] + half_width * g
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    W = np.outer(w, w) * half_width * half_width
    return X, Y, W


def cross_section_integral(integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
                           center: tuple[float, float], half_width: float,
                           grid: GridSpec = GridSpec()):
    """Integrate ``integrand(X, Y)`` over a square; checks against half the nodes."""
    X, Y, W = gauss_legendre_grid(center, half_width, grid.nodes)
    val = np.einsum("ij,ij...->...", W, integrand(X, Y))
    if grid.check:
        Xc, Yc, Wc = gauss_legendre_grid(center, half_width, max(grid.nodes // 2, 8))
        coarse = np.einsum("ij,ij...->...", Wc, integrand(Xc, Yc))
        err = float(np.max(np.abs(val - coarse)))
        if err > grid.tol * max(1.0, float(np.max(np.abs(val)))):
            raise NumericalError(f"quadrature not converged (change {err:.3e})", achieved=err)
    return val


def frame_center(state: StateSolution, frame: Frame, t: float, z: float) -> tuple[float, float]:
    return state.envelope.center if frame is Frame.ROTATING else state.center_lab(t, z)


def wavefunction_at(state: StateSolution, x, y, z=0.0, t=0.0, frame: Frame | str = Frame.ROTATING):
    """Spinor at the given coordinates of ``frame`` (rotating: x~, y~, z~, t~)."""
    frame = Frame.parse(frame)
    return state.rotating(x, y, z, t) if frame is Frame.ROTATING else state.initial(x, y, z, t)


def quadrature_norm(state: StateSolution, frame: Frame | str = Frame.ROTATING,
                    t: float = 0.0, z: float = 0.0, grid: GridSpec = GridSpec()) -> float:
    frame = Frame.parse(frame)
    half = grid.width_factor / math.sqrt(state.envelope.d)

    def dens(X, Y):
        psi = wavefunction_at(state, X, Y, z, t, frame)
        return np.sum(np.abs(psi) ** 2, axis=-1)

    return float(cross_section_integral(dens, frame_center(state, frame, t, z), half, grid))


# --------------------------------------------------------------------------
# finite-difference residual of the Dirac equation


@dataclass(frozen=True)
class PlaneWave:
    """Free positive-energy plane wave, the control case of the residual check."""

    momentum: tuple[float, float, float]
    spin_up: bool = True

    @property
    def energy(self) -> float:
        return math.sqrt(1.0 + sum(p * p for p in self.momentum))

    def spinor(self) -> np.ndarray:
        chi = np.array([1, 0] if self.spin_up else [0, 1], dtype=complex)
        sp = sum(p * s for p, s in zip(self.momentum, (np.array([[0, 1], [1, 0]]),
                                                       np.array([[0, -1j], [1j, 0]]),
                                                       np.array([[1, 0], [0, -1]]))))
        return np.concatenate([chi, sp @ chi / (self.energy + 1.0)])

    def initial(self, x, y, z=0.0, t=0.0):
        x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
        px, py, pz = self.momentum
        ph = np.exp(1j * (px * x + py * y + pz * z - self.energy * t))
        return ph[..., None] * self.spinor()

    def vector_potential(self, x, y, z=0.0, t=0.0):
        zero = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return zero, zero, zero


def default_sample_points(state: StateSolution, t: float = 0.0, count: int = 9,
                          seed: int = 7) -> np.ndarray:
    """Points within one envelope width of the lab-frame centre, shape (count, 3)."""
    rng = np.random.default_rng(seed)
    cx, cy = state.center_lab(t, 0.0)
    w = 1.0 / math.sqrt(state.envelope.d)
    off = rng.uniform(-w, w, size=(count, 2))
    return np.column_stack([cx + off[:, 0], cy + off[:, 1], rng.uniform(-1, 1, count)])


def dirac_residual(state, sample_points, t: float = 0.0, fd_step: float = 1e-3) -> float:
    """Max over points of |i dPsi/dt - H Psi| / |Psi| with central differences.

    ``state`` is anything exposing ``initial(x, y, z, t)`` and
    ``vector_potential(x, y, z, t)`` in natural units.
    """
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    hstep = fd_step
    f = state.initial

    def d(axis):
        sh = [np.zeros_like(x) for _ in range(4)]
        sh[axis] = sh[axis] + hstep
        fp = f(x + sh[0], y + sh[1], z + sh[2], t + sh[3])
        fm = f(x - sh[0], y - sh[1], z - sh[2], t - sh[3])
        return (fp - fm) / (2.0 * hstep)

    psi = f(x, y, z, t)
    grads = [d(0), d(1), d(2)]
    dt = d(3)
    A = state.vector_potential(x, y, z, t)
    hpsi = np.einsum("ij,pj->pi", ALGEBRA.beta, psi)
    for a, g, Ak in zip(ALGEBRA.alpha, grads, A):
        kin = -1j * g - Ak[:, None] * psi
        hpsi = hpsi + np.einsum("ij,pj->pi", a, kin)
    res = 1j * dt - hpsi
    mag = np.linalg.norm(psi, axis=-1)
    return float(np.max(np.linalg.norm(res, axis=-1) / mag))
