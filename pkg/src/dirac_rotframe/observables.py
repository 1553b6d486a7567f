"""Average energy, momentum and spin: first-order closed forms and a quadrature oracle.

Natural units throughout (energies in mc^2, momenta in mc, spin in hbar).
The closed forms drop terms of order h and hbar*Omega/mc^2; the oracle
integrates Psi^dagger O Psi over the laboratory cross-section with analytic
derivatives of the Gaussian-polynomial form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import ALGEBRA, DomainError, NormalizedConfig, UnsupportedCase, rotation_factor
from .spectrum import StateKind
from .states import GridSpec, StateSolution, cross_section_integral

_ENERGY_CORRECTION = {StateKind.GROUND: 0.5, StateKind.EXCITED1: -0.5, StateKind.EXCITED2: 1.5}


def _require_default_family(state: StateSolution):
    if state.plus:
        raise UnsupportedCase("closed forms are only available for the e*H3 < 0 family")


def _phase(config: NormalizedConfig, t, z):
    return config.omega_n * np.asarray(t, dtype=float) - config.k * np.asarray(z, dtype=float)


def average_energy(state: StateSolution) -> float:
    """(e0^2 + 1)/e0 plus the per-kind hbar*Omega correction."""
    _require_default_family(state)
    e0 = state.config.e0
    return (e0 * e0 + 1.0) / e0 + _ENERGY_CORRECTION[state.kind] * state.config.omega_n


def average_momentum(state: StateSolution, t=0.0, z=0.0):
    """Canonical momentum (p1, p2, p3); arrays broadcast over ``t`` and ``z``."""
    _require_default_family(state)
    cfg = state.config
    th = _phase(cfg, t, z)
    amp = -cfg.branch.sign * 0.5 * math.sqrt(cfg.e0 ** 2 + 1.0)
    p3 = np.full(np.shape(th), cfg.epsilon / cfg.e0)
    return amp * np.cos(th), amp * np.sin(th), p3 if p3.ndim else float(p3)


def spin_amplitude(config: NormalizedConfig) -> float:
    """Signed transverse spin amplitude of a single singular state."""
    return -config.branch.sign * 0.5 * config.epsilon * config.e0 / math.sqrt(config.e0 ** 2 + 1.0)


def average_spin(state: StateSolution, t=0.0, z=0.0):
    _require_default_family(state)
    th = _phase(state.config, t, z)
    a = spin_amplitude(state.config)
    s3 = np.zeros(np.shape(th))
    return a * np.cos(th), a * np.sin(th), s3 if s3.ndim else 0.0


# --------------------------------------------------------------------------
# quadrature oracle

OPERATORS = ("identity", "hamiltonian", "p1", "p2", "p3", "pi1", "pi2", "pi3",
             "sigma1", "sigma2", "sigma3", "i_dt")


def _lab_fields(state: StateSolution, X, Y, z, t):
    """Psi and its analytic first derivatives at laboratory points."""
    cfg = state.config
    env = state.envelope
    th = cfg.omega_n * t - cfg.k * z
    c, s = math.cos(th), math.sin(th)
    xr = X * c + Y * s
    yr = -X * s + Y * c
    psi_r = state.rotating(xr, yr, z, t)
    cx, cy = env.center
    _, px, py = state.centered_coefficients()
    scalar_spin = psi_r
    # scalar envelope factor S with spin polynomial q: psi_r = S q
    lead = np.exp(-0.5 * env.d * ((xr - cx) ** 2 + (yr - cy) ** 2) + state.log_norm_centered
                  + 1j * state.phase(xr, yr, z, t))
    gx = (-env.d * (xr - cx) + 1j * env.d1.imag)[..., None] * scalar_spin + lead[..., None] * px
    gy = (-env.d * (yr - cy) + 1j * env.d2.imag)[..., None] * scalar_spin + lead[..., None] * py
    U = rotation_factor(th)
    a12 = ALGEBRA.alpha1_alpha2

    def lab(v):
        return v @ U.T

    psi = lab(psi_r)
    dx = lab(c * gx - s * gy)
    dy = lab(s * gx + c * gy)
    # theta derivative: spinor rotation plus coordinate rotation
    dth = lab(yr[..., None] * gx - xr[..., None] * gy) - 0.5 * psi @ a12.T
    dz = 1j * state.p_tilde * psi - cfg.k * dth
    dt = -1j * state.energy_tilde * psi + cfg.omega_n * dth
    return psi, (dx, dy, dz), dt


def _apply(name: str, state: StateSolution, psi, grads, dt, X, Y, z, t):
    if name == "identity":
        return psi
    if name.startswith("sigma"):
        return psi @ ALGEBRA.sigma[int(name[-1]) - 1].T
    if name == "i_dt":
        return 1j * dt
    A = state.vector_potential(X, Y, z, t)
    if name.startswith("pi"):
        j = int(name[-1]) - 1
        return -1j * grads[j] - A[j][..., None] * psi
    if name.startswith("p"):
        return -1j * grads[int(name[-1]) - 1]
    if name == "hamiltonian":
        out = psi @ ALGEBRA.beta.T
        for a, g, Ak in zip(ALGEBRA.alpha, grads, A):
            out = out + (-1j * g - Ak[..., None] * psi) @ a.T
        return out
    raise DomainError(f"unknown operator {name!r}; expected one of {OPERATORS}")


def _normalize_spec(operator_spec) -> dict[str, complex]:
    if isinstance(operator_spec, str):
        return {operator_spec: 1.0}
    return dict(operator_spec)


def observable_quadrature(state_or_mix, operator_spec: str | Mapping[str, complex],
                          t: float = 0.0, z: float = 0.0, grid: GridSpec = GridSpec()) -> float:
    """Re <Psi|O|Psi> / <Psi|Psi> over the laboratory cross-section.

    ``operator_spec`` is an operator name from :data:`OPERATORS` or a
    mapping ``{name: coefficient}`` for linear combinations.  A
    :class:`MixedState` is evolved exactly, each constituent with its own
    time dependence.
    """
    spec = _normalize_spec(operator_spec)
    members = state_or_mix.members() if isinstance(state_or_mix, MixedState) else [(1.0, state_or_mix)]
    ref = members[0][1]
    half = grid.width_factor / math.sqrt(ref.envelope.d)
    center = ref.center_lab(t, z)

    def integrand(X, Y):
        psi = 0j
        grads = [0j, 0j, 0j]
        dt = 0j
        for coef, st in members:
            p, g, d = _lab_fields(st, X, Y, z, t)
            psi = psi + coef * p
            grads = [gi + coef * gj for gi, gj in zip(grads, g)]
            dt = dt + coef * d
        norm = np.sum(np.abs(psi) ** 2, axis=-1)
        vals = [norm]
        for name, coef in spec.items():
            opsi = _apply(name, ref, psi, grads, dt, X, Y, z, t)
            vals.append(coef * np.einsum("...i,...i->...", psi.conj(), opsi))
        return np.stack(vals, axis=-1)

    out = cross_section_integral(integrand, center, half, grid)
    return float((np.sum(out[1:]) / out[0].real).real)


def spin_quadrature(state_or_mix, t=0.0, z=0.0, grid: GridSpec = GridSpec()):
    return tuple(0.5 * observable_quadrature(state_or_mix, f"sigma{k}", t, z, grid) for k in (1, 2, 3))


def momentum_quadrature(state_or_mix, t=0.0, z=0.0, kinetic: bool = False,
                        grid: GridSpec = GridSpec()):
    pre = "pi" if kinetic else "p"
    return tuple(observable_quadrature(state_or_mix, f"{pre}{k}", t, z, grid) for k in (1, 2, 3))


# --------------------------------------------------------------------------
# mixed states


@dataclass(frozen=True)
class MixedState:
    """c_g * ground + c_e2 * excited2 with a common momentum."""

    c_g: complex
    c_e2: complex
    ground: StateSolution
    excited2: StateSolution

    def __post_init__(self):
        if abs(abs(self.c_g) ** 2 + abs(self.c_e2) ** 2 - 1.0) > 1e-12:
            raise DomainError("mixing coefficients must satisfy |c_g|^2 + |c_e2|^2 = 1")
        if self.ground.kind is not StateKind.GROUND or self.excited2.kind is not StateKind.EXCITED2:
            raise DomainError("a mixed state pairs a ground and a second excited state")
        if self.ground.config.branch is not self.excited2.config.branch:
            warnings.warn("opposite-branch mixture: the cross term is exponentially suppressed",
                          stacklevel=2)

    @property
    def same_momentum(self) -> bool:
        return math.isclose(self.ground.p_tilde, self.excited2.p_tilde, rel_tol=1e-14, abs_tol=1e-15)

    def members(self):
        return [(self.c_g, self.ground), (self.c_e2, self.excited2)]


def make_mixed_state(config: NormalizedConfig, c_g: complex = 1 / math.sqrt(2),
                     c_e2: complex = 1 / math.sqrt(2), excited2_config: NormalizedConfig | None = None):
    from .states import build_state

    g = build_state(StateKind.GROUND, config)
    e = build_state(StateKind.EXCITED2, excited2_config or config)
    return MixedState(c_g=c_g, c_e2=c_e2, ground=g, excited2=e)


def beat_frequency(config: NormalizedConfig) -> float:
    """2 e0^2 omega_m / (e0^2 + 1)^(3/2), in units of mc^2/hbar."""
    e0 = config.e0
    return 2.0 * e0 * e0 * config.omega_m / (e0 * e0 + 1.0) ** 1.5


def mixed_spin(mix: MixedState, t=0.0, z=0.0):
    """First-order spin of a ground / second-excited superposition.

    Same-sign real coefficients modulate the single-state amplitude by
    1 +- cos(omega t); opposite signs use sin(omega t).
    """
    if not mix.same_momentum:
        raise DomainError("mixed state constituents must share the momentum p~")
    g, e = mix.ground, mix.excited2
    _require_default_family(g)
    t = np.asarray(t, dtype=float)
    th = _phase(g.config, t, z)
    wg, we = abs(mix.c_g) ** 2, abs(mix.c_e2) ** 2
    amp_g, amp_e = spin_amplitude(g.config), spin_amplitude(e.config)
    cross = 2.0 * abs(mix.c_g) * abs(mix.c_e2)
    if cross == 0.0:
        envelope = wg * amp_g + we * amp_e
    else:
        f = cross_factor(mix)
        w = beat_frequency(g.config) * t
        same_sign = (mix.c_g * np.conj(mix.c_e2)).real >= 0
        mod = np.cos(w) if same_sign else np.sin(w)
        envelope = wg * amp_g + we * amp_e + g.config.branch.sign * cross * f * amp_g * mod
    s3 = np.zeros(np.shape(th))
    return envelope * np.cos(th), envelope * np.sin(th), s3 if s3.ndim else 0.0


def cross_factor(mix: MixedState) -> float:
    """Suppression of the ground / excited cross term: 1 for a common branch."""
    if mix.ground.config.branch is mix.excited2.config.branch:
        return 1.0
    return math.exp(overlap_factor(mix.ground, mix.excited2)[0])


def overlap_factor(state_a: StateSolution, state_b: StateSolution) -> tuple[float, float]:
    """log |factor| of the cross term between two states sharing d.

    Returns (exact Gaussian-algebra exponent, first-order approximation
    -(e0^2 + 1) / (2 d)).  For real d2 the exact exponent is
    -(d2' - d2'')^2 / (2 d).
    """
    ea, eb = state_a.envelope, state_b.envelope
    if not math.isclose(ea.d, eb.d, rel_tol=1e-14):
        raise DomainError("overlap factor needs states with the same d")
    d = ea.d
    cross = ((np.conj(ea.d1) + eb.d1) ** 2 + (np.conj(ea.d2) + eb.d2) ** 2) / (4.0 * d)
    own = (ea.d1.real ** 2 + ea.d2.real ** 2 + eb.d1.real ** 2 + eb.d2.real ** 2) / (2.0 * d)
    exact = float(cross.real - own)
    if state_a.config.branch is state_b.config.branch:
        approx = 0.0
    else:
        approx = overlap_approx(state_a.config.e0, d)
    return exact, approx


def overlap_approx(e0: float, d: float, compton_bar: float = 1.0) -> float:
    """-(e0^2 + 1) / (2 lambda_bar^2 d); pass d in cm^-2 with lambda_bar in cm for CGS."""
    return -(e0 * e0 + 1.0) / (2.0 * compton_bar ** 2 * d)


def pauli_reference_spin(omega_m: float, Omega: float, t):
    """Non-relativistic spin in a rotating field; |s| = 1/2 at all times."""
    t = np.asarray(t, dtype=float)
    sm = np.sin(omega_m * t)
    return 0.5 * sm * np.sin(Omega * t), 0.5 * sm * np.cos(Omega * t), 0.5 * np.cos(omega_m * t)


def energy_min_scan(e0_range: tuple[float, float] = (0.5, 2.0), steps: int = 1501):
    """Grid minimum of (e0^2 + 1)/e0; returns (argmin e0, minimum energy)."""
    lo, hi = e0_range
    if steps < 1 or not hi >= lo or lo <= 0:
        raise DomainError("energy scan needs a non-empty positive e0 range")
    e0 = np.linspace(lo, hi, steps)
    ea = (e0 * e0 + 1.0) / e0
    i = int(np.argmin(ea))
    return float(e0[i]), float(ea[i])


@dataclass(frozen=True)
class ResonanceReport:
    residual: float       # mu H3 - hbar Omega / 2, in mc^2
    inverse_e0: float
    g_factor: float       # 2 / e0, equal to 2 at resonance


def resonance_check(config: NormalizedConfig) -> ResonanceReport:
    # mu |H3| = hbar^2 d / m in natural units
    residual = config.d - 0.5 * config.omega_n
    return ResonanceReport(residual=residual, inverse_e0=1.0 / config.e0, g_factor=2.0 / config.e0)


def resonance_residual_physical(inp) -> float:
    """mu |H3| - hbar Omega / 2 in erg for a :class:`PhysicalInput`."""
    mu = abs(inp.charge_e) * inp.hbar / (2.0 * inp.mass_m * inp.c)
    return mu * abs(inp.static_field_H3) - 0.5 * inp.hbar * inp.frequency_Omega


# --------------------------------------------------------------------------
# time series


@dataclass(frozen=True)
class ObservableSeries:
    times: np.ndarray
    values: dict[str, np.ndarray]
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise DomainError("times must be a strictly increasing 1-D array")
        for k, v in self.values.items():
            if np.shape(v) != t.shape:
                raise DomainError(f"component {k!r} has length {np.shape(v)} != {t.shape}")
        object.__setattr__(self, "times", t)

    @property
    def columns(self) -> list[str]:
        return ["t", *self.values]


def momentum_series(state: StateSolution, times, z: float = 0.0) -> ObservableSeries:
    p1, p2, p3 = average_momentum(state, times, z)
    t = np.asarray(times, dtype=float)
    return ObservableSeries(t, {"p1": p1, "p2": p2, "p3": np.broadcast_to(p3, t.shape).copy()},
                            label=f"{state.kind.value}/{state.branch.name.lower()}")


def spin_series(state: StateSolution, times, z: float = 0.0) -> ObservableSeries:
    s1, s2, s3 = average_spin(state, times, z)
    t = np.asarray(times, dtype=float)
    return ObservableSeries(t, {"s1": s1, "s2": s2, "s3": np.broadcast_to(s3, t.shape).copy()},
                            label=f"{state.kind.value}/{state.branch.name.lower()}")


def mixed_spin_series(mix: MixedState, times, z: float = 0.0) -> ObservableSeries:
    s1, s2, s3 = mixed_spin(mix, times, z)
    t = np.asarray(times, dtype=float)
    return ObservableSeries(t, {"s1": s1, "s2": s2, "s3": np.broadcast_to(s3, t.shape).copy()},
                            label=f"mixed c_g={mix.c_g} c_e2={mix.c_e2}")


def pauli_series(omega_m: float, Omega: float, times) -> ObservableSeries:
    s1, s2, s3 = pauli_reference_spin(omega_m, Omega, times)
    return ObservableSeries(np.asarray(times, dtype=float), {"s1": s1, "s2": s2, "s3": s3},
                            label="pauli")
