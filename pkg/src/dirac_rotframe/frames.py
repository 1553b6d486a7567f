"""Galilean and non-Galilean rotating frames.

Coordinates are cylindrical (phi, r, z, t).  The non-Galilean map mixes
angle into time and longitudinal position::

    phi~ = phi - Omega t + k z
    z~   = lambda phi + z + v t
    t~   = -tau phi + gamma z + t

Bounded single-valued states then need tau E + lambda p = n (hbar = 1).
Natural units throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, NormalizedConfig, NumericalError

QUANT_TOL = 1e-12


class TransformMode(enum.Enum):
    GALILEAN = "galilean"
    NON_GALILEAN = "non_galilean"

    @classmethod
    def parse(cls, value) -> "TransformMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower().replace("-", "_"))


@dataclass(frozen=True)
class TransformParams:
    tau: float = 0.0
    lambda_len: float = 0.0
    gamma: float = 0.0
    v: float = 0.0
    n: int = 0

    def __post_init__(self):
        n = self.n
        if isinstance(n, float):
            if not n.is_integer():
                raise DomainError(f"n must be an integer, got {n}")
            object.__setattr__(self, "n", int(n))
        elif not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise DomainError(f"n must be an integer, got {n!r}")
        else:
            object.__setattr__(self, "n", int(n))
        for name in ("tau", "lambda_len", "gamma", "v"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


@dataclass(frozen=True)
class FrameEvent:
    phi: np.ndarray | float
    r: np.ndarray | float
    z: np.ndarray | float
    t: np.ndarray | float

    def __post_init__(self):
        if np.any(np.asarray(self.r) < 0):
            raise DomainError("r must be non-negative")

    def as_array(self) -> np.ndarray:
        """(phi, z, t) stacked on the last axis."""
        return np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                              for v in (self.phi, self.z, self.t))), axis=-1)


def transform_matrix(mode, params: TransformParams, Omega: float, k: float) -> np.ndarray:
    """Linear map (phi, z, t) -> (phi~, z~, t~)."""
    mode = TransformMode.parse(mode)
    M = np.array([[1.0, k, -Omega], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    if mode is TransformMode.NON_GALILEAN:
        M[1] = [params.lambda_len, 1.0, params.v]
        M[2] = [-params.tau, params.gamma, 1.0]
    return M


def transform_event(event: FrameEvent, mode, params: TransformParams = TransformParams(),
                    Omega: float = 0.0, k: float = 0.0) -> FrameEvent:
    M = transform_matrix(mode, params, Omega, k)
    out = event.as_array() @ M.T
    return FrameEvent(phi=out[..., 0], r=event.r, z=out[..., 1], t=out[..., 2])


def inverse_transform_event(event: FrameEvent, mode, params: TransformParams = TransformParams(),
                            Omega: float = 0.0, k: float = 0.0) -> FrameEvent:
    M = transform_matrix(mode, params, Omega, k)
    det = np.linalg.det(M)
    if abs(det) < 1e-14:
        raise DomainError(f"transformation is singular (det = {det:.3e})")
    out = np.linalg.solve(M, event.as_array().reshape(-1, 3).T).T.reshape(event.as_array().shape)
    return FrameEvent(phi=out[..., 0], r=event.r, z=out[..., 1], t=out[..., 2])


# --------------------------------------------------------------------------
# quantization and primed parameters


def quantization_residual(E, p, params: TransformParams):
    """tau E + lambda p - n."""
    return params.tau * np.asarray(E) + params.lambda_len * np.asarray(p) - params.n


def satisfies_quantization(E, p, params: TransformParams, tol: float = QUANT_TOL) -> bool:
    scale = max(1.0, abs(params.tau * E), abs(params.lambda_len * p))
    return bool(abs(quantization_residual(E, p, params)) <= tol * scale)


def solve_quantization(params: TransformParams, E: float | None = None,
                       p: float | None = None) -> float:
    """Return the missing one of (E, p) that makes the quantization residual vanish."""
    if (E is None) == (p is None):
        raise DomainError("give exactly one of E and p")
    if p is None:
        if params.lambda_len == 0:
            raise DomainError("lambda = 0: p does not enter the condition")
        return (params.n - params.tau * E) / params.lambda_len
    if params.tau == 0:
        raise DomainError("tau = 0: E does not enter the condition")
    return (params.n - params.lambda_len * p) / params.tau


def primed_parameters(E, p, params: TransformParams, v_z: float, Omega: float,
                      k: float) -> tuple[float, float]:
    """Rotating-frame energy and momentum seen through the non-Galilean map.

    E' = E - v p - n Omega,  p' = -E / v_z + p - n k.
    """
    if v_z == 0:
        raise DomainError("v_z = 0")
    n = params.n
    return E - params.v * p - n * Omega, -E / v_z + p - n * k


def phase_coefficients(E, p, params: TransformParams, Omega: float, k: float,
                       E_tilde: float, p_tilde: float) -> tuple[float, float, float]:
    """Coefficients of (phi, z, t) in the phase residual; all zero iff the identity holds."""
    tau, lam, g, v, n = params.tau, params.lambda_len, params.gamma, params.v, params.n
    return (tau * E + lam * p - n,
            -g * E + p - n * k - p_tilde,
            -E + v * p + n * Omega + E_tilde)


def phase_identity_residual(E, p, params: TransformParams, event: FrameEvent, Omega: float,
                            k: float, v_z: float | None = None, E_tilde: float | None = None,
                            p_tilde: float | None = None):
    """(-E t~ + p z~ - n phi~) - (-E~ t + p~ z) at ``event``.

    Without explicit ``E_tilde`` / ``p_tilde`` the primed parameters are
    used, with ``v_z = 1 / gamma`` unless given.
    """
    if E_tilde is None or p_tilde is None:
        if v_z is None:
            if params.gamma == 0:
                raise DomainError("need v_z or a nonzero gamma")
            v_z = 1.0 / params.gamma
        Ep, pp = primed_parameters(E, p, params, v_z, Omega, k)
        E_tilde = Ep if E_tilde is None else E_tilde
        p_tilde = pp if p_tilde is None else p_tilde
    ev = transform_event(event, TransformMode.NON_GALILEAN, params, Omega, k)
    z = np.asarray(event.z, dtype=float)
    t = np.asarray(event.t, dtype=float)
    return (-E * ev.t + p * ev.z - params.n * ev.phi) - (-E_tilde * t + p_tilde * z)


def angular_factor(n: int, phi_tilde):
    return np.exp(-1j * n * np.asarray(phi_tilde, dtype=float))


# --------------------------------------------------------------------------
# n = 0 condition


def fermion_vz(config: NormalizedConfig) -> float:
    """c^2 p3 / E_a of the ground singular state, from the closed-form averages."""
    from .observables import average_energy, average_momentum
    from .spectrum import StateKind
    from .states import build_state

    st = build_state(StateKind.GROUND, config)
    return float(average_momentum(st)[2]) / average_energy(st)


def _resolve_eta(eta, config: NormalizedConfig) -> float:
    if eta is None:
        return 0.0
    if isinstance(eta, str):
        key = eta.strip().lower()
        if key == "varsigma":
            return config.varsigma
        if key == "omega_n":
            return config.omega_n
        try:
            return float(key)
        except ValueError:
            raise DomainError(f"eta must be a number, 'omega_n' or 'varsigma', got {eta!r}") from None
    return float(eta)


def con0_coefficients(params: TransformParams, config: NormalizedConfig, eta=None,
                      v_z: float | None = None) -> tuple[float, float]:
    """(a_tau, a_lambda) such that con0 = a_tau tau + a_lambda lambda."""
    vz = fermion_vz(config) if v_z is None else v_z
    if vz == 0:
        raise DomainError("v_z = 0")
    e0, eps = config.e0, config.epsilon
    eta = _resolve_eta(eta, config)
    A = 1.0 / e0 + e0 + eta
    B = eps * (1.0 / e0 - e0 + eta)
    return A + params.v * B, A / vz + B


def con0_residual(params: TransformParams, config: NormalizedConfig, eta=None,
                  v_z: float | None = None) -> float:
    """(tau + lambda/v_z)(1/e0 + e0 + eta) + (tau v + lambda) eps (1/e0 - e0 + eta).

    ``eta`` defaults to 0; "omega_n" and "varsigma" select those values.
    """
    a_tau, a_lam = con0_coefficients(params, config, eta, v_z)
    return a_tau * params.tau + a_lam * params.lambda_len


def solve_con0(params: TransformParams, config: NormalizedConfig, solve_for: str = "lambda_len",
               eta=None, v_z: float | None = None) -> TransformParams:
    """Fix tau or lambda_len so that con0 vanishes; the other parameters are kept."""
    from dataclasses import replace

    a_tau, a_lam = con0_coefficients(params, config, eta, v_z)
    if solve_for in ("lambda", "lambda_len"):
        if a_lam == 0:
            raise DomainError("lambda coefficient of the n = 0 condition vanishes")
        return replace(params, lambda_len=-a_tau * params.tau / a_lam)
    if solve_for == "tau":
        if a_tau == 0:
            raise DomainError("tau coefficient of the n = 0 condition vanishes")
        return replace(params, tau=-a_lam * params.lambda_len / a_tau)
    raise DomainError("solve_for must be 'tau' or 'lambda_len'")


def lab_from_rotating(E_tilde: float, p_tilde: float, params: TransformParams, v_z: float,
                      Omega: float, k: float) -> tuple[float, float]:
    """Invert the primed-parameter map for (E, p)."""
    n = params.n
    a = np.array([[1.0, -params.v], [-1.0 / v_z, 1.0]])
    rhs = np.array([E_tilde + n * Omega, p_tilde + n * k])
    if abs(np.linalg.det(a)) < 1e-14:
        raise DomainError("v = v_z: lab energy and momentum are not determined")
    E, p = np.linalg.solve(a, rhs)
    return float(E), float(p)


def frequency_ng(config: NormalizedConfig) -> float:
    """(1 + e0^2) / (2 sqrt 2) * omega_m."""
    return (1.0 + config.e0 ** 2) / (2.0 * math.sqrt(2.0)) * config.omega_m


# --------------------------------------------------------------------------
# experimental: energy and momentum determined jointly


@dataclass(frozen=True)
class CoupledSolution:
    energy_e: float
    p_tilde: float
    E_lab: float
    p_lab: float
    char_residual: float
    quant_residual: float


def solve_coupled(kind, config: NormalizedConfig, params: TransformParams,
                  v_z: float | None = None, tol: float = 1e-10) -> CoupledSolution:
    """Experimental joint solve of the characteristic cubic and the quantization condition.

    Unknowns are the rotating-frame energy and momentum; the lab pair is
    recovered through the primed-parameter map.  There are no published
    reference values for this procedure.
    """
    from scipy.optimize import root

    from .spectrum import StateKind, characteristic_poly, lambda_param, singular_momentum, singular_roots

    kind = StateKind.parse(kind)
    vz = fermion_vz(config) if v_z is None else v_z
    Omega, k, eps = config.omega_n, config.k, config.epsilon

    def equations(x):
        E, pt = x
        poly = characteristic_poly(kind, config, lambda_param(kind, pt, config))
        El, pl = lab_from_rotating(E + eps * pt, pt, params, vz, Omega, k)
        return [poly.factored(E), float(quantization_residual(El, pl, params))]

    p0 = singular_momentum(kind, config)
    E0 = singular_roots(kind, config).branch_root(config.branch).real
    sol = root(equations, [E0, p0], method="hybr", options={"xtol": 1e-14})
    f = equations(sol.x)
    if max(abs(v) for v in f) > tol:
        raise NumericalError(f"coupled solve failed: {sol.message}", achieved=max(abs(v) for v in f))
    E, pt = (float(v) for v in sol.x)
    El, pl = lab_from_rotating(E + eps * pt, pt, params, vz, Omega, k)
    return CoupledSolution(E, pt, El, pl, abs(f[0]), abs(f[1]))
