"""Units, dimensionless parameters and Dirac matrices.

Everything downstream works in natural units hbar = m = c = 1.  Physical
inputs are Gaussian (CGS) quantities and are converted once, here.

Field model in natural units (for the default sign eH3 < 0)::

    e*A1 =  d*y + h*cos(theta)
    e*A2 = -d*x + h*sin(theta)
    theta = Omega*t - k*z,   k = epsilon*Omega

with d = |e H3| / 2 > 0 and h = e H / k.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Input outside the domain where the model is defined."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class UnsupportedCase(DomainError):
    """Parameter combination for which no closed-form state exists."""


# Gaussian-unit constants (CODATA 2018)
HBAR_CGS = 1.054571817e-27      # erg s
C_CGS = 2.99792458e10           # cm / s
ELECTRON_MASS_CGS = 9.1093837015e-28  # g
ELECTRON_CHARGE_CGS = -4.80320471e-10  # statC
COMPTON_BAR_CM = HBAR_CGS / (ELECTRON_MASS_CGS * C_CGS)


class Branch(enum.Enum):
    """Sign of the leading h-term in the singular expansion."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value


class FieldSign(enum.Enum):
    """Sign of e*H3.  NEGATIVE is the default family."""

    NEGATIVE = -1
    POSITIVE = 1


@dataclass(frozen=True)
class PhysicalInput:
    """Field and particle parameters in Gaussian units."""

    wave_amplitude_H: float
    static_field_H3: float
    frequency_Omega: float
    propagation_sign_epsilon: int = 1
    mass_m: float = ELECTRON_MASS_CGS
    charge_e: float = ELECTRON_CHARGE_CGS
    hbar: float = HBAR_CGS
    c: float = C_CGS

    def __post_init__(self):
        if self.propagation_sign_epsilon not in (1, -1):
            raise DomainError("propagation_sign_epsilon must be +1 or -1")
        if self.static_field_H3 == 0:
            raise DomainError("static_field_H3 must be nonzero")
        if self.frequency_Omega == 0:
            raise DomainError("frequency_Omega must be nonzero")

    @property
    def k(self) -> float:
        return self.propagation_sign_epsilon * self.frequency_Omega / self.c


@dataclass(frozen=True)
class NormalizedConfig:
    """Dimensionless parameters that fix a family of states.

    ``e0`` is the singular-point energy 2 d hbar / (Omega m), ``h`` the wave
    strength e H / (k m c^2) and ``omega_n`` = hbar Omega / m c^2.
    """

    e0: float
    h: float
    omega_n: float = 1e-6
    epsilon: int = 1
    branch: Branch = Branch.PLUS
    d_sign: FieldSign = FieldSign.NEGATIVE

    def __post_init__(self):
        if not (self.e0 > 0 and math.isfinite(self.e0)):
            raise DomainError(f"e0 must be positive and finite, got {self.e0}")
        if not (self.h >= 0 and math.isfinite(self.h)):
            raise DomainError(f"h must be non-negative, got {self.h}")
        if not (self.omega_n > 0 and math.isfinite(self.omega_n)):
            raise DomainError(f"omega_n must be positive, got {self.omega_n}")
        if self.epsilon not in (1, -1):
            raise DomainError("epsilon must be +1 or -1")
        # accept plain strings / ints from config files
        object.__setattr__(self, "branch", _coerce(Branch, self.branch))
        object.__setattr__(self, "d_sign", _coerce(FieldSign, self.d_sign))

    @property
    def d(self) -> float:
        """Envelope width parameter, natural units (inverse area)."""
        return 0.5 * self.e0 * self.omega_n

    @property
    def k(self) -> float:
        return self.epsilon * self.omega_n

    @property
    def varsigma(self) -> float:
        return 2.0 * self.omega_n * self.e0

    @property
    def omega_m(self) -> float:
        """Precession frequency mu H / hbar = h * Omega / 2."""
        return 0.5 * self.h * self.omega_n

    def replace(self, **changes) -> "NormalizedConfig":
        from dataclasses import replace

        return replace(self, **changes)


def _coerce(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    if isinstance(value, str):
        return enum_cls[value.strip().upper()]
    return enum_cls(value)


def normalize_input(inp: PhysicalInput, d_sign: FieldSign | None = None,
                    branch: Branch = Branch.PLUS,
                    omega_n: float | None = None) -> NormalizedConfig:
    """Convert Gaussian-unit inputs to a :class:`NormalizedConfig`.

    ``d_sign`` defaults to the sign of e*H3 actually present in ``inp``.
    """
    hbar, c, m, e = inp.hbar, inp.c, inp.mass_m, inp.charge_e
    d = abs(e * inp.static_field_H3) / (2.0 * hbar * c)
    e0 = 2.0 * d * hbar / (inp.frequency_Omega * m)
    if e0 <= 0:
        raise DomainError("frequency_Omega < 0 gives e0 < 0; not supported")
    h = abs(e * inp.wave_amplitude_H) / (abs(inp.k) * m * c * c)
    on = hbar * inp.frequency_Omega / (m * c * c)
    if d_sign is None:
        d_sign = FieldSign.NEGATIVE if e * inp.static_field_H3 < 0 else FieldSign.POSITIVE
    return NormalizedConfig(e0=e0, h=h, omega_n=on if omega_n is None else omega_n,
                            epsilon=inp.propagation_sign_epsilon, branch=branch,
                            d_sign=d_sign)


def denormalize(config: NormalizedConfig, mass_m: float = ELECTRON_MASS_CGS,
                charge_e: float = ELECTRON_CHARGE_CGS, hbar: float = HBAR_CGS,
                c: float = C_CGS) -> PhysicalInput:
    """Inverse of :func:`normalize_input`; H is returned non-negative."""
    Omega = config.omega_n * mass_m * c * c / hbar
    d = config.e0 * Omega * mass_m / (2.0 * hbar)
    H3 = config.d_sign.value * 2.0 * hbar * c * d / charge_e
    k = abs(Omega) / c
    H = config.h * k * mass_m * c * c / abs(charge_e)
    return PhysicalInput(wave_amplitude_H=H, static_field_H3=H3, frequency_Omega=Omega,
                         propagation_sign_epsilon=config.epsilon, mass_m=mass_m,
                         charge_e=charge_e, hbar=hbar, c=c)


def localization_length(inp: PhysicalInput) -> float:
    """l_c = sqrt(|2 hbar c / (e H3)|), in cm for Gaussian inputs."""
    if inp.static_field_H3 == 0:
        raise DomainError("static_field_H3 must be nonzero")
    return math.sqrt(abs(2.0 * inp.hbar * inp.c / (inp.charge_e * inp.static_field_H3)))


# --------------------------------------------------------------------------
# Dirac algebra

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class DiracAlgebra:
    alpha: tuple[np.ndarray, np.ndarray, np.ndarray]
    beta: np.ndarray
    sigma: tuple[np.ndarray, np.ndarray, np.ndarray]
    alpha1_alpha2: np.ndarray = field(repr=False)

    def all_matrices(self) -> list[np.ndarray]:
        return [*self.alpha, self.beta, *self.sigma]


def build_algebra() -> DiracAlgebra:
    """Dirac-Pauli representation; sigma_k = -i alpha_j alpha_l (cyclic)."""
    z = np.zeros((2, 2), dtype=complex)
    one = np.eye(2, dtype=complex)
    alpha = tuple(np.block([[z, s], [s, z]]) for s in _PAULI)
    beta = np.block([[one, z], [z, -one]])
    a1, a2, a3 = alpha
    sigma = (-1j * a2 @ a3, -1j * a3 @ a1, -1j * a1 @ a2)
    for m in (*alpha, beta, *sigma):
        m.setflags(write=False)
    a12 = a1 @ a2
    a12.setflags(write=False)
    return DiracAlgebra(alpha=alpha, beta=beta, sigma=sigma, alpha1_alpha2=a12)


ALGEBRA = build_algebra()


def rotation_factor(theta):
    """exp(-alpha1 alpha2 theta / 2) as cos(theta/2) I - sin(theta/2) alpha1 alpha2.

    Valid because (alpha1 alpha2)^2 = -I.  ``theta`` may be an array; the
    result then has shape ``theta.shape + (4, 4)``.
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(0.5 * theta)[..., None, None]
    s = np.sin(0.5 * theta)[..., None, None]
    return c * np.eye(4) - s * ALGEBRA.alpha1_alpha2
