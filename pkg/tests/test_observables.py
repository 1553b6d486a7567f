from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirac_rotframe import observables as ob
from dirac_rotframe.core import C_CGS, ELECTRON_CHARGE_CGS, ELECTRON_MASS_CGS, DomainError, NormalizedConfig, PhysicalInput, UnsupportedCase
from dirac_rotframe.states import build_state


def cfg(e0=1.0, h=1e-3, omega_n=1e-6, **kw):
    return NormalizedConfig(e0=e0, h=h, omega_n=omega_n, **kw)


def test_average_energy_values():
    assert ob.average_energy(build_state("ground", cfg(omega_n=1e-300))) == 2.0
    assert ob.average_energy(build_state("ground", cfg(2.0, omega_n=1e-300))) == 2.5
    c = cfg(1.5, omega_n=1e-3)
    diff = ob.average_energy(build_state("ground", c)) - ob.average_energy(build_state("excited1", c))
    assert diff == pytest.approx(1e-3, rel=1e-10)


def test_energy_quadrature_e0_two():
    s = build_state("ground", cfg(2.0))
    q = ob.observable_quadrature(s, "hamiltonian")
    assert q == pytest.approx(2.5, abs=5 * (1e-3 + 1e-6))
    assert q == pytest.approx(ob.observable_quadrature(s, "i_dt"), abs=1e-10)


def test_momentum_closed_form():
    s = build_state("ground", cfg())
    p1, p2, p3 = ob.average_momentum(s, 0.0, 0.0)
    assert p2 == 0.0
    assert abs(p1) == pytest.approx(math.sqrt(2) / 2)
    assert p3 == 1.0
    t = np.linspace(0, 1e7, 50)
    q1, q2, _ = ob.average_momentum(s, t, 3.0)
    assert np.allclose(q1 ** 2 + q2 ** 2, 0.5, rtol=1e-14)


def test_momentum_quadrature_canonical_vs_kinetic():
    s = build_state("ground", cfg())
    t = 2.1e5
    can = ob.momentum_quadrature(s, t)
    kin = ob.momentum_quadrature(s, t, kinetic=True)
    closed = ob.average_momentum(s, t)
    tol = 5 * (1e-3 + 1e-6)
    assert np.allclose(can, closed, atol=tol)
    # the kinetic average carries an extra transverse <eA>, comparable to the amplitude
    assert abs(kin[0] - closed[0]) > 0.1 or abs(kin[1] - closed[1]) > 0.1
    assert kin[2] == pytest.approx(can[2], abs=1e-12)


@pytest.mark.parametrize("e0", [0.5, 1.0, 2.0])
def test_spin_closed_form_and_s3(e0):
    s = build_state("excited2", cfg(e0))
    a = 0.5 * e0 / math.sqrt(e0 ** 2 + 1)
    s1, s2, s3 = ob.average_spin(s, np.linspace(0, 1e6, 11))
    assert np.allclose(s1 ** 2 + s2 ** 2, a * a, rtol=1e-14)
    q = ob.spin_quadrature(s, 0.4e6)
    assert abs(q[2]) <= 5 * (1e-3 + 1e-6) * 0.5
    assert a < 0.5


def test_spin_rotates_rigidly():
    s = build_state("ground", cfg())
    t = np.linspace(0, 3e6, 17)
    s1, s2, _ = ob.average_spin(s, t, 0.0)
    ang = np.angle((s1 + 1j * s2) * np.exp(-1j * 1e-6 * t))
    assert np.allclose(np.abs(ang), math.pi, atol=1e-12)


def test_quadrature_identity_and_linearity():
    s = build_state("excited1", cfg(0.5, 1e-2))
    assert ob.observable_quadrature(s, "identity") == pytest.approx(1.0, abs=1e-8)
    a, b = 0.3, -1.7
    combo = ob.observable_quadrature(s, {"sigma1": a, "p3": b}, 1e5)
    sep = a * ob.observable_quadrature(s, "sigma1", 1e5) + b * ob.observable_quadrature(s, "p3", 1e5)
    assert combo == pytest.approx(sep, abs=1e-12)
    with pytest.raises(DomainError):
        ob.observable_quadrature(s, "bogus")


def test_closed_forms_need_default_family():
    s = build_state("ground", cfg(d_sign="positive"))
    with pytest.raises(UnsupportedCase):
        ob.average_energy(s)


def test_mixed_spin_envelope():
    c = cfg()
    mix = ob.make_mixed_state(c)
    single = ob.spin_amplitude(c)
    s1, s2, s3 = ob.mixed_spin(mix, 0.0)
    assert s1 == pytest.approx(2 * single) and s3 == 0.0
    w = ob.beat_frequency(c)
    s1, s2, _ = ob.mixed_spin(mix, math.pi / w)
    assert math.hypot(s1, s2) == pytest.approx(0.0, abs=1e-15)
    anti = ob.make_mixed_state(c, 1 / math.sqrt(2), -1 / math.sqrt(2))
    s1, s2, _ = ob.mixed_spin(anti, 1.5 * math.pi / w)
    assert math.hypot(s1, s2) == pytest.approx(0.0, abs=1e-15)


def test_mixed_reduces_to_ground():
    c = cfg(1.3, 1e-2)
    mix = ob.make_mixed_state(c, 1.0, 0.0)
    t = np.linspace(0, 5e9, 33)
    a = ob.mixed_spin(mix, t, 0.2)
    b = ob.average_spin(mix.ground, t, 0.2)
    for u, v in zip(a, b):
        assert np.array_equal(u, v)


def test_mixed_state_validation():
    g = build_state("ground", cfg())
    e = build_state("excited2", cfg())
    with pytest.raises(DomainError):
        ob.MixedState(0.5, 0.5, g, e)
    with pytest.raises(DomainError):
        ob.MixedState(0.6, 0.8, e, g)
    other = build_state("excited2", cfg(omega_n=2e-6))
    mix = ob.MixedState(0.6, 0.8, g, other)
    with pytest.raises(DomainError):
        ob.mixed_spin(mix, 0.0)


def test_opposite_branch_mixture_warns_and_suppresses():
    c = cfg()
    with pytest.warns(UserWarning):
        mix = ob.make_mixed_state(c, excited2_config=c.replace(branch="minus"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s1, _, _ = ob.mixed_spin(mix, 0.0)
    # cross term gone: the two opposite spins cancel
    assert abs(s1) < 1e-3


def test_beat_frequency():
    c = cfg(1.0, 1e-2)
    assert ob.beat_frequency(c) == pytest.approx(c.omega_m / math.sqrt(2), rel=1e-15)
    small = cfg(1e-4, 1e-2)
    assert ob.beat_frequency(small) == pytest.approx(2e-8 * small.omega_m, rel=1e-7)
    assert ob.beat_frequency(cfg(1.0, 2e-2)) == pytest.approx(2 * ob.beat_frequency(c), rel=1e-15)


def test_beat_matches_exact_energy_splitting():
    c = cfg(1.0, 1e-3)
    g = build_state("ground", c)
    e = build_state("excited2", c)
    assert g.energy_tilde - e.energy_tilde == pytest.approx(ob.beat_frequency(c), rel=1e-3)


def test_overlap_factor():
    g = build_state("ground", cfg())
    assert ob.overlap_factor(g, g)[0] == 0.0
    c = cfg(1.0, 1e-3, omega_n=2e-6)  # d = 1e-6
    a = build_state("ground", c)
    b = build_state("ground", c.replace(branch="minus"))
    exact, approx = ob.overlap_factor(a, b)
    assert approx == pytest.approx(-1e6, rel=1e-12)
    assert exact == pytest.approx(approx, rel=1e-2)
    assert ob.overlap_approx(1.0, 1e-5) > ob.overlap_approx(1.0, 1e-6)


def test_pauli_reference():
    assert ob.pauli_reference_spin(0.3, 2.0, 0.0) == pytest.approx((0, 0, 0.5))
    t = np.linspace(0, 100, 1001)
    s = ob.pauli_reference_spin(0.3, 2.0, t)
    assert np.allclose(s[0] ** 2 + s[1] ** 2 + s[2] ** 2, 0.25, atol=1e-15)
    q = ob.pauli_reference_spin(0.3, 2.0, math.pi / 0.6)
    assert q[2] == pytest.approx(0, abs=1e-15) and math.hypot(q[0], q[1]) == pytest.approx(0.5)


def test_energy_min_scan():
    e, m = ob.energy_min_scan((0.5, 2.0), 1501)
    assert e == pytest.approx(1.0, abs=1e-3)
    assert m == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(DomainError):
        ob.energy_min_scan((2.0, 0.5))
    with pytest.raises(DomainError):
        ob.energy_min_scan((0.5, 2.0), 0)


@given(e0=st.floats(0.05, 20))
def test_energy_reciprocal_symmetry(e0):
    f = lambda x: ob.average_energy(build_state("ground", cfg(x, omega_n=1e-300)))
    assert f(e0) == pytest.approx(f(1 / e0), rel=1e-14)


def test_resonance():
    r = ob.resonance_check(cfg(1.0))
    assert r.residual == 0.0 and r.g_factor == 2.0
    assert ob.resonance_check(cfg(2.0)).inverse_e0 == 0.5
    assert ob.resonance_check(cfg(0.9)).residual < 0 < ob.resonance_check(cfg(1.1)).residual
    Omega = 1e15
    H3 = -Omega * ELECTRON_MASS_CGS * C_CGS / abs(ELECTRON_CHARGE_CGS)
    inp = PhysicalInput(1.0, H3, Omega)
    mu_h = abs(ELECTRON_CHARGE_CGS) * 1.054571817e-27 / (2 * ELECTRON_MASS_CGS * C_CGS) * abs(H3)
    assert abs(ob.resonance_residual_physical(inp)) <= 1e-15 * mu_h


def test_series_container():
    with pytest.raises(DomainError):
        ob.ObservableSeries(np.array([0.0, 0.0]), {"s": np.zeros(2)})
    with pytest.raises(DomainError):
        ob.ObservableSeries(np.array([0.0, 1.0]), {"s": np.zeros(3)})
    s = ob.spin_series(build_state("ground", cfg()), np.linspace(0, 1, 4))
    assert s.columns == ["t", "s1", "s2", "s3"]
