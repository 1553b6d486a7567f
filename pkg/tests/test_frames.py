from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from dirac_rotframe import frames as fr
from dirac_rotframe.core import DomainError, NormalizedConfig
from dirac_rotframe.observables import beat_frequency
from dirac_rotframe.states import build_state

finite = st.floats(-3, 3)


def random_events(rng, m=1000):
    return fr.FrameEvent(phi=rng.uniform(-math.pi, math.pi, m), r=rng.uniform(0, 2, m),
                         z=rng.uniform(-5, 5, m), t=rng.uniform(-5, 5, m))


def enforced(rng):
    """Random parameters and (E, p, E~, p~) satisfying conditions (i)-(iii)."""
    n = int(rng.integers(-3, 4))
    tau, lam = rng.uniform(-2, 2, 2)
    E = rng.uniform(0.5, 3)
    p = (n - tau * E) / lam
    params = fr.TransformParams(tau=tau, lambda_len=lam, gamma=rng.uniform(-2, 2),
                                v=rng.uniform(-1, 1), n=n)
    Omega, k = rng.uniform(0.1, 1), rng.uniform(-1, 1)
    Et = E - params.v * p - n * Omega
    pt = p - params.gamma * E - n * k
    return params, E, p, Et, pt, Omega, k


def test_degenerate_params_give_galilean():
    ev = fr.FrameEvent(phi=0.4, r=1.0, z=0.3, t=2.0)
    a = fr.transform_event(ev, "galilean", Omega=0.5, k=0.2)
    b = fr.transform_event(ev, "non_galilean", fr.TransformParams(), 0.5, 0.2)
    assert (a.phi, a.z, a.t) == (b.phi, b.z, b.t)
    assert a.phi == pytest.approx(0.4 - 1.0 + 0.06)


def test_event_on_axis():
    p = fr.TransformParams(tau=0.3, lambda_len=0.2, gamma=0.1, v=0.7)
    ev = fr.transform_event(fr.FrameEvent(0.0, 1.0, 0.0, 2.0), "non_galilean", p, 0.5, 0.2)
    assert ev.t == 2.0 and ev.z == pytest.approx(1.4)


@given(a=st.tuples(finite, finite, finite), b=st.tuples(finite, finite, finite),
       pars=st.tuples(finite, finite, finite, finite))
def test_transform_linear(a, b, pars):
    p = fr.TransformParams(*pars)
    ea = fr.FrameEvent(a[0], 0.0, a[1], a[2])
    eb = fr.FrameEvent(b[0], 0.0, b[1], b[2])
    s = fr.FrameEvent(a[0] + b[0], 0.0, a[1] + b[1], a[2] + b[2])
    ta, tb, ts = (fr.transform_event(e, "non_galilean", p, 0.7, -0.3).as_array() for e in (ea, eb, s))
    assert np.allclose(ta + tb, ts, atol=1e-12)
    M = fr.transform_matrix("non_galilean", p, 0.7, -0.3)
    assert np.allclose(ts, M @ s.as_array(), atol=1e-12)


def test_inverse_round_trip():
    rng = np.random.default_rng(4)
    p = fr.TransformParams(0.3, -0.2, 0.5, 0.1, 1)
    ev = random_events(rng, 50)
    back = fr.inverse_transform_event(fr.transform_event(ev, "non_galilean", p, 0.6, 0.6),
                                      "non_galilean", p, 0.6, 0.6)
    assert np.allclose(back.as_array(), ev.as_array(), atol=1e-12)


def test_event_and_params_validation():
    with pytest.raises(DomainError):
        fr.FrameEvent(0.0, -1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        fr.TransformParams(n=0.5)
    with pytest.raises(DomainError):
        fr.TransformParams(tau=math.inf)
    assert fr.TransformParams(n=2.0).n == 2


def test_quantization():
    p0 = fr.TransformParams()
    assert fr.quantization_residual(3.0, -1.0, p0) == 0
    p = fr.TransformParams(tau=0.4, lambda_len=1.5, n=2)
    mom = fr.solve_quantization(p, E=1.2)
    assert fr.satisfies_quantization(1.2, mom, p)
    E = fr.solve_quantization(p, p=0.3)
    assert abs(fr.quantization_residual(E, 0.3, p)) < 1e-15
    # linear slopes from two-point differences
    r = lambda E, q: float(fr.quantization_residual(E, q, p))
    assert (r(2.0, 1.0) - r(1.0, 1.0)) == pytest.approx(0.4)
    assert (r(1.0, 2.0) - r(1.0, 1.0)) == pytest.approx(1.5)
    with pytest.raises(DomainError):
        fr.solve_quantization(fr.TransformParams(tau=1.0), E=1.0)


def test_primed_parameters():
    p = fr.TransformParams(tau=0.1, n=0)
    assert fr.primed_parameters(1.7, 0.4, p, 0.5, 0.1, 0.1)[0] == 1.7
    with pytest.raises(DomainError):
        fr.primed_parameters(1.0, 1.0, p, 0.0, 0.1, 0.1)
    q = fr.TransformParams(v=0.3, n=1)
    a = np.array(fr.primed_parameters(1.0, 2.0, q, 0.5, 0.2, 0.2))
    b = np.array(fr.primed_parameters(3.0, -1.0, q, 0.5, 0.2, 0.2))
    c = np.array(fr.primed_parameters(2.0, 0.5, q, 0.5, 0.2, 0.2))
    assert np.allclose(0.5 * (a + b), c)
    # small parameters move the primed values away from (E, p) only at first order
    small = fr.TransformParams(v=1e-4)
    Ep, _ = fr.primed_parameters(1.0, 2.0, small, 0.5, 0.2, 0.2)
    assert abs(Ep - 1.0) == pytest.approx(2e-4)


def test_phase_identity_random_sets():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        params, E, p, Et, pt, Om, k = enforced(rng)
        r = fr.phase_identity_residual(E, p, params, random_events(rng), Om, k, E_tilde=Et, p_tilde=pt)
        worst = max(worst, float(np.max(np.abs(r))))
    assert worst <= 1e-12


def test_phase_identity_galilean_limit():
    rng = np.random.default_rng(1)
    r = fr.phase_identity_residual(1.3, 0.4, fr.TransformParams(), random_events(rng), 0.2, 0.2,
                                   E_tilde=1.3, p_tilde=0.4)
    assert np.max(np.abs(r)) == 0.0


def test_phase_identity_violation_is_linear_in_phi():
    rng = np.random.default_rng(5)
    params, E, p, Et, pt, Om, k = enforced(rng)
    delta = 1e-3
    from dataclasses import replace
    bad = replace(params, tau=params.tau + delta / E)  # tau E + lambda p = n + delta
    Et_b = E - bad.v * p - bad.n * Om
    pt_b = p - bad.gamma * E - bad.n * k
    ev = random_events(rng, 200)
    r = fr.phase_identity_residual(E, p, bad, ev, Om, k, E_tilde=Et_b, p_tilde=pt_b)
    assert np.allclose(r, delta * ev.phi, atol=1e-12)


def test_phase_identity_uses_primed_parameters():
    rng = np.random.default_rng(9)
    params, E, p, _, _, Om, k = enforced(rng)
    vz = 1.0 / params.gamma
    r = fr.phase_identity_residual(E, p, params, random_events(rng), Om, k, v_z=vz)
    assert np.max(np.abs(r)) <= 1e-12


def test_phase_identity_symbolic_coefficients():
    phi, z, t, E, p, n, tau, lam, g, v, Om, k, Et, pt = sp.symbols(
        "phi z t E p n tau lambda gamma v Omega k Et pt")
    phi_t = phi - Om * t + k * z
    z_t = lam * phi + z + v * t
    t_t = -tau * phi + g * z + t
    lhs = -E * t_t + p * z_t - n * phi_t
    rhs = -Et * t + pt * z
    poly = sp.Poly(sp.expand(lhs - rhs), phi, z, t)
    coeffs = {m: poly.coeff_monomial(m) for m in (phi, z, t)}
    ours = fr.phase_coefficients(E, p, fr.TransformParams(), Om, k, Et, pt)  # structure probe
    assert len(ours) == 3
    assert sp.simplify(coeffs[phi] - (tau * E + lam * p - n)) == 0
    assert sp.simplify(coeffs[z] - (-g * E + p - n * k - pt)) == 0
    assert sp.simplify(coeffs[t] - (-E + v * p + n * Om + Et)) == 0
    # the three coefficients vanish together exactly under (i)-(iii) with gamma = 1/v_z
    vz = sp.symbols("v_z")
    sub = {Et: E - v * p - n * Om, pt: -E / vz + p - n * k, g: 1 / vz}
    assert sp.simplify(coeffs[z].subs(sub)) == 0
    assert sp.simplify(coeffs[t].subs(sub)) == 0
    # numeric coefficients match the symbolic ones
    vals = {E: 1.1, p: 0.3, n: 2, tau: 0.2, lam: -0.4, g: 0.9, v: 0.05, Om: 0.3, k: -0.1,
            Et: 0.7, pt: 0.2}
    num = fr.phase_coefficients(1.1, 0.3, fr.TransformParams(0.2, -0.4, 0.9, 0.05, 2), 0.3, -0.1,
                                0.7, 0.2)
    for m, c in zip((phi, z, t), num):
        assert float(coeffs[m].subs(vals)) == pytest.approx(c, abs=1e-15)


def test_angular_periodicity():
    th = np.linspace(-7, 7, 31)
    for n in (-3, 0, 1, 5):
        assert np.allclose(fr.angular_factor(n, th + 2 * math.pi), fr.angular_factor(n, th), atol=1e-12)


def test_fermion_vz():
    c = NormalizedConfig(e0=1.0, h=0.01, omega_n=1e-6)
    assert fr.fermion_vz(c) == pytest.approx(1 / (2 + 0.5e-6), rel=1e-14)


def test_con0():
    c = NormalizedConfig(e0=1.0, h=0.01, omega_n=1e-6)
    assert fr.con0_residual(fr.TransformParams(), c) == 0.0
    vz = fr.fermion_vz(c)
    p = fr.TransformParams(lambda_len=0.3)
    solved = fr.solve_con0(p, c, "tau", eta=0.0)
    assert solved.tau == pytest.approx(-0.3 / vz, rel=1e-14)
    assert fr.con0_residual(solved, c) == pytest.approx(0.0, abs=1e-15)
    # affine in (tau, lambda)
    a, b = fr.TransformParams(0.2, 0.1), fr.TransformParams(-0.5, 0.7)
    s = fr.TransformParams(-0.3, 0.8)
    assert fr.con0_residual(a, c) + fr.con0_residual(b, c) == pytest.approx(fr.con0_residual(s, c))
    assert fr.con0_residual(p, c, eta="varsigma") != fr.con0_residual(p, c, eta=0.0)


@pytest.mark.parametrize("e0", [0.5, 1.0, 2.0])
def test_con0_solutions_satisfy_quantization(e0):
    # at the singular point (h -> 0), eta = omega_n makes the condition equal to
    # 2 (1 - v / v_z)(tau E + lambda p) for the lab pair behind (E~, p~)
    c = NormalizedConfig(e0=e0, h=1e-9, omega_n=1e-4)
    vz = fr.fermion_vz(c)
    params = fr.solve_con0(fr.TransformParams(tau=0.7, gamma=1 / vz, v=0.2), c, eta="omega_n", v_z=vz)
    s = build_state("ground", c)
    E, p = fr.lab_from_rotating(s.energy_tilde, s.p_tilde, params, vz, c.omega_n, c.k)
    assert abs(fr.quantization_residual(E, p, params)) <= 1e-8 * max(1, abs(params.tau * E))


def test_frequency_ng():
    c = NormalizedConfig(e0=1.0, h=0.02)
    assert abs(fr.frequency_ng(c) - beat_frequency(c)) <= 1e-12 * c.omega_m
    c3 = NormalizedConfig(e0=math.sqrt(3), h=0.02)
    assert fr.frequency_ng(c3) == pytest.approx(math.sqrt(2) * c3.omega_m, rel=1e-14)
    # rational path: (1 + e0^2) / (2 sqrt 2) with e0^2 = 3 is 4 / (2 sqrt 2) = sqrt 2
    assert float(Fraction(1 + 3, 2)) / math.sqrt(2) == pytest.approx(math.sqrt(2))
    vals = [fr.frequency_ng(NormalizedConfig(e0=x, h=0.02)) for x in np.linspace(0.1, 5, 20)]
    assert np.all(np.diff(vals) > 0)


def test_solve_coupled_experimental():
    c = NormalizedConfig(e0=1.0, h=0.01, omega_n=1e-3)
    vz = fr.fermion_vz(c)
    s = build_state("ground", c)
    base = fr.TransformParams(tau=1e-2, gamma=1 / vz)
    E, p = fr.lab_from_rotating(s.energy_tilde, s.p_tilde, base, vz, c.omega_n, c.k)
    # tilt lambda slightly off the value that the singular point satisfies exactly
    params = fr.TransformParams(tau=1e-2, lambda_len=-1e-2 * E / p * (1 + 1e-4), gamma=1 / vz)
    sol = fr.solve_coupled("ground", c, params)
    assert abs(sol.energy_e - s.energy_e.real) < 1e-2
    assert sol.char_residual < 1e-10 and sol.quant_residual < 1e-10
