"""
Non-Galilean rotating frames
============================

Angle may be mixed into time and longitudinal position.  Bounded states then
need tau E + lambda p to be an integer, and the plane-wave phase transforms
into the rotating-frame phase with shifted energy and momentum.
"""

import math

import numpy as np

from dirac_rotframe import NormalizedConfig, build_state
from dirac_rotframe import frames as fr
from dirac_rotframe.observables import beat_frequency

cfg = NormalizedConfig(e0=1.0, h=0.01, omega_n=1e-4)
vz = fr.fermion_vz(cfg)
print("average longitudinal velocity v_z =", vz)

# fix tau, solve the n = 0 condition for lambda
params = fr.solve_con0(fr.TransformParams(tau=0.5, gamma=1 / vz, v=0.1), cfg, eta="omega_n", v_z=vz)
print("lambda from the n = 0 condition:", params.lambda_len)

st = build_state("ground", cfg)
E, p = fr.lab_from_rotating(st.energy_tilde, st.p_tilde, params, vz, cfg.omega_n, cfg.k)
print("lab energy and momentum:", E, p)
print("quantization residual  :", float(fr.quantization_residual(E, p, params)))

rng = np.random.default_rng(0)
ev = fr.FrameEvent(rng.uniform(-math.pi, math.pi, 1000), rng.uniform(0, 1, 1000),
                   rng.uniform(-5, 5, 1000), rng.uniform(-5, 5, 1000))
res = fr.phase_identity_residual(E, p, params, ev, cfg.omega_n, cfg.k, v_z=vz)
print("max phase-identity residual over 1000 events:", np.max(np.abs(res)))

# at resonance the two measurable frequencies coincide
for e0 in (1.0, 2.0):
    c = cfg.replace(e0=e0)
    print(f"e0 = {e0}: beat {beat_frequency(c) / c.omega_m:.6f} omega_m, "
          f"alternative {fr.frequency_ng(c) / c.omega_m:.6f} omega_m")
