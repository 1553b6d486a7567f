"""
Localized states and their averages
===================================

Build the three singular states, check their normalization in both frames,
and compare the first-order closed forms with quadrature.
"""

from dirac_rotframe import NormalizedConfig, build_state, quadrature_norm
from dirac_rotframe import observables as ob
from dirac_rotframe.states import default_sample_points, dirac_residual

cfg = NormalizedConfig(e0=2.0, h=1e-3)

for kind in ("ground", "excited1", "excited2"):
    st = build_state(kind, cfg)
    env = st.envelope
    # the envelope sits far off axis, about d2/d from it
    print(f"\n{kind}: E = {st.energy_e.real:.12f}, p~ = {st.p_tilde:.3e}, "
          f"centre = ({env.center[0]:.3e}, {env.center[1]:.3e})")
    print("  norm rotating / lab:", quadrature_norm(st, "rotating"),
          quadrature_norm(st, "initial", t=3.7e5))
    t = 2.0e5
    print(f"  energy  closed {ob.average_energy(st):.6f}  quadrature "
          f"{ob.observable_quadrature(st, 'hamiltonian', t):.6f}")
    for name, closed, quad in (("p", ob.average_momentum(st, t), ob.momentum_quadrature(st, t)),
                               ("s", ob.average_spin(st, t), ob.spin_quadrature(st, t))):
        for i in range(3):
            print(f"  {name}{i + 1}  closed {float(closed[i]): .6f}  quadrature {quad[i]: .6f}")

# the residual of the Dirac equation shrinks like step^2 for every kind
strong = NormalizedConfig(e0=1.3, h=0.05, omega_n=0.2)
print("\nfinite-difference residual at steps 1e-2, 5e-3, 2.5e-3")
for kind in ("ground", "excited1", "excited2"):
    st = build_state(kind, strong)
    pts = default_sample_points(st, 0.4)
    print(kind, [f"{dirac_residual(st, pts, 0.4, h):.2e}" for h in (1e-2, 5e-3, 2.5e-3)])
