"""Tour of the dynamics building blocks, including the two deliberate forks.

1. The mass/Coriolis/drag matrices for the stock vehicle.
2. The "direct" Coriolis form is not skew-symmetric: on a curved trajectory
   it pumps kinetic energy in or out (nu' C nu != 0), while the "skew" form
   conserves it exactly.  Both are simulated side by side, coasting with no
   thrust: skew decays monotonically, direct does not.
3. The two restoring-force conventions disagree in the sign of the heave
   component whenever weight != buoyancy.
4. The surge ramp against its closed-form tanh solution.
"""

import math

import numpy as np

from rovsim.dynamics import (BodyForce, BodyVelocity, Hydrostatics, MassMatrix,
                             VehicleState, assemble_mass_matrix,
                             coriolis_matrix, drag_matrix, restoring_force,
                             step)
from rovsim.vehicle import VehicleParams

np.set_printoptions(precision=4, suppress=True)

# --- 1. the stock matrices ------------------------------------------------
mass = MassMatrix()
v = BodyVelocity(v1=0.135, v2=0.05, v6=0.2)
print("mass matrix:\n", assemble_mass_matrix(mass))
print("drag matrix at cruise:\n", drag_matrix(VehicleParams().drag, v))
print("coriolis (direct):\n", coriolis_matrix(mass, v, 'direct'))
print("coriolis (skew):\n", coriolis_matrix(mass, v, 'skew'))

# --- 2. energy behavior of the two Coriolis forms --------------------------
nu = np.array([v.v1, v.v2, v.v6])
for variant in ("direct", "skew"):
    c = coriolis_matrix(mass, v, variant)
    print(f"nu' C nu ({variant}): {nu @ c @ nu:+.6e}")

m = assemble_mass_matrix(mass)
print("\ncoasting from (1.0, -0.5, 0.8) with no thrust:")
print("  t      KE(direct)   KE(skew)")
states = {
    "direct": VehicleState(v1=1.0, v2=-0.5, v6=0.8),
    "skew": VehicleState(v1=1.0, v2=-0.5, v6=0.8),
}
params = {
    variant: VehicleParams(coriolis_variant=variant)
    for variant in states
}


def kinetic(s):
    nu = np.array([s.v1, s.v2, s.v6])
    return 0.5 * nu @ m @ nu


for k in range(301):
    if k % 60 == 0:
        print(f"  {states['direct'].t:4.1f}   "
              f"{kinetic(states['direct']):10.6f}   "
              f"{kinetic(states['skew']):10.6f}")
    for variant in states:
        states[variant] = step(states[variant], BodyForce(),
                               params[variant], 0.01)

# --- 3. the restoring-force sign fork ---------------------------------------
heavy = Hydrostatics(weight=117.91, buoyancy=107.91)
_, fz_component = restoring_force(heavy, 0.0, 0.0, "component")
_, fz_matrix = restoring_force(heavy, 0.0, 0.0, "matrix")
print(f"\n10 N heavy vehicle, level trim (z positive down):")
print(f"  componentwise convention: heave force {fz_component:+.1f} N (sinks)")
print(f"  matrix-product convention: heave force {fz_matrix:+.1f} N (rises)")

# --- 4. ramp vs. closed form -------------------------------------------------
params = VehicleParams()
thrust = 2.0
v_inf = math.sqrt(thrust / params.drag.d1[0][0])
tau = params.mass.m11 * v_inf / thrust
state = VehicleState()
print(f"\nsurge ramp under {thrust} N: v_inf={v_inf:.3f} m/s tau={tau:.3f} s")
print("  t     simulated   v_inf*tanh(t/tau)")
for k in range(1, 301):
    state = step(state, BodyForce(f1=thrust), params, 0.01)
    if k % 60 == 0:
        oracle = v_inf * math.tanh(state.t / tau)
        print(f"  {state.t:4.1f}   {state.v1:.6f}    {oracle:.6f}")
