"""The six-member truss whose brace can buckle out of the load path.

Member forces come from the direct stiffness method; when the compressive
force in the brace exceeds its Euler critical load the panel is re-solved
without it, which jumps the force carried by the far vertical.  The response
surface over the two random areas is therefore discontinuous along a curve,
which the adaptive builds track.
"""

import numpy as np

from sgsurrogate import AdaptiveConfig, run_study
from sgsurrogate.models import TrussSpec, solve_member_forces, truss_member4_force

spec = TrussSpec()
print(f"panel load P = {spec.load / 1e3:.1f} kN, modulus {spec.modulus / 1e9:.0f} GPa")

areas = spec.default_areas()
forces = solve_member_forces(areas, spec)
print("\nmember forces at the nominal areas (kN, tension positive):")
for i, f in enumerate(forces, start=1):
    print(f"  member {i}: {f / 1e3:+.3f}")
print(f"brace critical load at 6 cm^2: {spec.critical_load(6e-4) / 1e3:.3f} kN")

print("\nforce in member 4 as the brace area grows (A2 fixed at 6 cm^2):")
for a5 in np.linspace(3.0, 9.0, 13):
    areas = spec.default_areas()
    areas[4] = a5 * 1e-4
    f4 = truss_member4_force(areas, spec)
    print(f"  A5 = {a5:4.1f} cm^2  ->  member 4: {f4 / 1e3:+.3f} kN")
print("the jump marks the buckling boundary crossing the sampled range")

print("\ncomparative study over the two random areas")
cfg = AdaptiveConfig(dimension=2, epsilon=5.0, max_level=10, init_level=2)
for method in ("ASGC", "EASGC"):
    report = run_study(method, "truss2", cfg, seed=5, n_test_points=10_000)
    last = report.rows[-1]
    print(f"  {method:5s}: levels {len(report.rows)}  full {last.full_evals:5d}  "
          f"spline {last.spline_evals:5d}  rmse {last.rmse:.1f} N")
