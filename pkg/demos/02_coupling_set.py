"""Couplings that make a fixed energy an eigenvalue.

For a bump f >= 0 and an energy E, the set of lam with E in the spectrum of
-u'' + (v + lam f) u is discrete. This script computes it in a few settings.

Run: python3 demos/02_coupling_set.py
"""

import math

import numpy as np

from sturm_rand import (BumpFunction, Interval, anderson_model, build_regular_problem,
                        coupling_mismatch, coupling_roots, extract_boundary_angles,
                        kth_eigenvalue, sample_omega, verify_discreteness, wronskian_dependence)
from sturm_rand.model import Piece, RegularProblem
from sturm_rand.prufer import solution_path

# 1. f = 1 on (0, pi): levels are k^2 + lam, so E = 2 needs lam = 2 - k^2.
flat = RegularProblem(Interval(0, math.pi), coupling=(0.0, BumpFunction(Interval(0, math.pi))))
res = coupling_roots(2.0, (-20.0, 5.0), flat)
print("flat bump, E=2:", np.round(res.roots, 10), " min gap", round(res.min_gap, 10))
rep = verify_discreteness(res, refine_factor=10)
print("  refined 10x -> stable:", rep.stable, " shift", f"{rep.max_shift:.1e}")

# 2. A step background with the bump covering only part of the interval.
steps = (Piece(0, 1, 1.0), Piece(1, 2.5, -2.0), Piece(2.5, 4, 0.5), Piece(4, 6, -1.0))
partial = RegularProblem(Interval(0, 6), steps,
                         coupling=(0.0, BumpFunction(Interval(0.5, 5.0))))
res = coupling_roots(3.0, (-10.0, 10.0), partial)
print("\nstep background, E=3:", np.round(res.roots, 8))
for lam in res.roots:
    print(f"  lam={lam:+.6f}  mismatch={coupling_mismatch(3.0, lam, partial).residual:+.1e}  "
          f"wronskian={wronskian_dependence(3.0, lam, partial):.1e}")
print("  between roots the Wronskian is far from zero:",
      f"{wronskian_dependence(3.0, 0.5 * (res.roots[0] + res.roots[1]), partial):.2f}")

# 3. Cut an eigenfunction down to one bump and read off boundary angles there.
model = anderson_model()
omega = sample_omega(model, 7).replace(0, 0.0)
bump = model.bumps[0]
H = build_regular_problem(model, omega, coupling=(1.7, bump))
E = kth_eigenvalue(H, 3, grid=None).value
c, d = bump.support
theta, _ = solution_path(H, E, np.array([c, d]), H.left_bc.prufer_start)
th0, g0 = extract_boundary_angles(*[(math.sin(t), math.cos(t)) for t in theta])
local = build_regular_problem(model, omega, Interval(c, d), th0, g0, coupling=(0.0, bump))
print(f"\neigenvalue E={E:.8f} at lam=1.7; angles on ({c},{d}): "
      f"{th0.angle:.6f}, {g0.angle:.6f}")
print("  mismatch on the bump alone at lam=1.7:",
      f"{coupling_mismatch(E, 1.7, local).residual:.1e}")
print("  every lam on the bump that carries E:",
      np.round(coupling_roots(E, (-100, 100), local).roots, 8))
