"""Eigenvalues and eigenfunctions of one random realization.

Run: python3 demos/01_spectrum.py
"""

import math

import numpy as np

from sturm_rand import (NEUMANN, anderson_model, build_regular_problem, count_eigenvalues_below,
                        eigenvalues_in_window, kth_eigenvalue, sample_omega)
from sturm_rand.model import Interval, RegularProblem

# A sanity check first: with q = 0 on (0, pi) the Dirichlet levels are 1, 4, 9, ...
free = RegularProblem(Interval(0.0, math.pi))
print("free Dirichlet levels below 30:", np.round(eigenvalues_in_window(free, 0, 30).values, 10))
print("free Neumann levels on (0,1):   ",
      np.round([kth_eigenvalue(RegularProblem(Interval(0, 1), (), NEUMANN, NEUMANN), k).value
                for k in range(4)], 8) + 0.0)

# Six unit bumps on (-3, 3) inside the box (-4, 4), couplings uniform on (0, 1).
model = anderson_model()
omega = sample_omega(model, seed=2024)
print("\nrealized couplings:", {n: round(v, 4) for n, v in omega.values.items()})

H = build_regular_problem(model, omega)
window = eigenvalues_in_window(H, 0.0, 20.0)
print(f"{len(window)} eigenvalues in [0, 20):")
for pair in window.pairs:
    print(f"  k={pair.index:2d}  E={pair.value:.10f}  sign changes={pair.sign_changes()}  "
          f"norm={pair.norm():.8f}")

# Counting needs one integration, no root finding.
print("\neigenvalues below 10:", count_eigenvalues_below(H, 10.0))

# Raising the potential can only raise each level.
louder = build_regular_problem(model, omega.replace(0, omega[0] + 5.0))
shift = [kth_eigenvalue(louder, k, grid=None).value - p.value for k, p in enumerate(window.pairs)]
print("level shifts after adding 5 to omega(0):", np.round(shift, 4))

# A crude picture of the ground state.
ground = window.pairs[0]
print("\nground state |u(x)| on a coarse grid:")
for x, u in zip(ground.x[::128], ground.u[::128]):
    print(f"  x={x:+.2f} " + "#" * int(40 * abs(u)))
