"""Do two spectra share eigenvalues? A Monte Carlo look.

The full operator on (-4, 4) is compared with the same potential on a
subinterval that misses some bumps. With continuous coupling laws the rate of
near-coincidences falls roughly in proportion to eps. The controls show what
a real coincidence looks like.

Run: python3 demos/04_coincidences.py   (about a minute on one core)
"""

from sturm_rand import (ComparisonSpec, DistributionSpec, anderson_model, build_regular_problem,
                        eigenvalues_in_window, run_experiment, sample_omega)

N = 3000
EPS = (1e-2, 1e-3, 1e-4, 1e-5)
model = anderson_model()


def show(label, report):
    rates = "  ".join(f"{r:.4f}" for r in report.coincidence_rate)
    q = "  ".join(f"{g:.2e}" for g in report.gap_quantiles)
    print(f"{label:34s} rates [{rates}]   gap quantiles 1/5/50% [{q}]")


print(f"N = {N}, eps = {EPS}\n")
show("subinterval (-4, -0.5)", run_experiment(model, ComparisonSpec.subinterval(-4, -0.5), N))
show("fixed energy E = 4.4", run_experiment(model, ComparisonSpec.fixed_energy(4.4), N))
show("E = omega(0) (affine h)", run_experiment(model, ComparisonSpec.h_of_coordinate(0), N))
show("control: spectrum vs itself", run_experiment(model, ComparisonSpec.self_control(), N))

# With every coupling fixed, one energy is an eigenvalue in every trial.
atomic = anderson_model(distribution=DistributionSpec.atomic([(0.5, 1.0)]))
E = eigenvalues_in_window(build_regular_problem(atomic, sample_omega(atomic, 0)), 0, 25,
                          grid=None).values[2]
show(f"atomic laws, E = {E:.4f}", run_experiment(atomic, ComparisonSpec.fixed_energy(E), N))

# Pitfall: the boxes (-4, 4) and (-4, 0) have lengths 8 and 4, so their free
# levels (pi k / L)^2 coincide exactly. The bumps only perturb that, which makes
# near-coincidences far more common, though the rate still falls with eps.
show("subinterval (-4, 0), commensurate", run_experiment(model, ComparisonSpec.subinterval(-4, 0), N))
