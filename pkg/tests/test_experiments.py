import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import LARGE_N, SUBINTERVAL
from oracles import fd_dirichlet
from sturm_rand import (ComparisonSpec, DistributionSpec, EmptyExperimentError, TrialRecord,
                        anderson_model, build_regular_problem, eigenvalues_in_window,
                        eval_potential, gap_statistics, run_experiment, run_trial, sample_omega)
from sturm_rand import experiments
from sturm_rand.experiments import TrialError, default_workers, min_pairwise_gap
from sturm_rand.sampling import coordinate_draw, trial_seed
from sturm_rand.serialize import report_to_dict

# Coincidence counts at eps = 1e-2, 1e-3, 1e-4, 1e-5 for N = 1e4, master seed 0,
# taken from the first validated run and pinned.
SUBINTERVAL_COUNTS = [263, 28, 4, 1]
COORDINATE_COUNTS = [308, 25, 2, 0]
# min gap for trial 0 (master seed 0), window (0, 20), from fd_dirichlet spectra, frozen.
TRIAL0_FD_GAP = 0.16095129773895378


def counts(report):
    return [round(r * report.trials) for r in report.coincidence_rate]


# -- min gap and statistics --------------------------------------------------

def test_min_pairwise_gap():
    assert min_pairwise_gap([1.0, 5.0], [4.5, 10.0]) == 0.5
    assert min_pairwise_gap([3.0], [1.0, 2.5]) == 0.5
    assert min_pairwise_gap([], [1.0]) == math.inf
    assert min_pairwise_gap([2.0, 1.0, 7.0], [6.0]) == 1.0


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30),
       st.lists(st.floats(-100, 100), min_size=1, max_size=30))
def test_min_pairwise_gap_brute_force(a, b):
    brute = min(abs(x - y) for x in a for y in b)
    assert min_pairwise_gap(a, b) == brute


def records(gaps):
    return [TrialRecord(i, i, g) for i, g in enumerate(gaps)]


def test_rate_one_third():
    assert gap_statistics(records([0.0, 1.0, 2.0]), [0.5])["coincidence_rate"] == (1 / 3,)


def test_all_gaps_large():
    rates = gap_statistics(records([3.0, 4.0]), [1e-2, 1e-3])["coincidence_rate"]
    assert rates == (0.0, 0.0)


def test_binomial_rate():
    gaps = np.random.default_rng(1).uniform(0, 1, 10_000)
    assert abs(gap_statistics(records(gaps), [0.1])["coincidence_rate"][0] - 0.1) < 0.01


def test_quantiles_are_order_statistics():
    stats = gap_statistics(records(np.arange(100, dtype=float)), [1.0])
    assert stats["gap_quantiles"] == (0.0, 4.0, 49.0)


def test_empty_records():
    with pytest.raises(EmptyExperimentError):
        gap_statistics([], [0.1])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=200),
       st.lists(st.floats(1e-6, 1), min_size=1, max_size=6))
def test_rates_monotone_in_eps(gaps, eps):
    eps = sorted(set(eps))
    rates = gap_statistics(records(gaps), eps)["coincidence_rate"]
    assert all(0 <= r <= 1 for r in rates)
    assert all(x <= y for x, y in zip(rates, rates[1:]))


# -- single trials -----------------------------------------------------------

def test_self_control_trial(default_model):
    rec = run_trial(default_model, ComparisonSpec.self_control(), 5)
    assert rec.min_gap == 0.0 and all(rec.coincidence(e) for e in (1e-2, 1e-8))


def test_fixed_energy_below_spectrum():
    m = anderson_model(distribution=DistributionSpec.uniform(1, 2))
    seed, E = 17, 0.5
    rec = run_trial(m, ComparisonSpec.fixed_energy(E), seed, energy_window=(0.0, 25.0))
    H = build_regular_problem(m, sample_omega(m, seed))
    E0 = eigenvalues_in_window(H, -10, 25, grid=None).values[0]
    assert rec.min_gap >= E0 - E > 0


def test_subinterval_trial_against_frozen_oracle(default_model):
    seed = trial_seed(0, 0)
    rec = run_trial(default_model, ComparisonSpec.subinterval(*SUBINTERVAL), seed, (0.0, 20.0))
    assert rec.seed == seed
    assert abs(rec.min_gap - TRIAL0_FD_GAP) < 1e-5


def test_frozen_trial_oracle_reproduces(default_model):
    m = default_model
    om = sample_omega(m, trial_seed(0, 0))
    q = lambda x: eval_potential(m, om, x)
    full = fd_dirichlet(q, -4.0, 4.0, 12, jumps=range(-3, 4))
    # 7 * 2**14 intervals put -3, -2, -1 on nodes of (-4, -0.5)
    sub = fd_dirichlet(q, -4.0, -0.5, 6, intervals=7 * 2 ** 14, jumps=(-3, -2, -1))
    gap = min_pairwise_gap(full[full < 20], sub[sub < 20])
    assert gap == pytest.approx(TRIAL0_FD_GAP, rel=1e-10)


def test_coordinate_comparison_uses_affine_map(default_model):
    seed = 99
    c = ComparisonSpec.h_of_coordinate(1, scale=3.0, offset=2.0)
    rec = run_trial(default_model, c, seed)
    r = 3.0 * sample_omega(default_model, seed)[1] + 2.0
    H = build_regular_problem(default_model, sample_omega(default_model, seed))
    vals = eigenvalues_in_window(H, 0, 25, grid=None).values
    assert rec.min_gap == np.min(np.abs(vals - r))


# -- comparison specs --------------------------------------------------------

@pytest.mark.parametrize("spec", [
    ComparisonSpec.subinterval(-4.0, 4.0),     # not a proper subinterval
    ComparisonSpec.subinterval(-5.0, 0.0),     # leaves the working interval
    ComparisonSpec.subinterval(-3.5, 3.5),     # every bump overlaps it
    ComparisonSpec.h_of_coordinate(7),
])
def test_inconsistent_comparisons_rejected(default_model, spec):
    with pytest.raises(ValueError):
        spec.validate(default_model)


def test_atomic_bumps_do_not_count_as_excluded():
    laws = {n: DistributionSpec.uniform(0, 1) for n in range(-3, 3)}
    laws.update({n: DistributionSpec.atomic([(0.5, 1.0)]) for n in (0, 1, 2)})
    with pytest.raises(ValueError, match="continuous"):
        ComparisonSpec.subinterval(*SUBINTERVAL).validate(anderson_model(distribution=laws))


def test_excluded_indices(default_model):
    assert ComparisonSpec.subinterval(*SUBINTERVAL).excluded_indices(default_model) == [0, 1, 2]


def test_spec_constructor_checks():
    with pytest.raises(ValueError):
        ComparisonSpec("nonsense")
    with pytest.raises(ValueError):
        ComparisonSpec.fixed_energy(math.nan)
    with pytest.raises(ValueError):
        ComparisonSpec("subinterval")


# -- experiments -------------------------------------------------------------

def test_self_control_experiment(default_model):
    rep = run_experiment(default_model, ComparisonSpec.self_control(), 20, master_seed=3)
    assert rep.coincidence_rate == (1.0, 1.0, 1.0, 1.0)
    assert rep.gap_quantiles == (0.0, 0.0, 0.0)


def test_epsilon_grid_sorted_descending(default_model):
    rep = run_experiment(default_model, ComparisonSpec.self_control(), 2,
                         epsilon_grid=[1e-4, 1e-2, 1e-3])
    assert rep.epsilon_grid == (1e-2, 1e-3, 1e-4)
    assert rep.rate(1e-3) == 1.0


def test_trials_must_be_positive(default_model):
    with pytest.raises(ValueError):
        run_experiment(default_model, ComparisonSpec.self_control(), 0)


def test_subinterval_regression(subinterval_report):
    rep = subinterval_report
    assert rep.trials == LARGE_N and not rep.failures
    assert counts(rep) == SUBINTERVAL_COUNTS
    rates = rep.coincidence_rate
    assert all(x >= y for x, y in zip(rates, rates[1:]))
    # roughly linear in eps while the counts are informative
    assert rates[0] >= 100 / LARGE_N and 0.03 <= rates[1] / rates[0] <= 0.3


def test_coordinate_regression(coordinate_report):
    assert counts(coordinate_report) == COORDINATE_COUNTS
    assert coordinate_report.rate(1e-4) * LARGE_N <= 5


def test_control_separation(default_model):
    sub = run_experiment(default_model, ComparisonSpec.subinterval(*SUBINTERVAL), 1000, 7)
    ctrl = run_experiment(default_model, ComparisonSpec.self_control(), 1000, 7)
    assert all(c == 1.0 > s for c, s in zip(ctrl.coincidence_rate, sub.coincidence_rate))


def test_atomic_contrast():
    m = anderson_model(distribution=DistributionSpec.atomic([(0.7, 1.0)]))
    H = build_regular_problem(m, sample_omega(m, 0))
    E = eigenvalues_in_window(H, 0, 25, grid=None).values[3]
    rep = run_experiment(m, ComparisonSpec.fixed_energy(E), 50, master_seed=1)
    assert rep.coincidence_rate == (1.0, 1.0, 1.0, 1.0)


def test_continuous_fixed_energy_rarely_hits():
    m = anderson_model()
    rep = run_experiment(m, ComparisonSpec.fixed_energy(5.0), 2000, master_seed=2)
    assert rep.rate(1e-5) * 2000 <= 2


def test_subinterval_spectrum_ignores_excluded_coordinate(default_model):
    m = default_model
    spec = ComparisonSpec.subinterval(*SUBINTERVAL)
    for seed in range(20):
        om = sample_omega(m, seed)
        for n0 in spec.excluded_indices(m):
            other = om.replace(n0, coordinate_draw(m.distributions[n0], seed + 1000, n0))
            a = eigenvalues_in_window(build_regular_problem(m, om, spec.interval), 0, 25, grid=None)
            b = eigenvalues_in_window(build_regular_problem(m, other, spec.interval), 0, 25,
                                      grid=None)
            assert np.max(np.abs(a.values - b.values), initial=0.0) <= 1e-12


def test_worker_count_does_not_change_results(default_model):
    spec = ComparisonSpec.subinterval(*SUBINTERVAL)
    one = run_experiment(default_model, spec, 150, master_seed=9, workers=1)
    many = run_experiment(default_model, spec, 150, master_seed=9, workers=8)
    assert json.dumps(report_to_dict(one)) == json.dumps(report_to_dict(many))
    assert one.records == many.records


def test_failures_are_collected(default_model, monkeypatch):
    real = experiments.run_trial

    def flaky(model, comparison, seed, energy_window, tol, trial):
        if trial in (2, 5):
            raise TrialError(trial, seed, RuntimeError("boom"))
        return real(model, comparison, seed, energy_window, tol, trial)

    monkeypatch.setattr(experiments, "run_trial", flaky)
    rep = run_experiment(default_model, ComparisonSpec.self_control(), 8, workers=2)
    assert [f[0] for f in rep.failures] == [2, 5]
    assert len(rep.records) == 6 and rep.trials == 8


def test_thread_env(monkeypatch):
    monkeypatch.setenv("STURM_RAND_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("STURM_RAND_THREADS")
    assert default_workers() >= 1
