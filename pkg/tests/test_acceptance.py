"""Acceptance criteria. Each test prints one PASS/FAIL line (visible with or without -s)."""

import json
import math
import time

import numpy as np
import pytest

from helpers import LARGE_N, SUBINTERVAL, flat_coupling_template, free_problem, refine_steps
from helpers import step_problem
from oracles import fd_dirichlet, lambda_scan_roots
from sturm_rand import (ComparisonSpec, DistributionSpec, Interval, anderson_model,
                        build_regular_problem, coupling_mismatch, coupling_roots,
                        eigenvalues_in_window, eval_potential, extract_boundary_angles,
                        kth_eigenvalue, run_experiment, sample_omega, verify_discreteness)
from sturm_rand.model import NEUMANN
from sturm_rand.prufer import solution_path
from sturm_rand.sampling import coordinate_draw, substream
from sturm_rand.serialize import dumps, report_to_dict

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_analytic_spectra(verdict):
    kth_eigenvalue(free_problem(0.0, 1.0), 0, grid=None)  # load compiled kernels
    t0 = time.perf_counter()
    dir_vals = [kth_eigenvalue(free_problem(), k).value for k in range(10)]
    neu_vals = [kth_eigenvalue(free_problem(0.0, 1.0, NEUMANN, NEUMANN), k).value
                for k in range(10)]
    elapsed = time.perf_counter() - t0
    err_d = max(abs(v - (k + 1) ** 2) for k, v in enumerate(dir_vals))
    err_n = max(abs(v - (k * math.pi) ** 2) for k, v in enumerate(neu_vals))
    ok = err_d <= 1e-7 and err_n <= 1e-7 and elapsed < 1.0
    verdict(1, "analytic spectra", ok,
            f"Dirichlet err {err_d:.1e}, Neumann err {err_n:.1e}, {elapsed:.2f}s")


def test_criterion_2_fd_oracle(verdict):
    m = anderson_model()
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        om = sample_omega(m, seed)
        H = build_regular_problem(m, om)
        ours = np.array([kth_eigenvalue(H, k, grid=None).value for k in range(10)])
        ref = fd_dirichlet(lambda x: eval_potential(m, om, x), -4.0, 4.0, 10, jumps=range(-3, 4))
        worst = max(worst, float(np.max(np.abs(ours - ref) / np.abs(ref))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-5 and elapsed < 120
    verdict(2, "finite-difference oracle", ok,
            f"max rel err {worst:.1e} over 20 realizations x 10 levels, {elapsed:.1f}s")


def test_criterion_3_boundary_angle_roundtrip(verdict):
    m = anderson_model()
    worst_res, worst_ev = 0.0, 0.0
    for case in range(50):
        rng = substream(case, 3)
        n0 = int(rng.integers(-3, 3))
        lam0 = float(rng.uniform(-5, 5))
        k = int(rng.integers(0, 6))
        om = sample_omega(m, case).replace(n0, 0.0)
        bump = m.bumps[n0]
        H = build_regular_problem(m, om, coupling=(lam0, bump))
        E = kth_eigenvalue(H, k, grid=None).value
        c, d = bump.support
        th, _ = solution_path(H, E, np.array([c, d]), H.left_bc.prufer_start)
        theta0, gamma0 = extract_boundary_angles(*[(math.sin(t), math.cos(t)) for t in th])
        template = build_regular_problem(m, om, Interval(c, d), theta0, gamma0,
                                         coupling=(0.0, bump))
        mm = coupling_mismatch(E, lam0, template)
        worst_res = max(worst_res, abs(mm.residual))
        # the matched branch's eigenvalue of the restricted problem is E itself
        Ek = kth_eigenvalue(template.with_coupling(lam0), mm.branch, tol=1e-11, grid=None).value
        worst_ev = max(worst_ev, abs(Ek - E))
    ok = worst_res < 1e-6 and worst_ev < 1e-7
    verdict(3, "boundary-angle roundtrip", ok,
            f"max residual {worst_res:.1e} rad, max |E_k - E| {worst_ev:.1e} over 50 cases")


def test_criterion_4_coupling_set_exact(verdict):
    r = coupling_roots(2.0, (-20.0, 5.0), flat_coupling_template())
    exact = [-14.0, -7.0, -2.0, 1.0]
    err = max(abs(a - b) for a, b in zip(r.roots, exact)) if len(r.roots) == 4 else math.inf
    rep = verify_discreteness(r, 10)
    ok = len(r.roots) == 4 and err <= 1e-8 and rep.stable and rep.refined_root_count == 4
    verdict(4, "coupling set exactness", ok,
            f"roots {[round(x, 10) for x in r.roots]}, max err {err:.1e}, "
            f"10x refinement stable={rep.stable}, min gap {rep.refined_min_gap:.6f}")


def test_criterion_5_coupling_set_oracle(verdict):
    rng = np.random.default_rng(20240501)
    worst, total, mismatched = 0.0, 0, 0
    for _ in range(10):
        L = rng.uniform(3, 8)
        edges = np.concatenate([[0.0], np.sort(rng.uniform(0, L, rng.integers(2, 7))), [L]])
        values = rng.uniform(-4, 4, len(edges) - 1)
        c, d = rng.uniform(0, 0.3 * L), rng.uniform(0.6 * L, L)
        left, right = rng.uniform(0, math.pi, 2)
        P = step_problem(edges, values, (c, d), left, right)
        ours = np.array(coupling_roots(3.0, (-10.0, 10.0), P).roots)
        e, v, f = refine_steps(edges, values, (c, d))
        ref = lambda_scan_roots(3.0, e, v, f, left, right, (-10.0, 10.0))
        total += len(ref)
        if len(ours) != len(ref):
            mismatched += 1
            continue
        if len(ref):
            worst = max(worst, float(np.max(np.abs(ours - ref))))
    ok = mismatched == 0 and worst <= 1e-6 and total > 0
    verdict(5, "coupling set vs dense scan", ok,
            f"{total} oracle roots, {mismatched} count mismatches, max err {worst:.1e}")


def test_criterion_6_coincidence_rates(verdict, subinterval_run, default_model):
    t0 = time.perf_counter()
    rep, main_seconds = subinterval_run
    rates = rep.coincidence_rate
    nonincreasing = all(a >= b for a, b in zip(rates, rates[1:]))
    tail = rep.rate(1e-5) * LARGE_N
    ctrl = run_experiment(default_model, ComparisonSpec.self_control(), LARGE_N, master_seed=0)
    atomic = anderson_model(distribution=DistributionSpec.atomic([(0.5, 1.0)]))
    E = eigenvalues_in_window(build_regular_problem(atomic, sample_omega(atomic, 0)), 0, 25,
                              grid=None).values[2]
    atom = run_experiment(atomic, ComparisonSpec.fixed_energy(E), LARGE_N, master_seed=0)
    elapsed = time.perf_counter() - t0 + main_seconds
    ok = (elapsed < 600 and nonincreasing and tail <= 5 and set(ctrl.coincidence_rate) == {1.0}
          and set(atom.coincidence_rate) == {1.0} and not rep.failures)
    verdict(6, "coincidence empirics", ok,
            f"subinterval {SUBINTERVAL} rates {list(rates)} (rate(1e-5)*N = {tail:.0f}), "
            f"self-control {set(ctrl.coincidence_rate)}, atomic {set(atom.coincidence_rate)}, "
            f"total {elapsed:.0f}s")


def test_criterion_7_excluded_coordinate(verdict, default_model):
    m = default_model
    spec = ComparisonSpec.subinterval(*SUBINTERVAL)
    excluded = spec.excluded_indices(m)
    worst = 0.0
    for seed in range(100):
        om = sample_omega(m, seed)
        base = eigenvalues_in_window(build_regular_problem(m, om, spec.interval), 0, 25,
                                     grid=None).values
        for n0 in excluded:
            other = om.replace(n0, coordinate_draw(m.distributions[n0], seed + 10_000, n0))
            vals = eigenvalues_in_window(build_regular_problem(m, other, spec.interval), 0, 25,
                                         grid=None).values
            worst = max(worst, float(np.max(np.abs(vals - base), initial=0.0))
                        if len(vals) == len(base) else math.inf)
    ok = worst <= 1e-12 and bool(excluded)
    verdict(7, "independence of excluded coordinate", ok,
            f"excluded indices {excluded}, max change {worst:.1e} over 100 seeds")


def test_criterion_8_determinism(verdict, default_model):
    docs = {}
    for w in (1, 8):
        reps = [run_experiment(default_model, c, 500, master_seed=42, workers=w)
                for c in (ComparisonSpec.subinterval(*SUBINTERVAL),
                          ComparisonSpec.h_of_coordinate(1, 2.0, 3.0))]
        docs[w] = dumps([report_to_dict(r) for r in reps]) + json.dumps(
            [[(t.trial, t.seed, t.min_gap) for t in r.records] for r in reps])
    ok = docs[1] == docs[8]
    verdict(8, "thread-count determinism", ok,
            f"1 vs 8 workers byte-identical={ok} ({len(docs[1])} bytes)")
