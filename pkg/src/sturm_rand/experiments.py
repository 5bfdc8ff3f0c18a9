"""Monte Carlo coincidence experiments.

Each trial samples omega, computes the spectrum of ``H_omega`` in an energy
window and measures the smallest distance to a comparison set: the spectrum
of the same potential on a subinterval, a fixed energy, an affine function of
one coupling, or (as a control) the spectrum itself. A coincidence at level
``eps`` is a minimum gap below ``eps``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyExperimentError, SturmRandError
from .model import DIRICHLET, Interval, RandomPotentialModel, as_angle, build_regular_problem
from .prufer import DEFAULT_TOL, eigenvalues_in_window
from .sampling import sample_omega, trial_seed

log = logging.getLogger(__name__)

DEFAULT_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5)
DEFAULT_WINDOW = (0.0, 25.0)
QUANTILE_LEVELS = (0.01, 0.05, 0.5)
THREADS_ENV = "STURM_RAND_THREADS"

COMPARISON_KINDS = ("subinterval", "fixed_energy", "h_of_coordinate", "self_control")


@dataclass(frozen=True)
class ComparisonSpec:
    """The comparison family ``J_omega`` (or target point) of an experiment."""

    kind: str
    interval: Optional[Interval] = None
    left_bc: float = 0.0
    right_bc: float = 0.0
    energy: Optional[float] = None
    n: Optional[int] = None
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in COMPARISON_KINDS:
            raise ValueError(f"unknown comparison kind {self.kind!r}")
        if self.kind == "subinterval":
            if self.interval is None:
                raise ValueError("subinterval comparison needs an interval")
            if not isinstance(self.interval, Interval):
                object.__setattr__(self, "interval", Interval(*self.interval))
            object.__setattr__(self, "left_bc", as_angle(self.left_bc))
            object.__setattr__(self, "right_bc", as_angle(self.right_bc))
        if self.kind == "fixed_energy" and (self.energy is None or not math.isfinite(self.energy)):
            raise ValueError("fixed_energy comparison needs a finite energy")
        if self.kind == "h_of_coordinate":
            if self.n is None:
                raise ValueError("h_of_coordinate comparison needs an index n")
            if not (math.isfinite(self.scale) and math.isfinite(self.offset)):
                raise ValueError("affine h needs finite scale and offset")

    @classmethod
    def subinterval(cls, lo, hi, left_bc=DIRICHLET, right_bc=DIRICHLET):
        return cls("subinterval", Interval(lo, hi), left_bc, right_bc)

    @classmethod
    def fixed_energy(cls, E):
        return cls("fixed_energy", energy=float(E))

    @classmethod
    def h_of_coordinate(cls, n, scale=1.0, offset=0.0):
        return cls("h_of_coordinate", n=int(n), scale=float(scale), offset=float(offset))

    @classmethod
    def self_control(cls):
        return cls("self_control")

    def validate(self, model: RandomPotentialModel):
        if self.kind == "subinterval":
            sub = self.interval
            if not (model.interval.contains_interval(sub) and sub != model.interval):
                raise ValueError(f"subinterval {tuple(sub)} must be a proper part of "
                                 f"{tuple(model.interval)}")
            if not self.excluded_indices(model):
                raise ValueError("no bump with a continuous law lies outside the subinterval")
        elif self.kind == "h_of_coordinate" and self.n not in model.index_set:
            raise ValueError(f"index {self.n} is not in the model's index set")

    def excluded_indices(self, model: RandomPotentialModel) -> list:
        """Continuous-law indices whose bumps miss the subinterval."""
        if self.kind != "subinterval":
            return []
        return [n for n in model.continuous_indices()
                if not model.bumps[n].support.overlaps(self.interval)]

    def summary(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "subinterval":
            d.update(interval=[self.interval.lo, self.interval.hi],
                     left_angle=self.left_bc.angle, right_angle=self.right_bc.angle)
        elif self.kind == "fixed_energy":
            d.update(energy=self.energy)
        elif self.kind == "h_of_coordinate":
            d.update(n=self.n, scale=self.scale, offset=self.offset)
        return d


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    min_gap: float

    def coincidence(self, eps: float) -> bool:
        return self.min_gap < eps


@dataclass(frozen=True)
class ExperimentReport:
    spec: dict
    trials: int
    epsilon_grid: Tuple[float, ...]
    coincidence_rate: Tuple[float, ...]
    gap_quantiles: Tuple[float, ...]
    master_seed: int
    failures: Tuple[Tuple[int, int, str], ...] = ()
    records: Tuple[TrialRecord, ...] = field(default=(), repr=False, compare=False)

    def rate(self, eps: float) -> float:
        return self.coincidence_rate[self.epsilon_grid.index(eps)]


class TrialError(SturmRandError):
    def __init__(self, trial, seed, cause):
        self.trial = trial
        self.seed = seed
        self.cause = cause
        super().__init__(f"trial {trial} (seed {seed}): {cause}")


def min_pairwise_gap(a, b) -> float:
    """``min |a_i - b_j|``; infinite when either set is empty."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        return math.inf
    i = np.clip(np.searchsorted(a, b), 1, a.size - 1) if a.size > 1 else np.zeros(b.size, int)
    gaps = np.abs(a[i] - b)
    if a.size > 1:
        gaps = np.minimum(gaps, np.abs(a[i - 1] - b))
    return float(gaps.min())


def comparison_set(model, comparison: ComparisonSpec, omega, spectrum, energy_window, tol):
    if comparison.kind == "self_control":
        return spectrum
    if comparison.kind == "fixed_energy":
        return np.array([comparison.energy])
    if comparison.kind == "h_of_coordinate":
        return np.array([comparison.scale * omega[comparison.n] + comparison.offset])
    J = build_regular_problem(model, omega, comparison.interval, comparison.left_bc,
                              comparison.right_bc)
    return eigenvalues_in_window(J, *energy_window, tol=tol, grid=None).values


def run_trial(model: RandomPotentialModel, comparison: ComparisonSpec, seed: int,
              energy_window=DEFAULT_WINDOW, tol: float = DEFAULT_TOL, trial: int = 0) -> TrialRecord:
    try:
        omega = sample_omega(model, seed)
        H = build_regular_problem(model, omega)
        spectrum = eigenvalues_in_window(H, *energy_window, tol=tol, grid=None).values
        other = comparison_set(model, comparison, omega, spectrum, energy_window, tol)
    except SturmRandError as exc:
        raise TrialError(trial, seed, exc) from exc
    return TrialRecord(trial, int(seed), min_pairwise_gap(spectrum, other))


def gap_statistics(records: Sequence[TrialRecord], epsilon_grid=DEFAULT_EPSILONS) -> dict:
    """Exact coincidence rates and empirical gap quantiles (no interpolation)."""
    if not records:
        raise EmptyExperimentError("no trial records")
    gaps = np.array([r.min_gap for r in records])
    rates = tuple(float(np.count_nonzero(gaps < eps)) / gaps.size for eps in epsilon_grid)
    quantiles = tuple(float(q) for q in np.quantile(gaps, QUANTILE_LEVELS, method="inverted_cdf"))
    return {"coincidence_rate": rates, "gap_quantiles": quantiles}


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(model: RandomPotentialModel, comparison: ComparisonSpec, trials: int,
                   master_seed: int = 0, epsilon_grid=DEFAULT_EPSILONS,
                   energy_window=DEFAULT_WINDOW, tol: float = DEFAULT_TOL,
                   workers: Optional[int] = None) -> ExperimentReport:
    """Run ``trials`` independent trials; the result does not depend on ``workers``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    comparison.validate(model)
    epsilon_grid = tuple(sorted((float(e) for e in epsilon_grid), reverse=True))
    energy_window = (float(energy_window[0]), float(energy_window[1]))
    workers = default_workers() if workers is None else max(1, int(workers))

    def one(i):
        seed = trial_seed(master_seed, i)
        try:
            return run_trial(model, comparison, seed, energy_window, tol, trial=i)
        except TrialError as exc:
            log.warning("%s", exc)
            return exc

    if workers == 1:
        results = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials), chunksize=1))
    records = tuple(r for r in results if isinstance(r, TrialRecord))
    failures = tuple((r.trial, r.seed, str(r.cause)) for r in results
                     if isinstance(r, TrialError))
    stats = gap_statistics(records, epsilon_grid)
    spec = {"comparison": comparison.summary(), "energy_window": list(energy_window),
            "tol": tol}
    return ExperimentReport(spec, trials, epsilon_grid, stats["coincidence_rate"],
                            stats["gap_quantiles"], int(master_seed), failures, records)
