"""Regular Sturm-Liouville eigenvalues by Prüfer-angle shooting.

With ``u = rho sin(theta)``, ``u' = rho cos(theta)`` the equation
``-u'' + q u = E u`` becomes

    theta' = cos^2(theta) + (E - q) sin^2(theta)

The terminal angle is continuous and strictly increasing in ``E``, and the
``k``-th eigenvalue is the energy where it reaches ``beta' + k pi``. Counting
eigenvalues is therefore a subtraction on the unwrapped angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from . import _kernels as K
from .errors import IntegrationError, SearchBoundError
from .model import RegularProblem

DEFAULT_TOL = 1e-9
DEFAULT_GRID = 2048
RTOL = 1e-12
ATOL = 1e-11
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class PruferState:
    theta: float
    log_rho: float
    x: float


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """Eigenvalue ``value`` of branch ``index`` with samples of ``(u, u')``.

    ``x``, ``u`` and ``du`` are ``None`` when only the eigenvalue was asked for.
    """

    index: int
    value: float
    x: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    du: Optional[np.ndarray] = None

    def sign_changes(self) -> int:
        """Sign changes of ``u`` strictly inside the interval."""
        s = np.sign(self.u[1:-1])
        s = s[s != 0]
        return int(np.count_nonzero(s[1:] != s[:-1]))

    def norm(self) -> float:
        return math.sqrt(simpson(self.u ** 2, x=self.x))

    def __eq__(self, other):
        if not isinstance(other, Eigenpair):
            return NotImplemented
        same = self.index == other.index and self.value == other.value
        for a, b in ((self.x, other.x), (self.u, other.u), (self.du, other.du)):
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        return same


@dataclass(frozen=True)
class SpectrumWindow:
    pairs: Tuple[Eigenpair, ...]
    window: Tuple[float, float]

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def indices(self) -> list:
        return [p.index for p in self.pairs]

    def __len__(self):
        return len(self.pairs)


def _raise_for(info):
    status = int(info[0])
    if status == K.STEP_UNDERFLOW:
        raise IntegrationError(info[1])
    if status == K.NO_BRACKET:
        raise SearchBoundError(f"bracket lost near E = {info[1]!r}")


def terminal_angle(problem: RegularProblem, E: float, theta_start: Optional[float] = None,
                   table: Optional[np.ndarray] = None) -> float:
    """Unwrapped Prüfer angle at the right end (the hot path; no amplitude)."""
    info = np.zeros(2)
    th0 = problem.left_bc.prufer_start if theta_start is None else theta_start
    tab = problem.table() if table is None else table
    th = K.theta_end(tab, float(E), th0, RTOL, ATOL, info)
    _raise_for(info)
    return th


def prufer_integrate(problem: RegularProblem, E: float) -> PruferState:
    """Terminal Prüfer state started from the left boundary angle."""
    xs = np.asarray(problem.breakpoints, dtype=float)
    seg = np.arange(len(xs) - 1)
    out = np.empty((len(xs), 2))
    info = np.zeros(2)
    K.path(problem.table(), float(E), problem.left_bc.prufer_start, 0.0, xs, seg,
           RTOL, ATOL, out, info)
    _raise_for(info)
    return PruferState(float(out[-1, 0]), float(out[-1, 1]), float(xs[-1]))


def count_eigenvalues_below(problem: RegularProblem, E: float) -> int:
    """Number of eigenvalues strictly below ``E``."""
    return int(K.count_below(terminal_angle(problem, E), problem.right_bc.prufer_target))


def solution_path(problem: RegularProblem, E: float, xs: np.ndarray, theta_start: float,
                  from_right: bool = False):
    """Prüfer angle and log-amplitude at the sorted points ``xs``.

    Integration starts at the left end (or the right end when ``from_right``)
    with angle ``theta_start``; breakpoints are inserted as forced stops.
    Returns ``(theta, log_rho)`` arrays aligned with ``xs``.
    """
    xs = np.asarray(xs, dtype=float)
    bp = problem.breakpoints
    stops = np.union1d(xs, bp)
    if from_right:
        stops = stops[::-1]
    mids = 0.5 * (stops[:-1] + stops[1:])
    seg = np.clip(np.searchsorted(bp, mids, side="right") - 1, 0, len(bp) - 2)
    out = np.empty((len(stops), 2))
    info = np.zeros(2)
    K.path(problem.table(), float(E), float(theta_start), 0.0, stops, seg.astype(np.int64),
           RTOL, ATOL, out, info)
    _raise_for(info)
    if from_right:
        stops = stops[::-1]
        out = out[::-1]
    pick = np.searchsorted(stops, xs)
    return out[pick, 0], out[pick, 1]


def eigenfunction(problem: RegularProblem, E: float, grid: int = DEFAULT_GRID):
    """Normalized ``(x, u, u')`` samples of the solution satisfying the left condition."""
    x = np.linspace(problem.interval.lo, problem.interval.hi, grid)
    theta, log_rho = solution_path(problem, E, x, problem.left_bc.prufer_start)
    rho = np.exp(log_rho - log_rho.max())
    u = rho * np.sin(theta)
    du = rho * np.cos(theta)
    # rho > 0 and theta(lo) in [0, pi) make the first nonzero of (u, u') positive
    scale = math.sqrt(simpson(u ** 2, x=x))
    return x, u / scale, du / scale


def _bracket(problem: RegularProblem, k: int, tab: np.ndarray) -> Tuple[float, float]:
    target = problem.right_bc.prufer_target + k * math.pi
    th0 = problem.left_bc.prufer_start
    q_lo, q_hi = problem.bounds()
    length = problem.interval.length
    lo = q_lo - 1.0
    for _ in range(MAX_DOUBLINGS):
        if terminal_angle(problem, lo, th0, tab) < target:
            break
        lo = q_lo - 2.0 * (q_lo - lo)
    else:
        raise SearchBoundError(f"no lower energy bracket for k = {k}")
    width = (math.pi * (k + 2) / length) ** 2
    for _ in range(MAX_DOUBLINGS):
        hi = q_hi + width
        if terminal_angle(problem, hi, th0, tab) > target:
            return lo, hi
        width *= 2.0
    raise SearchBoundError(f"no upper energy bracket for k = {k} below E = {q_hi + width!r}")


def kth_eigenvalue(problem: RegularProblem, k: int, tol: float = DEFAULT_TOL,
                   grid: Optional[int] = DEFAULT_GRID) -> Eigenpair:
    """Eigenpair of branch ``k`` (``k`` interior zeros).

    ``grid`` is the number of eigenfunction samples; pass ``None`` to skip the
    eigenfunction.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tab = problem.table()
    lo, hi = _bracket(problem, k, tab)
    info = np.zeros(2)
    E = K.solve_branch(tab, problem.left_bc.prufer_start, problem.right_bc.prufer_target, k,
                       lo, hi, tol, RTOL, ATOL, info)
    _raise_for(info)
    if grid is None:
        return Eigenpair(k, float(E))
    return Eigenpair(k, float(E), *eigenfunction(problem, E, grid))


def eigenvalues_in_window(problem: RegularProblem, E_lo: float, E_hi: float,
                          tol: float = DEFAULT_TOL,
                          grid: Optional[int] = DEFAULT_GRID) -> SpectrumWindow:
    """All eigenpairs with ``E_lo <= E < E_hi``, in increasing order."""
    if not E_lo < E_hi:
        raise ValueError(f"empty energy window ({E_lo}, {E_hi})")
    tab = problem.table()
    th0 = problem.left_bc.prufer_start
    target0 = problem.right_bc.prufer_target
    k_lo = K.count_below(terminal_angle(problem, E_lo, th0, tab), target0)
    k_hi = K.count_below(terminal_angle(problem, E_hi, th0, tab), target0)
    out = np.empty(max(k_hi - k_lo, 0))
    info = np.zeros(2)
    first, n = K.window_eigenvalues(tab, th0, target0, float(E_lo), float(E_hi), tol,
                                    RTOL, ATOL, out, info)
    _raise_for(info)
    pairs = []
    for j in range(n):
        E = float(out[j])
        if grid is None:
            pairs.append(Eigenpair(first + j, E))
        else:
            pairs.append(Eigenpair(first + j, E, *eigenfunction(problem, E, grid)))
    return SpectrumWindow(tuple(pairs), (float(E_lo), float(E_hi)))


def wronskian(u1, u2) -> float:
    """``u1 u2' - u1' u2`` for ``(value, derivative)`` pairs."""
    return u1[0] * u2[1] - u1[1] * u2[0]
