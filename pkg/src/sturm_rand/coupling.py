"""The coupling set A(E) of a bump perturbation.

For a problem with potential ``v + lam * f`` (``f >= 0``, positive on a set
of positive measure) and fixed energy ``E``, the terminal Prüfer angle
``Theta(lam)`` is strictly decreasing. ``E`` is an eigenvalue exactly when
``Theta(lam)`` hits one of the branch targets ``gamma' + k pi``, so each
branch ``k`` contributes at most one ``lam`` and the set is discrete.
Roots are found branch by branch: isolate a bracket whose angle range holds
a single target, then polish with Brent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import _kernels as K
from .errors import DegenerateEigenfunctionError, InvalidBumpError
from .model import BoundaryAngle, RegularProblem, as_angle
from .prufer import ATOL, RTOL, _raise_for, solution_path

DEFAULT_WINDOW = (-50.0, 50.0)
DEFAULT_TOL = 1e-10


class Mismatch(NamedTuple):
    residual: float
    branch: int


@dataclass(frozen=True)
class CouplingSetResult:
    energy: float
    window: Tuple[float, float]
    roots: Tuple[float, ...]
    brackets: Tuple[Tuple[float, float], ...]
    min_gap: float
    tol: float = DEFAULT_TOL
    # inputs kept for re-running under refinement; not serialized
    context: Optional[tuple] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class DiscretenessReport:
    stable: bool
    root_count: int
    refined_root_count: int
    min_gap: float
    refined_min_gap: float
    max_shift: float
    refine_factor: float


def boundary_angle_of(value: float, derivative: float) -> BoundaryAngle:
    """Angle ``a`` in [0, pi) with ``value cos(a) + derivative sin(a) = 0``."""
    if value == 0.0 and derivative == 0.0:
        raise DegenerateEigenfunctionError("(u, u') = (0, 0) defines no boundary angle")
    return BoundaryAngle(math.atan2(-value, derivative))


def extract_boundary_angles(phi_c, phi_d) -> Tuple[BoundaryAngle, BoundaryAngle]:
    """Angles met by a solution's ``(value, derivative)`` data at ``c`` and ``d``."""
    return boundary_angle_of(*phi_c), boundary_angle_of(*phi_d)


def _angles(template: RegularProblem, theta0, gamma0):
    theta0 = template.left_bc if theta0 is None else as_angle(theta0)
    gamma0 = template.right_bc if gamma0 is None else as_angle(gamma0)
    return theta0, gamma0


def _require_coupling(template: RegularProblem):
    if template.coupling is None:
        raise ValueError("template problem needs a coupling bump")


class _AngleMap:
    """``lam -> Theta(lam)`` for one template, energy and start angle."""

    def __init__(self, template: RegularProblem, E: float, theta0: BoundaryAngle):
        self.tab_v, self.tab_f = template.coupling_tables()
        self.E = float(E)
        self.th0 = theta0.prufer_start
        self.info = np.zeros(2)
        self.calls = 0

    def __call__(self, lam: float) -> float:
        self.calls += 1
        th = K.theta_end_coupled(self.tab_v, self.tab_f, float(lam), self.E, self.th0,
                                 RTOL, ATOL, self.info)
        _raise_for(self.info)
        return th


def coupling_mismatch(E: float, lam: float, template: RegularProblem,
                      theta0=None, gamma0=None) -> Mismatch:
    """Signed angle distance from ``Theta(lam)`` to the nearest branch target.

    Zero residual means ``E`` is an eigenvalue of the template at coupling
    ``lam`` with boundary angles ``(theta0, gamma0)``.
    """
    _require_coupling(template)
    theta0, gamma0 = _angles(template, theta0, gamma0)
    th = _AngleMap(template, E, theta0)(lam)
    rel = th - gamma0.prufer_target
    k = int(round(rel / math.pi))
    return Mismatch(rel - k * math.pi, k)


def _branch_range(th_lo, th_hi, target0):
    k_min = max(0, math.ceil((th_hi - target0) / math.pi))
    k_max = math.floor((th_lo - target0) / math.pi)
    return k_min, k_max


def coupling_roots(E: float, window=DEFAULT_WINDOW, template: RegularProblem = None,
                   theta0=None, gamma0=None, tol: float = DEFAULT_TOL,
                   scan: int = 0) -> CouplingSetResult:
    """All ``lam`` in the closed window with ``E`` in the template's spectrum.

    A root lying on a window edge to within integration accuracy may or may
    not be reported; widen the window slightly if that matters.

    ``theta0``/``gamma0`` default to the template's boundary angles. ``scan``
    adds that many uniformly spaced presamples before isolation, which only
    matters for refinement checks.
    """
    if template is None:
        raise TypeError("coupling_roots needs a template problem")
    _require_coupling(template)
    theta0, gamma0 = _angles(template, theta0, gamma0)
    lam_lo, lam_hi = float(window[0]), float(window[1])
    if not (math.isfinite(lam_lo) and math.isfinite(lam_hi) and lam_lo < lam_hi):
        raise ValueError(f"coupling window must be finite with lo < hi, got {window}")
    angle = _AngleMap(template, E, theta0)
    target0 = gamma0.prufer_target

    lams = list(np.linspace(lam_lo, lam_hi, scan + 2))
    ths = [angle(x) for x in lams]
    for a, b, ta, tb in zip(lams, lams[1:], ths, ths[1:]):
        if not ta > tb:
            raise InvalidBumpError(
                f"terminal angle not decreasing on [{a!r}, {b!r}] ({ta!r} -> {tb!r}); "
                "the coupling bump must be nonnegative and positive on part of the interval")

    k_min, k_max = _branch_range(ths[0], ths[-1], target0)
    roots, brackets = [], []
    # higher branches sit at smaller lam
    for k in range(k_max, k_min - 1, -1):
        target = target0 + k * math.pi
        j = next(i for i in range(len(lams) - 1) if ths[i] >= target >= ths[i + 1])
        a, b, ta, tb = lams[j], lams[j + 1], ths[j], ths[j + 1]
        while ta >= target + math.pi or tb <= target - math.pi:
            m = 0.5 * (a + b)
            tm = angle(m)
            if not ta > tm > tb:
                raise InvalidBumpError(f"terminal angle not monotone near lam = {m!r}")
            i = lams.index(a)
            lams.insert(i + 1, m)
            ths.insert(i + 1, tm)
            if tm >= target:
                a, ta = m, tm
            else:
                b, tb = m, tm
        if ta == target or tb == target:
            root = a if ta == target else b
            delta = max(tol, 1e-9 * max(1.0, abs(root)))
            a, b = root - delta, root + delta
        else:
            root = brentq(lambda x: angle(x) - target, a, b, xtol=tol, rtol=4 * np.finfo(float).eps)
        roots.append(float(root))
        brackets.append((float(a), float(b)))
    gaps = np.diff(roots)
    min_gap = float(gaps.min()) if len(gaps) else math.inf
    return CouplingSetResult(float(E), (lam_lo, lam_hi), tuple(roots), tuple(brackets), min_gap,
                             tol, (template, theta0, gamma0, scan))


def verify_discreteness(result: CouplingSetResult, refine_factor: float = 10,
                        template: Optional[RegularProblem] = None, theta0=None,
                        gamma0=None) -> DiscretenessReport:
    """Recompute the roots with tolerance and presampling refined by ``refine_factor``.

    Stable means the same number of roots, each moved by at most twice the
    original tolerance, and a minimum gap that has not shrunk by more than half.
    """
    if template is None:
        if result.context is None:
            raise ValueError("result carries no template; pass template explicitly")
        template, theta0, gamma0, scan = result.context
    else:
        scan = 0
    refined_scan = max(int(refine_factor * max(scan, 8)), 1)
    refined = coupling_roots(result.energy, result.window, template, theta0, gamma0,
                             tol=result.tol / refine_factor, scan=refined_scan)
    same = len(refined.roots) == len(result.roots)
    shift = (max((abs(a - b) for a, b in zip(result.roots, refined.roots)), default=0.0)
             if same else math.inf)
    gap_ok = (math.isinf(result.min_gap) and math.isinf(refined.min_gap)) or (
        refined.min_gap >= 0.5 * result.min_gap)
    stable = same and shift <= 2.0 * result.tol and gap_ok
    return DiscretenessReport(stable, len(result.roots), len(refined.roots), result.min_gap,
                              refined.min_gap, shift, float(refine_factor))


def wronskian_dependence(E: float, lam: float, template: RegularProblem, theta0=None,
                         gamma0=None, grid: int = 1025) -> float:
    """``|W(phi, psi)(d)| / (|phi| |psi|)`` for the left- and right-matched solutions.

    ``phi`` satisfies the ``theta0`` condition at the left end, ``psi`` the
    ``gamma0`` condition at the right end; the value is near zero exactly when
    they are linearly dependent, i.e. when ``lam`` is in A(E).
    """
    _require_coupling(template)
    theta0, gamma0 = _angles(template, theta0, gamma0)
    problem = template.with_coupling(lam)
    x = np.linspace(problem.interval.lo, problem.interval.hi, grid)
    th_l, lr_l = solution_path(problem, E, x, theta0.prufer_start)
    th_r, lr_r = solution_path(problem, E, x, gamma0.prufer_target, from_right=True)
    # common scale factors cancel in the ratio
    rl = np.exp(lr_l - lr_l.max())
    rr = np.exp(lr_r - lr_r.max())
    phi = (rl * np.sin(th_l), rl * np.cos(th_l))
    psi = (rr * np.sin(th_r), rr * np.cos(th_r))
    n_phi = math.sqrt(simpson(phi[0] ** 2, x=x))
    n_psi = math.sqrt(simpson(psi[0] ** 2, x=x))
    w = phi[0][-1] * psi[1][-1] - phi[1][-1] * psi[0][-1]
    return abs(w) / (n_phi * n_psi)
