"""Potentials, boundary angles and regular problems.

The operator is ``-u'' + q u`` on a finite interval, with

    q(x) = v(x) + sum_n omega(n) f_n(x)  [+ lambda f(x)]

where the bumps ``f_n`` have pairwise disjoint supports. Everything here is
immutable; a :class:`RegularProblem` compiles its potential once into the
segment table consumed by :mod:`sturm_rand._kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .distributions import DistributionSpec
from .errors import DomainError

SHAPES = ("indicator", "raised_cosine", "tent")


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got ({lo}, {hi})")
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: Interval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: Interval) -> bool:
        """Open intervals share a point."""
        return self.lo < other.hi and other.lo < self.hi

    def __iter__(self):
        return iter((self.lo, self.hi))


@dataclass(frozen=True)
class BoundaryAngle:
    """Condition ``u cos(a) + u' sin(a) = 0``; the angle is reduced into [0, pi)."""

    angle: float = 0.0

    def __post_init__(self):
        a = float(self.angle)
        if not math.isfinite(a):
            raise ValueError("boundary angle must be finite")
        a = math.fmod(a, math.pi)
        if a < 0.0:
            a += math.pi
        if a >= math.pi:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @property
    def prufer_start(self) -> float:
        """Prüfer angle in [0, pi) of data satisfying the condition at a left end."""
        return 0.0 if self.angle == 0.0 else math.pi - self.angle

    @property
    def prufer_target(self) -> float:
        """Lowest terminal Prüfer angle in (0, pi] satisfying the condition at a right end."""
        return math.pi - self.angle

    def __float__(self):
        return self.angle


DIRICHLET = BoundaryAngle(0.0)
NEUMANN = BoundaryAngle(math.pi / 2)


def as_angle(a) -> BoundaryAngle:
    return a if isinstance(a, BoundaryAngle) else BoundaryAngle(a)


@dataclass(frozen=True)
class Piece:
    """``const + slope (x - lo) + cos_amp cos(cos_freq (x - cos_center))`` on ``[lo, hi]``."""

    lo: float
    hi: float
    const: float = 0.0
    slope: float = 0.0
    cos_amp: float = 0.0
    cos_freq: float = 0.0
    cos_center: float = 0.0

    def scaled(self, c: float) -> Piece:
        return Piece(self.lo, self.hi, c * self.const, c * self.slope, c * self.cos_amp,
                     self.cos_freq, self.cos_center)


@dataclass(frozen=True)
class BumpFunction:
    """Nonnegative bump, positive strictly inside ``support`` and zero elsewhere."""

    support: Interval
    shape: str = "indicator"
    amplitude: float = 1.0

    def __post_init__(self):
        if not isinstance(self.support, Interval):
            object.__setattr__(self, "support", Interval(*self.support))
        if self.shape not in SHAPES:
            raise ValueError(f"unknown bump shape {self.shape!r}")
        if not (self.amplitude > 0 and math.isfinite(self.amplitude)):
            raise ValueError(f"bump amplitude must be positive, got {self.amplitude}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        A = self.amplitude
        if self.shape == "indicator":
            val = np.full_like(x, A)
        elif self.shape == "raised_cosine":
            val = 0.5 * A * (1.0 - np.cos(2.0 * np.pi * (x - lo) / (hi - lo)))
        else:
            half = 0.5 * (hi - lo)
            val = A * (1.0 - np.abs(x - (lo + half)) / half)
        out = np.where(inside, val, 0.0)
        return float(out) if out.ndim == 0 else out

    def pieces(self, weight: float = 1.0) -> list:
        lo, hi = self.support
        A = weight * self.amplitude
        if A == 0.0:
            return []
        if self.shape == "indicator":
            return [Piece(lo, hi, A)]
        if self.shape == "raised_cosine":
            return [Piece(lo, hi, 0.5 * A, 0.0, -0.5 * A, 2.0 * math.pi / (hi - lo), lo)]
        mid = 0.5 * (lo + hi)
        s = A / (mid - lo)
        return [Piece(lo, mid, 0.0, s), Piece(mid, hi, A, -s)]


@dataclass(frozen=True)
class BasePotential:
    """The deterministic background ``v``.

    ``points`` holds ``(x, value)`` pairs for the piecewise kinds; values are
    linearly interpolated between them and held constant beyond the ends.
    """

    kind: str = "zero"
    value: float = 0.0
    points: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "piecewise_linear", "tabulated"):
            raise ValueError(f"unknown base potential kind {self.kind!r}")
        pts = tuple((float(x), float(v)) for x, v in self.points)
        if self.kind in ("piecewise_linear", "tabulated"):
            if len(pts) < 1:
                raise ValueError(f"{self.kind} base potential needs at least one point")
            xs = [x for x, _ in pts]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("base potential breakpoints must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, c0: float):
        return cls("constant", value=c0)

    @classmethod
    def piecewise_linear(cls, breakpoints: Sequence[Tuple[float, float]]):
        return cls("piecewise_linear", points=tuple(breakpoints))

    @classmethod
    def tabulated(cls, grid: Sequence[float], values: Sequence[float]):
        if len(grid) != len(values):
            raise ValueError("tabulated grid and values differ in length")
        return cls("tabulated", points=tuple(zip(grid, values)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(x)
        elif self.kind == "constant":
            out = np.full_like(x, self.value)
        else:
            xs, vs = zip(*self.points)
            out = np.interp(x, xs, vs)
        return float(out) if out.ndim == 0 else out

    def pieces(self, interval: Interval) -> list:
        lo, hi = interval
        if self.kind == "zero":
            return []
        if self.kind == "constant":
            return [Piece(lo, hi, self.value)] if self.value != 0.0 else []
        xs = [x for x, _ in self.points]
        vs = [v for _, v in self.points]
        out = []
        if lo < xs[0]:
            out.append(Piece(lo, min(xs[0], hi), vs[0]))
        for (x0, v0), (x1, v1) in zip(self.points, self.points[1:]):
            if x1 <= lo or x0 >= hi:
                continue
            out.append(Piece(x0, x1, v0, (v1 - v0) / (x1 - x0)))
        if hi > xs[-1]:
            out.append(Piece(max(xs[-1], lo), hi, vs[-1]))
        return out

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(x for x, _ in self.points)


@dataclass(frozen=True)
class RandomPotentialModel:
    """Base potential, bump family and per-index laws on a finite working interval.

    ``domain`` records the nominal interval ``(a, b)``, which may be infinite
    and defaults to ``interval``; all computation happens on ``interval``,
    its finite truncation.
    """

    interval: Interval
    bumps: Mapping[int, BumpFunction]
    distributions: Mapping[int, DistributionSpec]
    base: BasePotential = field(default_factory=BasePotential.zero)
    left_bc: BoundaryAngle = DIRICHLET
    right_bc: BoundaryAngle = DIRICHLET
    domain: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not isinstance(self.interval, Interval):
            object.__setattr__(self, "interval", Interval(*self.interval))
        object.__setattr__(self, "left_bc", as_angle(self.left_bc))
        object.__setattr__(self, "right_bc", as_angle(self.right_bc))
        domain = tuple(self.interval) if self.domain is None else self.domain
        domain = (float(domain[0]), float(domain[1]))
        if not domain[0] <= self.interval.lo < self.interval.hi <= domain[1]:
            raise ValueError(f"working interval {tuple(self.interval)} must lie in {domain}")
        object.__setattr__(self, "domain", domain)
        bumps = {int(n): b for n, b in sorted(self.bumps.items())}
        dists = {int(n): d for n, d in sorted(self.distributions.items())}
        object.__setattr__(self, "bumps", bumps)
        object.__setattr__(self, "distributions", dists)
        if set(bumps) != set(dists):
            raise ValueError("every index needs exactly one bump and one distribution; "
                             f"bumps {sorted(bumps)} vs distributions {sorted(dists)}")
        if bumps:
            keys = list(bumps)
            if keys != list(range(keys[0], keys[-1] + 1)):
                raise ValueError(f"index set must be a contiguous integer range, got {keys}")
        supports = sorted((b.support for b in bumps.values()), key=lambda s: s.lo)
        for s in supports:
            if not self.interval.contains_interval(s):
                raise ValueError(f"bump support {tuple(s)} leaves the working interval "
                                 f"{tuple(self.interval)}")
        for s, t in zip(supports, supports[1:]):
            if s.overlaps(t):
                raise ValueError(f"bump supports {tuple(s)} and {tuple(t)} overlap")

    @property
    def index_set(self) -> range:
        keys = list(self.bumps)
        return range(keys[0], keys[-1] + 1) if keys else range(0)

    def continuous_indices(self) -> list:
        return [n for n, d in self.distributions.items() if d.is_continuous]


@dataclass(frozen=True)
class OmegaSample:
    """Realized couplings ``omega(n)``; ``seed`` is the draw's seed, if any."""

    values: Mapping[int, float]
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "values",
                           {int(n): float(v) for n, v in sorted(self.values.items())})

    def __getitem__(self, n):
        return self.values[n]

    def replace(self, n: int, value: float) -> OmegaSample:
        if n not in self.values:
            raise KeyError(n)
        vals = dict(self.values)
        vals[n] = value
        return OmegaSample(vals, self.seed)


def _check_omega(model: RandomPotentialModel, omega: OmegaSample):
    if set(omega.values) != set(model.index_set):
        raise ValueError(f"omega indices {sorted(omega.values)} do not match the model's "
                         f"index set {list(model.index_set)}")


def eval_potential(model: RandomPotentialModel, omega: OmegaSample, x):
    """``v(x) + sum_n omega(n) f_n(x)`` on the working interval."""
    _check_omega(model, omega)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < model.interval.lo) or np.any(xa > model.interval.hi):
        raise DomainError(f"x outside the working interval {tuple(model.interval)}")
    out = np.asarray(model.base(xa), dtype=float)
    for n, bump in model.bumps.items():
        out = out + omega[n] * bump(xa)
    return float(out) if out.ndim == 0 else out


def _compile(interval: Interval, pieces, coupling_pieces):
    lo, hi = interval
    pts = {lo, hi}
    for p in list(pieces) + list(coupling_pieces):
        for x in (p.lo, p.hi):
            if lo < x < hi:
                pts.add(x)
    bp = np.array(sorted(pts))
    m = len(bp) - 1
    tab_v = np.zeros((m, K.NCOL))
    tab_v[:, K.X0] = bp[:-1]
    tab_v[:, K.X1] = bp[1:]
    tab_f = tab_v.copy()

    def deposit(tab, p, amp_col, freq_col, center_col):
        a, b = max(p.lo, lo), min(p.hi, hi)
        if b <= a:
            return
        i0 = int(np.searchsorted(bp, a))
        i1 = int(np.searchsorted(bp, b))
        for i in range(i0, i1):
            tab[i, K.C0] += p.const + p.slope * (bp[i] - p.lo)
            tab[i, K.C1] += p.slope
            if p.cos_amp != 0.0:
                if tab[i, amp_col] != 0.0 and (tab[i, freq_col] != p.cos_freq
                                               or tab[i, center_col] != p.cos_center):
                    raise ValueError("overlapping oscillatory pieces in one segment")
                tab[i, amp_col] += p.cos_amp
                tab[i, freq_col] = p.cos_freq
                tab[i, center_col] = p.cos_center

    for p in pieces:
        deposit(tab_v, p, K.A1, K.K1, K.Z1)
    for p in coupling_pieces:
        deposit(tab_f, p, K.A2, K.K2, K.Z2)
    tab_v[:, K.K2] = tab_f[:, K.K2]
    tab_v[:, K.Z2] = tab_f[:, K.Z2]
    return bp, tab_v, tab_f


@dataclass(frozen=True)
class RegularProblem:
    """``-u'' + q u`` on ``interval`` with angle conditions at both ends.

    ``q`` is the sum of ``pieces`` plus ``lam * bump`` when ``coupling`` is
    ``(lam, bump)``.
    """

    interval: Interval
    pieces: Tuple[Piece, ...] = ()
    left_bc: BoundaryAngle = DIRICHLET
    right_bc: BoundaryAngle = DIRICHLET
    coupling: Optional[Tuple[float, BumpFunction]] = None
    breakpoints: np.ndarray = field(init=False, repr=False, compare=False)
    _tab_v: np.ndarray = field(init=False, repr=False, compare=False)
    _tab_f: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.interval, Interval):
            object.__setattr__(self, "interval", Interval(*self.interval))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "left_bc", as_angle(self.left_bc))
        object.__setattr__(self, "right_bc", as_angle(self.right_bc))
        cpieces = []
        if self.coupling is not None:
            lam, bump = self.coupling
            object.__setattr__(self, "coupling", (float(lam), bump))
            cpieces = bump.pieces(1.0)
        bp, tv, tf = _compile(self.interval, self.pieces, cpieces)
        bp.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "_tab_v", tv)
        object.__setattr__(self, "_tab_f", tf)

    @property
    def coupling_strength(self) -> float:
        return 0.0 if self.coupling is None else self.coupling[0]

    def table(self, lam: Optional[float] = None) -> np.ndarray:
        """Segment table of the potential, with the coupling set to ``lam`` if given."""
        lam = self.coupling_strength if lam is None else lam
        tab = self._tab_v.copy()
        if lam != 0.0:
            tab[:, K.AMPLITUDE_COLUMNS] += lam * self._tab_f[:, K.AMPLITUDE_COLUMNS]
        return tab

    def coupling_tables(self):
        """``(table without coupling, coupling bump table)`` on one segmentation."""
        return self._tab_v, self._tab_f

    def potential(self, x, lam: Optional[float] = None):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.interval.lo) or np.any(x > self.interval.hi):
            raise DomainError(f"x outside {tuple(self.interval)}")
        tab = self.table(lam)
        i = np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1, 0, len(tab) - 1)
        t = tab[i]
        out = (t[..., K.C0] + t[..., K.C1] * (x - t[..., K.X0])
               + t[..., K.A1] * np.cos(t[..., K.K1] * (x - t[..., K.Z1]))
               + t[..., K.A2] * np.cos(t[..., K.K2] * (x - t[..., K.Z2])))
        return float(out) if out.ndim == 0 else out

    def bounds(self, lam: Optional[float] = None) -> Tuple[float, float]:
        """Conservative lower and upper bounds of ``q`` on the interval."""
        tab = self.table(lam)
        ends = np.stack([tab[:, K.C0], tab[:, K.C0] + tab[:, K.C1] * (tab[:, K.X1] - tab[:, K.X0])])
        wiggle = np.abs(tab[:, K.A1]) + np.abs(tab[:, K.A2])
        return float(np.min(ends.min(axis=0) - wiggle)), float(np.max(ends.max(axis=0) + wiggle))

    def with_boundary(self, left_bc=None, right_bc=None) -> RegularProblem:
        return RegularProblem(self.interval, self.pieces,
                              self.left_bc if left_bc is None else left_bc,
                              self.right_bc if right_bc is None else right_bc,
                              self.coupling)

    def with_coupling(self, lam: float, bump: Optional[BumpFunction] = None) -> RegularProblem:
        if bump is None:
            if self.coupling is None:
                raise ValueError("problem has no coupling bump")
            bump = self.coupling[1]
        return RegularProblem(self.interval, self.pieces, self.left_bc, self.right_bc, (lam, bump))

    def shifted(self, c: float) -> RegularProblem:
        """Same problem with ``q`` replaced by ``q + c``."""
        lo, hi = self.interval
        return RegularProblem(self.interval, self.pieces + (Piece(lo, hi, c),),
                              self.left_bc, self.right_bc, self.coupling)

    def restricted(self, interval: Interval, left_bc=None, right_bc=None) -> RegularProblem:
        """The same potential on a subinterval, pieces clipped to it."""
        interval = interval if isinstance(interval, Interval) else Interval(*interval)
        if not self.interval.contains_interval(interval):
            raise DomainError(f"{tuple(interval)} is not inside {tuple(self.interval)}")
        pieces = tuple(_clip(p, interval) for p in self.pieces if _clip(p, interval) is not None)
        return RegularProblem(interval, pieces,
                              DIRICHLET if left_bc is None else left_bc,
                              DIRICHLET if right_bc is None else right_bc,
                              self.coupling)


def _clip(p: Piece, interval: Interval) -> Optional[Piece]:
    a, b = max(p.lo, interval.lo), min(p.hi, interval.hi)
    if b <= a:
        return None
    return Piece(a, b, p.const + p.slope * (a - p.lo), p.slope, p.cos_amp, p.cos_freq,
                 p.cos_center)


def build_regular_problem(model: RandomPotentialModel, omega: OmegaSample,
                          interval: Optional[Interval] = None, left_bc=None, right_bc=None,
                          coupling: Optional[Tuple[float, BumpFunction]] = None) -> RegularProblem:
    """Realize ``H_omega`` (plus an optional ``lam * f`` term) on ``interval``.

    Defaults to the model's working interval and boundary angles. Bumps whose
    support misses ``interval`` do not enter the problem at all, so its
    spectrum cannot depend on their couplings.
    """
    _check_omega(model, omega)
    if interval is None:
        interval = model.interval
    elif not isinstance(interval, Interval):
        interval = Interval(*interval)
    if not model.interval.contains_interval(interval):
        raise DomainError(f"{tuple(interval)} is not inside the working interval "
                          f"{tuple(model.interval)}")
    pieces = []
    for p in model.base.pieces(interval):
        c = _clip(p, interval)
        if c is not None:
            pieces.append(c)
    for n, bump in model.bumps.items():
        if not bump.support.overlaps(interval):
            continue
        for p in bump.pieces(omega[n]):
            c = _clip(p, interval)
            if c is not None:
                pieces.append(c)
    return RegularProblem(interval, tuple(pieces),
                          model.left_bc if left_bc is None else left_bc,
                          model.right_bc if right_bc is None else right_bc,
                          coupling)


def anderson_model(indices=range(-3, 3), truncation=(-4.0, 4.0), distribution=None,
                   shape="indicator", amplitude=1.0, base=None,
                   left_bc=DIRICHLET, right_bc=DIRICHLET) -> RandomPotentialModel:
    """Bumps ``f_n`` supported on ``(n, n+1)`` with i.i.d. couplings.

    ``distribution`` may be one spec for every index or a mapping per index;
    it defaults to uniform(0, 1).
    """
    if distribution is None:
        distribution = DistributionSpec.uniform(0.0, 1.0)
    if isinstance(distribution, DistributionSpec):
        dists = {n: distribution for n in indices}
    else:
        dists = dict(distribution)
    bumps = {n: BumpFunction(Interval(n, n + 1), shape, amplitude) for n in indices}
    return RandomPotentialModel(Interval(*truncation), bumps, dists,
                                BasePotential.zero() if base is None else base,
                                left_bc, right_bc)
