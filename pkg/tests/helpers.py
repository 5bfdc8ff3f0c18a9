import math

from sturm_rand import BumpFunction, Interval, RegularProblem
from sturm_rand.model import Piece

# validated at master seed 0; see test_experiments for the regression checks
SUBINTERVAL = (-4.0, -0.5)
LARGE_N = 10_000


def free_problem(lo=0.0, hi=math.pi, left=0.0, right=0.0, const=0.0):
    pieces = (Piece(lo, hi, const),) if const else ()
    return RegularProblem(Interval(lo, hi), pieces, left, right)


def flat_coupling_template(v_pieces=()):
    """``f = 1`` on the whole of ``(0, pi)``, Dirichlet ends."""
    return RegularProblem(Interval(0.0, math.pi), tuple(v_pieces), 0.0, 0.0,
                          coupling=(0.0, BumpFunction(Interval(0.0, math.pi))))


def step_problem(edges, values, coupling_support=None, left=0.0, right=0.0):
    pieces = tuple(Piece(a, b, v) for a, b, v in zip(edges, edges[1:], values))
    coupling = None
    if coupling_support is not None:
        coupling = (0.0, BumpFunction(Interval(*coupling_support)))
    return RegularProblem(Interval(edges[0], edges[-1]), pieces, left, right, coupling)


def refine_steps(edges, values, support):
    """Common refinement of a step potential and an indicator support, for the oracle."""
    import numpy as np
    e = np.array(sorted(set(map(float, edges)) | set(map(float, support))))
    mid = 0.5 * (e[:-1] + e[1:])
    v = np.asarray(values, float)[np.searchsorted(edges, mid) - 1]
    f = ((mid > support[0]) & (mid < support[1])).astype(float)
    return e, v, f
