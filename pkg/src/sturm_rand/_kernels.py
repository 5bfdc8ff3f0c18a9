"""Compiled Prüfer-angle integration and energy root finding.

Potentials reach this module as a segment table: one row per smooth piece
``[x0, x1]`` of the potential, holding

    q(x) = c0 + c1 (x - x0) + a1 cos(k1 (x - z1)) + a2 cos(k2 (x - z2))

Columns are addressed through the ``X0 .. Z2`` constants below. Every
function here is pure and releases the GIL, so worker threads scale.

Inside each segment the angle is integrated in scaled form,
``u = rho sin(theta) / sqrt(S)``, ``u' = rho sqrt(S) cos(theta)`` with
``S = sqrt(|E - q_mid|)`` (or 1 near the turning point), which makes the
angle nearly linear in x. Angles entering and leaving the kernels are the
unscaled ones (``tan(theta) = u / u'``); both forms cross multiples of pi
together, so branch counts are unaffected by the rescaling.
"""

import math

import numpy as np
from numba import njit

X0, X1, C0, C1, A1, K1, Z1, A2, K2, Z2 = range(10)
NCOL = 10

# linear-in-lambda columns of a table (the coupling term scales these)
AMPLITUDE_COLUMNS = np.array([C0, C1, A1, A2])

OK = 0
STEP_UNDERFLOW = 1
NO_BRACKET = 2

_MAX_STEPS = 2_000_000
_MAX_BRENT = 200

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True, nogil=True)
def q_at(tab, i, x):
    return (tab[i, C0] + tab[i, C1] * (x - tab[i, X0])
            + tab[i, A1] * math.cos(tab[i, K1] * (x - tab[i, Z1]))
            + tab[i, A2] * math.cos(tab[i, K2] * (x - tab[i, Z2])))


@njit(cache=True, nogil=True)
def _theta_rhs(tab, i, E, S, x, th):
    s = math.sin(th)
    c = math.cos(th)
    return S * c * c + (E - q_at(tab, i, x)) / S * s * s


@njit(cache=True, nogil=True)
def _rho_rhs(tab, i, E, S, x, th):
    return (S - (E - q_at(tab, i, x)) / S) * math.sin(th) * math.cos(th)


@njit(cache=True, nogil=True)
def segment_scale(tab, i, E):
    xm = 0.5 * (tab[i, X0] + tab[i, X1])
    d = abs(E - q_at(tab, i, xm))
    return math.sqrt(d) if d > 1.0 else 1.0


@njit(cache=True, nogil=True)
def rescale(th, lr, s_old, s_new):
    """Change the angle scale keeping (u, u') fixed and theta on its branch."""
    if s_old == s_new:
        return th, lr
    r = s_new / s_old
    sn = math.sin(th)
    cs = math.cos(th)
    base = th - math.atan2(sn, cs)
    th_new = base + math.atan2(r * sn, cs)
    lr_new = lr + 0.5 * math.log(r * sn * sn + cs * cs / r)
    return th_new, lr_new


@njit(cache=True, nogil=True)
def _advance(tab, i, E, S, xa, xb, th, lr, h, with_rho, rtol, atol):
    """Integrate the scale-``S`` angle from ``xa`` to ``xb`` inside segment ``i``.

    Returns ``(theta, log_rho, next_h, status, x_reached)``. ``xb < xa`` is
    allowed and integrates backwards.
    """
    span = xb - xa
    if span == 0.0:
        return th, lr, h, OK, xa
    direction = 1.0 if span > 0.0 else -1.0
    h = abs(h)
    if h == 0.0 or h > abs(span):
        h = abs(span)
    x = xa
    k1 = _theta_rhs(tab, i, E, S, x, th)
    r1 = _rho_rhs(tab, i, E, S, x, th) if with_rho else 0.0
    for _ in range(_MAX_STEPS):
        remaining = (xb - x) * direction
        if remaining <= 4.0 * 2.220446049250313e-16 * max(1.0, abs(xb)):
            return th, lr, h, OK, xb
        last = False
        if h >= remaining:
            h = remaining
            last = True
        hs = h * direction
        k2 = _theta_rhs(tab, i, E, S, x + _C2 * hs, th + hs * _A21 * k1)
        t3 = th + hs * (_A31 * k1 + _A32 * k2)
        k3 = _theta_rhs(tab, i, E, S, x + _C3 * hs, t3)
        t4 = th + hs * (_A41 * k1 + _A42 * k2 + _A43 * k3)
        k4 = _theta_rhs(tab, i, E, S, x + _C4 * hs, t4)
        t5 = th + hs * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
        k5 = _theta_rhs(tab, i, E, S, x + _C5 * hs, t5)
        t6 = th + hs * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
        k6 = _theta_rhs(tab, i, E, S, x + hs, t6)
        th_new = th + hs * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _theta_rhs(tab, i, E, S, x + hs, th_new)
        err_th = hs * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = abs(err_th) / (atol + rtol * max(abs(th), abs(th_new)))
        lr_new = lr
        r7 = 0.0
        if with_rho:
            # log-amplitude stages reuse the angle stages; stage 2 has zero weight
            q3 = _rho_rhs(tab, i, E, S, x + _C3 * hs, t3)
            q4 = _rho_rhs(tab, i, E, S, x + _C4 * hs, t4)
            q5 = _rho_rhs(tab, i, E, S, x + _C5 * hs, t5)
            q6 = _rho_rhs(tab, i, E, S, x + hs, t6)
            lr_new = lr + hs * (_B1 * r1 + _B3 * q3 + _B4 * q4 + _B5 * q5 + _B6 * q6)
            r7 = _rho_rhs(tab, i, E, S, x + hs, th_new)
            err_lr = hs * (_E1 * r1 + _E3 * q3 + _E4 * q4 + _E5 * q5 + _E6 * q6 + _E7 * r7)
            err = max(err, abs(err_lr) / (atol + rtol * max(abs(lr), abs(lr_new))))
        if err <= 1.0:
            x = xb if last else x + hs
            th = th_new
            lr = lr_new
            k1 = k7
            r1 = r7
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if not last:
                h = h * fac
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
            if h < 1e-14 * max(1.0, abs(x)) or err != err:
                return th, lr, h, STEP_UNDERFLOW, x
    return th, lr, h, STEP_UNDERFLOW, x


@njit(cache=True, nogil=True)
def theta_end(tab, E, th0, rtol, atol, info):
    """Terminal unwrapped angle at ``tab[-1, X1]`` started from ``th0``.

    On failure ``info[0]`` receives the status and ``info[1]`` the position.
    """
    th = th0
    lr = 0.0
    h = 0.0
    s_prev = 1.0
    for i in range(tab.shape[0]):
        S = segment_scale(tab, i, E)
        th, lr = rescale(th, lr, s_prev, S)
        s_prev = S
        th, lr, h, status, xr = _advance(tab, i, E, S, tab[i, X0], tab[i, X1], th, lr, h,
                                         False, rtol, atol)
        if status != OK:
            info[0] = status
            info[1] = xr
            return th
    th, lr = rescale(th, lr, s_prev, 1.0)
    return th


@njit(cache=True, nogil=True)
def theta_end_coupled(tab_v, tab_f, lam, E, th0, rtol, atol, info):
    tab = tab_v.copy()
    for j in range(AMPLITUDE_COLUMNS.shape[0]):
        col = AMPLITUDE_COLUMNS[j]
        for i in range(tab.shape[0]):
            tab[i, col] += lam * tab_f[i, col]
    return theta_end(tab, E, th0, rtol, atol, info)


@njit(cache=True, nogil=True)
def path(tab, E, y0_th, y0_lr, xs, seg, rtol, atol, out, info):
    """Integrate angle and log-amplitude through the stops ``xs``.

    ``seg[j]`` is the table row covering ``[xs[j], xs[j+1]]``; ``xs`` may be
    decreasing for a backward sweep. ``out[j] = (theta, log_rho)`` at ``xs[j]``.
    """
    th = y0_th
    lr = y0_lr
    out[0, 0] = th
    out[0, 1] = lr
    h = 0.0
    s_prev = 1.0
    i_prev = -1
    for j in range(xs.shape[0] - 1):
        i = seg[j]
        if i != i_prev:
            S = segment_scale(tab, i, E)
            th, lr = rescale(th, lr, s_prev, S)
            s_prev = S
            i_prev = i
        th, lr, h, status, xr = _advance(tab, i, E, s_prev, xs[j], xs[j + 1], th, lr, h,
                                         True, rtol, atol)
        if status != OK:
            info[0] = status
            info[1] = xr
            return
        out[j + 1, 0], out[j + 1, 1] = rescale(th, lr, s_prev, 1.0)


@njit(cache=True, nogil=True)
def _brent(tab, th0, target, a, b, fa, fb, tol, rtol, atol, info):
    """Zero of ``theta_end(E) - target`` on a sign-changing bracket (Brent)."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    c = a
    fc = fa
    d = b - a
    e = d
    for _ in range(_MAX_BRENT):
        if (fb > 0.0) == (fc > 0.0):
            c = a
            fc = fa
            d = b - a
            e = d
        if abs(fc) < abs(fb):
            a = b
            b = c
            c = a
            fa = fb
            fb = fc
            fc = fa
        tol1 = 2.0 * 2.220446049250313e-16 * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                qq = 1.0 - s
            else:
                qq = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0))
                qq = (qq - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                qq = -qq
            else:
                p = -p
            if 2.0 * p < min(3.0 * xm * qq - abs(tol1 * qq), abs(e * qq)):
                e = d
                d = p / qq
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a = b
        fa = fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if xm > 0.0 else -tol1
        fb = theta_end(tab, b, th0, rtol, atol, info) - target
        if info[0] != OK:
            return b
    return b


@njit(cache=True, nogil=True)
def count_below(theta, target0):
    """Number of branch targets ``target0 + k*pi`` (k >= 0) strictly below ``theta``."""
    n = math.ceil((theta - target0) / math.pi)
    return max(0, int(n))


@njit(cache=True, nogil=True)
def solve_branch(tab, th0, target0, k, a, b, tol, rtol, atol, info):
    """Energy of branch ``k`` given a bracket ``a < b`` known to contain it."""
    target = target0 + k * math.pi
    fa = theta_end(tab, a, th0, rtol, atol, info) - target
    if info[0] != OK:
        return a
    fb = theta_end(tab, b, th0, rtol, atol, info) - target
    if info[0] != OK:
        return b
    if fa > 0.0 or fb < 0.0:
        info[0] = NO_BRACKET
        info[1] = a
        return a
    return _brent(tab, th0, target, a, b, fa, fb, tol, rtol, atol, info)


@njit(cache=True, nogil=True)
def window_eigenvalues(tab, th0, target0, e_lo, e_hi, tol, rtol, atol, out, info):
    """All eigenvalues in ``[e_lo, e_hi)``; returns ``(first_index, count)``.

    ``out`` must hold at least as many entries as the window contains; the
    caller sizes it from the branch counts at the window edges.
    """
    th_lo = theta_end(tab, e_lo, th0, rtol, atol, info)
    if info[0] != OK:
        return 0, 0
    th_hi = theta_end(tab, e_hi, th0, rtol, atol, info)
    if info[0] != OK:
        return 0, 0
    k_lo = count_below(th_lo, target0)
    k_hi = count_below(th_hi, target0)
    n = k_hi - k_lo
    if n > out.shape[0]:
        n = out.shape[0]
    a = e_lo
    fa_base = th_lo
    for j in range(n):
        k = k_lo + j
        target = target0 + k * math.pi
        fa = fa_base - target
        fb = th_hi - target
        root = _brent(tab, th0, target, a, e_hi, fa, fb, tol, rtol, atol, info)
        if info[0] != OK:
            return k_lo, j
        out[j] = root
        a = root
        fa_base = target
    return k_lo, n
