"""Jitted Dormand-Prince 5(4) integrator for the single-block mean-field flow.

State layout is ``(Re a1, Im a1, Re a2, Im a2, X, V)``.  The ramp force
``F(t) = (1 - t/T) f`` for ``t < T`` is evaluated inline so the whole
integration runs without returning to Python.
"""

import numpy as np
from numba import njit

# Butcher tableau (Dormand & Prince 1980)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_BHAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                  -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _BHAT

# 4th-order continuous extension (Shampine 1986), columns are theta^1..theta^4
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423,
     69997945 / 29380423],
])

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_UNDERFLOW = 2
STATUS_MAXSTEPS = 3


@njit(cache=True)
def force(t, f, ramp):
    if t < ramp:
        return (1.0 - t / ramp) * f
    return 0.0


@njit(cache=True)
def rhs_into(t, y, out, P, delta, kappa, gamma, backward, f, ramp):
    ar1, ai1, ar2, ai2, X, V = y[0], y[1], y[2], y[3], y[4], y[5]
    h = 0.5 * kappa
    d1 = delta
    d2 = 1.0 + delta
    # da1/dt = -(k/2 + i d1) a1 - i X a2 + drive
    out[0] = -h * ar1 + d1 * ai1 + X * ai2
    out[1] = -h * ai1 - d1 * ar1 - X * ar2
    out[2] = -h * ar2 + d2 * ai2 + X * ai1
    out[3] = -h * ai2 - d2 * ar2 - X * ar1
    if backward:
        out[2] += 0.5
    else:
        out[0] += 0.5
    out[4] = V
    out[5] = (-X - gamma * V - 2.0 * P * (ar1 * ar2 + ai1 * ai2)
              + force(t, f, ramp))


@njit(cache=True)
def _err_norm(y, ynew, err, rtol, atol):
    s = 0.0
    n = y.shape[0]
    for i in range(n):
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        r = err[i] / sc
        s += r * r
    return np.sqrt(s / n)


@njit(cache=True)
def dopri_segment(y0, t0, t1, t_out, out, k_out, P, delta, kappa, gamma,
                  backward, f, ramp, rtol, atol, bound, h0, max_steps):
    """Integrate from ``t0`` to ``t1`` and fill ``out`` at ``t_out`` samples.

    Samples with index ``>= k_out`` and ``t_out[k] <= t1`` are filled.
    Returns ``(status, y_end, next_k, last_h, n_steps)``.
    """
    n = y0.shape[0]
    K = np.empty((7, n))
    y = y0.copy()
    ynew = np.empty(n)
    ytmp = np.empty(n)
    err = np.empty(n)
    t = t0
    h = h0
    k = k_out
    n_t = t_out.shape[0]
    while k < n_t and t_out[k] <= t0:
        out[k, :] = y
        k += 1
    rhs_into(t, y, K[0], P, delta, kappa, gamma, backward, f, ramp)
    steps = 0
    status = STATUS_OK
    while t < t1:
        if steps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        if t + h > t1:
            h = t1 - t
        if h < 1e-14 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        for s in range(1, 7):
            for i in range(n):
                acc = y[i]
                for j in range(s):
                    acc += h * _A[s, j] * K[j, i]
                ytmp[i] = acc
            rhs_into(t + _C[s] * h, ytmp, K[s], P, delta, kappa, gamma,
                     backward, f, ramp)
        # K[6] was evaluated at the 5th-order solution (FSAL)
        for i in range(n):
            ynew[i] = ytmp[i]
            e = 0.0
            for j in range(7):
                e += _E[j] * K[j, i]
            err[i] = h * e
        en = _err_norm(y, ynew, err, rtol, atol)
        steps += 1
        if en <= 1.0:
            t_new = t + h
            while k < n_t and t_out[k] <= t_new:
                th = (t_out[k] - t) / h
                for i in range(n):
                    acc = 0.0
                    for j in range(7):
                        q = 0.0
                        p = th
                        for m in range(4):
                            q += _P[j, m] * p
                            p *= th
                        acc += K[j, i] * q
                    out[k, i] = y[i] + h * acc
                k += 1
            t = t_new
            big = 0.0
            for i in range(n):
                y[i] = ynew[i]
                big = max(big, abs(y[i]))
            for i in range(n):
                K[0, i] = K[6, i]
            if not np.isfinite(big) or big > bound:
                status = STATUS_DIVERGED
                break
            fac = 10.0 if en == 0.0 else min(10.0, 0.9 * en ** -0.2)
            h *= fac
        else:
            if not np.isfinite(en):
                h *= 0.2
            else:
                h *= max(0.2, 0.9 * en ** -0.2)
    return status, y, k, h, steps
