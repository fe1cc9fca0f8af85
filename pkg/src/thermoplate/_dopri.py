"""Dormand-Prince 5(4) integrator for small linear constant-coefficient systems.

Solves ``y' = A y`` for complex ``y`` by propagating the real and imaginary
parts as one 6-dimensional real state.  Step control is relative to a
weighted max-norm of the whole state, so accuracy is kept while the solution
decays through hundreds of orders of magnitude.
"""

import numpy as np
from numba import njit

# Butcher tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MIN_STEP = 2
STATUS_MAX_STEPS = 3


@njit(cache=True)
def _wnorm(y, w):
    m = 0.0
    for k in range(y.shape[0]):
        for j in range(2):
            v = abs(y[k, j]) * w[k]
            if v > m:
                m = v
    return m


@njit(cache=True)
def _matvec(A, y, out):
    m = y.shape[0]
    for i in range(m):
        a = 0.0
        b = 0.0
        for j in range(m):
            a += A[i, j] * y[j, 0]
            b += A[i, j] * y[j, 1]
        out[i, 0] = a
        out[i, 1] = b


@njit(cache=True)
def _combine(y, h, c, ks, nk, out):
    for i in range(y.shape[0]):
        for p in range(2):
            acc = 0.0
            for q in range(nk):
                acc += c[q] * ks[q, i, p]
            out[i, p] = y[i, p] + h * acc


@njit(cache=True)
def integrate_linear(A, y0, w, t_end, rtol, h_min, max_steps):
    """Integrate ``y' = A y`` from 0 to ``t_end``.

    ``y0`` has shape (m, 2) holding real and imaginary parts; ``w`` holds one
    positive weight per component.  Returns ``(y, status, n_accepted)``.
    """
    m = y0.shape[0]
    y = y0.copy()
    if t_end <= 0.0:
        return y, STATUS_OK, 0
    norm0 = _wnorm(y, w)
    if norm0 == 0.0:
        return y, STATUS_OK, 0
    # spectral-radius bound for the first step
    rho = 0.0
    for i in range(m):
        s = 0.0
        for j in range(m):
            s += abs(A[i, j]) * w[i] / w[j]
        if s > rho:
            rho = s
    h = 0.01 / max(rho, 1e-12)
    if h > t_end:
        h = t_end

    rows = np.zeros((7, 7))
    rows[1, 0] = A21
    rows[2, 0], rows[2, 1] = A31, A32
    rows[3, 0], rows[3, 1], rows[3, 2] = A41, A42, A43
    rows[4, 0], rows[4, 1], rows[4, 2], rows[4, 3] = A51, A52, A53, A54
    rows[5, 0], rows[5, 1], rows[5, 2], rows[5, 3], rows[5, 4] = A61, A62, A63, A64, A65
    rows[6, 0], rows[6, 2], rows[6, 3], rows[6, 4], rows[6, 5] = B1, B3, B4, B5, B6
    ecoef = np.array([E1, 0.0, E3, E4, E5, E6, E7])
    zero = np.zeros((m, 2))

    ks = np.zeros((7, m, 2))
    stage = np.zeros((m, 2))
    ynew = np.zeros((m, 2))
    err = np.zeros((m, 2))
    _matvec(A, y, stage)
    ks[0] = stage
    t = 0.0
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            return y, STATUS_MAX_STEPS, steps
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        for st in range(1, 6):
            _combine(y, h, rows[st], ks, st, stage)
            _matvec(A, stage, ynew)
            ks[st] = ynew
        _combine(y, h, rows[6], ks, 6, ynew)
        _matvec(A, ynew, stage)
        ks[6] = stage
        _combine(zero, h, ecoef, ks, 7, err)
        scale = rtol * max(_wnorm(y, w), _wnorm(ynew, w)) + 1e-300
        en = _wnorm(err, w) / scale
        if en <= 1.0:
            t = t_end if last else t + h
            y[:, :] = ynew
            ks[0] = ks[6]
            steps += 1
            if _wnorm(y, w) < 1e-290 * norm0:
                return np.zeros_like(y), STATUS_UNDERFLOW, steps
            fac = 5.0 if en == 0.0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
        else:
            fac = max(0.2, 0.9 * en ** -0.2)
        h = h * fac
        if h < h_min and t < t_end:
            return y, STATUS_MIN_STEP, steps
    return y, STATUS_OK, steps


def solve_linear(A, y0, t_end, rtol, weights=None, h_min=None, max_steps=50_000_000):
    """Complex front end for :func:`integrate_linear`.

    Returns ``(y, status, steps)`` with ``y`` a complex vector.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    y0 = np.asarray(y0, dtype=np.complex128)
    ys = np.ascontiguousarray(np.stack([y0.real, y0.imag], axis=1))
    w = np.ones(y0.shape[0]) if weights is None else np.ascontiguousarray(weights, dtype=np.float64)
    if h_min is None:
        h_min = 1e-15 * max(1.0, float(t_end))
    y, status, steps = integrate_linear(A, ys, w, float(t_end), float(rtol), float(h_min), int(max_steps))
    return y[:, 0] + 1j * y[:, 1], int(status), int(steps)
