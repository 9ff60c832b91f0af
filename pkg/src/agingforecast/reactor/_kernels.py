"""Compiled inner loops of the reactor integration.

The plug-flow ODE is integrated per hourly interval with fixed-step RK4.
To keep 4th-order convergence through oxygen depletion (the side
reaction's sqrt(c_O2) law reaches zero in finite time with unbounded
curvature), the O2 slot is propagated as u = sqrt(c_O2), which turns the
rate laws into polynomials.  When a substep would push u below zero the
crossing is located by bisection on the substep and the state is frozen
there: with no oxygen every rate is identically zero, so the remaining
interval is exactly stationary.

Falls back to plain CPython when numba is unavailable (same code, just
slow).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal install
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True)
def _deriv(y, out, a1_eff, a2, nu1, nu2, i_olef, i_o2):
    """RHS in transformed coordinates (y[i_o2] holds u = sqrt(c_O2))."""
    c_olef = max(y[i_olef], 0.0)
    u = max(y[i_o2], 0.0)
    r1 = a1_eff * c_olef * u * u
    r2 = a2 * c_olef * u
    for j in range(y.shape[0]):
        out[j] = nu1[j] * r1 + nu2[j] * r2
    if u > 0.0:
        out[i_o2] = (nu1[i_o2] * r1 + nu2[i_o2] * r2) / (2.0 * u)
    else:
        out[i_o2] = 0.0


@njit(cache=True)
def _rk4_step(y, h, a1_eff, a2, nu1, nu2, i_olef, i_o2):
    n = y.shape[0]
    k = np.empty(n)
    acc = np.empty(n)
    tmp = np.empty(n)

    _deriv(y, k, a1_eff, a2, nu1, nu2, i_olef, i_o2)
    for j in range(n):
        acc[j] = k[j]
        tmp[j] = y[j] + 0.5 * h * k[j]
    _deriv(tmp, k, a1_eff, a2, nu1, nu2, i_olef, i_o2)
    for j in range(n):
        acc[j] += 2.0 * k[j]
        tmp[j] = y[j] + 0.5 * h * k[j]
    _deriv(tmp, k, a1_eff, a2, nu1, nu2, i_olef, i_o2)
    for j in range(n):
        acc[j] += 2.0 * k[j]
        tmp[j] = y[j] + h * k[j]
    _deriv(tmp, k, a1_eff, a2, nu1, nu2, i_olef, i_o2)
    out = np.empty(n)
    for j in range(n):
        out[j] = y[j] + (h / 6.0) * (acc[j] + k[j])
    return out


@njit(cache=True)
def plugflow_batch(c_in, activities, a1, a2, nu1, nu2, i_olef, i_o2,
                   t_res_seconds, substeps):
    """Integrate one constant-parameter window; row per activity value.

    Returns outlet concentrations (len(activities) x n_species) and the
    count of substeps where a concentration had to be clamped at zero.
    """
    n_rows = activities.shape[0]
    n = c_in.shape[0]
    out = np.empty((n_rows, n))
    clamps = 0
    h = t_res_seconds / substeps

    for row in range(n_rows):
        y = c_in.copy()
        y[i_o2] = np.sqrt(max(c_in[i_o2], 0.0))
        a1_eff = activities[row] * a1
        for _ in range(substeps):
            y_new = _rk4_step(y, h, a1_eff, a2, nu1, nu2, i_olef, i_o2)
            if y_new[i_o2] < 0.0:
                # oxygen exhausts inside this substep: bisect the step
                # length to the crossing, freeze there (all rates zero)
                clamps += 1
                lo = 0.0
                hi = h
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    trial = _rk4_step(y, mid, a1_eff, a2, nu1, nu2,
                                      i_olef, i_o2)
                    if trial[i_o2] < 0.0:
                        hi = mid
                    else:
                        lo = mid
                y = _rk4_step(y, lo, a1_eff, a2, nu1, nu2, i_olef, i_o2)
                y[i_o2] = 0.0
                break
            undershoot = False
            for j in range(n):
                if y_new[j] < 0.0:
                    y_new[j] = 0.0
                    undershoot = True
            if undershoot:
                clamps += 1
            y = y_new
        for j in range(n):
            out[row, j] = max(y[j], 0.0)
        out[row, i_o2] = max(y[i_o2], 0.0) ** 2
    return out, clamps
