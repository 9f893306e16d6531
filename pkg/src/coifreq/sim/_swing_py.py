"""Pure-numpy swing-equation integration kernel (fallback backend).

Fixed-step RK4 over the coupled machine dynamics:

    m_i * d(df_i)/dt = p_i - d_i * df_i - sum_j k_ij * (delta_i - delta_j)
    d(delta_i)/dt    = 2*pi * df_i

with df in Hz deviation from nominal, delta in radians, p in MW,
m = 2 H Cap / f_N in MW/(Hz/s), d in MW/Hz, k in MW/rad.
"""

import numpy as np

TWO_PI = 2.0 * np.pi

#: abort threshold on |df|, Hz
INSTABILITY_HZ = 5.0

BACKEND_NAME = "python"


def _deriv(df, delta, p, m, d, coupling, row_sum):
    acc = (p - d * df - (row_sum * delta - coupling @ delta)) / m
    return acc, TWO_PI * df


def integrate_swing(df0, delta0, p, m, d, coupling, dt, n_steps):
    """RK4 integrate n_steps with constant injections p.

    Returns (df_hist with shape (n_steps+1, M), delta_final, fail_step);
    fail_step is -1 on success, else the first step where |df| exceeded
    the instability threshold.
    """
    df = np.array(df0, dtype=float)
    delta = np.array(delta0, dtype=float)
    coupling = np.asarray(coupling, dtype=float)
    row_sum = coupling.sum(axis=1)
    hist = np.empty((n_steps + 1, len(df)))
    hist[0] = df
    for step in range(1, n_steps + 1):
        k1f, k1d = _deriv(df, delta, p, m, d, coupling, row_sum)
        k2f, k2d = _deriv(df + 0.5 * dt * k1f, delta + 0.5 * dt * k1d, p, m, d, coupling, row_sum)
        k3f, k3d = _deriv(df + 0.5 * dt * k2f, delta + 0.5 * dt * k2d, p, m, d, coupling, row_sum)
        k4f, k4d = _deriv(df + dt * k3f, delta + dt * k3d, p, m, d, coupling, row_sum)
        df = df + (dt / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        delta = delta + (dt / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        hist[step] = df
        if np.max(np.abs(df)) > INSTABILITY_HZ:
            return hist[: step + 1], delta, step
    return hist, delta, -1
