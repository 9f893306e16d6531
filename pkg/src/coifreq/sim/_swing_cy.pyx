# cython: language_level=3
"""Compiled swing-equation integration kernel (preferred backend).

Same fixed-step RK4 scheme as _swing_py; explicit loops avoid per-step
numpy dispatch overhead, which dominates runtime for small machine counts.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, M_PI

TWO_PI = 2.0 * M_PI

INSTABILITY_HZ = 5.0

BACKEND_NAME = "cython"


cdef void _deriv(double[::1] df, double[::1] delta, double[::1] p,
                 double[::1] m, double[::1] d, double[:, ::1] coupling,
                 double[::1] row_sum, double[::1] out_f, double[::1] out_d) noexcept:
    cdef Py_ssize_t i, j, nm = df.shape[0]
    cdef double acc, sync
    for i in range(nm):
        sync = 0.0
        for j in range(nm):
            sync += coupling[i, j] * delta[j]
        acc = (p[i] - d[i] * df[i] - (row_sum[i] * delta[i] - sync)) / m[i]
        out_f[i] = acc
        out_d[i] = 2.0 * M_PI * df[i]


def integrate_swing(df0, delta0, p_in, m_in, d_in, coupling_in, double dt, int n_steps):
    """RK4 integrate n_steps with constant injections p.

    Returns (df_hist with shape (n_steps+1, M), delta_final, fail_step);
    fail_step is -1 on success.
    """
    cdef cnp.ndarray df_arr = np.array(df0, dtype=np.float64)
    cdef cnp.ndarray delta_arr = np.array(delta0, dtype=np.float64)
    cdef double[::1] df = df_arr
    cdef double[::1] delta = delta_arr
    cdef double[::1] p = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef double[::1] m = np.ascontiguousarray(m_in, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef double[:, ::1] coupling = np.ascontiguousarray(coupling_in, dtype=np.float64)
    cdef Py_ssize_t nm = df.shape[0]
    cdef double[::1] row_sum = np.asarray(coupling_in, dtype=np.float64).sum(axis=1)

    hist_arr = np.empty((n_steps + 1, nm), dtype=np.float64)
    cdef double[:, ::1] hist = hist_arr

    cdef double[::1] k1f = np.empty(nm)
    cdef double[::1] k1d = np.empty(nm)
    cdef double[::1] k2f = np.empty(nm)
    cdef double[::1] k2d = np.empty(nm)
    cdef double[::1] k3f = np.empty(nm)
    cdef double[::1] k3d = np.empty(nm)
    cdef double[::1] k4f = np.empty(nm)
    cdef double[::1] k4d = np.empty(nm)
    cdef double[::1] tf = np.empty(nm)
    cdef double[::1] td = np.empty(nm)

    cdef Py_ssize_t i
    cdef int step
    cdef double peak
    cdef int fail = -1

    for i in range(nm):
        hist[0, i] = df[i]

    for step in range(1, n_steps + 1):
        _deriv(df, delta, p, m, d, coupling, row_sum, k1f, k1d)
        for i in range(nm):
            tf[i] = df[i] + 0.5 * dt * k1f[i]
            td[i] = delta[i] + 0.5 * dt * k1d[i]
        _deriv(tf, td, p, m, d, coupling, row_sum, k2f, k2d)
        for i in range(nm):
            tf[i] = df[i] + 0.5 * dt * k2f[i]
            td[i] = delta[i] + 0.5 * dt * k2d[i]
        _deriv(tf, td, p, m, d, coupling, row_sum, k3f, k3d)
        for i in range(nm):
            tf[i] = df[i] + dt * k3f[i]
            td[i] = delta[i] + dt * k3d[i]
        _deriv(tf, td, p, m, d, coupling, row_sum, k4f, k4d)
        peak = 0.0
        for i in range(nm):
            df[i] = df[i] + (dt / 6.0) * (k1f[i] + 2.0 * k2f[i] + 2.0 * k3f[i] + k4f[i])
            delta[i] = delta[i] + (dt / 6.0) * (k1d[i] + 2.0 * k2d[i] + 2.0 * k3d[i] + k4d[i])
            hist[step, i] = df[i]
            if fabs(df[i]) > peak:
                peak = fabs(df[i])
        if peak > INSTABILITY_HZ:
            fail = step
            return hist_arr[: step + 1], delta_arr, fail

    return hist_arr, delta_arr, fail
