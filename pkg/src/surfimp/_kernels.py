"""Time-stepping kernels for the 1-D wave solver.

Two implementations of the same leapfrog update: a numba-compiled scalar
loop and a vectorized numpy fallback.  Selection happens at import time:
the compiled path is used when numba imports cleanly and the environment
variable ``SURFIMP_NUMBA`` is not set to ``"0"``.  Tests and benchmarks
can also call either implementation directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:      # pragma: no cover - depends on environment
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SURFIMP_NUMBA", "1") != "0"


def _leapfrog_numpy(f, rho_nodes, kap_half, dx, dt):
    """Leapfrog for rho u_tt = (kappa u_x)_x on [0, L], u(0,t) = f(t),
    u(L,t) = 0, zero initial data.

    Parameters are the boundary samples f (nt+1,), densities at the
    nodes (N+1,), stiffness at the half nodes (N,), and the grid steps.

    Returns
    -------
    traction : ndarray, shape (nt+1,)
        kappa(0) u_x(0, t_n) by the one-sided second-order stencil.
    u_prev2, u_prev, u_last : ndarray
        The fields at the last three time levels (for energy readouts).
    """
    nt = len(f) - 1
    nn = len(rho_nodes)
    lam = dt * dt / (dx * dx)
    kap0 = kap_half[0]
    u_old = np.zeros(nn)
    u = np.zeros(nn)
    u[0] = f[0]
    trac = np.empty(nt + 1)
    trac[0] = kap0 * (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    u_prev2 = u_old.copy()
    for n in range(nt):
        u_new = np.empty(nn)
        flux = kap_half * (u[1:] - u[:-1])
        u_new[1:-1] = (2.0 * u[1:-1] - u_old[1:-1]
                       + lam * (flux[1:] - flux[:-1]) / rho_nodes[1:-1])
        u_new[0] = f[n + 1]
        u_new[-1] = 0.0
        u_prev2 = u_old
        u_old = u
        u = u_new
        trac[n + 1] = kap0 * (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    return trac, u_prev2, u_old, u


def _leapfrog_loops(f, rho_nodes, kap_half, dx, dt):
    nt = len(f) - 1
    nn = len(rho_nodes)
    lam = dt * dt / (dx * dx)
    kap0 = kap_half[0]
    u_old = np.zeros(nn)
    u = np.zeros(nn)
    u[0] = f[0]
    trac = np.empty(nt + 1)
    trac[0] = kap0 * (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    u_prev2 = u_old.copy()
    u_new = np.empty(nn)
    for n in range(nt):
        for i in range(1, nn - 1):
            flux_r = kap_half[i] * (u[i + 1] - u[i])
            flux_l = kap_half[i - 1] * (u[i] - u[i - 1])
            u_new[i] = (2.0 * u[i] - u_old[i]
                        + lam * (flux_r - flux_l) / rho_nodes[i])
        u_new[0] = f[n + 1]
        u_new[nn - 1] = 0.0
        for i in range(nn):
            u_prev2[i] = u_old[i]
            u_old[i] = u[i]
            u[i] = u_new[i]
        trac[n + 1] = kap0 * (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    return trac, u_prev2, u_old, u


if HAVE_NUMBA:
    _leapfrog_numba = njit(cache=True)(_leapfrog_loops)


def leapfrog(f, rho_nodes, kap_half, dx, dt):
    """Dispatch to the compiled kernel or the numpy fallback."""
    if USE_NUMBA:
        return _leapfrog_numba(f, rho_nodes, kap_half, dx, dt)
    return _leapfrog_numpy(f, rho_nodes, kap_half, dx, dt)
