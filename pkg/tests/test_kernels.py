"""Compiled and plain leapfrog kernels must agree exactly."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from surfimp import _kernels


def _setup(rng):
    cells = 64
    nt = 50
    dx = 0.1
    dt = 0.04
    rho = 1.0 + 0.3 * rng.random(cells + 1)
    kappa = 1.0 + 0.3 * rng.random(cells)
    f = np.sin(np.linspace(0.0, 3.0, nt + 1))
    return f, rho, kappa, dx, dt


def test_numpy_and_loop_paths_agree(rng):
    f, rho, kappa, dx, dt = _setup(rng)
    out_np = _kernels._leapfrog_numpy(f, rho, kappa, dx, dt)
    out_lp = _kernels._leapfrog_loops(f.copy(), rho.copy(), kappa.copy(),
                                      dx, dt)
    for a, b in zip(out_np, out_lp):
        np.testing.assert_array_equal(a, b)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_numba_path_agrees(rng):
    f, rho, kappa, dx, dt = _setup(rng)
    out_np = _kernels._leapfrog_numpy(f, rho, kappa, dx, dt)
    out_nb = _kernels._leapfrog_numba(f, rho, kappa, dx, dt)
    for a, b in zip(out_np, out_nb):
        np.testing.assert_allclose(a, b, atol=1e-14)


def _probe_flag(value: str | None) -> str:
    env = dict(os.environ)
    env.pop("SURFIMP_NUMBA", None)
    if value is not None:
        env["SURFIMP_NUMBA"] = value
    code = "from surfimp import _kernels; print(_kernels.USE_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return out.stdout.strip()


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_env_flag_selects_backend():
    assert _probe_flag("0") == "False"
    assert _probe_flag("1") == "True"
    assert _probe_flag(None) == "True"   # compiled path is the default
