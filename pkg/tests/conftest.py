"""Shared generators for randomized material tests."""

from __future__ import annotations

import numpy as np
import pytest

from surfimp import (
    ConvexityViolation,
    DirectionPair,
    OrthoParams,
    StiffnessTensor,
    VtiParams,
    from_isotropic,
    strongly_convex,
)


def random_stiffness(rng: np.random.Generator, scale: float = 0.15,
                     lam: float = 2.0, mu: float = 1.0) -> StiffnessTensor:
    """A strongly convex fully anisotropic tensor: isotropic base plus a
    symmetric perturbation, rejection-sampled on the convexity margin."""
    base = from_isotropic(lam, mu).voigt
    while True:
        pert = rng.standard_normal((6, 6)) * scale
        c = StiffnessTensor(base + 0.5 * (pert + pert.T))
        ok, _ = strongly_convex(c)
        if ok:
            return c


def random_vti(rng: np.random.Generator) -> VtiParams:
    while True:
        try:
            return VtiParams(
                c1111=rng.uniform(6.0, 14.0),
                c3333=rng.uniform(5.0, 12.0),
                c1133=rng.uniform(1.0, 4.0),
                c1313=rng.uniform(1.0, 3.5),
                c1212=rng.uniform(0.8, 3.0),
                rho=rng.uniform(0.5, 3.0))
        except ConvexityViolation:
            continue


def random_ortho(rng: np.random.Generator) -> OrthoParams:
    while True:
        try:
            return OrthoParams(
                c1111=rng.uniform(7.0, 14.0),
                c2222=rng.uniform(7.0, 14.0),
                c3333=rng.uniform(6.0, 12.0),
                c1122=rng.uniform(1.0, 4.0),
                c1133=rng.uniform(1.0, 4.0),
                c2233=rng.uniform(1.0, 4.0),
                c2323=rng.uniform(1.0, 3.0),
                c1313=rng.uniform(1.0, 3.0),
                c1212=rng.uniform(0.8, 2.5),
                rho=rng.uniform(0.5, 3.0))
        except ConvexityViolation:
            continue


def random_pair(rng: np.random.Generator,
                mag: float | None = None) -> DirectionPair:
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    m = rng.standard_normal(3)
    m -= (m @ n) * n
    m *= (rng.uniform(0.6, 1.5) if mag is None else mag) / np.linalg.norm(m)
    return DirectionPair(n=n, m=m)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)
