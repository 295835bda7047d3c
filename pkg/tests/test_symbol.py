"""Symbol assembly, factorization, impedance, closed forms."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import random_ortho, random_pair, random_stiffness, random_vti

from surfimp import (
    DirectionPair,
    Impedance,
    InvalidDirection,
    InvalidImpedance,
    Jacobian,
    MaterialParams,
    RealRootDetected,
    StiffnessTensor,
    ValidationError,
    ZeroTangent,
    block_diagonalizer,
    build_symbol,
    factor_contour,
    factor_eigen,
    from_isotropic,
    from_ortho,
    from_vti,
    full_symbol,
    impedance,
    ortho_impedance_closed,
    pullback_symbol,
    symbol_roots,
    vti_impedance_closed,
)

E1, E2, E3 = np.eye(3)

# shear impedance sqrt(mu (mu |m|^2 + rho)) at lam = mu = rho = |m| = 1
# is sqrt(2); the in-plane entries follow from the coupled 2x2 block
Z11_ISO = np.sqrt(2.0)
Z22_ISO = 1.8241911729260266
Z33_ISO = 2.2341687834789585
Z23_ISO = -0.4202041028867281j   # equals i (2 / (1 + sqrt 6) - 1)


def iso_pair() -> DirectionPair:
    return DirectionPair(n=E3, m=E2)


def test_direction_pair_validation():
    with pytest.raises(InvalidDirection):
        DirectionPair(n=2.0 * E3, m=E2)
    with pytest.raises(ZeroTangent):
        DirectionPair(n=E3, m=np.zeros(3))
    with pytest.raises(InvalidDirection):
        DirectionPair(n=E3, m=E2 + 0.1 * E3)
    p = DirectionPair(n=E3, m=1.3 * E2)
    assert p.mnorm == pytest.approx(1.3)


def test_symbol_blocks_isotropic():
    st = build_symbol(from_isotropic(1.0, 1.0), iso_pair())
    np.testing.assert_allclose(st.d, np.diag([1.0, 1.0, 3.0]), atol=1e-14)
    np.testing.assert_allclose(st.q, np.diag([1.0, 3.0, 1.0]), atol=1e-14)
    r_want = np.zeros((3, 3))
    r_want[1, 2] = 1.0   # lam delta_{i2} delta_{k3}
    r_want[2, 1] = 1.0   # mu  delta_{i3} delta_{k2}
    np.testing.assert_allclose(st.r, r_want, atol=1e-14)


def test_symbol_triple_rejects_indefinite_d():
    with pytest.raises(ValidationError):
        from surfimp import SymbolTriple
        SymbolTriple(d=np.diag([1.0, -1.0, 1.0]), r=np.zeros((3, 3)),
                     q=np.eye(3))


def test_roots_isotropic_frozen():
    st = build_symbol(from_isotropic(1.0, 1.0), iso_pair())
    roots = symbol_roots(st, 1.0)
    assert roots.shape == (6,)
    upper, lower = roots[:3], roots[3:]
    assert np.all(upper.imag > 0)
    np.testing.assert_allclose(lower, upper.conj(), atol=1e-12)
    got = np.sort(upper.imag)
    want = np.array([2.0 / np.sqrt(3.0), np.sqrt(2.0), np.sqrt(2.0)])
    np.testing.assert_allclose(got, want, atol=1e-12)
    np.testing.assert_allclose(roots.real, 0.0, atol=1e-12)
    # each root annihilates the full symbol determinant
    for z in roots:
        assert abs(np.linalg.det(full_symbol(st, 1.0, z))) < 1e-10


def test_real_root_detected():
    # a VTI-shaped matrix with c1133 large enough to break convexity:
    # the quartic factor acquires four real roots while the leading
    # block stays positive definite, so only the root guard can object
    v = np.array([
        [3., 1., 4., 0., 0., 0.],
        [1., 3., 4., 0., 0., 0.],
        [4., 4., 3., 0., 0., 0.],
        [0., 0., 0., 1., 0., 0.],
        [0., 0., 0., 0., 1., 0.],
        [0., 0., 0., 0., 0., 1.]])
    st = build_symbol(StiffnessTensor(v), iso_pair())
    with pytest.raises(RealRootDetected):
        symbol_roots(st, 1.0)


def test_factor_eigen_properties(rng):
    for _ in range(10):
        c = random_stiffness(rng)
        pair = random_pair(rng)
        st = build_symbol(c, pair)
        fact = factor_eigen(st, 1.2)
        assert fact.residual < 1e-9
        eigs = np.linalg.eigvals(fact.s0)
        assert np.all(eigs.imag > 0)
        # the solvent's spectrum consists of the upper half roots
        np.testing.assert_allclose(
            np.sort_complex(eigs),
            np.sort_complex(symbol_roots(st, 1.2)[:3]),
            atol=1e-8)


def test_factor_contour_matches_eigen(rng):
    for _ in range(5):
        c = random_stiffness(rng)
        st = build_symbol(c, random_pair(rng))
        fe = factor_eigen(st, 0.9)
        fc = factor_contour(st, 0.9, nodes=256)
        np.testing.assert_allclose(fc.s0, fe.s0, atol=1e-10)
        assert fc.residual < 1e-10


def test_impedance_isotropic_frozen():
    st = build_symbol(from_isotropic(1.0, 1.0), iso_pair())
    z = impedance(st, 1.0).z
    assert z[0, 0] == pytest.approx(Z11_ISO, abs=1e-10)
    assert z[1, 1] == pytest.approx(Z22_ISO, abs=1e-10)
    assert z[2, 2] == pytest.approx(Z33_ISO, abs=1e-10)
    assert z[1, 2] == pytest.approx(Z23_ISO, abs=1e-10)
    assert z[2, 1] == pytest.approx(-Z23_ISO, abs=1e-10)
    np.testing.assert_allclose(z[0, 1:], 0.0, atol=1e-12)
    # exact closed expression for the off-diagonal entry
    assert z[1, 2].imag == pytest.approx(2.0 / (1.0 + np.sqrt(6.0)) - 1.0,
                                         abs=1e-12)


def test_impedance_hermitian_positive(rng):
    for _ in range(10):
        c = random_stiffness(rng)
        z = impedance(build_symbol(c, random_pair(rng)), 1.5)
        np.testing.assert_allclose(z.z, z.z.conj().T, atol=1e-10)
        assert np.all(np.linalg.eigvalsh(z.re) > 0)


def test_impedance_homogeneity(rng):
    c = random_stiffness(rng)
    pair = random_pair(rng)
    s = 2.7
    z1 = impedance(build_symbol(c, pair), 1.4).z
    z2 = impedance(build_symbol(StiffnessTensor(s * c.voigt), pair),
                   s * 1.4).z
    np.testing.assert_allclose(z2, s * z1, rtol=1e-10, atol=1e-12)


def test_invalid_impedance_rejected():
    bad = np.eye(3, dtype=complex)
    bad[0, 1] = 1.0j
    with pytest.raises(InvalidImpedance):
        Impedance(bad)
    with pytest.raises(InvalidImpedance):
        Impedance(-np.eye(3, dtype=complex))


def test_vti_closed_matches_eigen(rng):
    for _ in range(10):
        p = random_vti(rng)
        c = from_vti(p)
        for s in (0.9, 1.0, 1.3):
            zc = vti_impedance_closed(p, s, direction=np.array([0.0, 1.0]))
            ze = impedance(build_symbol(
                c, DirectionPair(n=E3, m=s * E2)), p.rho)
            np.testing.assert_allclose(zc.z, ze.z, atol=1e-10)


def test_vti_rotation_consistency(rng):
    p = random_vti(rng)
    c = from_vti(p)
    d = np.array([0.6, 0.8])
    zc = vti_impedance_closed(p, 1.1, direction=d)
    ze = impedance(build_symbol(
        c, DirectionPair(n=E3, m=1.1 * np.array([0.6, 0.8, 0.0]))), p.rho)
    np.testing.assert_allclose(zc.z, ze.z, atol=1e-10)
    # and the rotation is the block diagonalizer itself
    rot = block_diagonalizer(d)
    np.testing.assert_allclose(rot @ rot.T, np.eye(3), atol=1e-14)
    zhat = vti_impedance_closed(p, 1.1, direction=None)
    np.testing.assert_allclose(rot @ zhat.z @ rot.T, zc.z, atol=1e-12)


def test_ortho_closed_matches_eigen(rng):
    for _ in range(6):
        p = random_ortho(rng)
        c = from_ortho(p)
        for axis, vec in (("e2", E2), ("e1", E1)):
            for s in (1.0, np.sqrt(2.0)):
                zc = ortho_impedance_closed(p, axis, s)
                ze = impedance(build_symbol(
                    c, DirectionPair(n=E3, m=s * vec)), p.rho)
                np.testing.assert_allclose(zc.z, ze.z, atol=1e-10)


def test_pullback(rng):
    c = random_stiffness(rng)
    z = impedance(build_symbol(c, random_pair(rng)), 1.0)
    same = pullback_symbol(z, Jacobian(np.eye(3)))
    np.testing.assert_allclose(same.z, z.z, atol=1e-14)
    j = Jacobian(np.eye(3) + 0.1 * rng.standard_normal((3, 3)))
    pulled = pullback_symbol(z, j)
    np.testing.assert_allclose(pulled.z, j.matrix @ z.z @ j.matrix.T,
                               atol=1e-12)
