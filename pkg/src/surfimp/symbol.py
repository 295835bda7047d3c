"""Boundary symbol of the elastic half-space and its spectral factorization.

Given a stiffness tensor C, density rho, unit boundary normal n and a
tangential wave vector m, the 3x3 quadratic matrix polynomial

    M(q) = D q^2 + (R + R^T) q + Q + rho I,

with D = C[n,n], R = C[m,n], Q = C[m,m] (contractions over the second
and fourth index), factors uniquely as

    M(q) = (q I - S0*) D (q I - S0),  spectrum of S0 in the upper half plane.

The surface impedance matrix is Z = -i (D S0 + R^T).  It is Hermitian
with positive definite (entrywise) real part, and scales linearly under
(C, rho) -> (s C, s rho).

Two independent routes to S0 are provided: an eigenvector route through
the companion linearization of M, and a contour-integral route using
moments of M^{-1} around the upper roots.  They are deliberately kept
separate so one can cross-check the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla

from .errors import (
    ContourTooClose,
    ConvexityViolation,
    DefectiveSolvent,
    InvalidDirection,
    InvalidImpedance,
    NegativeDiscriminant,
    RealRootDetected,
    ValidationError,
    ZeroTangent,
)
from .tensors import Jacobian, StiffnessTensor, VtiParams, OrthoParams

__all__ = [
    "DirectionPair",
    "SymbolTriple",
    "Factorization",
    "Impedance",
    "build_symbol",
    "full_symbol",
    "symbol_roots",
    "factor_eigen",
    "factor_contour",
    "impedance",
    "vti_impedance_closed",
    "vti_impedance_gradient",
    "ortho_impedance_closed",
    "block_diagonalizer",
    "pullback_symbol",
]


@dataclass(frozen=True)
class DirectionPair:
    """Unit boundary normal n and nonzero tangential vector m, m . n = 0.

    Raises
    ------
    InvalidDirection
        If | |n| - 1 | > 1e-12 or |m . n| > 1e-12 |m|.
    ZeroTangent
        If m vanishes.
    """

    n: NDArray
    m: NDArray

    def __post_init__(self) -> None:
        n = np.asarray(self.n, dtype=float).reshape(3).copy()
        m = np.asarray(self.m, dtype=float).reshape(3).copy()
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise InvalidDirection(f"|n| must be 1, got {np.linalg.norm(n)}")
        mnorm = np.linalg.norm(m)
        if mnorm == 0.0:
            raise ZeroTangent("tangential vector m must be nonzero")
        if abs(float(m @ n)) > 1e-12 * mnorm:
            raise InvalidDirection(
                f"m must be orthogonal to n (|m.n| = {abs(float(m @ n)):.3e})")
        n.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @property
    def mnorm(self) -> float:
        return float(np.linalg.norm(self.m))


@dataclass(frozen=True)
class SymbolTriple:
    """Coefficient matrices D, R, Q of the quadratic boundary symbol.

    D must be symmetric positive definite (this fails exactly when the
    stiffness is not convex along the normal), Q symmetric.
    """

    d: NDArray
    r: NDArray
    q: NDArray

    def __post_init__(self) -> None:
        for name in ("d", "r", "q"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != (3, 3):
                raise ValidationError(f"{name} must be 3x3")
            a = a.copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        scale = max(np.abs(self.d).max(), 1e-300)
        if np.abs(self.d - self.d.T).max() > 1e-9 * scale:
            raise ValidationError("d must be symmetric")
        if np.abs(self.q - self.q.T).max() > 1e-9 * max(np.abs(self.q).max(), 1e-300):
            raise ValidationError("q must be symmetric")
        if np.linalg.eigvalsh(self.d)[0] <= 0:
            raise ConvexityViolation(
                "normal block D of the symbol is not positive definite")


def build_symbol(c: StiffnessTensor, pair: DirectionPair) -> SymbolTriple:
    """Contract the stiffness tensor with a direction pair.

    Returns the triple (D, R, Q) with D = C[n,n], R = C[m,n], Q = C[m,m],
    contracting the second tensor index with the first vector and the
    fourth index with the second.
    """
    cf = c.full
    n, m = pair.n, pair.m
    d = np.einsum("ijkl,j,l->ik", cf, n, n)
    r = np.einsum("ijkl,j,l->ik", cf, m, n)
    q = np.einsum("ijkl,j,l->ik", cf, m, m)
    return SymbolTriple(d, r, q)


def full_symbol(st: SymbolTriple, rho: float, q3: complex) -> NDArray:
    """Evaluate M(q3) = D q3^2 + (R + R^T) q3 + Q + rho I."""
    return (st.d * q3 ** 2 + (st.r + st.r.T) * q3
            + st.q + rho * np.eye(3)).astype(complex)


def _companion(st: SymbolTriple, rho: float) -> NDArray:
    dinv = np.linalg.inv(st.d)
    comp = np.zeros((6, 6))
    comp[:3, 3:] = np.eye(3)
    comp[3:, :3] = -dinv @ (st.q + rho * np.eye(3))
    comp[3:, 3:] = -dinv @ (st.r + st.r.T)
    return comp


def _sorted_roots(w: NDArray, scale: float) -> NDArray:
    """Order six roots as (upper half plane by (Im, Re), then matching
    conjugates), raising RealRootDetected on roots at the real axis."""
    if np.abs(w.imag).min() <= 1e-10 * max(1.0, np.abs(w).max()):
        raise RealRootDetected(
            "symbol has a (numerically) real root; inputs are outside the "
            "strongly convex / positive density regime")
    upper = w[w.imag > 0]
    lower = w[w.imag < 0]
    if len(upper) != 3:
        raise RealRootDetected(
            f"expected 3 roots in the upper half plane, found {len(upper)}")
    order = np.lexsort((upper.real, upper.imag))
    upper = upper[order]
    # pair each upper root with its computed conjugate partner
    partners = []
    used = np.zeros(3, dtype=bool)
    for z in upper:
        dist = np.abs(lower - np.conj(z))
        dist[used] = np.inf
        k = int(np.argmin(dist))
        if dist[k] > 1e-7 * max(1.0, scale):
            raise RealRootDetected(
                "root set does not close under conjugation to tolerance")
        used[k] = True
        partners.append(lower[k])
    return np.concatenate([upper, np.array(partners)])


def symbol_roots(st: SymbolTriple, rho: float) -> NDArray:
    """The six roots of det M(q) = 0, first three in the upper half plane.

    The upper roots are sorted lexicographically by (Im, Re); the last
    three are their conjugate partners in matching order.

    Raises
    ------
    RealRootDetected
        If any root sits within 1e-10 (relative) of the real axis.
    """
    if not rho > 0:
        raise ValidationError(f"density must be positive, got {rho}")
    w = np.linalg.eigvals(_companion(st, rho))
    return _sorted_roots(w, float(np.abs(w).max()))


@dataclass(frozen=True)
class Factorization:
    """Right solvent S0 of the symbol, its six roots, and a residual.

    The residual is max over five fixed pseudo-random real q3 of
    ||M(q3) - (q3 I - S0*) D (q3 I - S0)||_F / ||M(q3)||_F, and the
    matrices needed to recompute it are not stored; trust but verify
    with :func:`full_symbol` if needed.
    """

    s0: NDArray
    roots: NDArray
    residual: float

    def __post_init__(self) -> None:
        s0 = np.asarray(self.s0, dtype=complex).copy()
        roots = np.asarray(self.roots, dtype=complex).copy()
        s0.setflags(write=False)
        roots.setflags(write=False)
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "roots", roots)


def _factor_residual(st: SymbolTriple, rho: float, s0: NDArray) -> float:
    """Relative factorization defect at five deterministic real q3."""
    rng = np.random.default_rng(0x5EED)
    span = 1.0 + float(np.abs(np.linalg.eigvals(s0)).max())
    worst = 0.0
    eye = np.eye(3)
    s0h = s0.conj().T
    for q3 in rng.uniform(-2.0 * span, 2.0 * span, size=5):
        m = full_symbol(st, rho, q3)
        f = (q3 * eye - s0h) @ st.d @ (q3 * eye - s0)
        worst = max(worst, float(np.linalg.norm(m - f) / np.linalg.norm(m)))
    return worst


def factor_eigen(st: SymbolTriple, rho: float) -> Factorization:
    """Factor the symbol through the companion eigenproblem.

    The companion matrix [[0, I], [-D^{-1}(Q + rho I), -D^{-1}(R+R^T)]]
    has the six symbol roots as eigenvalues; the top half of each
    eigenvector is a null vector of M at its root.  S0 is assembled from
    the three upper-half-plane eigenpairs, which handles semisimple
    repeated roots (the isotropic double shear root) without special
    casing.

    Raises
    ------
    DefectiveSolvent
        When the upper eigenvector basis has condition number > 1e10.
    RealRootDetected
        When roots touch the real axis (non-convex input).
    """
    if not rho > 0:
        raise ValidationError(f"density must be positive, got {rho}")
    w, vec = sla.eig(_companion(st, rho))
    scale = float(np.abs(w).max())
    roots = _sorted_roots(w, scale)

    up = np.where(w.imag > 0)[0]
    basis = vec[:3, up]
    basis = basis / np.linalg.norm(basis, axis=0)
    cond = np.linalg.cond(basis)
    if cond > 1e10:
        raise DefectiveSolvent(
            f"upper eigenvector basis condition number {cond:.3e} exceeds 1e10")
    s0 = basis @ np.diag(w[up]) @ np.linalg.inv(basis)
    residual = _factor_residual(st, rho, s0)
    return Factorization(s0=s0, roots=roots, residual=residual)


def _contour_ellipse(upper: NDArray) -> tuple[float, float, float, float]:
    """Axis-aligned ellipse (cx, cy, a, b) enclosing the upper roots,
    staying strictly above the real axis."""
    xs, ys = upper.real, upper.imag
    x0, x1 = xs.min(), xs.max()
    y0, y1 = ys.min(), ys.max()
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    hw, hh = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
    # Vertical semi-axis: generous pad, but the bottom of the ellipse
    # must stay a fixed fraction of the lowest root above the axis.
    b_ax = min(1.25 * hh + 0.25 * y1, cy - 0.4 * y0)
    a_ax = max(hw / np.sqrt(max(0.93 ** 2 - (hh / b_ax) ** 2, 0.04)),
               0.35 * b_ax)
    for _ in range(8):
        frac = ((xs - cx) / a_ax) ** 2 + ((ys - cy) / b_ax) ** 2
        if frac.max() <= 0.97 ** 2:
            break
        a_ax *= 1.3
    else:
        raise ContourTooClose("could not enclose the upper roots with margin")
    return cx, cy, a_ax, b_ax


def factor_contour(st: SymbolTriple, rho: float, nodes: int = 256) -> Factorization:
    """Factor the symbol by contour integration around the upper roots.

    With the symmetrized symbol Mc(z) = D^{-1/2} M(z) D^{-1/2}, the
    solvent satisfies

        S0c = (integral of z Mc(z)^{-1} dz) (integral of Mc(z)^{-1} dz)^{-1}

    over any contour enclosing exactly the upper roots, and
    S0 = D^{-1/2} S0c D^{1/2}.  The contour is an axis-aligned ellipse
    around the root bounding box; the trapezoid rule on it converges
    geometrically in the node count since the integrand is analytic in
    a neighborhood of the contour.

    Raises
    ------
    ContourTooClose
        If the ellipse cannot keep a safe margin from every root.
    ValidationError
        If nodes < 16.
    """
    if nodes < 16:
        raise ValidationError(f"need at least 16 quadrature nodes, got {nodes}")
    roots = symbol_roots(st, rho)
    upper = roots[:3]
    cx, cy, a_ax, b_ax = _contour_ellipse(upper)

    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    zeta = cx + a_ax * np.cos(theta) + 1j * (cy + b_ax * np.sin(theta))
    dzeta = -a_ax * np.sin(theta) + 1j * b_ax * np.cos(theta)

    scale = max(1.0, float(np.abs(roots).max()))
    dist = np.abs(zeta[:, None] - roots[None, :])
    if dist.min() < 1e-6 * scale:
        raise ContourTooClose(
            f"contour approaches a root within {dist.min():.3e}")

    dvals, dvecs = np.linalg.eigh(st.d)
    dhalf = (dvecs * np.sqrt(dvals)) @ dvecs.T
    dmh = (dvecs / np.sqrt(dvals)) @ dvecs.T

    # batched evaluation of Mc(zeta_k)^{-1}
    eye = np.eye(3)
    bmat = dmh @ (st.r + st.r.T) @ dmh
    emat = dmh @ (st.q + rho * eye) @ dmh
    mc = (zeta ** 2)[:, None, None] * eye + zeta[:, None, None] * bmat + emat
    minv = np.linalg.inv(mc)
    w = dzeta[:, None, None]
    i0 = (minv * w).sum(axis=0)
    i1 = (minv * (zeta[:, None, None] * w)).sum(axis=0)
    if np.linalg.cond(i0) > 1e12:
        raise DefectiveSolvent("zeroth contour moment is numerically singular")
    s0c = np.linalg.solve(i0.T, i1.T).T
    s0 = dmh @ s0c @ dhalf

    wloc = np.linalg.eigvals(s0)
    order = np.lexsort((wloc.real, wloc.imag))
    roots_out = np.concatenate([wloc[order], np.conj(wloc[order])])
    residual = _factor_residual(st, rho, s0)
    return Factorization(s0=s0, roots=roots_out, residual=residual)


def _re_part(z: NDArray) -> NDArray:
    """Entrywise real part, symmetrized (exact for Hermitian input)."""
    zr = np.real(z)
    return 0.5 * (zr + zr.T)


@dataclass(frozen=True)
class Impedance:
    """Surface impedance matrix: Hermitian with positive definite
    entrywise real part.

    Raises
    ------
    InvalidImpedance
        When Hermiticity fails beyond 1e-10 ||z|| or the real part has
        a non-positive eigenvalue.
    """

    z: NDArray

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=complex).copy()
        if z.shape != (3, 3):
            raise ValidationError(f"impedance must be 3x3, got {z.shape}")
        norm = np.linalg.norm(z)
        defect = np.linalg.norm(z - z.conj().T)
        if defect > 1e-10 * max(norm, 1e-300):
            raise InvalidImpedance(
                f"Hermiticity defect {defect:.3e} exceeds 1e-10 ||z||")
        eigs = np.linalg.eigvalsh(_re_part(z))
        if not eigs[0] > 0:
            raise InvalidImpedance(
                f"real part must be positive definite (min eig {eigs[0]:.6g})")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def re(self) -> NDArray:
        """Entrywise real part (symmetric, positive definite)."""
        return _re_part(self.z)


def impedance(st: SymbolTriple, rho: float) -> Impedance:
    """Surface impedance Z = -i (D S0 + R^T) from the eigen factorization."""
    fact = factor_eigen(st, rho)
    z = -1j * (st.d @ fact.s0 + st.r.T)
    # tiny skew parts are eigen-solver noise; average them away after
    # checking they really are tiny
    defect = np.linalg.norm(z - z.conj().T)
    if defect > 1e-10 * max(np.linalg.norm(z), 1e-300):
        raise InvalidImpedance(
            f"factorization produced non-Hermitian impedance (defect {defect:.3e})")
    return Impedance(0.5 * (z + z.conj().T))


def block_diagonalizer(m) -> NDArray:
    """In-plane rotation P(m) aligning the tangential vector with e2.

    For m = (m1, m2) (a 2-vector; a third zero component is accepted),

        P = [[m2, m1, 0], [-m1, m2, 0], [0, 0, |m|]] / |m|.

    Conjugating a hatted (m parallel e2) matrix by P produces the matrix
    at azimuth m: Z(m) = P Zhat P^T.

    Raises
    ------
    ZeroTangent
        If m has zero length.
    """
    m = np.asarray(m, dtype=float).reshape(-1)
    if m.size == 3:
        if abs(m[2]) > 1e-12 * max(np.linalg.norm(m), 1e-300):
            raise ValidationError("tangential vector must lie in the 1-2 plane")
        m = m[:2]
    if m.size != 2:
        raise ValidationError("expected a 2-vector (or in-plane 3-vector)")
    norm = np.linalg.norm(m)
    if norm == 0.0:
        raise ZeroTangent("cannot build a rotation from a zero tangent")
    m1, m2 = m / norm
    return np.array([[m2, m1, 0.0], [-m1, m2, 0.0], [0.0, 0.0, 1.0]])


def _vti_hat_entries(c1111, c3333, c1133, c1313, c1212, rho, t):
    """Hatted impedance entries for a VTI medium at t = |m|^2.

    Works for real or complex parameter values (complex inputs feed the
    directional-derivative path), so no validation happens here.
    """
    mm = np.sqrt(t)
    a = np.sqrt((c1212 * t + rho) / c1313)
    gam = np.sqrt((c1111 * t + rho) * c3333 / ((c1313 * t + rho) * c1313))
    sq13 = np.sqrt(c1313 * c3333)
    al1 = (c1133 + c1313) * mm / ((1.0 + gam) * sq13)
    al2 = gam * al1
    crad = ((c1313 * t + rho) / c3333
            - (c1133 + c1313) ** 2 * t / ((1.0 + gam) ** 2 * c1313 * c3333))
    return a, gam, al1, al2, crad, sq13, mm


def _vti_hat_matrix(c1111, c3333, c1133, c1313, c1212, rho, t) -> NDArray:
    a, gam, al1, al2, crad, sq13, mm = _vti_hat_entries(
        c1111, c3333, c1133, c1313, c1212, rho, t)
    cc = np.sqrt(crad)
    bb = gam * cc
    return np.array([
        [c1313 * a, 0.0, 0.0],
        [0.0, c1313 * bb, 1j * (sq13 * al1 - c1313 * mm)],
        [0.0, 1j * (sq13 * al2 - c1133 * mm), c3333 * cc],
    ])


def vti_impedance_closed(p: VtiParams, mnorm: float,
                         direction=None) -> Impedance:
    """Closed-form impedance of a VTI half-space with normal e3.

    Parameters
    ----------
    p : VtiParams
    mnorm : float
        Length of the tangential wave vector, must be positive.
    direction : 2-vector, optional
        In-plane azimuth of m.  Defaults to e2, the hatted frame in
        which the closed form block-diagonalizes; any other azimuth is
        reached by conjugating with :func:`block_diagonalizer`.

    Raises
    ------
    NegativeDiscriminant
        If the radicand of the 33 entry is not positive.
    """
    if not mnorm > 0:
        raise ZeroTangent("mnorm must be positive")
    t = float(mnorm) ** 2
    *_, crad, _, _ = _vti_hat_entries(
        p.c1111, p.c3333, p.c1133, p.c1313, p.c1212, p.rho, t)
    if not crad > 0:
        raise NegativeDiscriminant(
            f"closed-form radicand is {crad:.6g}; no real impedance branch")
    zhat = _vti_hat_matrix(p.c1111, p.c3333, p.c1133, p.c1313, p.c1212,
                           p.rho, t)
    if direction is None:
        return Impedance(zhat)
    rot = block_diagonalizer(direction)
    return Impedance(rot @ zhat @ rot.T)


def vti_impedance_gradient(p: VtiParams, mnorm: float,
                           direction=None) -> dict[int, NDArray]:
    """Spatial gradient of the closed-form VTI impedance.

    Uses the gradients stored on ``p`` and differentiates the closed
    form by a complex step (step 1e-100), which is exact to rounding:
    the real computation channel is identical in the perturbed and base
    evaluations, so the difference quotient carries only the derivative.

    Returns
    -------
    dict mapping j in {1, 2, 3} to dZ/dy_j, each a Hermitian 3x3 array.
    """
    if p.grads is None:
        raise ValidationError("params carry no gradients to differentiate")
    t = float(mnorm) ** 2
    h = 1e-100
    base = _vti_hat_matrix(
        complex(p.c1111), complex(p.c3333), complex(p.c1133),
        complex(p.c1313), complex(p.c1212), complex(p.rho), complex(t))
    rot = None if direction is None else block_diagonalizer(direction)
    out: dict[int, NDArray] = {}
    for j in range(3):
        pert = _vti_hat_matrix(
            p.c1111 + 1j * h * p.grad_of("c1111")[j],
            p.c3333 + 1j * h * p.grad_of("c3333")[j],
            p.c1133 + 1j * h * p.grad_of("c1133")[j],
            p.c1313 + 1j * h * p.grad_of("c1313")[j],
            p.c1212 + 1j * h * p.grad_of("c1212")[j],
            p.rho + 1j * h * p.grad_of("rho")[j],
            complex(t))
        dz = (pert - base) / (1j * h)
        if rot is not None:
            dz = rot @ dz @ rot.T
        out[j + 1] = 0.5 * (dz + dz.conj().T)
    return out


def ortho_impedance_closed(p: OrthoParams, axis: Literal["e1", "e2"],
                           mnorm: float) -> Impedance:
    """Closed-form impedance of an orthorhombic half-space, normal e3,
    tangential vector along a symmetry axis.

    For axis "e2" the (2,3) components couple and the 11 entry decouples
    as c1313 * sqrt((c1212 |m|^2 + rho) / c1313); for axis "e1" the
    (1,3) components couple and the 22 entry decouples with c2323 in
    place of c1313.

    Raises
    ------
    NegativeDiscriminant
        If the coupled-block radicand is not positive.
    """
    if not mnorm > 0:
        raise ZeroTangent("mnorm must be positive")
    t = float(mnorm) ** 2
    mm = float(mnorm)
    if axis == "e2":
        sh_out, sh_in = p.c1313, p.c2323
        cnn, cnz = p.c2222, p.c2233
    elif axis == "e1":
        sh_out, sh_in = p.c2323, p.c1313
        cnn, cnz = p.c1111, p.c1133
    else:
        raise ValidationError(f"axis must be 'e1' or 'e2', got {axis!r}")
    a = np.sqrt((p.c1212 * t + p.rho) / sh_out)
    gam = np.sqrt((cnn * t + p.rho) * p.c3333 / ((sh_in * t + p.rho) * sh_in))
    sq = np.sqrt(sh_in * p.c3333)
    al1 = (cnz + sh_in) * mm / ((1.0 + gam) * sq)
    al2 = gam * al1
    crad = ((sh_in * t + p.rho) / p.c3333
            - (cnz + sh_in) ** 2 * t / ((1.0 + gam) ** 2 * sh_in * p.c3333))
    if not crad > 0:
        raise NegativeDiscriminant(
            f"closed-form radicand is {crad:.6g}; no real impedance branch")
    cc = np.sqrt(crad)
    bb = gam * cc
    z = np.zeros((3, 3), dtype=complex)
    if axis == "e2":
        z[0, 0] = sh_out * a
        z[1, 1] = sh_in * bb
        z[1, 2] = 1j * (sq * al1 - sh_in * mm)
        z[2, 1] = 1j * (sq * al2 - cnz * mm)
        z[2, 2] = p.c3333 * cc
    else:
        z[1, 1] = sh_out * a
        z[0, 0] = sh_in * bb
        z[0, 2] = 1j * (sq * al1 - sh_in * mm)
        z[2, 0] = 1j * (sq * al2 - cnz * mm)
        z[2, 2] = p.c3333 * cc
    return Impedance(z)


def pullback_symbol(z: Impedance, j: Jacobian) -> Impedance:
    """Pull the impedance back through a boundary coordinate Jacobian.

    The boundary operator's principal part transforms by congruence,
    lambda = J Z J^T, which preserves Hermiticity and positivity of the
    real part for a real J.
    """
    return Impedance(j.matrix @ z.z @ j.matrix.T)
