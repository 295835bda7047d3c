"""Stiffness tensors, material parameter sets, and coordinate transforms.

Conventions used throughout the package:

* Voigt pairs are ordered (11, 22, 33, 23, 13, 12), so the 6x6 matrix
  index I runs over that list and ``voigt[I, J]`` holds C^{ijkl} for the
  corresponding index pairs.  No factors of 2 or sqrt(2) are absorbed
  into the matrix itself.
* Strong convexity is measured on the Kelvin-weighted matrix
  W @ voigt @ W with W = diag(1, 1, 1, sqrt2, sqrt2, sqrt2), whose
  eigenvalues are exactly the eigenvalues of the tensor acting on
  symmetric 3x3 matrices.  The margin ``delta`` returned by
  :func:`strongly_convex` is the smallest such eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numpy.typing import NDArray

from .errors import ConvexityViolation, SingularJacobian, ValidationError

__all__ = [
    "StiffnessTensor",
    "MaterialParams",
    "VtiParams",
    "OrthoParams",
    "Jacobian",
    "from_isotropic",
    "from_vti",
    "from_ortho",
    "strongly_convex",
    "transform_tensor",
    "VOIGT_PAIRS",
    "COMPONENT_NAMES",
]

# Voigt pair for each of the six matrix indices, 0-based tensor indices.
VOIGT_PAIRS: tuple[tuple[int, int], ...] = (
    (0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1),
)

_VOIGT_OF_PAIR = {}
for _I, (_i, _j) in enumerate(VOIGT_PAIRS):
    _VOIGT_OF_PAIR[(_i, _j)] = _I
    _VOIGT_OF_PAIR[(_j, _i)] = _I

# Upper triangle of the 6x6 matrix, row major: the canonical flattening
# of the 21 independent components.
_TRIU = tuple((i, j) for i in range(6) for j in range(i, 6))

# Names like "c11", "c12", ... for the 21 components, same order as _TRIU.
COMPONENT_NAMES: tuple[str, ...] = tuple(f"c{i + 1}{j + 1}" for i, j in _TRIU)

_KELVIN_W = np.diag([1.0, 1.0, 1.0, np.sqrt(2.0), np.sqrt(2.0), np.sqrt(2.0)])


def _full_from_voigt(v: NDArray) -> NDArray:
    c = np.empty((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            I = _VOIGT_OF_PAIR[(i, j)]
            for k in range(3):
                for l in range(3):
                    c[i, j, k, l] = v[I, _VOIGT_OF_PAIR[(k, l)]]
    return c


@dataclass(frozen=True)
class StiffnessTensor:
    """Fourth-order stiffness tensor with full (minor and major) symmetry.

    Parameters
    ----------
    voigt : ndarray, shape (6, 6)
        Symmetric matrix of components in the Voigt pair order
        (11, 22, 33, 23, 13, 12).

    Attributes
    ----------
    full : ndarray, shape (3, 3, 3, 3)
        The same tensor with all four indices spelled out.
    """

    voigt: NDArray
    full: NDArray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.voigt, dtype=float)
        if v.shape != (6, 6):
            raise ValidationError(f"voigt matrix must be 6x6, got {v.shape}")
        scale = np.abs(v).max()
        if np.abs(v - v.T).max() > 1e-9 * max(scale, 1.0):
            raise ValidationError("voigt matrix must be symmetric")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "voigt", v)
        f = _full_from_voigt(v)
        f.setflags(write=False)
        object.__setattr__(self, "full", f)

    @classmethod
    def from_components(cls, comps) -> "StiffnessTensor":
        """Build from the 21-vector of upper-triangle Voigt components."""
        comps = np.asarray(comps, dtype=float)
        if comps.shape != (21,):
            raise ValidationError(f"expected 21 components, got {comps.shape}")
        v = np.zeros((6, 6))
        for val, (i, j) in zip(comps, _TRIU):
            v[i, j] = val
            v[j, i] = val
        return cls(v)

    @property
    def components(self) -> NDArray:
        """The 21 independent components, upper triangle row major."""
        return np.array([self.voigt[i, j] for i, j in _TRIU])

    def component_map(self) -> dict[str, float]:
        """Components keyed by their Voigt names ("c11", ..., "c66")."""
        return {name: float(val)
                for name, val in zip(COMPONENT_NAMES, self.components)}


def from_isotropic(lam: float, mu: float) -> StiffnessTensor:
    """Isotropic stiffness C^{ijkl} = lam d_ij d_kl + mu (d_ik d_jl + d_il d_jk).

    No convexity requirement is imposed here; pass the result to
    :func:`strongly_convex` to test it.
    """
    v = np.full((3, 3), float(lam))
    np.fill_diagonal(v, lam + 2.0 * mu)
    out = np.zeros((6, 6))
    out[:3, :3] = v
    out[3, 3] = out[4, 4] = out[5, 5] = mu
    return StiffnessTensor(out)


def strongly_convex(c: StiffnessTensor) -> tuple[bool, float]:
    """Test strong convexity of a stiffness tensor.

    Returns
    -------
    (ok, delta) : tuple of bool and float
        ``delta`` is the smallest eigenvalue of the Kelvin-weighted
        matrix; ``ok`` is True when it clears 1e-10 times the largest
        component magnitude.

    Notes
    -----
    For ``from_isotropic(lam, mu)`` the Kelvin eigenvalues are
    {3 lam + 2 mu} once and {2 mu} five times.
    """
    kelvin = _KELVIN_W @ c.voigt @ _KELVIN_W
    delta = float(np.linalg.eigvalsh(kelvin)[0])
    tol = 1e-10 * np.abs(c.voigt).max()
    return delta > tol, delta


@dataclass(frozen=True)
class MaterialParams:
    """A strongly convex stiffness tensor together with a density.

    Optional first-order spatial gradients may ride along; they are not
    validated beyond shape since they describe a linearization, not a
    material on their own.

    Raises
    ------
    ConvexityViolation
        If the stiffness fails :func:`strongly_convex` or rho <= 0.
    """

    stiffness: StiffnessTensor
    rho: float
    stiffness_grad: NDArray | None = None   # (21, 3), d/dy_j of components
    rho_grad: NDArray | None = None         # (3,)

    def __post_init__(self) -> None:
        ok, delta = strongly_convex(self.stiffness)
        if not ok:
            raise ConvexityViolation(
                f"stiffness is not strongly convex (delta = {delta:.6g})")
        if not self.rho > 0:
            raise ConvexityViolation(f"density must be positive, got {self.rho}")
        if self.stiffness_grad is not None:
            g = np.asarray(self.stiffness_grad, dtype=float)
            if g.shape != (21, 3):
                raise ValidationError("stiffness_grad must have shape (21, 3)")
            object.__setattr__(self, "stiffness_grad", g)
        if self.rho_grad is not None:
            g = np.asarray(self.rho_grad, dtype=float)
            if g.shape != (3,):
                raise ValidationError("rho_grad must have shape (3,)")
            object.__setattr__(self, "rho_grad", g)


_VTI_FIELDS = ("c1111", "c3333", "c1133", "c1313", "c1212", "rho")


@dataclass(frozen=True)
class VtiParams:
    """Transversely isotropic medium with vertical symmetry axis (e3).

    Five independent stiffnesses plus density; c1122 is tied to
    c1111 - 2 c1212.  Gradients, when present, map a field name from
    {"c1111", "c3333", "c1133", "c1313", "c1212", "rho"} to the spatial
    gradient (d/dy1, d/dy2, d/dy3) of that field.

    Raises
    ------
    ConvexityViolation
        When any of c1313 > 0, c1212 > 0, c3333 > 0, rho > 0 or
        (c1111 + c1122) c3333 > 2 c1133^2 fails.
    """

    c1111: float
    c3333: float
    c1133: float
    c1313: float
    c1212: float
    rho: float
    grads: Mapping[str, NDArray] | None = None

    def __post_init__(self) -> None:
        for name in ("c1313", "c1212", "c3333", "rho"):
            if not getattr(self, name) > 0:
                raise ConvexityViolation(
                    f"{name} must be positive, got {getattr(self, name)}")
        lhs = (self.c1111 + self.c1122) * self.c3333
        if not lhs > 2.0 * self.c1133 ** 2:
            raise ConvexityViolation(
                "(c1111 + c1122) * c3333 must exceed 2 * c1133^2 "
                f"({lhs:.6g} vs {2 * self.c1133 ** 2:.6g})")
        if self.grads is not None:
            clean = {}
            for key, val in self.grads.items():
                if key not in _VTI_FIELDS:
                    raise ValidationError(f"unknown gradient field {key!r}")
                arr = np.asarray(val, dtype=float)
                if arr.shape != (3,):
                    raise ValidationError(f"gradient of {key} must be length 3")
                clean[key] = arr
            object.__setattr__(self, "grads", clean)

    @property
    def c1122(self) -> float:
        return self.c1111 - 2.0 * self.c1212

    def grad_of(self, name: str) -> NDArray:
        """Gradient of one field, zeros when not supplied."""
        if self.grads is not None and name in self.grads:
            return self.grads[name]
        return np.zeros(3)


def from_vti(p: VtiParams) -> StiffnessTensor:
    """Assemble the full stiffness tensor of a VTI medium."""
    v = np.zeros((6, 6))
    v[0, 0] = v[1, 1] = p.c1111
    v[2, 2] = p.c3333
    v[0, 1] = v[1, 0] = p.c1122
    v[0, 2] = v[2, 0] = v[1, 2] = v[2, 1] = p.c1133
    v[3, 3] = v[4, 4] = p.c1313
    v[5, 5] = p.c1212
    return StiffnessTensor(v)


_ORTHO_FIELDS = ("c1111", "c2222", "c3333", "c1122", "c1133", "c2233",
                 "c2323", "c1313", "c1212", "rho")


@dataclass(frozen=True)
class OrthoParams:
    """Orthorhombic medium: nine independent stiffnesses plus density.

    Convexity is checked on the assembled tensor: the three shear
    moduli must be positive and the 3x3 normal-stress block positive
    definite.
    """

    c1111: float
    c2222: float
    c3333: float
    c1122: float
    c1133: float
    c2233: float
    c2323: float
    c1313: float
    c1212: float
    rho: float

    def __post_init__(self) -> None:
        for name in ("c2323", "c1313", "c1212", "rho"):
            if not getattr(self, name) > 0:
                raise ConvexityViolation(
                    f"{name} must be positive, got {getattr(self, name)}")
        block = np.array([
            [self.c1111, self.c1122, self.c1133],
            [self.c1122, self.c2222, self.c2233],
            [self.c1133, self.c2233, self.c3333],
        ])
        eigs = np.linalg.eigvalsh(block)
        if not eigs[0] > 0:
            raise ConvexityViolation(
                f"normal-stress block is not positive definite "
                f"(min eigenvalue {eigs[0]:.6g})")


def from_ortho(p: OrthoParams) -> StiffnessTensor:
    """Assemble the full stiffness tensor of an orthorhombic medium."""
    v = np.zeros((6, 6))
    v[0, 0] = p.c1111
    v[1, 1] = p.c2222
    v[2, 2] = p.c3333
    v[0, 1] = v[1, 0] = p.c1122
    v[0, 2] = v[2, 0] = p.c1133
    v[1, 2] = v[2, 1] = p.c2233
    v[3, 3] = p.c2323
    v[4, 4] = p.c1313
    v[5, 5] = p.c1212
    return StiffnessTensor(v)


@dataclass(frozen=True)
class Jacobian:
    """Invertible coordinate Jacobian for boundary normal coordinates.

    Raises
    ------
    SingularJacobian
        When |det J| <= 1e-12 * ||J||^3 (Frobenius norm).
    """

    matrix: NDArray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"Jacobian must be 3x3, got {m.shape}")
        det = np.linalg.det(m)
        norm = np.linalg.norm(m)
        if abs(det) <= 1e-12 * norm ** 3:
            raise SingularJacobian(
                f"|det J| = {abs(det):.3e} below 1e-12 * ||J||^3 = "
                f"{1e-12 * norm ** 3:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def inverse(self) -> "Jacobian":
        return Jacobian(np.linalg.inv(self.matrix))


def transform_tensor(c: StiffnessTensor, j: Jacobian) -> StiffnessTensor:
    """Push a stiffness tensor forward through a coordinate Jacobian.

    Computes C'^{abcd} = J^a_i J^b_j J^c_k J^d_l C^{ijkl} and re-packs
    the result in Voigt form.
    """
    J = j.matrix
    full = np.einsum("ai,bj,ck,dl,ijkl->abcd", J, J, J, J, c.full)
    v = np.empty((6, 6))
    for I, (a, b) in enumerate(VOIGT_PAIRS):
        for K, (cdx, d) in enumerate(VOIGT_PAIRS):
            v[I, K] = full[a, b, cdx, d]
    return StiffnessTensor(v)
