"""Recovery of material parameters from surface impedance data.

The workhorse is the scalar profile

    d(t) = (Z22(t) / Z33(t))^2,   t = |m|^2,

measured on tangential vectors along a fixed azimuth.  For a VTI medium
it is an exact rational function a + c/(t + b), whose three parameters,
together with the decoupled entry Z11 at two magnitudes, determine five
stiffnesses and the density in closed form.  Orthorhombic media use the
same machinery on both symmetry axes plus one off-axis sample for the
c1122 completion.  Fully anisotropic homogeneous media are recovered
linearly from pointwise samples of the inverse symbol.

Derivative estimation from finitely many profile samples uses a local
quartic fit (equivalent to fourth-order central differences plus one
Richardson level on uniform stencils), refined where possible by a
least-squares fit of the exact rational model, which removes the
truncation error floor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad_vec

from .errors import (
    DegenerateProfile,
    InsufficientSamples,
    MissingSample,
    NegativeRadicand,
    NumericalError,
    QuadratureFailure,
    RankDeficientDesign,
    SingularStep5System,
    ValidationError,
)
from .symbol import DirectionPair, Impedance, block_diagonalizer, build_symbol, impedance
from .tensors import MaterialParams, OrthoParams, StiffnessTensor, VtiParams

__all__ = [
    "ImpedanceSample",
    "ProfileSamples",
    "RationalTriple",
    "HomogeneousRecovery",
    "XrayReport",
    "rational_recover",
    "estimate_derivatives",
    "recover_vti",
    "recover_vti_gradient",
    "recover_ortho",
    "gamma_hat",
    "xray_check",
    "recover_homogeneous",
]


@dataclass(frozen=True)
class ImpedanceSample:
    """One impedance measurement: direction pair, matrix, optional
    spatial gradients dZ/dy_j keyed by j in {1, 2, 3}."""

    dir: DirectionPair
    z: Impedance
    dz: Mapping[int, NDArray] | None = None

    def __post_init__(self) -> None:
        if self.dz is None:
            return
        clean = {}
        for key, val in self.dz.items():
            if key not in (1, 2, 3):
                raise ValidationError(f"gradient key must be 1, 2 or 3, got {key!r}")
            arr = np.asarray(val, dtype=complex)
            if arr.shape != (3, 3):
                raise ValidationError("gradient matrices must be 3x3")
            defect = np.linalg.norm(arr - arr.conj().T)
            if defect > 1e-10 * max(np.linalg.norm(arr), 1.0):
                raise ValidationError(
                    f"dZ/dy_{key} is not Hermitian (defect {defect:.3e})")
            arr = arr.copy()
            arr.setflags(write=False)
            clean[key] = arr
        object.__setattr__(self, "dz", clean)


@dataclass(frozen=True)
class ProfileSamples:
    """Scalar profile d sampled at strictly increasing t values."""

    ts: NDArray
    ds: NDArray

    def __post_init__(self) -> None:
        ts = np.asarray(self.ts, dtype=float).reshape(-1).copy()
        ds = np.asarray(self.ds, dtype=float).reshape(-1).copy()
        if ts.shape != ds.shape:
            raise ValidationError("ts and ds must have equal length")
        if len(ts) >= 2 and not np.all(np.diff(ts) > 0):
            raise ValidationError("ts must be strictly increasing")
        ts.setflags(write=False)
        ds.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "ds", ds)


@dataclass(frozen=True)
class RationalTriple:
    """Parameters of the profile model d(t) = a + c / (t + b)."""

    a: float
    b: float
    c: float

    def evaluate(self, t):
        return self.a + self.c / (np.asarray(t, dtype=float) + self.b)


def rational_recover(f1: float, df1: float, ddf1: float) -> RationalTriple:
    """Identify a + c/(t+b) from value and two derivatives at t = 1.

    The curvature fixes the pole through b = -2 f'(1)/f''(1) - 1, after
    which a = f(1) + f'(1)(1 + b) and c = (f(1) - a)(1 + b).

    Raises
    ------
    DegenerateProfile
        When |f''(1)| <= 1e-12 * max(|f(1)|, |f'(1)|, 1): a flat profile
        carries no pole information.

    Examples
    --------
    >>> rational_recover(2.6, -0.12, 0.048)
    RationalTriple(a=2.0, b=4.0, c=3.0)
    """
    if abs(ddf1) <= 1e-12 * max(abs(f1), abs(df1), 1.0):
        raise DegenerateProfile(
            f"second derivative {ddf1:.3e} too small to locate the pole")
    b = -2.0 * df1 / ddf1 - 1.0
    a = f1 + df1 * (1.0 + b)
    c = (f1 - a) * (1.0 + b)
    return RationalTriple(a=a, b=b, c=c)


def estimate_derivatives(p: ProfileSamples, t0: float) -> tuple[float, float, float]:
    """Estimate (d(t0), d'(t0), d''(t0)) from sampled profile values.

    Fits a quartic through the five samples nearest t0 in a scaled local
    coordinate.  On a uniform stencil centered at t0 this reproduces the
    classical fourth-order central differences with one Richardson
    extrapolation level, and it degrades gracefully on mildly non-uniform
    spacing.

    Raises
    ------
    InsufficientSamples
        With fewer than five samples.
    """
    if len(p.ts) < 5:
        raise InsufficientSamples(
            f"need at least 5 profile samples, got {len(p.ts)}")
    idx = np.argsort(np.abs(p.ts - t0))[:5]
    x = p.ts[idx] - t0
    y = p.ds[idx]
    h = float(np.abs(x[x != 0.0]).mean()) if np.any(x != 0.0) else 1.0
    coeff = np.polynomial.polynomial.polyfit(x / h, y, 4)
    return float(coeff[0]), float(coeff[1] / h), float(2.0 * coeff[2] / h ** 2)


def _refine_rational(ts: NDArray, ds: NDArray,
                     tri: RationalTriple) -> RationalTriple:
    """Gauss-Newton fit of a + c/(t+b) through all samples, seeded by
    the derivative-based triple.  Exact data converges to rounding."""
    a, b, c = tri.a, tri.b, tri.c
    prev = np.inf
    for _ in range(40):
        u = 1.0 / (ts + b)
        r = a + c * u - ds
        jac = np.stack([np.ones_like(ts), -c * u ** 2, u], axis=1)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        lam = 1.0
        for _ in range(30):
            bn = b + lam * step[1]
            if np.all(ts + bn > 1e-12):
                break
            lam *= 0.5
        a += lam * step[0]
        b += lam * step[1]
        c += lam * step[2]
        size = float(np.linalg.norm(step))
        if size < 1e-14 * (1.0 + abs(a) + abs(b) + abs(c)) or size >= prev * 0.99:
            break
        prev = size
    return RationalTriple(a=float(a), b=float(b), c=float(c))


def _hatted(sample: ImpedanceSample) -> NDArray:
    """Rotate a sample into the frame where m is along e2."""
    m = sample.dir.m
    rot = block_diagonalizer(m[:2])
    return rot.T @ sample.z.z @ rot


def _hatted_dz(sample: ImpedanceSample, j: int) -> NDArray:
    m = sample.dir.m
    rot = block_diagonalizer(m[:2])
    return rot.T @ np.asarray(sample.dz[j]) @ rot


_E3 = np.array([0.0, 0.0, 1.0])


def _vti_family(samples: Sequence[ImpedanceSample]) -> list[ImpedanceSample]:
    """Samples with normal e3 and in-plane tangent, any azimuth."""
    out = []
    for s in samples:
        if np.linalg.norm(s.dir.n - _E3) > 1e-9:
            continue
        if abs(s.dir.m[2]) > 1e-9 * s.dir.mnorm:
            continue
        out.append(s)
    if not out:
        raise MissingSample("no samples with boundary normal e3 were provided")
    return out


def _pick_t(family: Sequence[ImpedanceSample], t_want: float,
            label: str) -> ImpedanceSample:
    for s in family:
        if abs(s.dir.mnorm ** 2 - t_want) <= 1e-9:
            return s
    raise MissingSample(f"required sample at {label} is missing")


def _axis_family(samples: Sequence[ImpedanceSample], axis: int) -> list[ImpedanceSample]:
    """Samples with normal e3 and tangent along coordinate axis 1 or 2."""
    out = []
    other = 2 - axis
    for s in samples:
        if np.linalg.norm(s.dir.n - _E3) > 1e-9:
            continue
        m = s.dir.m
        tol = 1e-9 * s.dir.mnorm
        if abs(m[2]) > tol or abs(m[other]) > tol or abs(m[axis - 1]) <= tol:
            continue
        out.append(s)
    return out


def recover_vti(samples: Sequence[ImpedanceSample], *,
                refine: bool = True) -> VtiParams:
    """Recover VTI parameters from impedance samples with normal e3.

    Needs samples at |m| = 1 and |m| = sqrt(2) plus at least five
    magnitudes total (for profile derivative estimation).  Any in-plane
    azimuths are accepted; each sample is rotated into the hatted frame
    first.

    The decoupled entry fixes c1212 c1313 and rho c1313 from the two
    magnitudes; the profile (Z22/Z33)^2 is fit by the rational model
    whose parameters deliver rho, c1313, c1212, c3333, c1111 in order,
    and the 33 entry at |m| = 1 finally resolves c1133.

    Parameters
    ----------
    samples : sequence of ImpedanceSample
    refine : bool
        Re-fit the rational profile through all samples after the
        derivative-based identification (recommended; removes the finite
        difference truncation floor).

    Raises
    ------
    MissingSample, InsufficientSamples, DegenerateProfile
        On inadequate sample sets.
    NegativeRadicand
        When the data are inconsistent with a VTI medium, with the
        failing step named.
    """
    fam = _vti_family(samples)
    s_one = _pick_t(fam, 1.0, "|m| = 1")
    s_two = _pick_t(fam, 2.0, "|m| = sqrt(2)")

    z11_1 = float(_hatted(s_one)[0, 0].real)
    z11_2 = float(_hatted(s_two)[0, 0].real)
    ka = z11_2 ** 2 - z11_1 ** 2
    kb = z11_1 ** 2 - ka
    if not (ka > 0 and kb > 0):
        raise NegativeRadicand(
            f"step 1 products must be positive (got {ka:.6g}, {kb:.6g}); "
            "data are inconsistent with a VTI half-space")

    order = np.argsort([s.dir.mnorm for s in fam])
    ts, ds = [], []
    for k in order:
        zh = _hatted(fam[k])
        t = fam[k].dir.mnorm ** 2
        if ts and abs(t - ts[-1]) < 1e-12:
            continue
        ts.append(t)
        ds.append(float((zh[1, 1].real / zh[2, 2].real) ** 2))
    profile = ProfileSamples(np.array(ts), np.array(ds))

    d1, dp, dpp = estimate_derivatives(profile, 1.0)
    tri = rational_recover(d1, dp, dpp)
    if refine:
        tri = _refine_rational(profile.ts, profile.ds, tri)
    a_r, b_r, c_r = tri.a, tri.b, tri.c

    if not b_r > 0:
        raise NegativeRadicand(
            f"step 3 pole position rho/c1313 = {b_r:.6g} must be positive")
    rho = float(np.sqrt(kb * b_r))
    c1313 = kb / rho
    c1212 = ka / c1313
    r33 = c_r + a_r * b_r
    if not r33 > 0:
        raise NegativeRadicand(
            f"step 3 ratio rho/c3333 = {r33:.6g} must be positive")
    c3333 = rho / r33
    c1111 = a_r * c3333

    gam1 = np.sqrt((c1111 + rho) * c3333 / ((c1313 + rho) * c1313))
    z33_1 = float(_hatted(s_one)[2, 2].real)
    w = -(c1313 / c3333) * z33_1 ** 2 + c1313 ** 2 + rho * c1313
    if not w > 0:
        raise NegativeRadicand(f"step 4 radicand negative ({w:.6g})")
    c1133 = (1.0 + gam1) * np.sqrt(w) - c1313

    return VtiParams(c1111=float(c1111), c3333=float(c3333),
                     c1133=float(c1133), c1313=float(c1313),
                     c1212=float(c1212), rho=float(rho))


def recover_vti_gradient(samples: Sequence[ImpedanceSample],
                         recovered: VtiParams) -> dict[str, NDArray]:
    """Recover spatial gradients of all six VTI fields.

    Every sample used by :func:`recover_vti` must carry dZ/dy_j for all
    three directions.  The gradient of the rational profile parameters
    is obtained from a linear least-squares fit of the differentiated
    model (the sensitivity of d is linear in the parameter gradients
    once a, b, c are known), then chained through the same recovery
    order as the values.

    Returns
    -------
    dict mapping each of "c1111", "c3333", "c1133", "c1313", "c1212",
    "rho" to its gradient (3,) array.

    Raises
    ------
    MissingSample
        When a needed sample lacks gradient data.
    SingularStep5System
        When the recovered rho, c1313 make the 2x2 gradient system
        singular (corrupt values).
    """
    fam = _vti_family(samples)
    s_one = _pick_t(fam, 1.0, "|m| = 1")
    s_two = _pick_t(fam, 2.0, "|m| = sqrt(2)")
    for s in fam:
        if s.dz is None or any(j not in s.dz for j in (1, 2, 3)):
            raise MissingSample(
                f"sample at |m| = {s.dir.mnorm:.6g} lacks gradient data")

    p = recovered
    a_r = p.c1111 / p.c3333
    b_r = p.rho / p.c1313
    c_r = p.rho * (p.c1313 - p.c1111) / (p.c1313 * p.c3333)

    z11_1 = float(_hatted(s_one)[0, 0].real)
    z11_2 = float(_hatted(s_two)[0, 0].real)
    z33_1 = float(_hatted(s_one)[2, 2].real)

    if min(p.rho, p.c1313) < 1e-12 * max(p.rho, p.c1313, 1.0):
        raise SingularStep5System(
            f"rho = {p.rho:.6g}, c1313 = {p.c1313:.6g} make the gradient "
            "system singular")

    order = np.argsort([s.dir.mnorm for s in fam])
    seen: list[float] = []
    rows = []
    for k in order:
        t = fam[k].dir.mnorm ** 2
        if seen and abs(t - seen[-1]) < 1e-12:
            continue
        seen.append(t)
        rows.append(fam[k])
    ts = np.array(seen)
    u = 1.0 / (ts + b_r)
    design = np.stack([np.ones_like(ts), -c_r * u ** 2, u], axis=1)

    out = {name: np.zeros(3) for name in
           ("c1111", "c3333", "c1133", "c1313", "c1212", "rho")}
    n_big = (p.c1111 + p.rho) * p.c3333
    d_big = (p.c1313 + p.rho) * p.c1313
    gam1 = np.sqrt(n_big / d_big)
    w = -(p.c1313 / p.c3333) * z33_1 ** 2 + p.c1313 ** 2 + p.rho * p.c1313
    sqw = np.sqrt(w)

    for j in (1, 2, 3):
        dd = []
        for s in rows:
            zh = _hatted(s)
            dzh = _hatted_dz(s, j)
            z22, z33 = zh[1, 1].real, zh[2, 2].real
            dval = (z22 / z33) ** 2
            dd.append(2.0 * dval * (dzh[1, 1].real / z22 - dzh[2, 2].real / z33))
        sol, *_ = np.linalg.lstsq(design, np.array(dd), rcond=None)
        da_r, db_r, dc_r = (float(sol[0]), float(sol[1]), float(sol[2]))

        dz11_1 = float(_hatted_dz(s_one, j)[0, 0].real)
        dz11_2 = float(_hatted_dz(s_two, j)[0, 0].real)
        dz33_1 = float(_hatted_dz(s_one, j)[2, 2].real)
        dka = 2.0 * z11_2 * dz11_2 - 2.0 * z11_1 * dz11_1
        dkb = 2.0 * z11_1 * dz11_1 - dka

        # step 5: solve for (drho, dc1313) from d(rho/c1313), d(rho c1313)
        drho = (p.c1313 ** 2 * db_r + dkb) / (2.0 * p.c1313)
        dc1313 = (dkb - p.c1313 ** 2 * db_r) / (2.0 * p.rho)
        # step 6
        dc1212 = (dka - p.c1212 * dc1313) / p.c1313
        # steps 7, 8
        r33 = c_r + a_r * b_r
        dr33 = dc_r + a_r * db_r + b_r * da_r
        dc3333 = p.c3333 * (drho / p.rho - dr33 / r33)
        dc1111 = da_r * p.c3333 + a_r * dc3333
        # step 9
        dn_big = (dc1111 + drho) * p.c3333 + (p.c1111 + p.rho) * dc3333
        dd_big = (dc1313 + drho) * p.c1313 + (p.c1313 + p.rho) * dc1313
        dgam1 = 0.5 * gam1 * (dn_big / n_big - dd_big / d_big)
        dratio = (dc1313 - (p.c1313 / p.c3333) * dc3333) / p.c3333
        dw = (-dratio * z33_1 ** 2
              - (p.c1313 / p.c3333) * 2.0 * z33_1 * dz33_1
              + 2.0 * p.c1313 * dc1313 + drho * p.c1313 + p.rho * dc1313)
        dc1133 = dgam1 * sqw + (1.0 + gam1) * dw / (2.0 * sqw) - dc1313

        for name, val in (("rho", drho), ("c1313", dc1313),
                          ("c1212", dc1212), ("c3333", dc3333),
                          ("c1111", dc1111), ("c1133", dc1133)):
            out[name][j - 1] = val
    return out


def _axis_step1(fam: Sequence[ImpedanceSample], entry: int,
                label: str) -> tuple[float, float]:
    s_one = _pick_t(fam, 1.0, f"{label}, |m| = 1")
    s_two = _pick_t(fam, 2.0, f"{label}, |m| = sqrt(2)")
    z1 = float(s_one.z.z[entry, entry].real)
    z2 = float(s_two.z.z[entry, entry].real)
    ka = z2 ** 2 - z1 ** 2
    kb = z1 ** 2 - ka
    if not (ka > 0 and kb > 0):
        raise NegativeRadicand(
            f"{label} step 1 products must be positive (got {ka:.6g}, {kb:.6g})")
    return ka, kb


def _axis_profile(fam: Sequence[ImpedanceSample], num: int,
                  refine: bool) -> RationalTriple:
    order = np.argsort([s.dir.mnorm for s in fam])
    ts, ds = [], []
    for k in order:
        t = fam[k].dir.mnorm ** 2
        if ts and abs(t - ts[-1]) < 1e-12:
            continue
        z = fam[k].z.z
        ts.append(t)
        ds.append(float((z[num, num].real / z[2, 2].real) ** 2))
    profile = ProfileSamples(np.array(ts), np.array(ds))
    d1, dp, dpp = estimate_derivatives(profile, 1.0)
    tri = rational_recover(d1, dp, dpp)
    if refine:
        tri = _refine_rational(profile.ts, profile.ds, tri)
    return tri


def recover_ortho(samples: Sequence[ImpedanceSample], *,
                  refine: bool = True) -> OrthoParams:
    """Recover all nine orthorhombic stiffnesses plus density.

    Requires two axis-aligned sample families (m along e2 and along e1,
    each with |m| = 1, sqrt(2) and at least five magnitudes) and one
    off-axis sample with m along (e1 + e2)/sqrt(2).  The axis families
    repeat the VTI recovery per axis; the bisecting sample is needed
    because c1122 enters no axis-aligned impedance, and is consumed by
    reconstructing the solvent from the known normal block.

    Raises
    ------
    MissingSample
        When a family or the bisecting sample is absent.
    NegativeRadicand
        On data inconsistent with an orthorhombic medium (step named).
    """
    fam2 = _axis_family(samples, axis=2)
    fam1 = _axis_family(samples, axis=1)
    if not fam2:
        raise MissingSample("no samples with m along e2")
    if not fam1:
        raise MissingSample("no samples with m along e1")

    diag = None
    root_half = 1.0 / np.sqrt(2.0)
    for s in samples:
        if np.linalg.norm(s.dir.n - _E3) > 1e-9:
            continue
        unit = s.dir.m / s.dir.mnorm
        if np.linalg.norm(unit - np.array([root_half, root_half, 0.0])) <= 1e-9:
            diag = s
            break
    if diag is None:
        raise MissingSample(
            "a sample with m along (e1 + e2)/sqrt(2) is required to "
            "determine c1122")

    # axis e2: decoupled entry 11, coupled block (2, 3)
    ka2, kb2 = _axis_step1(fam2, entry=0, label="axis e2")
    tri2 = _axis_profile(fam2, num=1, refine=refine)
    # axis e1: decoupled entry 22, coupled block (1, 3)
    ka1, kb1 = _axis_step1(fam1, entry=1, label="axis e1")
    tri1 = _axis_profile(fam1, num=0, refine=refine)

    if not tri1.b > 0:
        raise NegativeRadicand(
            f"axis e1 pole position rho/c1313 = {tri1.b:.6g} must be positive")
    rho = float(np.sqrt(kb2 * tri1.b))    # kb2 = rho c1313, tri1.b = rho/c1313
    c1313 = kb2 / rho
    c2323 = kb1 / rho
    c1212 = ka2 / c1313

    r33 = tri2.c + tri2.a * tri2.b
    if not r33 > 0:
        raise NegativeRadicand(
            f"axis e2 ratio rho/c3333 = {r33:.6g} must be positive")
    c3333 = rho / r33
    c2222 = tri2.a * c3333
    c1111 = tri1.a * c3333

    z33_e2 = float(_pick_t(fam2, 1.0, "axis e2, |m| = 1").z.z[2, 2].real)
    gam_e2 = np.sqrt((c2222 + rho) * c3333 / ((c2323 + rho) * c2323))
    w1 = -(c2323 / c3333) * z33_e2 ** 2 + c2323 ** 2 + rho * c2323
    if not w1 > 0:
        raise NegativeRadicand(f"axis e2 step 4 radicand negative ({w1:.6g})")
    c2233 = (1.0 + gam_e2) * np.sqrt(w1) - c2323

    z33_e1 = float(_pick_t(fam1, 1.0, "axis e1, |m| = 1").z.z[2, 2].real)
    gam_e1 = np.sqrt((c1111 + rho) * c3333 / ((c1313 + rho) * c1313))
    w2 = -(c1313 / c3333) * z33_e1 ** 2 + c1313 ** 2 + rho * c1313
    if not w2 > 0:
        raise NegativeRadicand(f"axis e1 step 4 radicand negative ({w2:.6g})")
    c1133 = (1.0 + gam_e1) * np.sqrt(w2) - c1313

    # c1122 from the bisecting sample: with D and R known, rebuild the
    # solvent and read Q + rho I = S0* D S0 off its (1,2) entry.
    s = diag.dir.mnorm * root_half
    dmat = np.diag([c1313, c2323, c3333])
    rmat = np.array([[0.0, 0.0, c1133 * s],
                     [0.0, 0.0, c2233 * s],
                     [c1313 * s, c2323 * s, 0.0]])
    s0 = np.linalg.solve(dmat, 1j * diag.z.z - rmat.T)
    qpi = s0.conj().T @ dmat @ s0
    c1122 = float(qpi[0, 1].real) / s ** 2 - c1212

    return OrthoParams(c1111=float(c1111), c2222=float(c2222),
                       c3333=float(c3333), c1122=float(c1122),
                       c1133=float(c1133), c2233=float(c2233),
                       c2323=float(c2323), c1313=float(c1313),
                       c1212=float(c1212), rho=float(rho))


def gamma_hat(params: MaterialParams, eta) -> NDArray:
    """Pointwise inverse symbol (A(eta) + rho I)^{-1}.

    A(eta) is the stiffness contracted twice with eta; the result is the
    spatial transform of the whole-space fundamental solution evaluated
    at eta, real and symmetric for real arguments.
    """
    eta = np.asarray(eta, dtype=float).reshape(3)
    a = np.einsum("ijkl,j,l->ik", params.stiffness.full, eta, eta)
    try:
        return np.linalg.inv(a + params.rho * np.eye(3))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symbol is singular at eta = {eta}") from exc


class XrayReport(NamedTuple):
    lhs: NDArray
    rhs: NDArray
    gap: float


def xray_check(params: MaterialParams, pair: DirectionPair) -> XrayReport:
    """Verify the line-integral identity linking the inverse symbol to
    the impedance.

    Integrates (A(m + s n) + rho I)^{-1} over the real line and compares
    against pi times the inverse of the entrywise real part of Z(m, n)
    (unit normalization of the frequency scale).

    Returns
    -------
    XrayReport
        Fields lhs (the integral), rhs, and gap, the relative Frobenius
        difference.

    Raises
    ------
    QuadratureFailure
        When the integrator's own error estimate is not well below the
        comparison tolerance.
    """
    cf = params.stiffness.full
    eye = np.eye(3)

    def integrand(s: float) -> NDArray:
        eta = pair.m + s * pair.n
        a = np.einsum("ijkl,j,l->ik", cf, eta, eta)
        return np.linalg.inv(a + params.rho * eye)

    try:
        lhs, err = quad_vec(integrand, -np.inf, np.inf,
                            epsabs=1e-10, epsrel=1e-10)
    except Exception as exc:
        raise QuadratureFailure(f"line integral failed: {exc}") from exc
    if err > 1e-7 * max(np.linalg.norm(lhs), 1e-300):
        raise QuadratureFailure(
            f"quadrature error estimate {err:.3e} too large")
    z = impedance(build_symbol(params.stiffness, pair), params.rho)
    rhs = np.pi * np.linalg.inv(z.re)
    gap = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
    return XrayReport(lhs=lhs, rhs=rhs, gap=gap)


@dataclass(frozen=True)
class HomogeneousRecovery:
    """Result of the linear full-tensor recovery."""

    params: MaterialParams
    residual: float
    rank: int


_BASIS_FULL: NDArray | None = None


def _component_basis() -> NDArray:
    global _BASIS_FULL
    if _BASIS_FULL is None:
        mats = []
        for v in range(21):
            e = np.zeros(21)
            e[v] = 1.0
            mats.append(StiffnessTensor.from_components(e).full)
        _BASIS_FULL = np.stack(mats)
    return _BASIS_FULL


def recover_homogeneous(zsamples: Sequence[ImpedanceSample]) -> HomogeneousRecovery:
    """Recover all 21 stiffness components and the density linearly.

    Each sample's matrix must hold the inverse symbol gamma_hat(eta) at
    eta = sample.dir.m (real symmetric; the direction pair records the
    tangent-plane geometry the data came from).  Inverting each sample
    gives A(eta) + rho I, which is linear in the 22 unknowns, so a QR
    least-squares solve recovers them.

    Sample vectors must not be coplanar and must include at least two
    distinct lengths: either degeneracy leaves a kernel (a rank-1
    quartic direction, respectively the isotropic trade-off between a
    lam = -mu pair and the density) and is reported as rank deficiency.

    Raises
    ------
    InsufficientSamples
        With fewer than 22 samples.
    RankDeficientDesign
        When the design matrix rank is below 22.
    """
    if len(zsamples) < 22:
        raise InsufficientSamples(
            f"need at least 22 sample directions, got {len(zsamples)}")
    basis = _component_basis()
    rows = []
    rhs = []
    iu = [(i, k) for i in range(3) for k in range(i, 3)]
    for s in zsamples:
        g = np.asarray(s.z.z)
        if np.abs(g.imag).max() > 1e-8 * max(np.abs(g).max(), 1e-300):
            raise ValidationError(
                "inverse-symbol samples must be real symmetric matrices")
        gr = 0.5 * (g.real + g.real.T)
        eta = s.dir.m
        try:
            msym = np.linalg.inv(gr)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"sample at eta = {eta} is singular") from exc
        acoef = np.einsum("vijkl,j,l->vik", basis, eta, eta)
        for i, k in iu:
            row = np.empty(22)
            row[:21] = acoef[:, i, k]
            row[21] = 1.0 if i == k else 0.0
            rows.append(row)
            rhs.append(msym[i, k])
    a = np.array(rows)
    b = np.array(rhs)
    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 22:
        raise RankDeficientDesign(
            f"design matrix rank {rank} < 22: sample vectors are coplanar "
            "or share a single length")
    residual = float(np.linalg.norm(a @ sol - b) / np.linalg.norm(b))
    params = MaterialParams(StiffnessTensor.from_components(sol[:21]),
                            rho=float(sol[21]))
    return HomogeneousRecovery(params=params, residual=residual, rank=int(rank))
