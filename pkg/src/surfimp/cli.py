"""Command line front end.

Subcommands::

    surfimp forward       --params P --out S [--seed N] [--count N]
    surfimp recover-vti   --samples S --out P
    surfimp recover-ortho --samples S --out P
    surfimp recover-homog --samples S --out P
    surfimp factor-check  --params P [--trials N] [--seed N] [--tolerance X]
    surfimp bridge-check  --tau X --T T1 T2 T3 ... [--medium M] [--cells N]

Exit codes: 0 success, 2 unreadable or unwritable files, 3 malformed or
physically invalid input, 4 numerical failure (including a failed
check), 5 bad usage.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Sequence

import numpy as np

from . import io as sio
from .bridge import Medium1D, bridge_check
from .errors import (
    IoError,
    NumericalError,
    ParseError,
    UsageError,
    ValidationError,
)
from .recon import (
    ImpedanceSample,
    gamma_hat,
    recover_homogeneous,
    recover_ortho,
    recover_vti,
    recover_vti_gradient,
)
from .symbol import (
    DirectionPair,
    Impedance,
    build_symbol,
    factor_eigen,
    impedance,
    vti_impedance_gradient,
)
from .tensors import MaterialParams, OrthoParams, VtiParams, from_ortho, from_vti

__all__ = ["main"]

# magnitudes for the tangent-vector sweep: five near 1 for the local
# derivative fit plus sqrt(2) for the two-point shear equations
_MAGS = (0.98, 0.99, 1.0, 1.01, 1.02, float(np.sqrt(2.0)))


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit on bad usage."""

    def error(self, message: str):  # noqa: A003 - argparse API
        raise UsageError(message)


def _build_parser() -> _Parser:
    top = _Parser(prog="surfimp",
                  description="surface impedance forward and inverse tools")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", parents=[],
                       help="synthesize impedance samples from parameters")
    p.add_argument("--params", required=True, help="parameter file (JSON)")
    p.add_argument("--out", required=True, help="samples file to write")
    p.add_argument("--seed", type=int, default=0,
                   help="direction seed (full model only)")
    p.add_argument("--count", type=int, default=40,
                   help="number of directions (full model only)")
    p.set_defaults(func=_cmd_forward)

    for name, fn in (("recover-vti", _cmd_recover_vti),
                     ("recover-ortho", _cmd_recover_ortho),
                     ("recover-homog", _cmd_recover_homog)):
        p = sub.add_parser(name, help=f"{name.split('-')[1]} recovery")
        p.add_argument("--samples", required=True, help="samples file (JSON)")
        p.add_argument("--out", required=True, help="parameter file to write")
        p.set_defaults(func=fn)

    p = sub.add_parser("factor-check",
                       help="verify the quadratic factorization on random "
                            "directions")
    p.add_argument("--params", required=True, help="parameter file (JSON)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=_cmd_factor_check)

    p = sub.add_parser("bridge-check",
                       help="compare windowed transforms of the wave solver "
                            "against the elliptic slope")
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--T", type=float, nargs="+", required=True,
                   metavar="T", help="time horizons (need at least 3)")
    p.add_argument("--medium", default=None, help="medium file (JSON)")
    p.add_argument("--cells", type=int, default=2000)
    p.add_argument("--length", type=float, default=12.0,
                   help="domain length of the default uniform medium")
    p.set_defaults(func=_cmd_bridge_check)
    return top


def _material_of(doc: sio.ParamsDoc) -> MaterialParams:
    if isinstance(doc.params, MaterialParams):
        return doc.params
    if isinstance(doc.params, VtiParams):
        return MaterialParams(from_vti(doc.params), rho=doc.params.rho)
    return MaterialParams(from_ortho(doc.params), rho=doc.params.rho)


def _eigen_sample(mat: MaterialParams, pair: DirectionPair) -> ImpedanceSample:
    st = build_symbol(mat.stiffness, pair)
    z = impedance(st, mat.rho)
    return ImpedanceSample(dir=pair, z=z, dz=None)


def _perp_unit(eta: np.ndarray) -> np.ndarray:
    hat = eta / np.linalg.norm(eta)
    k = int(np.argmin(np.abs(hat)))
    v = np.zeros(3)
    v[k] = 1.0
    v -= (v @ hat) * hat
    return v / np.linalg.norm(v)


def _cmd_forward(args) -> int:
    doc = sio.load_params(args.params)
    e1, e2, e3 = np.eye(3)
    samples: list[ImpedanceSample] = []

    if doc.model in ("isotropic", "vti"):
        p = doc.params
        assert isinstance(p, VtiParams)
        mat = _material_of(doc)
        for s in _MAGS:
            pair = DirectionPair(n=e3, m=s * e2)
            smp = _eigen_sample(mat, pair)
            if p.grads is not None:
                smp = dataclasses.replace(
                    smp, dz=vti_impedance_gradient(p, s, direction=e2[:2]))
            samples.append(smp)
    elif doc.model == "orthorhombic":
        mat = _material_of(doc)
        for axis_vec in (e2, e1):
            for s in _MAGS:
                samples.append(_eigen_sample(
                    mat, DirectionPair(n=e3, m=s * axis_vec)))
        diag = (e1 + e2) / np.sqrt(2.0)
        samples.append(_eigen_sample(mat, DirectionPair(n=e3, m=diag)))
    elif doc.model == "full":
        mat = doc.params
        assert isinstance(mat, MaterialParams)
        if args.count < 22:
            raise UsageError(
                f"--count must be at least 22 for model full, got {args.count}")
        rng = np.random.default_rng(args.seed)
        for k in range(args.count):
            vec = rng.standard_normal(3)
            while np.linalg.norm(vec) < 1e-3:
                vec = rng.standard_normal(3)
            radius = 1.0 if k % 2 == 0 else float(np.sqrt(2.0))
            eta = radius * vec / np.linalg.norm(vec)
            samples.append(ImpedanceSample(
                dir=DirectionPair(n=_perp_unit(eta), m=eta),
                z=Impedance(gamma_hat(mat, eta).astype(complex)),
                dz=None))
    else:  # pragma: no cover - load_params already rejects unknown models
        raise ParseError(f"unknown model {doc.model!r}")

    sio.save_samples(args.out, samples)
    print(f"wrote {len(samples)} samples to {args.out}")
    return 0


def _cmd_recover_vti(args) -> int:
    samples = sio.load_samples(args.samples)
    p = recover_vti(samples)
    if all(s.dz is not None for s in samples):
        grads = recover_vti_gradient(samples, p)
        p = dataclasses.replace(p, grads=grads)
    sio.save_params(args.out, "vti", p,
                    extra={"report": {"status": "ok",
                                      "samples_used": len(samples)}})
    print(f"recovered vti parameters -> {args.out}")
    return 0


def _cmd_recover_ortho(args) -> int:
    samples = sio.load_samples(args.samples)
    p = recover_ortho(samples)
    sio.save_params(args.out, "orthorhombic", p,
                    extra={"report": {"status": "ok",
                                      "samples_used": len(samples)}})
    print(f"recovered orthorhombic parameters -> {args.out}")
    return 0


def _cmd_recover_homog(args) -> int:
    samples = sio.load_samples(args.samples)
    rec = recover_homogeneous(samples)
    sio.save_params(args.out, "full", rec.params,
                    extra={"report": {"status": "ok",
                                      "samples_used": len(samples),
                                      "rank": int(rec.rank),
                                      "residual": float(rec.residual)}})
    print(f"recovered 21 components and density -> {args.out} "
          f"(residual {rec.residual:.3e})")
    return 0


def _random_pair(rng: np.random.Generator) -> DirectionPair:
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    m = rng.standard_normal(3)
    m -= (m @ n) * n
    m *= rng.uniform(0.5, 1.5) / np.linalg.norm(m)
    return DirectionPair(n=n, m=m)


def _cmd_factor_check(args) -> int:
    doc = sio.load_params(args.params)
    mat = _material_of(doc)
    if args.trials < 1:
        raise UsageError(f"--trials must be positive, got {args.trials}")
    rng = np.random.default_rng(args.seed)
    print(f"factor-check: model {doc.model}, trials {args.trials}, "
          f"seed {args.seed}, tolerance {args.tolerance:.1e}")
    passed = 0
    for k in range(args.trials):
        pair = _random_pair(rng)
        st = build_symbol(mat.stiffness, pair)
        fact = factor_eigen(st, mat.rho)
        z = impedance(st, mat.rho)
        herm = np.abs(z.z - z.z.conj().T).max() / max(np.abs(z.z).max(), 1e-300)
        worst = max(fact.residual, herm)
        ok = worst <= args.tolerance
        passed += ok
        print(f"trial {k + 1:02d}  residual {fact.residual:.3e}  "
              f"hermitian {herm:.3e}  {'ok' if ok else 'FAIL'}")
    print(f"factor-check: {passed}/{args.trials} within {args.tolerance:.1e}")
    if passed != args.trials:
        raise NumericalError(
            f"{args.trials - passed} of {args.trials} trials exceeded "
            f"{args.tolerance:.1e}")
    return 0


def _cmd_bridge_check(args) -> int:
    if len(args.T) < 3:
        raise UsageError(
            f"need at least 3 --T horizons to observe decay, got {len(args.T)}")
    if args.medium is not None:
        med = sio.load_medium(args.medium)
    else:
        med = Medium1D.homogeneous(rho=1.0, kappa=1.0, L=args.length)
    report = bridge_check(med, args.tau, args.T, cells=args.cells)
    print(f"bridge-check: tau {report.tau:g}, cells {args.cells}")
    for T, gap, bd in zip(report.horizons, report.gaps, report.bounds):
        print(f"T {T:6.2f}  gap {gap:.6e}  bound {bd:.6e}")
    print(f"floor {report.floor:.3e}, decay constant {report.fitted_c:.3e}")
    print(f"bridge-check: {'ok' if report.ok else 'FAIL'}")
    if not report.ok:
        raise NumericalError("transform gap did not decay as required")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 5
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:  # includes ParseError
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
