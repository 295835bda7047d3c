"""JSON file formats for parameters and impedance samples.

Two document kinds, both carrying ``schema_version`` (currently 1):

Parameter files::

    {"schema_version": 1, "model": "vti",
     "components": {"c1111": 10.0, ...}, "rho": 2.0,
     "gradients": {"rho": [0.1, 0, 0], ...}}        # optional

with models "isotropic" (components lambda, mu), "vti" (five c names),
"orthorhombic" (nine c names) and "full" (21 Voigt names c11 .. c66).
Unknown top-level keys are ignored on load, which lets recovery outputs
carry a "report" block without breaking round trips.

Sample files::

    {"schema_version": 1, "samples": [
        {"n": [0, 0, 1], "m": [0, 1, 0],
         "z_re": [[...], ...], "z_im": [[...], ...],
         "dz": {"1": {"re": [[...]], "im": [[...]]}, ...}}]}   # dz optional

Matrices are row-major nested lists.  Serialization uses sorted keys and
plain float repr, so a load/save cycle is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .bridge import Medium1D
from .errors import IoError, ParseError
from .recon import ImpedanceSample
from .symbol import DirectionPair, Impedance
from .tensors import (
    COMPONENT_NAMES,
    MaterialParams,
    OrthoParams,
    StiffnessTensor,
    VtiParams,
)

__all__ = [
    "SCHEMA_VERSION",
    "ParamsDoc",
    "load_params",
    "save_params",
    "load_samples",
    "save_samples",
    "load_medium",
]

SCHEMA_VERSION = 1

_VTI_NAMES = ("c1111", "c3333", "c1133", "c1313", "c1212")
_ORTHO_NAMES = ("c1111", "c2222", "c3333", "c1122", "c1133", "c2233",
                "c2323", "c1313", "c1212")


@dataclass(frozen=True)
class ParamsDoc:
    """A parameter file in memory: the model tag plus the typed params.

    ``params`` is VtiParams for models "isotropic" and "vti" (the
    isotropic case embeds as c1111 = c3333 = lambda + 2 mu,
    c1133 = lambda, c1313 = c1212 = mu), OrthoParams for
    "orthorhombic", MaterialParams for "full".
    """

    model: str
    params: VtiParams | OrthoParams | MaterialParams


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(path: str, doc: Any) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _check_header(doc: Any, path: str) -> None:
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    ver = doc.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise ParseError(
            f"{path}: schema_version must be {SCHEMA_VERSION}, got {ver!r}")


def _need(doc: Mapping, key: str, path: str) -> Any:
    if key not in doc:
        raise ParseError(f"{path}: missing required key {key!r}")
    return doc[key]


def _float_of(val: Any, what: str, path: str) -> float:
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ParseError(f"{path}: {what} must be a number, got {val!r}")
    return float(val)


def _grad_map(doc: Mapping, names: Sequence[str], path: str) -> dict | None:
    raw = doc.get("gradients")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: gradients must be an object")
    out = {}
    for key, val in raw.items():
        if key not in names:
            raise ParseError(f"{path}: unknown gradient field {key!r}")
        arr = np.asarray(val, dtype=float)
        if arr.shape != (3,):
            raise ParseError(f"{path}: gradient of {key} must be length 3")
        out[key] = arr
    return out


def load_params(path: str) -> ParamsDoc:
    """Read a parameter file.

    Raises
    ------
    IoError
        When the file cannot be read.
    ParseError
        On malformed or schema-violating content.
    ConvexityViolation
        When the parameters fail their convexity checks.
    """
    doc = _read_json(path)
    _check_header(doc, path)
    model = _need(doc, "model", path)
    comp = _need(doc, "components", path)
    if not isinstance(comp, dict):
        raise ParseError(f"{path}: components must be an object")
    rho = _float_of(_need(doc, "rho", path), "rho", path)

    if model == "isotropic":
        lam = _float_of(_need(comp, "lambda", path), "lambda", path)
        mu = _float_of(_need(comp, "mu", path), "mu", path)
        grads = _grad_map(doc, ("lambda", "mu", "rho"), path)
        vgrads = None
        if grads is not None:
            dl = grads.get("lambda", np.zeros(3))
            dm = grads.get("mu", np.zeros(3))
            vgrads = {"c1111": dl + 2 * dm, "c3333": dl + 2 * dm,
                      "c1133": dl, "c1313": dm, "c1212": dm,
                      "rho": grads.get("rho", np.zeros(3))}
        p = VtiParams(c1111=lam + 2 * mu, c3333=lam + 2 * mu, c1133=lam,
                      c1313=mu, c1212=mu, rho=rho, grads=vgrads)
        return ParamsDoc(model=model, params=p)

    if model == "vti":
        vals = {k: _float_of(_need(comp, k, path), k, path)
                for k in _VTI_NAMES}
        grads = _grad_map(doc, _VTI_NAMES + ("rho",), path)
        p = VtiParams(rho=rho, grads=grads, **vals)
        return ParamsDoc(model=model, params=p)

    if model == "orthorhombic":
        if doc.get("gradients") is not None:
            raise ParseError(
                f"{path}: gradients are only supported for isotropic and "
                "vti models")
        vals = {k: _float_of(_need(comp, k, path), k, path)
                for k in _ORTHO_NAMES}
        return ParamsDoc(model=model, params=OrthoParams(rho=rho, **vals))

    if model == "full":
        if doc.get("gradients") is not None:
            raise ParseError(
                f"{path}: gradients are only supported for isotropic and "
                "vti models")
        vec = [_float_of(_need(comp, k, path), k, path)
               for k in COMPONENT_NAMES]
        mat = MaterialParams(StiffnessTensor.from_components(vec), rho=rho)
        return ParamsDoc(model=model, params=mat)

    raise ParseError(f"{path}: unknown model {model!r}")


def save_params(path: str, model: str,
                params: VtiParams | OrthoParams | MaterialParams,
                extra: Mapping[str, Any] | None = None) -> None:
    """Write a parameter file; ``extra`` merges additional top-level
    blocks (e.g. a recovery report)."""
    if model == "vti":
        assert isinstance(params, VtiParams)
        comp = {k: getattr(params, k) for k in _VTI_NAMES}
        rho = params.rho
        grads = (None if params.grads is None else
                 {k: list(v) for k, v in sorted(params.grads.items())})
    elif model == "orthorhombic":
        assert isinstance(params, OrthoParams)
        comp = {k: getattr(params, k) for k in _ORTHO_NAMES}
        rho = params.rho
        grads = None
    elif model == "full":
        assert isinstance(params, MaterialParams)
        comp = params.stiffness.component_map()
        rho = params.rho
        grads = None
    else:
        raise ParseError(f"cannot save model {model!r}")
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "model": model,
                           "components": comp, "rho": rho}
    if grads is not None:
        doc["gradients"] = grads
    if extra:
        doc.update(extra)
    _write_json(path, doc)


def _matrix(rec: Mapping, key_re: str, key_im: str, path: str) -> np.ndarray:
    re = np.asarray(rec.get(key_re), dtype=float)
    im_raw = rec.get(key_im)
    im = np.zeros((3, 3)) if im_raw is None else np.asarray(im_raw, dtype=float)
    if re.shape != (3, 3) or im.shape != (3, 3):
        raise ParseError(f"{path}: {key_re}/{key_im} must be 3x3 matrices")
    return re + 1j * im


def load_samples(path: str) -> list[ImpedanceSample]:
    """Read a samples file into validated ImpedanceSample objects."""
    doc = _read_json(path)
    _check_header(doc, path)
    raw = _need(doc, "samples", path)
    if not isinstance(raw, list):
        raise ParseError(f"{path}: samples must be a list")
    out = []
    for k, rec in enumerate(raw):
        if not isinstance(rec, dict):
            raise ParseError(f"{path}: sample {k} must be an object")
        if "n" not in rec or "m" not in rec or "z_re" not in rec:
            raise ParseError(f"{path}: sample {k} needs n, m and z_re")
        pair = DirectionPair(n=np.asarray(rec["n"], dtype=float),
                             m=np.asarray(rec["m"], dtype=float))
        z = Impedance(_matrix(rec, "z_re", "z_im", path))
        dz = None
        if rec.get("dz") is not None:
            if not isinstance(rec["dz"], dict):
                raise ParseError(f"{path}: sample {k} dz must be an object")
            dz = {}
            for jkey, sub in rec["dz"].items():
                try:
                    j = int(jkey)
                except ValueError:
                    raise ParseError(
                        f"{path}: sample {k} dz key {jkey!r} is not 1..3")
                dz[j] = _matrix(sub, "re", "im", path)
        out.append(ImpedanceSample(dir=pair, z=z, dz=dz))
    return out


def save_samples(path: str, samples: Sequence[ImpedanceSample]) -> None:
    recs = []
    for s in samples:
        rec: dict[str, Any] = {
            "n": s.dir.n.tolist(),
            "m": s.dir.m.tolist(),
            "z_re": s.z.z.real.tolist(),
            "z_im": s.z.z.imag.tolist(),
        }
        if s.dz is not None:
            rec["dz"] = {str(j): {"re": np.asarray(g).real.tolist(),
                                  "im": np.asarray(g).imag.tolist()}
                         for j, g in sorted(s.dz.items())}
        recs.append(rec)
    _write_json(path, {"schema_version": SCHEMA_VERSION, "samples": recs})


def load_medium(path: str) -> Medium1D:
    """Read a 1-D medium file: model "medium1d" with a pieces list of
    {"x_end", "rho", "kappa"} in increasing x_end order."""
    doc = _read_json(path)
    _check_header(doc, path)
    if doc.get("model") != "medium1d":
        raise ParseError(f"{path}: model must be 'medium1d'")
    pieces = _need(doc, "pieces", path)
    if not isinstance(pieces, list) or not pieces:
        raise ParseError(f"{path}: pieces must be a non-empty list")
    edges = [0.0]
    rhos, kaps = [], []
    for k, pc in enumerate(pieces):
        if not isinstance(pc, dict):
            raise ParseError(f"{path}: piece {k} must be an object")
        edges.append(_float_of(_need(pc, "x_end", path), "x_end", path))
        rhos.append(_float_of(_need(pc, "rho", path), "rho", path))
        kaps.append(_float_of(_need(pc, "kappa", path), "kappa", path))
    return Medium1D(edges=np.array(edges), rho_vals=np.array(rhos),
                    kappa_vals=np.array(kaps))
