"""JSON documents for dilations and collision models, and report serialization.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists. Documents are validated against strict schemas (unknown fields are
rejected) before any dimension checks.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from .collision import CollisionSpec
from .config import Options
from .krylov import KrylovResult
from .maps import Dilation, UnitaryFamily
from .pipeline import PipelineResult, evaluation_times
from .symmetry import SymmetryCertificate, SymmetryRep

SCHEMA_VERSION = "1.0"


class DocumentError(ValueError):
    """A document failed schema or consistency validation."""


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("dilation_lab").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: Any, schema: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(schema))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DocumentError(f"{schema}: {where}: {exc.message}") from None


def encode_vector(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [encode_vector(row) for row in m]


def decode_vector(data: list) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=complex)


def decode_matrix(data: list, shape: tuple[int, int] | None = None, what: str = "matrix") -> np.ndarray:
    widths = {len(row) for row in data}
    if len(widths) != 1:
        raise DocumentError(f"{what}: rows have differing lengths {sorted(widths)}")
    m = np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
    if shape is not None and m.shape != shape:
        raise DocumentError(f"{what}: shape {m.shape}, expected {shape}")
    return m


def _encode_rep(rep: SymmetryRep) -> dict:
    out: dict[str, Any] = {}
    if rep.generators:
        out["generators"] = [encode_matrix(j) for j in rep.generators]
    if rep.elements:
        out["elements"] = [{"label": label, "unitary": encode_matrix(u)} for label, u in rep.elements]
    return out


def _decode_rep(data: dict, d: int, what: str) -> SymmetryRep:
    gens = tuple(decode_matrix(j, (d, d), f"{what} generator") for j in data.get("generators", []))
    els = tuple((e["label"], decode_matrix(e["unitary"], (d, d), f"{what} element {e['label']}"))
                for e in data.get("elements", []))
    try:
        return SymmetryRep(d, gens, els)
    except ValueError as exc:
        raise DocumentError(f"{what}: {exc}") from None


def dilation_document(d: Dilation, sys_rep: SymmetryRep, env_rep: SymmetryRep | None = None,
                      options: Options | None = None, name: str | None = None) -> dict:
    """Serialize a dilation; callable families are tabulated on the option time grid."""
    options = options or Options()
    fam = d.evolution
    if fam.form == "generator":
        evo = {"kind": "time_independent_hamiltonian", "generator": encode_matrix(fam.generator)}
    elif fam.form == "constant":
        evo = {"kind": "fixed_unitary", "unitary": encode_matrix(fam.unitary)}
    else:
        times = evaluation_times(d, options)
        evo = {"kind": "time_dependent_hamiltonian" if fam.form == "generator_fn" else "explicit_unitary_family",
               "times": [float(t) for t in times], "unitaries": [encode_matrix(fam.at(t)) for t in times]}
    state = {"vector": encode_vector(d.env_state)} if d.is_pure else {"matrix": encode_matrix(d.env_state)}
    sym = {"system": _encode_rep(sys_rep)}
    if env_rep is not None:
        sym["environment"] = _encode_rep(env_rep)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": name if name is not None else d.name,
        "spaces": list(d.dims),
        "env_state": state,
        "evolution": evo,
        "symmetry": sym,
        "options": {
            "tol": options.tol,
            "rank_tol": options.rank_tol,
            "time_grid": [float(t) for t in options.time_grid],
            "g_samples": [float(g) for g in options.g_samples],
        },
    }
    validate(doc, "dilation_document")
    return doc


def parse_dilation_document(doc: Any) -> tuple[Dilation, SymmetryRep, SymmetryRep | None, Options]:
    validate(doc, "dilation_document")
    dims = tuple(doc["spaces"])
    d_s = dims[0]
    d_e = int(np.prod(dims[1:]))
    n = d_s * d_e
    st = doc["env_state"]
    if "vector" in st:
        state = decode_vector(st["vector"])
        if state.size != d_e:
            raise DocumentError(f"env_state: vector length {state.size}, expected {d_e}")
    else:
        state = decode_matrix(st["matrix"], (d_e, d_e), "env_state")
    evo = doc["evolution"]
    try:
        if evo["kind"] == "time_independent_hamiltonian":
            fam = UnitaryFamily.from_generator(decode_matrix(evo["generator"], (n, n), "generator"))
        elif evo["kind"] == "fixed_unitary":
            fam = UnitaryFamily.constant(decode_matrix(evo["unitary"], (n, n), "unitary"))
        else:
            if len(evo["times"]) != len(evo["unitaries"]):
                raise DocumentError("evolution: times and unitaries differ in length")
            fam = UnitaryFamily.from_table(evo["times"], [decode_matrix(u, (n, n), f"unitary {k}")
                                                          for k, u in enumerate(evo["unitaries"])])
        dil = Dilation(dims, state, fam, doc.get("name", ""))
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(f"evolution: {exc}") from None
    sym = doc["symmetry"]
    sys_rep = _decode_rep(sym["system"], d_s, "symmetry.system")
    env_rep = _decode_rep(sym["environment"], d_e, "symmetry.environment") if "environment" in sym else None
    opts = Options(**{k: v for k, v in doc.get("options", {}).items()})
    return dil, sys_rep, env_rep, opts


def collision_document(spec: CollisionSpec, t: float | None = None, j_s: np.ndarray | None = None,
                       name: str = "") -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "collision",
        "name": name,
        "h_terms": [{"system": encode_matrix(a), "environment": encode_matrix(b)} for a, b in spec.h_terms],
        "rho_e": encode_matrix(spec.rho_e),
        "gamma": spec.gamma,
        "dt": spec.dt,
    }
    if t is not None:
        doc["t"] = float(t)
    if j_s is not None:
        doc["j_s"] = encode_matrix(j_s)
    validate(doc, "collision_document")
    return doc


def parse_collision_document(doc: Any) -> tuple[CollisionSpec, float | None, np.ndarray | None]:
    validate(doc, "collision_document")
    terms = [(decode_matrix(t["system"], what="system term"), decode_matrix(t["environment"], what="environment term"))
             for t in doc["h_terms"]]
    rho = decode_matrix(doc["rho_e"], what="rho_e")
    try:
        spec = CollisionSpec(tuple(terms), rho, doc["gamma"], doc["dt"])
    except ValueError as exc:
        raise DocumentError(f"collision: {exc}") from None
    j_s = decode_matrix(doc["j_s"], (spec.d_s, spec.d_s), "j_s") if "j_s" in doc else None
    return spec, doc.get("t"), j_s


def read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None


def write_json_atomic(path: str, data: Any) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=1, allow_nan=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------------ reports

def _finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in report")
    return x


def certificate_json(name: str, cert: SymmetryCertificate) -> dict:
    details = {k: _finite(v) for k, v in cert.details.items() if isinstance(v, (int, float, np.floating))}
    return {
        "name": name,
        "kind": cert.kind,
        "residual": _finite(cert.residual),
        "tolerance": _finite(cert.tolerance),
        "passed": bool(cert.passed),
        "subspace_rank": None if cert.subspace_rank is None else int(cert.subspace_rank),
        "evidence": [{"label": k, "residual": _finite(v)} for k, v in cert.evidence.items()],
        "details": details,
    }


def projector_checksum(p: np.ndarray) -> float:
    """Position-weighted sum of ``|P_ij|``; changes under any permutation of the support."""
    w = np.arange(1, p.size + 1, dtype=float).reshape(p.shape)
    return float(np.sum(np.abs(p) * w))


def krylov_json(k: KrylovResult) -> dict:
    return {
        "rank": k.rank,
        "perp_rank": k.perp_rank,
        "order_cap": k.order_cap,
        "stabilized": bool(k.stabilized),
        "seed_dims": [{"seed": s, "dim": int(n)} for s, n in k.seed_dims],
        "basis": encode_matrix(k.subspace.basis),
        "projector_checksum": projector_checksum(k.projector),
    }


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return encode_matrix(value) if value.ndim == 2 else encode_vector(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _finite(value)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def pipeline_json(res: PipelineResult) -> dict:
    out = {
        "certificates": [certificate_json(k, c) for k, c in res.certificates.items()],
        "values": {k: _plain(v) for k, v in res.values.items()},
        "j_e": None if res.j_e is None else encode_matrix(res.j_e),
    }
    if res.krylov:
        out["krylov"] = {k: krylov_json(v) for k, v in res.krylov.items()}
    return out


def check_json(c) -> dict:
    return {
        "name": c.name,
        "observed": _plain(c.observed),
        "expected": _plain(c.expected),
        "provenance": c.provenance,
        "ok": None if c.ok is None else bool(c.ok),
        "residual": None if c.residual is None else _finite(c.residual),
        "tolerance": None if c.tolerance is None else _finite(c.tolerance),
    }


def validate_report(report: dict) -> None:
    validate(report, "report")
