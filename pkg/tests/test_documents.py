import copy
import json
import os

import numpy as np
import pytest

from dilation_lab.config import Options
from dilation_lab.documents import (
    DocumentError,
    collision_document,
    decode_matrix,
    dilation_document,
    encode_matrix,
    parse_collision_document,
    parse_dilation_document,
    pipeline_json,
    projector_checksum,
    validate_report,
    write_json_atomic,
)
from dilation_lab.pipeline import certify
from dilation_lab.scenarios import BUILDERS, build_example, ex3_collision_spec, run_scenario

GOLDEN = os.path.join(os.path.dirname(__file__), "..", "golden")


def export(key):
    s = build_example(key)
    return s, dilation_document(s.dilation, s.sys_rep, s.env_rep, Options(), s.name)


def test_matrix_encoding_round_trip(rng):
    m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    assert np.array_equal(decode_matrix(encode_matrix(m)), m)


def test_ragged_matrix_rejected():
    with pytest.raises(DocumentError, match="differing lengths"):
        decode_matrix([[[1, 0], [0, 0]], [[1, 0]]])


@pytest.mark.parametrize("key", list(BUILDERS))
def test_round_trip_reproduces_report_bit_identically(key):
    s, doc = export(key)
    d, sys_rep, env_rep, opts = parse_dilation_document(json.loads(json.dumps(doc)))
    assert d.kind == s.dilation.kind and d.dims == s.dilation.dims
    parsed = pipeline_json(certify(d, sys_rep, env_rep, opts))
    original = pipeline_json(run_scenario(s).pipeline)
    assert parsed == original


@pytest.mark.parametrize("mutate,match", [
    (lambda d: d.update(extra=1), "Additional properties"),
    (lambda d: d.pop("spaces"), "spaces"),
    (lambda d: d.update(spaces=[2, 3]), "vector length"),
    (lambda d: d["evolution"].update(generator=[[[0, 0]]]), "shape"),
    (lambda d: d.update(schema_version="0.9"), "schema_version"),
    (lambda d: d["symmetry"]["system"].update(generators=[[[[0, 0], [1, 0]], [[0, 0], [0, 0]]]]), "Hermitian"),
])
def test_invalid_dilation_documents(mutate, match):
    _, doc = export(1)
    bad = copy.deepcopy(doc)
    mutate(bad)
    with pytest.raises(DocumentError, match=match):
        parse_dilation_document(bad)


def test_table_document_with_mismatched_lengths():
    _, doc = export(4)
    doc["evolution"]["times"] = doc["evolution"]["times"][:-1]
    with pytest.raises(DocumentError, match="differ in length"):
        parse_dilation_document(doc)


def test_collision_document_round_trip():
    spec = ex3_collision_spec(0.05, 2.0, primed=True)
    parsed, t, j_s = parse_collision_document(collision_document(spec, t=1.0))
    assert t == 1.0 and j_s is None
    assert np.array_equal(parsed.hamiltonian, spec.hamiltonian)
    assert (parsed.gamma, parsed.dt) == (2.0, 0.05)


def test_collision_document_uncentred_term():
    doc = collision_document(ex3_collision_spec(0.1))
    psi = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2)
    doc["rho_e"] = encode_matrix(np.outer(psi, psi))
    with pytest.raises(DocumentError, match="must vanish"):
        parse_collision_document(doc)


def test_projector_checksum_sees_permutations():
    p = np.diag([1.0, 0.0, 0.0])
    q = np.diag([0.0, 1.0, 0.0])
    assert projector_checksum(p) != projector_checksum(q)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    path = tmp_path / "out.json"
    write_json_atomic(str(path), {"a": 1})
    write_json_atomic(str(path), {"a": 2})
    assert json.loads(path.read_text()) == {"a": 2}
    assert os.listdir(tmp_path) == ["out.json"]


def test_atomic_write_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        write_json_atomic(str(tmp_path / "x.json"), {"a": float("nan")})
    assert os.listdir(tmp_path) == []


def test_report_schema_rejects_missing_fields():
    with pytest.raises(DocumentError):
        validate_report({"schema_version": "1.0", "command": "verify"})


@pytest.mark.parametrize("key", list(BUILDERS))
def test_golden_documents_reproduce_golden_reports(key):
    with open(os.path.join(GOLDEN, f"ex{key}.json")) as fh:
        d, sys_rep, env_rep, opts = parse_dilation_document(json.load(fh))
    with open(os.path.join(GOLDEN, "reports", f"ex{key}.json")) as fh:
        golden = json.load(fh)
    got = pipeline_json(certify(d, sys_rep, env_rep, opts))
    assert [c["name"] for c in got["certificates"]] == [c["name"] for c in golden["certificates"]]
    for a, b in zip(got["certificates"], golden["certificates"]):
        assert a["passed"] == b["passed"], a["name"]
        assert a["residual"] == pytest.approx(b["residual"], abs=1e-11), a["name"]
    assert {k: v for k, v in got["values"].items() if isinstance(v, (int, bool))} == \
        {k: v for k, v in golden["values"].items() if isinstance(v, (int, bool))}
