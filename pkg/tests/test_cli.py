import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpfgl.cli import (
    ResultDocument,
    SpecSyntaxError,
    encode_series,
    export,
    main,
    parse_document,
    parse_field_spec,
    verify_document,
)
from tpfgl.coeff import PrimeParams
from tpfgl.errors import ValidationError
from tpfgl.fgl import FormalGroupLaw
from tpfgl.series import BaseRing


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_parse_sqrt2():
    spec = parse_field_spec("p=2 f=1 e=2 theta=[-1]")
    assert (spec.p, spec.f, spec.e, spec.theta) == (2, 1, 2, (-1,))
    assert spec.field().describe() == "p=2 f=1 e=2 E(z)=14 + z^2*1"


def test_parse_optional_keys_and_layout():
    spec = parse_field_spec("p=2 f=2\n  m=[1,1,1]\n  e=1 theta=[ -1 ] D=6")
    assert spec.m == (1, 1, 1) and spec.D == 6
    assert spec.precision().D == 6


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("p=2 e=2 theta=[-1, x]", 1, 20),
        ("p=2 e=2\nzeta=3 theta=[1]", 2, 1),
        ("p=2 e=2 e=3 theta=[1]", 1, 9),
        ("p=2 theta=[1] e=[2]", 1, 17),
        ("p=2 e=2 theta=[1]junk", 1, 18),
        ("p=2 e=2", 1, 8),
    ],
)
def test_syntax_errors_carry_location(text, line, column):
    with pytest.raises(SpecSyntaxError) as info:
        parse_field_spec(text)
    assert (info.value.line, info.value.column) == (line, column)


@pytest.mark.parametrize(
    "text, message",
    [
        ("p=4 f=1 e=2 theta=[-1]", "not prime"),
        ("p=2 f=1 e=2 theta=[-2]", "not a unit"),
        ("p=3 e=1 theta=[1,1]", "must be < e"),
        ("p=5 f=2 m=[1,0,1] e=1 theta=[1]", "reducible"),
        ("p=5 e=1 theta=[1] D=3", "at least p"),
    ],
)
def test_semantic_errors(text, message):
    with pytest.raises(ValidationError, match=message):
        parse_field_spec(text)


def test_exit_codes_for_usage_errors():
    assert run("validate", "p=4 e=1 theta=[1]")[0] == 2
    assert run("validate", "p=2 e=1 theta=[1")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("validate", "p=2 e=1 theta=[1]")[0] == 0


def test_fgl_reports_leading_term():
    code, out = run("fgl", "p=3 e=1 theta=[-1]")
    assert code == 0
    assert "height 1, leading coefficient z^1*1" in out
    code, out = run("fgl", "p=3 e=1 theta=[-1]", "--target", "tp", "--json")
    doc = parse_document(out)
    assert doc.reports["height"] == "height 1, leading coefficient z^3*1"
    assert [[1, 0], "1"] in doc.series["G"]


def test_pseries_and_phi():
    code, out = run("pseries", "p=2 e=2 theta=[-1]", "--json")
    doc = parse_document(out)
    assert doc.series["[2]"][-1] == [[2], "z^2*1"]
    code, out = run("phi", "p=3 e=1 theta=[-1]", "--json")
    doc = parse_document(out)
    assert doc.elements["phi(t)"] == [[[1], "78 + z^3*1"]]
    assert doc.elements["v1_tc"] == [[[2, 0], "78 + z^1*1"]]


def test_additive_law_export_format():
    law = FormalGroupLaw.additive(BaseRing.truncated(PrimeParams(2), 0), 3)
    doc = ResultDocument(command="example", series={"F": encode_series(law.F)})
    data = json.loads(export(doc))
    assert data["series"]["F"] == [[[1, 0], "1"], [[0, 1], "1"]]
    assert data["schema_version"] == 1


def test_verify_single_field_and_corrupt_flag():
    code, out = run("verify", "p=3 e=1 theta=[-1]")
    assert code == 0 and "FAIL" not in out
    code, out = run("verify", "p=3 e=1 theta=[-1]", "--corrupt")
    assert code == 1
    assert "FAIL  axioms for F (corrupted fixture)  (fail: F(X,Y) = F(Y,X)" in out


def test_export_is_deterministic_and_round_trips():
    specs = [("Q_2", parse_field_spec("p=2 e=1 theta=[-1]"))]
    first = export(verify_document(specs, with_series=True))
    second = export(verify_document(specs, with_series=True))
    assert first == second
    assert export(parse_document(first)) == first


@settings(max_examples=4, deadline=None)
@given(st.sampled_from(["p=2 e=1 theta=[-1]", "p=3 e=1 theta=[-1]", "p=2 f=2 e=1 theta=[1]"]), st.integers(0, 10**6))
def test_round_trip_property(text, seed):
    doc = verify_document([(text, parse_field_spec(text))], seed=seed)
    assert parse_document(export(doc)) == doc


def test_export_writes_file(tmp_path):
    target = tmp_path / "out.json"
    code, _ = run("export", "p=2 e=1 theta=[-1]", "-o", str(target))
    assert code == 0
    doc = parse_document(target.read_bytes())
    assert doc.command == "verify" and doc.passed
    assert "series" in doc.fields[0]


def test_spec_file_and_stdin(tmp_path):
    path = tmp_path / "field.txt"
    path.write_text("p=2 e=2 theta=[-1]\n", encoding="utf-8")
    assert run("validate", "--spec-file", str(path))[0] == 0
    proc = subprocess.run(
        [sys.executable, "-m", "tpfgl", "validate", "-"], input="p=3 e=1 theta=[-1]", capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("ok:")


def test_module_entry_point_suite():
    proc = subprocess.run([sys.executable, "-m", "tpfgl", "verify", "--suite"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("== ") == 7
