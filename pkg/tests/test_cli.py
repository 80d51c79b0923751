import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
from oracles import total_closed_form

from ilshare import analytic, cli

DATA = Path(cli.__file__).parent / "data"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads((DATA / f"{name}.schema.json").read_text(encoding="utf-8"))


def row(out, name):
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] == name:
            return parts
    raise AssertionError(f"no row {name!r}")


def test_shares_table_minimal(capsys):
    code, out, _ = run(capsys, "shares", "--alphabet", "minimal")
    assert code == 0
    assert row(out, "G")[-1].startswith("0.93771")


def test_shares_table_box_top(capsys):
    code, out, _ = run(capsys, "shares", "--alphabet", "box-top")
    assert code == 0
    assert row(out, "G")[-1].startswith("0.90519")


def test_shares_json_is_valid_and_30_digits(capsys):
    code, out, _ = run(capsys, "shares", "--alphabet", "minimal", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("shares"))
    g = next(c for c in doc["alphabets"][0]["classes"] if c["name"] == "G")
    digits = g["mu"].split(".")[1]
    assert len(digits) == 30 and g["mu"].startswith("0.93771")
    assert "generated_at" in doc


def test_shares_with_diagnostics(capsys):
    code, out, _ = run(capsys, "shares", "--alphabet", "all", "--horizon", "120",
                       "--format", "json", "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("shares"))
    assert [a["alphabet"]["name"] for a in doc["alphabets"]] == ["minimal", "box", "box-top"]
    for a in doc["alphabets"]:
        for c in a["classes"]:
            assert c["diagnostics"]["lambda_within_tail_bound"]


def test_shares_digits_and_short_horizon(capsys):
    code, out, _ = run(capsys, "shares", "--digits", "8")
    assert code == 0 and row(out, "G")[-1] == "0.93771146"
    code, _, err = run(capsys, "shares", "--horizon", "10")
    assert code == 2 and "horizon" in err
    code, _, _ = run(capsys, "shares", "--precision", "32")
    assert code == 2


def test_shares_combinator_failure_exit_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise analytic.NegativeDiscriminantError("discriminant < 0")
    monkeypatch.setattr(analytic, "run_pipeline", boom)
    code, _, err = run(capsys, "shares")
    assert code == 2 and "discriminant" in err


def test_shares_divergence_exit_3(capsys, monkeypatch):
    def diverge(*a, **k):
        raise analytic.DivergenceError("G: share deviation grew")
    monkeypatch.setattr(analytic, "diagnose_convergence", diverge)
    code, _, err = run(capsys, "shares", "--horizon", "60")
    assert code == 3 and "divergence" in err


def test_count_examples(capsys):
    code, out, _ = run(capsys, "count", "--alphabet", "minimal", "--upto", "3", "--classes", "F")
    assert code == 0 and out == "n,F\n0,1\n1,2\n2,8\n3,40\n"
    code, out, _ = run(capsys, "count", "--pqs", "1,1,1", "--upto", "5", "--classes", "F")
    assert [line.split(",")[1] for line in out.splitlines()[1:]] == ["1", "2", "6", "22", "90", "394"]
    code, out, _ = run(capsys, "count", "--alphabet", "minimal", "--upto", "0", "--classes", "N")
    assert out == "n,N\n0,1\n"


def test_count_errors(capsys):
    assert run(capsys, "count", "--alphabet", "minimal", "--upto", "3", "--classes", "Z")[0] == 2
    assert run(capsys, "count", "--pqs", "1,1,1", "--upto", "3", "--classes", "N")[0] == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["count", "--pqs", "1,x,1", "--upto", "3"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["count", "--pqs", "1,1,1", "--alphabet", "box", "--upto", "3"])


def test_count_json_and_table(capsys):
    code, out, _ = run(capsys, "count", "--alphabet", "box", "--upto", "40", "--format", "json",
                       "--no-timestamp")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("counts"))
    assert list(doc["counts"]) == ["F", "N", "A", "M", "X", "B", "L", "P", "G"]
    assert int(doc["counts"]["F"][40]) == total_closed_form(1, 2, 1, 40)
    code, out, _ = run(capsys, "count", "--upto", "2", "--format", "table", "--classes", "F,N")
    assert out.split() == ["n", "F", "N", "0", "1", "1", "1", "2", "0", "2", "8", "2"]


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--alphabet", "minimal", "--upto", "0")
    assert code == 0 and "19/19" in out
    code, out, _ = run(capsys, "verify", "--alphabet", "box", "--upto", "4", "--format", "json",
                       "--no-timestamp")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("verify"))
    assert doc["passed"] and {v["class"] for v in doc["verdicts"]} >= set("FNAMXBLPG")


def test_verify_mismatch_exit_1(capsys, monkeypatch):
    real = cli.count_system

    def tampered(system, horizon):
        table = real(system, horizon)
        counts = dict(table.counts)
        counts["L"] = [*counts["L"][:-1], counts["L"][-1] + 1]
        return type(table)(table.system, table.horizon, counts, table.total)
    monkeypatch.setattr(cli, "count_system", tampered)
    code, out, err = run(capsys, "verify", "--upto", "3")
    assert code == 1
    assert "class L n=3" in err and "FAIL L n=3" in out


def test_verify_guard_and_pqs(capsys):
    assert run(capsys, "verify", "--upto", "8", "--limit", "1000")[0] == 2
    # class commands only take preset alphabets
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--pqs", "0,2,1"])
    assert info.value.code == 2


def test_verify_seed_tables(tmp_path, capsys):
    target = tmp_path / "golden.json"
    code, _, _ = run(capsys, "verify", "--alphabet", "box", "--upto", "3", "--seed-tables",
                     str(target))
    assert code == 0
    run(capsys, "verify", "--alphabet", "minimal", "--upto", "4", "--seed-tables", str(target))
    doc = json.loads(target.read_text(encoding="utf-8"))
    jsonschema.validate(doc, schema("golden_counts"))
    assert doc["alphabets"]["box"]["upto"] == 3
    assert doc["alphabets"]["minimal"]["counts"]["N"] == [1, 0, 2, 6, 38]
    shipped = json.loads((DATA / "golden_counts.json").read_text(encoding="utf-8"))
    assert shipped["alphabets"]["minimal"]["counts"]["N"][:5] == [1, 0, 2, 6, 38]


def test_classify_examples(capsys):
    code, out, _ = run(capsys, "classify", "--alphabet", "minimal", "((⊥→⊥)▷⊥)")
    flags = dict(line.split() for line in out.splitlines()[1:10])
    assert code == 0
    assert flags["M"] == flags["B"] == flags["G"] == "true"
    _, out, _ = run(capsys, "classify", "⊥")
    flags = dict(line.split() for line in out.splitlines()[1:10])
    assert [flags[k] for k in "NLPG"] == ["true"] * 4
    _, out, _ = run(capsys, "classify", "--format", "json", "(⊥▷⊥)")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("classify"))
    m = doc["memberships"]
    assert m["A"] and m["B"] and not m["M"] and doc["patterns"] == ["⊥▷F"]


def test_classify_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "classify", "(⊥→")
    assert code == 2 and "position" in err
    assert run(capsys, "classify", "--alphabet", "minimal", "□⊥")[0] == 2


def test_asymptotics_minimal(capsys):
    code, out, _ = run(capsys, "asymptotics", "--alphabet", "minimal", "--format", "json",
                       "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("asymptotics"))
    last = doc["samples"][-1]
    assert last["n"] == 2000 and not doc["informational"] and doc["passed"]
    assert float(last["ratio_deviation"]) < 0.01 and float(last["scaled_deviation"]) < 0.01


def test_asymptotics_short_horizon_is_informational(capsys):
    code, out, _ = run(capsys, "asymptotics", "--pqs", "1,1,1", "--horizon", "100")
    assert code == 0 and "informational" in out


def test_asymptotics_divergence_exit_3(capsys, monkeypatch):
    real = analytic.total_constant
    monkeypatch.setattr(analytic, "total_constant", lambda ctx: real(ctx) * ctx.mpf("0.99"))
    code, _, err = run(capsys, "asymptotics", "--horizon", "400")
    assert code == 3 and "divergence" in err


def test_output_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["shares", "--alphabet", "box", "--format", "json", "--no-timestamp",
                         "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""
    for argv in (["count", "--alphabet", "box-top", "--upto", "30", "--format", "json", "--no-timestamp"],
                 ["asymptotics", "--horizon", "250", "--no-timestamp"],
                 ["verify", "--upto", "3", "--format", "json", "--no-timestamp"]):
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_kernel_flag(capsys):
    code, out, _ = run(capsys, "--kernel", "python", "count", "--upto", "3", "--classes", "F")
    assert code == 0 and out.endswith("3,40\n")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ilshare", "count", "--upto", "2", "--classes", "F"],
                         capture_output=True, text=True, check=True)
    assert out.stdout == "n,F\n0,1\n1,2\n2,8\n"
