import json
import subprocess
import sys

import pytest

from ramsey.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def test_fr_example(capsys):
    code, out, _ = run(capsys, "fr", "--seq", "[1,2,4]", "--sig", "plus")
    assert code == 0 and out["fr"] == [1, 2, 3, 4, 5, 6, 7] and out["version"] == "1"


def test_reduction_example(capsys):
    code, out, _ = run(capsys, "reduction", "--a", "[5]", "--b", "[1,2]", "--sig", "plus")
    assert code == 0 and out["reduces"] is False


def test_reduction_with_witness(capsys):
    code, out, _ = run(capsys, "reduction", "--a", "[3,12]", "--b", "[1,2,4,8]", "--sig", "plus")
    assert code == 0 and out["reduces"] is True
    assert [blk["indices"] for blk in out["witness"]] == [[0, 1], [2, 3]]
    assert out["witness"][0]["term"] == ["plus", ["id"], ["id"]]


def test_uf_eval_pushforward(capsys):
    expr = json.dumps({"pushforward": {"op": "plus", "args": [{"principal": 2}, {"principal": 3}]}})
    code, out, _ = run(capsys, "uf", "eval", "--expr", expr)
    assert code == 0
    assert (out["kind"], out["point"]) == ("principal", 5)


def test_uf_eval_member(capsys):
    expr = json.dumps({"member": {"uf": {"tensor": [{"cofinite": {}}, {"principal": 2}]},
                                  "set": {"dim": 2, "mode": "finite", "support": [[1, 2]]}}})
    code, out, _ = run(capsys, "uf", "eval", "--expr", expr)
    assert code == 0 and out["member"] is False


def test_search_parity(capsys):
    code, out, _ = run(capsys, "search", "--sig", "plus", "--seed-seq", "naturals", "--coloring", "parity",
                       "--length", "4", "--bound", "200")
    assert code == 0 and out["status"] == "found" and out["verified"] is True


def test_search_budget_exit_code(capsys):
    col = json.dumps({"kind": "classes", "members": [5], "target": 0})
    code, out, _ = run(capsys, "search", "--sig", "plus", "--seed-seq", "naturals", "--coloring", col,
                       "--length", "3", "--bound", "200", "--node-limit", "3")
    assert code == 1 and out["status"] == "budget"


def test_search_exhausted_is_definitive(capsys):
    col = json.dumps({"kind": "classes", "members": [5], "target": 0})
    code, out, _ = run(capsys, "search", "--sig", "plus", "--seed-seq", "naturals", "--coloring", col,
                       "--length", "3", "--bound", "200")
    assert code == 0 and out["status"] == "exhausted"


def test_galvin_example(capsys):
    code, out, _ = run(capsys, "galvin", "--uf", "cofinite", "--op", "plus", "--avoid", "0..9", "--length", "8")
    assert code == 0 and out["verified"] and out["values_checked"] == 255
    assert min(out["sequence"]) >= 10


def test_probe_degeneracy_zero(capsys):
    code, out, _ = run(capsys, "probe-degeneracy", "--sig", "zero", "--seed-seq", "naturals", "--length", "4",
                       "--bound", "50")
    assert code == 0 and out["fr_size"] == 1


def test_input_error_exit_code(capsys):
    code, out, err = run(capsys, "fr", "--seq", "[1,2]", "--sig", "nosuchop")
    assert code == 2 and out["kind"] == "InputError" and "nosuchop" in err


def test_unknown_flag_exits_2():
    proc = subprocess.run([sys.executable, "-m", "ramsey", "fr", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_admissible_negative_control(capsys):
    code, out, _ = run(capsys, "admissible-check", "--family", "closure", "--chain", "powers2", "--sig", "plus",
                       "--chain-depth", "2", "--exclude", "cyc", "--samples", "64")
    assert out["passed"] is False


def test_chain_member(capsys):
    code, out, _ = run(capsys, "uf", "chain-member", "--seq", "powers2", "--sig", "plus", "--chain-depth", "4",
                       "--set", json.dumps({"gen": "G3"}))
    assert code == 0 and out["member"] is True


def test_manifest_rerun_is_byte_identical(tmp_path, capsys):
    manifest = tmp_path / "m.json"
    argv = ["admissible-check", "--family", "finite-cofinite", "--sig", "plus", "--samples", "50", "--seed", "11",
            f"--manifest={manifest}"]
    main(argv)
    first = capsys.readouterr().out
    m = json.loads(manifest.read_text())
    assert m["seed"] == 11 and m["command"] == argv[:-1] and m["version"] == "1"
    main(m["command"])
    second = capsys.readouterr().out
    assert first == second
    import hashlib
    assert hashlib.sha256(second.rstrip("\n").encode()).hexdigest() == m["results_digest"]


def test_seed_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("RAMSEY_SEED", "5")
    main(["admissible-check", "--family", "finite-cofinite", "--sig", "plus", "--samples", "20"])
    a = capsys.readouterr().out
    main(["admissible-check", "--family", "finite-cofinite", "--sig", "plus", "--samples", "20", "--seed", "5"])
    assert capsys.readouterr().out == a


@pytest.mark.parametrize("argv", [
    ["closure", "--sig", "plus", "--depth", "0", "--dims", "1"],
    ["frfield", "--seq", "powers2", "--sig", "plus", "--depth", "0"],
])
def test_other_subcommands_run(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out["version"] == "1"
