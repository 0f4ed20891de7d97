import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from hermden.cache import ResultCache, canonical_target, make_key
from hermden.cli import main
from hermden.lattice import AdmissibleFunction, HermMatrix


def run(*args, **env):
    res = CliRunner().invoke(main, list(args), env={"HERMDEN_CACHE": "", **env})
    return res.exit_code, res.output


def test_alpha_examples():
    code, out = run("alpha", "--S", "[[1]]", "--T", "[[ϖ]]", "--p", "3", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == "0"
    code, out = run("alpha", "--phi", "Z:0", "--T", "[[1]]", "--p", "3", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == "4/3"


def test_parse_errors_exit_2():
    code, out = run("alpha", "--S", "[[1]]", "--T", "[[1,", "--format", "json")
    assert code == 2 and json.loads(out)["error"]["kind"] == "parse"
    code, _ = run("dden", "--phi", "Q:1", "--T", "[[1]]")
    assert code == 2


def test_budget_error_exit_2():
    code, out = run("alpha", "--S", "[[1,0],[0,1]]", "--T", "[[w^6,0],[0,w^7]]",
                    "--budget", "10", "--format", "json")
    assert code == 2 and json.loads(out)["error"]["kind"] == "budget"


def test_dden_examples():
    code, out = run("dden", "--phi", "Z:1", "--T", "[[ϖ^2]]", "--p", "3", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["value"] == "1"
    assert {"value", "provenance", "convention"} <= set(obj)
    code, out = run("dden", "--phi", "Z:0", "--T", "[[1]]", "--format", "json")
    assert code == 3 and json.loads(out)["error"]["kind"] == "representability"


def test_beta_symbolic():
    code, out = run("beta", "--n", "3", "--h", "1", "--weight", "ZZZ", "--symbolic",
                    "--format", "json")
    assert code == 0
    assert json.loads(out)["value"]["0"] == "q**3/(q**3 + 1)"


def test_ftpoly_and_csv():
    code, out = run("ftpoly", "--phi", "Z:0", "--T", "[[1]]", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert "coeffs" in header.split(",")


def test_verify_exit_codes():
    code, out = run("verify", "kr-n1", "--p", "3", "--lam-max", "8")
    assert code == 0 and "kr-n1: pass" in out
    code, out = run("verify", "y-case", "--lam-max", "2", "--format", "json")
    assert code == 0
    assert json.loads(out.splitlines()[-1])["passed"]
    code, _ = run("verify", "beta-fourier", "--format", "json")
    assert code == 1


def test_json_is_byte_identical_across_runs():
    args = ("dden", "--phi", "ZY:1", "--T", "[[1,0],[0,w]]", "--format", "json")
    assert run(*args) == run(*args)


def test_cache_transparency(tmp_path):
    path = str(tmp_path / "c.jsonl")
    # no unit pivot, so the density comes from the counting oracle
    args = ["dden", "--phi", "ZZ:0", "--T", "[[w,0],[0,w^2]]", "--format", "json"]
    plain = run(*args, "--no-cache")
    first = run(*args, "--cache", path)
    second = run(*args, "--cache", path)
    assert plain == first == second
    assert plain[0] == 0 and len(ResultCache(path)) == 1


def test_cache_via_environment(tmp_path):
    path = str(tmp_path / "env.jsonl")
    run("ftpoly", "--phi", "Z:0", "--T", "[[w]]", "--source", "oracle", HERMDEN_CACHE=path)
    assert len(ResultCache(path)) == 1


def test_corrupt_tail_is_truncated(tmp_path):
    path = tmp_path / "c.jsonl"
    c = ResultCache(str(path))
    c.put("a", ["1", "2"])
    c.put("b", ["3", "4"])
    good = path.read_bytes()
    path.write_bytes(good + b'{"key": "c", "val')
    c2 = ResultCache(str(path))
    assert len(c2) == 2 and c2.get("b") == ["3", "4"]
    assert path.read_bytes() == good


def test_corrupt_middle_line_is_skipped(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"key":"a","value":1}\ngarbage\n{"key":"b","value":2}\n')
    c = ResultCache(str(path))
    assert c.get("a") == 1 and c.get("b") == 2
    assert c.hits == 2


def test_canonical_keys(ctx3):
    phi = AdmissibleFunction("ZZ", 1)
    a = HermMatrix.from_exponents(ctx3, [0, 2])
    b = HermMatrix.from_exponents(ctx3, [2, 0])
    c = HermMatrix(ctx3, [[1, 1], [1, 10]])
    assert canonical_target(a, phi)[0] == canonical_target(b, phi)[0]
    # same Jordan exponents after diagonalization
    assert canonical_target(c, phi)[0] == canonical_target(
        HermMatrix.from_exponents(ctx3, [0, 2]), phi)[0]
    ka = make_key("x", ctx3, T=canonical_target(a, phi)[0], phi=phi.descriptor())
    kd = make_key("x", ctx3, T=canonical_target(a, phi)[0],
                  phi=AdmissibleFunction("ZZ", 2).descriptor())
    assert ka != kd


def test_mixed_weights_keep_entries(ctx3):
    phi = AdmissibleFunction("ZY", 1)
    a = HermMatrix.from_exponents(ctx3, [0, 2])
    b = HermMatrix.from_exponents(ctx3, [2, 0])
    assert canonical_target(a, phi)[0] != canonical_target(b, phi)[0]
