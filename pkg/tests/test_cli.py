import json
from importlib import resources

import jsonschema
import pytest

from conftest import FIXTURES, run_cli

GOLDEN = FIXTURES / "golden"


def schema(name):
    text = resources.files("pforge").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def check_report(doc, result_schema=None):
    jsonschema.validate(doc, schema("report"))
    if result_schema and "result" in doc:
        jsonschema.validate(doc["result"], schema(result_schema))


@pytest.mark.parametrize(
    "args, golden",
    [
        (["build-cn", "1"], "build_cn_1.json"),
        (["build-cn", "2"], "build_cn_2.json"),
        (["verify", "census", "--p", "3"], "census_p3.json"),
        (["verify", "rank1", "--n", "4", "--symbolic"], "rank1_n4.json"),
        (["verify", "theta", "--n", "2"], "theta_n2.json"),
        (["verify", "nrd", "--p", "3"], "nrd_p3.json"),
        (["verify", "interchange", "--dim", "2"], "interchange_dim2.json"),
        (["reproduce", "--suite", "remark-21", "--format", "text"], "remark21.txt"),
    ],
)
def test_golden_output(args, golden):
    proc = run_cli(*args)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == (GOLDEN / golden).read_text()


def test_build_cn_1_matrix(cli):
    code, doc, _ = cli("build-cn", "1")
    assert code == 0 and doc["ok"]
    assert doc["result"]["C_n"] == [["x1", "x2"], ["-a1*x2", "-x1"]]
    assert doc["result"]["c"] == "x1^2 - a1*x2^2"
    check_report(doc, "cn_record")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_build_cn_matches_fixture(cli, n):
    code, doc, _ = cli("build-cn", str(n))
    assert code == 0
    fixture = json.loads((FIXTURES / f"cn_n{n}.json").read_text())
    assert doc["result"] == fixture


def test_rank1_symbolic(cli):
    code, doc, _ = cli("verify", "rank1", "--n", "4", "--symbolic")
    assert code == 0
    assert doc["result"]["charpoly"] == "x^3*(x - a1*b1 - a2*b2 - a3*b3 - a4*b4)"


def test_census_counts(cli):
    code, doc, _ = cli("verify", "census", "--p", "3")
    counts = doc["result"]["counts"]
    assert code == 0
    assert [counts[k] for k in ("tuples", "off_diagonal", "multisets", "reduced_classes", "fiber_over_reduced")] == [27, 6, 10, 1, 3]


@pytest.mark.parametrize(
    "args",
    [
        ["build-cn", "0"],
        ["build-cn", "4"],
        ["verify", "census", "--p", "7"],
        ["verify", "census", "--p", "4"],
        ["verify", "interchange", "--dim", "8"],
        ["verify", "interchange", "--dim", "3"],
        ["verify", "rank1", "--n", "6", "--symbolic"],
        ["chain", "--presentation", "a1,a2,a3", "--step", "3,1", "--witness", "unused.json"],
    ],
)
def test_usage_errors_exit_1(cli, args):
    code, doc, _ = cli(*args)
    assert code == 1
    assert doc["error"]["type"] == "usage"
    check_report(doc)


def test_argparse_errors_exit_1():
    assert run_cli("verify", "nonsense").returncode == 1
    assert run_cli("reproduce", "--suite", "unknown").returncode == 1
    assert run_cli().returncode == 1


def test_cap_env_override(cli):
    code, doc, _ = cli("build-cn", "4", env={"PFORGE_CAP_N": "3"})
    assert code == 1
    assert "cap 3" in doc["error"]["message"]


def _write_witness(tmp_path, doc):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(doc))
    return str(path)


SWAP = [["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "1", "0", "0"], ["0", "0", "0", "1"]]


@pytest.mark.parametrize("step, count", [("1,2", 1), ("1,3", 3), ("2,3", 5)])
def test_chain_move_counts(cli, tmp_path, step, count):
    i, j = (int(v) for v in step.split(","))
    pres = ["a1", "a2", "a3"]
    w = _write_witness(tmp_path, {"source": [pres[i - 1], pres[j - 1]],
                                  "target": [pres[j - 1], pres[i - 1]], "matrix": SWAP})
    code, doc, _ = cli("chain", "--presentation", ",".join(pres), "--step", step, "--witness", w)
    assert code == 0, doc
    res = doc["result"]
    assert len(res["moves"]) == count
    expected = list(pres)
    expected[i - 1], expected[j - 1] = pres[j - 1], pres[i - 1]
    assert res["final_presentation"] == expected
    check_report(doc, "moves")


def test_chain_identity_witness_is_noop(cli, tmp_path):
    ident = [["1" if r == c else "0" for c in range(4)] for r in range(4)]
    w = _write_witness(tmp_path, {"target": ["a1", "a1"], "matrix": ident})
    code, doc, _ = cli("chain", "--presentation", "a1,a1,a3", "--step", "1,2", "--witness", w)
    assert code == 0
    (move,) = doc["result"]["moves"]
    assert move["before"] == move["after"]


def test_chain_bad_witness_exits_2(cli, tmp_path):
    ident = [["1" if r == c else "0" for c in range(4)] for r in range(4)]
    w = _write_witness(tmp_path, {"target": ["a3", "a1"], "matrix": ident})
    code, doc, _ = cli("chain", "--presentation", "a1,a2,a3", "--step", "1,3", "--witness", w)
    assert code == 2
    assert doc["error"]["type"] == "verification"
    assert doc["error"]["entry"] == [1, 1]
    check_report(doc)


def test_chain_unreadable_witness_exits_1(cli, tmp_path):
    code, doc, _ = cli("chain", "--presentation", "a1,a2,a3", "--step", "1,2",
                       "--witness", str(tmp_path / "missing.json"))
    assert code == 1


def test_interchange_report(cli):
    code, doc, _ = cli("verify", "interchange", "--dim", "4")
    assert code == 0
    jsonschema.validate(doc["result"]["chain"], schema("chain"))
    assert doc["result"]["roundtrip"]["nonzero"]


def test_scalar_with_base_point(cli):
    code, doc, _ = cli("verify", "scalar", "--dim", "4", "--x0", "1,0,0,1")
    assert code == 0
    assert doc["result"]["chain"]["steps"][0]["note"] == "multiply by phi(x0)"


def test_scalar_isotropic_base_point(cli):
    code, doc, _ = cli("verify", "scalar", "--dim", "2", "--x0", "0,0")
    assert code == 1


@pytest.mark.parametrize("suite", ["remark-21", "thm-43", "prop-36"])
def test_reproduce_json(cli, suite):
    code, doc, _ = cli("reproduce", "--suite", suite)
    assert code == 0
    check_report(doc, "suite")
    assert all(row["passed"] for row in doc["result"]["rows"])


def test_output_is_byte_identical_across_runs():
    args = ("verify", "nrd", "--p", "5", "--seed", "7")
    first, second = run_cli(*args), run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout


def test_seed_is_reported(cli):
    _, doc, _ = cli("verify", "nrd", "--p", "3", "--seed", "11", "--trials", "5")
    assert doc["result"]["seed"] == 11 and doc["result"]["random_trials"] == 5


def test_text_format(cli):
    proc = run_cli("verify", "census", "--p", "2", "--format", "text")
    assert proc.returncode == 0
    assert proc.stdout.startswith("verify census: ok\n")
    assert "tuples: 4" in proc.stdout
