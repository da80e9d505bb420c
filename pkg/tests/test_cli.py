import io
import json
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from tsirkit.cli import main

TSIRELSON = '{"f0":"S0","pairs":[{"theta":"1/2","family":"S(1)"}]}'


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_member_command():
    code, out, _ = run_cli("member", "S(1)", "{1,2}")
    assert code == 0
    assert json.loads(out) == {"family": "S(1)", "member": False, "set": [1, 2]}


def test_norm_command_golden():
    code, out, _ = run_cli("norm", "--spec", TSIRELSON, "--x", '[[3,"1"],[4,"1"],[5,"1"],[6,"1"]]')
    assert code == 0
    assert json.loads(out)["value"] == "3/2"


def test_iota_command():
    code, out, _ = run_cli("iota", "S(2)")
    assert code == 0
    data = json.loads(out)
    assert data["lower"] == "w^2" and data["exact"] is True


def test_admissible_command():
    code, out, _ = run_cli("admissible", "S(1)", "{2};{4,5}")
    assert json.loads(out)["admissible"] is True
    code, out, _ = run_cli("admissible", "S(1)", "{1};{2}")
    assert json.loads(out)["admissible"] is False


def test_certify_verify_round_trip():
    code, cert, _ = run_cli("certify", "norm", "--spec", TSIRELSON, "--x", '[[2,"1"],[3,"1"]]')
    assert code == 0
    code, out, _ = run_cli("verify", "--certificate", cert)
    assert code == 0 and json.loads(out)["ok"] is True


def test_verify_detects_tampering():
    _, cert, _ = run_cli("certify", "norm", "--spec", TSIRELSON, "--x", '[[2,"1"],[3,"1"]]')
    data = json.loads(cert)
    data["value"] = "7"
    code, out, _ = run_cli("verify", "--certificate", json.dumps(data))
    assert code == 1 and json.loads(out)["ok"] is False


def test_p8_and_verify():
    code, envelope, _ = run_cli("p8", "--spec", TSIRELSON, "--n", "1", "--m", "1", "--horizon", "8")
    assert code == 0
    code, out, _ = run_cli("verify", "--certificate", envelope)
    assert code == 0 and json.loads(out)["ok"] is True


def test_lb1_and_verify():
    code, envelope, _ = run_cli("lb1", "--spec", TSIRELSON, "--m", "1", "--eps", "1")
    assert code == 0
    code, out, _ = run_cli("verify", "--certificate", envelope)
    assert code == 0 and json.loads(out)["ok"] is True


def test_gamma_command():
    spec4 = json.dumps({
        "f0": "S0",
        "pairs": [{"theta": f"1/{2**n}", "family": f"S({n})"} for n in range(1, 5)],
    })
    code, out, _ = run_cli(
        "gamma", "--spec", spec4, "--eps", "1", "--m", "3",
        "--iotas", "w,w,w^2,w^3,w^4",
    )
    assert code == 0 and json.loads(out)["gamma"] == "3"
    # indices derived from the spec itself: alpha_0 = iota(S0) = 1
    code, out, _ = run_cli("gamma", "--spec", spec4, "--eps", "1", "--m", "3")
    assert code == 0 and json.loads(out)["gamma"] == "2"


def test_order_command():
    tree = '{"vectors":[[[3,"1"]],[[7,"1"]]],"nodes":[[0],[0,1]]}'
    code, out, _ = run_cli("order", "--tree", tree)
    assert code == 0 and json.loads(out)["order"] == "2"


def test_average_command():
    code, out, _ = run_cli("average", "--order", "1", "--from", "4")
    assert code == 0
    data = json.loads(out)
    assert data["x"] == [[4, "1/4"], [5, "1/4"], [6, "1/4"], [7, "1/4"]]


def test_enumerate_command():
    code, out, _ = run_cli("enumerate", "S(1)", "3")
    assert code == 0
    assert json.loads(out)["count"] == 5


def test_usage_errors_exit_2():
    code, _, err = run_cli("member", "S(1", "{1}")
    assert code == 2
    assert json.loads(err)["error"]["type"] == "usage"
    code, _, _ = run_cli("norm", "--spec", "{bad json", "--x", "[]")
    assert code == 2


def test_resource_errors_exit_3():
    code, _, err = run_cli("enumerate", "S(1)", "40")
    assert code == 3
    assert json.loads(err)["error"]["type"] == "resource"


def test_table_output():
    code, out, _ = run_cli("--output", "table", "iota", "S(2)")
    assert code == 0
    assert "lower\tw^2" in out


def test_growth_flag():
    code, out, _ = run_cli("--growth", "slow=1,1,2,2", "member", "S(1;slow)", "{2,3}")
    assert code == 0
    assert json.loads(out)["member"] is False   # g(2) = 1 < |{2,3}|


def test_variant_flag():
    code, out, _ = run_cli("--variant", "card", "member", "S(w)", "{3,4,5}")
    assert code == 0
    assert json.loads(out)["member"] is True


def test_seeded_suite_single_criterion_deterministic():
    runs = []
    for _ in range(2):
        code, out, _ = run_cli("--seed", "7", "suite", "--only", "2")
        runs.append((code, out))
    assert runs[0] == runs[1]
    assert runs[0][0] == 0


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tsirkit.cli", "iota", "A(3)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lower"] == "3"
