import subprocess
import sys
from pathlib import Path

import pytest

from linsite.cli import COMMANDS, main
from linsite.selftest import CORRUPTIONS

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "workspaces" / "fixtures.lsw"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_morphism_dg(capsys):
    code, out, _ = run(capsys, "check-morphism", "FIX-DG.f")
    assert code == 0 and "LC: true" in out


def test_sheafify_h_star(capsys):
    code, out, _ = run(capsys, "--format", "block", "sheafify", "FIX-E.h_star")
    assert code == 0
    assert "  sheaf_dims = *:1" in out


def test_check_site_rejects_both_idempotents(capsys):
    code, out, _ = run(capsys, "check-site", "FIX-E-with-both-idempotent-sieves")
    assert code == 1 and "glueing" in out


def test_check_morphism_finding_exits_1(capsys):
    code, out, _ = run(capsys, "check-morphism", "P->E")
    assert code == 1 and "F: false (c = [" in out


@pytest.mark.parametrize("argv", [["frobnicate"], ["check-site"], ["check-site", "NOPE"],
                                  ["roof", "FIX-DG.f"], ["--corrupt", "identity", "check-site", "FIX-E"],
                                  ["--probes", "-1", "selftest"], ["selftest", "--corrupt", "nonsense"]])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("linsite:")


def test_lf5_wrong_direction_is_a_precondition_error(capsys):
    code, _, err = run(capsys, "lf5", "FIX-DG.id", "FIX-DG.twisted", "FIX-DG.theta")
    assert code == 2 and "precondition not met" in err


def test_workspace_file_and_human_report(capsys):
    code, out, _ = run(capsys, "-w", str(FIXTURES), "check-morphism", "FIX-DG.f")
    assert code == 0 and out.startswith("check-morphism FIX-DG.f: pass")


def test_corrupted_topology_file_is_a_finding(tmp_path, capsys):
    text = FIXTURES.read_text().replace("topology FIX-E\n  category = FIX-E.cat\n  cover * = * 1 0\n",
                                        "topology FIX-E\n  category = FIX-E.cat\n  cover * = * 1 0\n"
                                        "  cover * = * 0 1\n")
    path = tmp_path / "bad.lsw"
    path.write_text(text)
    code, out, _ = run(capsys, "-w", str(path), "check-site", "FIX-E")
    assert code == 1 and "glueing" in out


def test_corrupted_category_file_is_an_input_error(tmp_path, capsys):
    text = FIXTURES.read_text().replace("  ident * = 1\n", "  ident * = 0\n", 1)
    path = tmp_path / "bad.lsw"
    path.write_text(text)
    code, _, err = run(capsys, "-w", str(path), "check-site", "FIX-P0")
    assert code == 2 and "identity" in err


def test_selftest_clean_and_corrupted(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out
    for kind in CORRUPTIONS:
        code, out, _ = run(capsys, "selftest", "--corrupt", kind)
        assert code == 1, kind
        assert "finding:" in out


def test_block_reports_have_stable_shape(capsys):
    code, out, _ = run(capsys, "--format", "block", "roof", "id.FIX-P")
    lines = out.splitlines()
    assert lines[0] == "result roof" and lines[1] == "  subject = id.FIX-P"
    assert lines[2] == "  status = pass" and lines[-1] == "end"


@pytest.mark.parametrize("argv", [["roof", "FIX-DG.f^s"], ["lf4", "FIX-E.id", "FIX-E.id", "FIX-E.id", "FIX-E.e1"],
                                  ["b5", "FIX-E.id", "FIX-E.id", "FIX-E.e1"]])
def test_reports_are_deterministic(capsys, argv):
    first = run(capsys, "--seed", "3", "--probes", "5", "--format", "block", *argv)
    second = run(capsys, "--seed", "3", "--probes", "5", "--format", "block", *argv)
    assert first == second and first[0] == 0


def test_every_command_runs_on_builtin_fixtures(capsys):
    calls = {"check-site": ["FIX-E"], "check-morphism": ["FIX-DG.f"], "sheafify": ["FIX-P0.k"],
             "roof": ["FIX-E.e1-part"], "certify": ["FIX-DG.f"], "lf3": ["FIX-E.swap", "FIX-E.id"],
             "lf4": ["FIX-DG.twisted", "FIX-DG.id", "FIX-DG.id", "FIX-DG.theta"],
             "lf4-compare": ["FIX-E.id", "FIX-E.id", "FIX-E.id", "FIX-E.e1"],
             "lf5": ["FIX-DG.twisted", "FIX-DG.id", "FIX-DG.theta"], "b2": ["id.FIX-E"],
             "b4": ["FIX-P0.id", "FIX-P0.id", "FIX-P0.zero", "FIX-P0.one"],
             "b5": ["FIX-E.id", "FIX-E.id", "FIX-E.e1"], "selftest": []}
    assert set(calls) == set(COMMANDS)
    for cmd, args in calls.items():
        code, out, err = run(capsys, "--probes", "3", cmd, *args)
        assert code == 0, (cmd, out, err)


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "linsite.cli", "check-site", "FIX-P0"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "pass" in proc.stdout
