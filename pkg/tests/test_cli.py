"""CLI subcommands, exit codes, serialization round trips, determinism."""

import json

import pytest

from coarsek import jsonio
from coarsek.abelian import CountablyInfinite, FgAbGroup, IntMatrix
from coarsek.cli import main
from coarsek.pages import Grading, Page


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# run


def test_run_builtin_rn4(capsys):
    code, out, _ = run_cli(capsys, "run", "--builtin", "rn:4")
    assert code == 0
    assert "K_0 = Z" in out
    assert "K_1 = 0" in out
    assert "stabilized at page 1" in out
    assert "differentials assumed zero" in out


def test_run_builtin_zinf_cap(capsys):
    code, out, _ = run_cli(capsys, "run", "--builtin", "zinf:6", "--cap", "4")
    assert code == 0
    assert "K_0 = 0" in out and "K_1 = 0" in out


def test_run_builtin_wedge(capsys):
    code, out, _ = run_cli(capsys, "run", "--builtin", "wedge:5")
    assert code == 0
    assert "K_1 = Z^4" in out
    code, out, _ = run_cli(capsys, "run", "--builtin", "wedge:countable:5")
    assert code == 0
    assert "truncated at cap 5" in out


def test_run_ambiguous_extension_exit_code(capsys, tmp_path):
    payload = {
        "kind": "page",
        "period": 2,
        "cap": 1,
        "cells": [
            {"p": 0, "q": 0, "group": {"free_rank": 0, "torsion": [2]}},
            {"p": 1, "q": 1, "group": {"free_rank": 0, "torsion": [2]}},
        ],
        "d1": [],
    }
    path = tmp_path / "ambiguous.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "run", "--input", str(path))
    assert code == 2
    assert "ambiguous extension" in out
    assert "Z/2" in out


def test_run_malformed_json_reports_location(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"kind": "page", "cap": ')
    code, _, err = run_cli(capsys, "run", "--input", str(path))
    assert code == 1
    assert "line" in err and "column" in err


def test_run_unknown_builtin(capsys):
    code, _, err = run_cli(capsys, "run", "--builtin", "nonsense:3")
    assert code == 1
    assert "unknown builtin" in err


def test_run_ideal_chain_input(capsys, tmp_path):
    payload = {
        "kind": "ideal_chain",
        "length": 1,
        "default_zero": True,
        "groups": [{"p": 0, "s": 0, "group": {"free_rank": 1, "torsion": []}}],
    }
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "run", "--input", str(path))
    assert code == 0
    assert "K_0 = Z" in out


def test_run_mv_input_file_with_torsion_and_d1(capsys, tmp_path):
    payload = {
        "kind": "mv",
        "labels": [0, 1],
        "cap": 1,
        "intersections": [
            {"J": [0], "k": {"0": {"free_rank": 0, "torsion": [4]}}},
            {"J": [1], "k": {"0": {"free_rank": 1, "torsion": []}}},
            {"J": [0, 1], "k": {"0": {"free_rank": 1, "torsion": []}}},
        ],
        "d1": [{"from": [1, 0], "matrix": [[2], [3]]}],
    }
    path = tmp_path / "mv.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "run", "--input", str(path))
    assert code == 0
    # cokernel of (2, 3) into Z/4 + Z is cyclic of order 12; kernel vanishes
    assert "K_0 = Z/12" in out
    assert "K_1 = 0" in out
    assert "assumed zero" not in out


def test_run_countable_sentinel_reported(capsys, tmp_path):
    payload = {
        "kind": "mv",
        "labels": ["a"],
        "cap": 0,
        "intersections": [
            {"J": ["a"], "k": {"1": {"free_rank": "countable", "torsion": []}}}
        ],
    }
    path = tmp_path / "countable.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "run", "--input", str(path))
    assert code == 0
    assert "K_1 = Z^inf" in out


def test_run_json_format_reparses(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "run", "--builtin", "rn:3")
    assert code == 0
    payload = json.loads(out)
    assert payload["stabilized_at"] == 1
    deg1 = payload["degrees"][1]
    assert jsonio.group_from_json(deg1["assembled"]) == FgAbGroup.free(1)


def test_run_builtin_rejects_ko_period(capsys):
    code, _, err = run_cli(capsys, "--period", "8", "run", "--builtin", "rn:2")
    assert code == 1
    assert "period 2" in err


def test_run_ko_mode_page_input(capsys, tmp_path):
    # KO grading: the q column has eight slots; a lone cell at q = 5 shows
    # up in degree s = p + q = 5 mod 8 only
    payload = {
        "kind": "page",
        "period": 8,
        "cap": 0,
        "cells": [{"p": 0, "q": 5, "group": {"free_rank": 1, "torsion": []}}],
    }
    path = tmp_path / "ko.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "--period", "8", "run", "--input", str(path))
    assert code == 0
    assert "K_5 = Z" in out
    for s in range(8):
        if s != 5:
            assert f"K_{s} = 0" in out


def test_summand_order_recorded_in_output(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "run", "--builtin", "rn:2")
    assert code == 0
    payload = json.loads(out)
    orders = {(e["p"], e["q"]): e["J"] for e in payload["summand_order"]}
    assert orders[(1, 0)] == [[0, 1], [0, 2], [1, 2]]
    code, out, _ = run_cli(capsys, "--verbose", "run", "--builtin", "rn:2")
    assert "summand order (for d1 matrices):" in out
    assert "cell (1,0): {0,1}, {0,2}, {1,2}" in out


def test_report_json_fully_reparses(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "run", "--builtin", "wedge:4")
    assert code == 0
    payload = json.loads(out)
    for line in payload["degrees"]:
        if line["assembled"] is not None:
            jsonio.group_from_json(line["assembled"])
        for piece in line["pieces"]:
            jsonio.group_from_json(piece["group"])


# ---------------------------------------------------------------------------
# snf


def test_snf_table(capsys):
    code, out, _ = run_cli(capsys, "snf", "--matrix", "[[2,4],[6,8]]")
    assert code == 0
    assert "D = diag(2, 4)" in out
    assert "certificate" in out and "True" in out


def test_snf_json_and_verbose_echo(capsys):
    code, out, _ = run_cli(
        capsys, "--format", "json", "--verbose", "snf", "--matrix", "[[0]]"
    )
    assert code == 0
    assert "input:\n[[0]]" in out
    payload = json.loads(out.split("\n", 2)[2])
    assert payload["D"]["entries"] == [0]
    assert payload["certificate_ok"] is True


def test_snf_bad_matrix(capsys):
    code, _, err = run_cli(capsys, "snf", "--matrix", "[[2,")
    assert code == 1
    assert "malformed" in err


# ---------------------------------------------------------------------------
# excision


def test_excision_builtin_pass(capsys):
    code, out, _ = run_cli(
        capsys, "excision", "--builtin", "rn:2", "--metric", "dinf",
        "--radius", "3", "--box", "12",
    )
    assert code == 0
    assert "overall: PASS" in out


def test_excision_disjoint_rays_fail(capsys):
    code, out, _ = run_cli(
        capsys, "excision", "--custom", "disjoint-rays", "--radius", "6", "--s", "4"
    )
    assert code == 0
    assert "FAIL" in out and "witness" in out


def test_excision_json(capsys):
    code, out, _ = run_cli(
        capsys, "--format", "json", "excision", "--builtin", "rn:1",
        "--metric", "d1", "--radius", "2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["all_ok"] is True


def test_excision_cover_file(capsys, tmp_path):
    cover = [{"factors": ["nonpos"]}, {"factors": ["nonneg"]}]
    path = tmp_path / "cover.json"
    path.write_text(json.dumps(cover))
    code, out, _ = run_cli(
        capsys, "excision", "--cover", str(path), "--metric", "dinf",
        "--radius", "2", "--box", "8",
    )
    assert code == 0
    assert "overall: PASS" in out


# ---------------------------------------------------------------------------
# simplex


def test_simplex_verify(capsys):
    code, out, _ = run_cli(
        capsys, "simplex", "verify", "--dim", "4", "--samples", "200"
    )
    assert code == 0
    assert out.count("pass") >= 6 and "FAIL" not in out


def test_simplex_seed_after_subcommand(capsys):
    _, out1, _ = run_cli(
        capsys, "simplex", "verify", "--dim", "3", "--samples", "50", "--seed", "5"
    )
    _, out2, _ = run_cli(
        capsys, "--seed", "5", "simplex", "verify", "--dim", "3", "--samples", "50"
    )
    assert out1 == out2


def test_metric_schema_round_trip():
    from fractions import Fraction

    m = jsonio.metric_from_json({"kind": "weighted", "weights": ["1/2", 3]})
    assert m.weights == (Fraction(1, 2), Fraction(3))
    assert jsonio.metric_from_json({"kind": "d1"}).kind == "d1"


# ---------------------------------------------------------------------------
# sweep


def test_sweep_wedge(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--builtin", "wedge:countable", "--caps", "1..5"
    )
    assert code == 0
    assert "cap 5: K_0 = 0, K_1 = Z^4" in out
    assert "K_0: stable from cap 1" in out
    assert "K_1: not stable in sweep" in out


def test_sweep_zinf(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--builtin", "zinf:5", "--caps", "1,2,3"
    )
    assert code == 0
    assert "K_0: stable from cap 1" in out


# ---------------------------------------------------------------------------
# serialization round trips


def test_group_round_trip():
    for g in [FgAbGroup(2, (2, 4)), FgAbGroup.zero(), FgAbGroup(CountablyInfinite, ())]:
        assert jsonio.group_from_json(jsonio.group_to_json(g)) == g


def test_matrix_round_trip():
    m = IntMatrix.from_rows([[1, -2], [3, 4]])
    assert jsonio.matrix_from_json(jsonio.matrix_to_json(m)) == m
    assert jsonio.matrix_from_json([[1, -2], [3, 4]]) == m


def test_page_round_trip():
    page = Page.from_groups(
        1,
        Grading(2),
        {(1, 0): FgAbGroup.free(1), (0, 0): FgAbGroup.free(1)},
        d1={(1, 0): IntMatrix.from_rows([[2]])},
    )
    obj = jsonio.page_to_json(page)
    back = jsonio.page_from_json(obj)
    assert back.cap == page.cap
    assert back.cell_group(1, 0) == page.cell_group(1, 0)
    assert back.diffs[(1, 0)].matrix == page.diffs[(1, 0)].matrix


def test_schema_errors():
    with pytest.raises(jsonio.SchemaError):
        jsonio.group_from_json({"torsion": [2]})
    with pytest.raises(jsonio.SchemaError):
        jsonio.matrix_from_json({"rows": 1})
    with pytest.raises(jsonio.SchemaError):
        jsonio.group_from_json({"free_rank": 0, "torsion": [3, 4]})


# ---------------------------------------------------------------------------
# determinism


@pytest.mark.parametrize(
    "args",
    [
        ("--format", "json", "run", "--builtin", "wedge:7"),
        ("--format", "json", "--seed", "9", "simplex", "verify", "--dim", "3"),
        ("--format", "json", "sweep", "--builtin", "zinf:4", "--caps", "1..3"),
    ],
)
def test_byte_identical_reruns(capsys, args):
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
