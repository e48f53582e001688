"""End-to-end tests for the command-line interface.

Exit-code contract: 0 success, 1 validation failure, 2 numerical
failure, 3 usage error.
"""

import csv
import io
import json
from contextlib import redirect_stderr, redirect_stdout

import click
import pytest

from qwscatter.cli import (
    main,
    parse_complex_value,
    parse_eps_grid,
    parse_split,
)

UNITARITY_CAP = 1e-8


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def csv_rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, list(reader)


def write_model(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def self_loop_document(coin_rows):
    return {
        "vertices": ["u"],
        "arcs": [{"from": "u", "to": "u"}],
        "in_tails": [{"index": 1, "at_vertex": "u"}],
        "out_tails": [{"index": 1, "at_vertex": "u"}],
        "coins": {"u": coin_rows},
    }


# ---------------------------------------------------------------- validate


def test_validate_builtin_passes():
    code, out, _ = run_cli(["validate", "--model", "ms"])
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    names = [c["name"] for c in report["checks"]]
    assert names == ["graph_balance", "coin_unitarity", "free_routing"]
    routing = report["checks"][2]
    assert routing["steps"] == [2, 2]
    assert routing["phases"] == [[1.0, 0.0], [1.0, 0.0]]


def test_validate_reports_unbalanced_graph(tmp_path):
    doc = {
        "vertices": ["a", "b"],
        "arcs": [{"from": "a", "to": "b"}],
        "in_tails": [{"index": 1, "at_vertex": "a"}],
        "out_tails": [{"index": 1, "at_vertex": "a"}],
        "coins": {"a": [["1"]], "b": [["1"]]},
    }
    code, out, _ = run_cli(["validate", "--model", write_model(tmp_path, "bad.json", doc)])
    assert code == 1
    report = json.loads(out)
    assert not report["pass"]
    assert report["errors"][0]["error"] == "ModelFileError"
    assert "in-degree" in report["errors"][0]["message"]
    # later checks are skipped once the graph fails to build
    assert [c["pass"] for c in report["checks"]] == [False]


def test_validate_flags_nonunitary_coin_at_eps(tmp_path):
    doc = self_loop_document([["1", "eps"], ["0", "1"]])
    path = write_model(tmp_path, "shear.json", doc)
    code, out, _ = run_cli(["validate", "--model", path, "--eps", "0.5"])
    assert code == 1
    report = json.loads(out)
    failed = {c["name"] for c in report["checks"] if not c["pass"]}
    assert "coin_unitarity" in failed
    # the same family is fine at eps = 0
    code, _, _ = run_cli(["validate", "--model", path, "--eps", "0"])
    assert code == 0


def test_validate_flags_nondeterministic_routing(tmp_path):
    s = "0.70710678118654752"
    doc = self_loop_document([[s, s], [f"-{s}", s]])
    code, out, _ = run_cli(
        ["validate", "--model", write_model(tmp_path, "spread.json", doc)]
    )
    assert code == 1
    report = json.loads(out)
    assert report["errors"][0]["error"] == "NotDeterministic"


# -------------------------------------------------------------- resonances


def test_resonances_hidden_pair():
    code, out, _ = run_cli(["resonances", "--model", "ms", "--eps", "0.5"])
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["eps", "re", "im", "multiplicity", "on_circle"]
    values = [complex(float(r[1]), float(r[2])) for r in rows]
    hidden = 0.70710678118654752j
    assert min(abs(v - hidden) for v in values) <= 1e-10
    assert min(abs(v + hidden) for v in values) <= 1e-10
    zero = [r for r in rows if abs(complex(float(r[1]), float(r[2]))) < 1e-9]
    assert len(zero) == 1 and zero[0][3] == "2" and zero[0][4] == "false"
    circle = [r for r in rows if r[4] == "true"]
    assert len(circle) == 2


def test_resonances_cycle_detached_ring():
    code, out, _ = run_cli(
        ["resonances", "--model", "cycle", "--N", "4", "--c", "1", "--eps", "0.6"]
    )
    assert code == 0
    _, rows = csv_rows(out)
    values = [complex(float(r[1]), float(r[2])) for r in rows]
    for target in (0.8, -0.8, 0.8j, -0.8j):
        assert min(abs(v - target) for v in values) <= 1e-10
    assert all(r[3] == "1" for r in rows)
    assert all(r[4] == "false" for r in rows)


def test_resonances_output_is_deterministic(tmp_path):
    argv = [
        "resonances",
        "--model",
        "cycle",
        "--N",
        "3",
        "--c",
        "0.9,0.4,0.7",
        "--eps-grid",
        "0.05:0.2:3",
    ]
    first = run_cli(argv)
    second = run_cli(argv)
    assert first[0] == 0
    assert first[1] == second[1]
    _, rows = csv_rows(first[1])
    eps_column = [float(r[0]) for r in rows]
    assert eps_column == sorted(eps_column)


def test_resonances_option_conflicts():
    code, _, _ = run_cli(
        ["resonances", "--model", "ms", "--eps", "0.1", "--eps-grid", "0.1:0.2:2"]
    )
    assert code == 3


def test_empty_eps_grid_is_usage_error():
    code, _, _ = run_cli(
        ["resonances", "--model", "ms", "--eps-grid", "0.1:0.2:0"]
    )
    assert code == 3


# ----------------------------------------------------------------- smatrix


def test_smatrix_single_point():
    code, out, _ = run_cli(
        ["smatrix", "--model", "ms", "--eps", "0.3", "--z", "i"]
    )
    assert code == 0
    header, rows = csv_rows(out)
    assert header == [
        "eps", "z_re", "z_im", "row", "col", "value_re", "value_im",
        "unitarity_residual",
    ]
    assert len(rows) == 4
    entries = {
        (r[3], r[4]): complex(float(r[5]), float(r[6])) for r in rows
    }
    # at z = +i the matrix swaps the channels with a -i phase
    assert abs(entries[("1", "2")] - (-1j)) <= 1e-10
    assert abs(entries[("2", "1")] - (-1j)) <= 1e-10
    assert abs(entries[("1", "1")]) <= 1e-10
    assert float(rows[0][7]) <= UNITARITY_CAP


def test_smatrix_check_routes_passes():
    code, _, _ = run_cli(
        [
            "smatrix", "--model", "cycle", "--N", "3", "--c", "0.9,0.4,0.7",
            "--eps", "0.25", "--z-grid", "8", "--check-routes",
        ]
    )
    assert code == 0


def test_smatrix_grid_is_deterministic():
    argv = ["smatrix", "--model", "ms", "--eps", "0.3", "--z-grid", "6"]
    first = run_cli(argv)
    second = run_cli(argv)
    assert first[0] == 0
    assert first[1] == second[1]
    _, rows = csv_rows(first[1])
    assert len(rows) == 6 * 4
    # points walk the circle by increasing angle, entries row-major
    assert [r[3] + r[4] for r in rows[:4]] == ["11", "12", "21", "22"]


def test_smatrix_rejects_center():
    code, _, err = run_cli(
        ["smatrix", "--model", "ms", "--eps", "0.3", "--z", "0"]
    )
    assert code == 2
    assert json.loads(err)["error"]["type"] == "PoleHit"


def test_smatrix_rejects_resonance_hit():
    code, _, err = run_cli(
        [
            "smatrix", "--model", "ms", "--eps", "0.3",
            "--z", "0+0.9055385138137417i",
        ]
    )
    assert code == 2
    assert json.loads(err)["error"]["type"] == "AtInteriorResonance"


def test_smatrix_wants_exactly_one_z():
    code, _, _ = run_cli(["smatrix", "--model", "ms"])
    assert code == 3
    code, _, _ = run_cli(
        ["smatrix", "--model", "ms", "--z", "i", "--z-grid", "4"]
    )
    assert code == 3


def test_smatrix_json_format():
    code, out, _ = run_cli(
        ["smatrix", "--model", "ms", "--eps", "0.3", "--z", "i",
         "--format", "json"]
    )
    assert code == 0
    document = json.loads(out)
    assert document["columns"][:3] == ["eps", "z_re", "z_im"]
    assert len(document["rows"]) == 4


# ------------------------------------------------------------------ sweeps


def test_sweep_discrepancy_crossing_first_order():
    code, out, _ = run_cli(
        [
            "sweep", "discrepancy", "--model", "crossing", "--c", "0.8",
            "--z", "i", "--eps-grid", "0.001:0.1:9", "--format", "json",
        ]
    )
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["slope_in_band"]
    assert 0.9 <= summary["slope"] <= 1.1


def test_sweep_discrepancy_reports_second_order_honestly():
    # when every circle resonance moves, the fixed-z discrepancy
    # shrinks at second order and the first-order band check fails
    code, out, _ = run_cli(
        [
            "sweep", "discrepancy", "--model", "ms",
            "--z", "0.921+0.390i", "--eps-grid", "0.001:0.1:9",
            "--format", "json",
        ]
    )
    assert code == 0
    summary = json.loads(out)["summary"]
    assert 1.8 <= summary["slope"] <= 2.2
    assert not summary["slope_in_band"]


def test_sweep_tunneling_hidden_channel():
    code, out, _ = run_cli(
        [
            "sweep", "tunneling", "--model", "ms", "--J", "1",
            "--eps-grid", "0.02:0.05:2", "--format", "json",
        ]
    )
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["min_t_at_peak"] >= 1.0 - 1e-6
    assert summary["peak_band_pass"]
    assert abs(abs(summary["lambda_im"]) - 1.0) <= 1e-9


def test_sweep_width_balanced_split():
    code, out, _ = run_cli(
        [
            "sweep", "width", "--model", "cycle", "--N", "4", "--J", "1,2",
            "--lambda", "1", "--eps-grid", "0.02:0.05:2", "--format", "json",
        ]
    )
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["width_band_pass"]


def test_sweep_width_unbalanced_split_fails():
    code, _, err = run_cli(
        [
            "sweep", "width", "--model", "cycle", "--N", "4", "--J", "1",
            "--lambda", "1", "--eps-grid", "0.02:0.05:2",
        ]
    )
    assert code == 1
    assert json.loads(err)["error"]["kind"] == "validation"


def test_sweep_comfort_growth():
    code, out, _ = run_cli(
        [
            "sweep", "comfort", "--model", "cycle", "--N", "4",
            "--lambda", "1", "--eps-grid", "0.02:0.05:2", "--format", "json",
        ]
    )
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["growth_band_pass"]


def test_sweep_out_file_keeps_summary_on_stdout(tmp_path):
    target = tmp_path / "sweep.csv"
    code, out, _ = run_cli(
        [
            "sweep", "discrepancy", "--model", "crossing", "--c", "0.8",
            "--z", "i", "--eps-grid", "0.001:0.01:5", "--out", str(target),
        ]
    )
    assert code == 0
    header, rows = csv_rows(target.read_text(encoding="utf-8"))
    assert header == ["eps", "z_re", "z_im", "quantity", "value"]
    assert len(rows) == 5
    summary = json.loads(out)
    assert summary["quantity"] == "discrepancy"


def test_sweep_csv_summary_goes_to_stderr():
    code, out, err = run_cli(
        [
            "sweep", "discrepancy", "--model", "crossing", "--c", "0.8",
            "--z", "i", "--eps-grid", "0.001:0.01:5",
        ]
    )
    assert code == 0
    header, rows = csv_rows(out)
    assert len(rows) == 5
    assert json.loads(err)["quantity"] == "discrepancy"


# ------------------------------------------------------------ model lookup


def test_unknown_builtin_is_usage_error():
    code, _, _ = run_cli(["resonances", "--model", "hexagon", "--eps", "0.1"])
    assert code == 3


def test_missing_model_file_is_validation_error():
    code, _, err = run_cli(
        ["resonances", "--model", "no/such/model.json", "--eps", "0.1"]
    )
    assert code == 1
    assert json.loads(err)["error"]["type"] == "ModelFileError"


def test_cycle_requires_size():
    code, _, _ = run_cli(["resonances", "--model", "cycle", "--eps", "0.1"])
    assert code == 3


def test_cycle_strength_count_must_match():
    code, _, _ = run_cli(
        ["resonances", "--model", "cycle", "--N", "4", "--c", "0.5,0.6",
         "--eps", "0.1"]
    )
    assert code == 3


def test_model_file_runs_through_pipeline(tmp_path):
    swap = self_loop_document([["0", "1"], ["1", "0"]])
    path = write_model(tmp_path, "loop.json", swap)
    code, out, _ = run_cli(
        ["smatrix", "--model", path, "--eps", "0.0", "--z", "0.6+0.8i"]
    )
    assert code == 0
    _, rows = csv_rows(out)
    assert len(rows) == 1


# ----------------------------------------------------------------- parsers


@pytest.mark.parametrize(
    "text,value",
    [
        ("i", 1j),
        ("-i", -1j),
        ("0.921+0.390i", 0.921 + 0.390j),
        ("2", 2.0 + 0j),
        ("1-2I", 1 - 2j),
        ("0.5j", 0.5j),
    ],
)
def test_parse_complex_forms(text, value):
    assert parse_complex_value(text) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(click.UsageError):
        parse_complex_value("one plus i")
    with pytest.raises(click.UsageError):
        parse_complex_value("")


def test_parse_eps_grid_is_geometric():
    grid = parse_eps_grid("0.001:0.1:3")
    assert len(grid) == 3
    assert grid[0] == pytest.approx(1e-3)
    assert grid[1] == pytest.approx(1e-2)
    assert grid[2] == pytest.approx(1e-1)
    with pytest.raises(click.UsageError):
        parse_eps_grid("0.001:0.1")
    with pytest.raises(click.UsageError):
        parse_eps_grid("a:b:3")


def test_parse_split_sorts_and_dedupes():
    assert parse_split("2,1,2") == (1, 2)
    with pytest.raises(click.UsageError):
        parse_split("")
    with pytest.raises(click.UsageError):
        parse_split("one")
