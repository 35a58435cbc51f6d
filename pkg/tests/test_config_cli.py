import json

import pytest

import discount_strategy as ds
from discount_strategy import cli
from discount_strategy.errors import ConfigParseError, ConfigValidationError


@pytest.fixture(scope="module")
def coarse_config(tmp_path_factory):
    """Config with relaxed quadrature tolerances to keep CLI runs quick."""
    path = tmp_path_factory.mktemp("cfg") / "coarse.json"
    path.write_text(
        json.dumps({"quadrature": {"abs_tol": 1e-6, "rel_tol": 1e-6, "max_depth": 40}})
    )
    return str(path)


def run_cli(args):
    return cli.main(args)


# --- config loading -------------------------------------------------------


def test_default_config_is_reference_parameter_set():
    cfg = ds.load_config()
    assert cfg.price_range.x_min == 1400.0
    assert cfg.price_range.x_max == 1600.0
    assert (cfg.low_shape.alpha, cfg.low_shape.beta) == (2.5, 4.5)
    assert (cfg.high_shape.alpha, cfg.high_shape.beta) == (4.5, 1.5)
    assert (cfg.background_shape.alpha, cfg.background_shape.beta) == (2.5, 2.5)
    assert cfg.gamma == 10.0
    assert cfg.quadrature.abs_tol == 1e-8
    assert cfg.quadrature.rel_tol == 1e-8


def test_partial_config_takes_defaults(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"gamma": 5.0}))
    cfg = ds.load_config(str(path))
    assert cfg.gamma == 5.0
    assert cfg.quadrature.abs_tol == 1e-8  # documented default


def test_invalid_range_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"price_range": {"x_min": 1600.0, "x_max": 1400.0}}))
    with pytest.raises(ConfigValidationError, match="x_min"):
        ds.load_config(str(path))


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "extra.json"
    path.write_text(json.dumps({"pricerange": {}}))
    with pytest.raises(ConfigValidationError, match="pricerange"):
        ds.load_config(str(path))


def test_parse_error_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"gamma": 5.0,\n  "zero_band": }\n')
    with pytest.raises(ConfigParseError, match="line 2"):
        ds.load_config(str(path))
    with pytest.raises(ConfigParseError):
        ds.load_config(str(tmp_path / "missing.json"))


# --- decide ---------------------------------------------------------------


def test_decide_anecdote_price_accepts(capsys):
    code = run_cli(["--machine", "decide", "--price", "1431.01"])
    record = json.loads(capsys.readouterr().out)
    assert code == 0
    assert record["verdict"] == "ACCEPT"
    assert record["h"] < 0.0
    assert abs(record["threshold"] - 1434.43) <= 0.5


def test_decide_reject_exit_code(coarse_config, capsys):
    code = run_cli(["--config", coarse_config, "decide", "--price", "1450"])
    out = capsys.readouterr().out
    assert code == 1
    assert out.startswith("REJECT")


def test_decide_with_guess(capsys):
    code = run_cli(["--machine", "decide", "--price", "1470", "--guess", "1500"])
    record = json.loads(capsys.readouterr().out)
    assert code == 0
    assert record["verdict"] == "ACCEPT"
    assert record["threshold"] is None


def test_decide_out_of_domain_exits_2(coarse_config, capsys):
    code = run_cli(["--config", coarse_config, "decide", "--price", "1399"])
    assert code == 2
    assert "error" in capsys.readouterr().err


# --- threshold ------------------------------------------------------------


def test_threshold_command(coarse_config, capsys):
    code = run_cli(["--config", coarse_config, "--machine", "threshold"])
    line = capsys.readouterr().out
    record = json.loads(line)
    assert code == 0
    assert record["kind"] == "root"
    assert abs(record["value"] - 1434.43) <= 0.5
    assert record["sign_changes"] == 1
    # machine mode round-trips byte for byte
    assert json.dumps(cli._jsonable(json.loads(line)), sort_keys=True) == line.strip()


def test_threshold_degenerate_and_widened_models(tmp_path, capsys):
    cases = {
        "identical": {"high_shape": {"alpha": 2.5, "beta": 4.5}},
        "widened": {"high_shape": {"alpha": 1.5, "beta": 4.5}},
    }
    for name, overrides in cases.items():
        overrides["quadrature"] = {"abs_tol": 1e-6, "rel_tol": 1e-6, "max_depth": 40}
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(overrides))
        code = run_cli(["--config", str(path), "--machine", "threshold", "--x-tol", "1e-4"])
        record = json.loads(capsys.readouterr().out)
        assert code == 0
        assert record["kind"] == "root"
        assert 1400.0 < record["value"] < 1600.0
        assert record["sign_changes"] == 1


# --- grid -----------------------------------------------------------------


def test_grid_h_curve_brackets_threshold(coarse_config, tmp_path, capsys):
    out = tmp_path / "h.csv"
    code = run_cli(
        ["--config", coarse_config, "grid", "--what", "h-curve",
         "--resolution", "201", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "v,h"
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 201
    crossings = [
        (a, b) for (a, ha), (b, hb) in zip(rows, rows[1:]) if ha < 0.0 <= hb
    ]
    assert len(crossings) == 1
    lo, hi = crossings[0]
    assert lo <= 1434.43 <= hi


def test_grid_h_surface_diagonal_zero(coarse_config, tmp_path):
    out = tmp_path / "surf.csv"
    assert run_cli(
        ["--config", coarse_config, "grid", "--what", "h-surface",
         "--resolution", "9", "--out", str(out)]
    ) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "v,w,value"
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 81
    for v, w, value in rows:
        if v == w:
            assert abs(value) < 1e-10


def test_grid_joint_pdf_riemann_sum(coarse_config, tmp_path):
    out = tmp_path / "joint.csv"
    assert run_cli(
        ["--config", coarse_config, "grid", "--what", "joint-pdf",
         "--resolution", "101", "--out", str(out)]
    ) == 0
    rows = [
        tuple(map(float, line.split(",")))
        for line in out.read_text().splitlines()[1:]
    ]
    cell = (200.0 / 101) ** 2
    assert sum(value for _, _, value in rows) * cell == pytest.approx(1.0, abs=1e-2)


def test_grid_files_are_deterministic(coarse_config, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        assert run_cli(
            ["--config", coarse_config, "grid", "--what", "p-surface",
             "--resolution", "21", "--out", str(out)]
        ) == 0
    assert a.read_bytes() == b.read_bytes()


def test_grid_unwritable_path_exits_2(coarse_config, tmp_path, capsys):
    code = run_cli(
        ["--config", coarse_config, "grid", "--what", "p-surface",
         "--resolution", "5", "--out", str(tmp_path / "nodir" / "x.csv")]
    )
    assert code == 2
    assert "x.csv" in capsys.readouterr().err


# --- simulate -------------------------------------------------------------


def test_simulate_deterministic_output(coarse_config, capsys):
    args = ["--config", coarse_config, "--machine", "--seed", "42", "simulate",
            "--strategy", "threshold=1434.43", "--n", "200000"]
    assert run_cli(args) == 0
    first = capsys.readouterr().out
    assert run_cli(args) == 0
    second = capsys.readouterr().out
    assert first == second
    record = json.loads(first)
    assert record["reports"][0]["n"] == 200000


def test_simulate_compare_orders_strategies(coarse_config, capsys):
    assert run_cli(
        ["--config", coarse_config, "--machine", "--seed", "7", "simulate",
         "--compare", "optimal,always-accept,always-reject", "--n", "200000"]
    ) == 0
    record = json.loads(capsys.readouterr().out)
    means = {r["strategy"]: r["mean_paid"] for r in record["reports"]}
    assert means["optimal"] < means["always-reject"] < means["always-accept"]


def test_simulate_usage_errors(coarse_config, capsys):
    assert run_cli(["--config", coarse_config, "simulate", "--n", "10"]) == 2
    capsys.readouterr()
    assert run_cli(
        ["--config", coarse_config, "simulate", "--strategy", "bogus", "--n", "10"]
    ) == 2
    assert "strategy" in capsys.readouterr().err


# --- expected -------------------------------------------------------------


def test_expected_always_reject(coarse_config, capsys):
    assert run_cli(
        ["--config", coarse_config, "--machine", "expected",
         "--strategy", "always-reject"]
    ) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["mu1"] == 0.0
    assert record["total"] == record["mu0"]


def test_simulate_always_reject_matches_expected_mu0(coarse_config, capsys):
    assert run_cli(
        ["--config", coarse_config, "--machine", "--seed", "11", "simulate",
         "--strategy", "always-reject", "--n", "200000"]
    ) == 0
    sim = json.loads(capsys.readouterr().out)["reports"][0]
    assert run_cli(
        ["--config", coarse_config, "--machine", "expected",
         "--strategy", "always-reject"]
    ) == 0
    exp = json.loads(capsys.readouterr().out)
    assert abs(sim["mean_paid"] - exp["mu0"]) <= 3.0 * sim["std_err"]


def test_expected_tabulated_from_file(coarse_config, tmp_path, capsys):
    table_path = tmp_path / "table.json"
    table_path.write_text(
        json.dumps(
            {"x_min": 1400.0, "x_max": 1600.0, "values": [[0.9, 0.1], [0.4, 0.6]]}
        )
    )
    assert run_cli(
        ["--config", coarse_config, "--machine", "expected",
         "--strategy", f"tabulated={table_path}"]
    ) == 0
    record = json.loads(capsys.readouterr().out)
    assert 1400.0 <= record["total"] <= 1600.0


# --- report ---------------------------------------------------------------


def test_report_writes_csv_and_png(coarse_config, tmp_path, capsys):
    out_dir = tmp_path / "figs"
    assert run_cli(
        ["--config", coarse_config, "report", "--out-dir", str(out_dir),
         "--resolution", "11"]
    ) == 0
    capsys.readouterr()
    for stem in ("h_curve", "h_surface", "joint_pdf", "p_surface", "marginals"):
        csv_path = out_dir / f"{stem}.csv"
        png_path = out_dir / f"{stem}.png"
        assert csv_path.exists() and csv_path.stat().st_size > 0
        assert png_path.exists() and png_path.stat().st_size > 0
        assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
