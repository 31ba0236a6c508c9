import json
from fractions import Fraction

import pytest

from conductest import generators as gen
from conductest.cli import main
from conductest.harness import CSV_COLUMNS, HeterogeneousConfigs, aggregate, run_trials
from conductest.tester import TesterConfig

ROOT_CFG = TesterConfig(0.5, 0.5, length=6, tau_slack=1.0)


def test_aggregate_all_accept(k4):
    reports = run_trials(k4, ROOT_CFG, 5)
    agg = aggregate(reports)
    assert agg.accept_fraction == 1
    assert agg.trials == 5
    assert [r["seed"] for r in agg.rows] == [0, 1, 2, 3, 4]
    assert agg.first_rejecting_histogram == {}


def test_aggregate_mixed_fractions():
    g = gen.dumbbell(4)
    cfg = TesterConfig(0.5, 0.5, walks=60, length=4, tau_slack=0.0, source_constant=1.0)
    agg = aggregate(run_trials(g, cfg, 30))
    total = agg.accept_fraction + agg.reject_fraction + agg.aborted_fraction
    assert total == 1
    assert isinstance(agg.reject_fraction, Fraction)
    n_rej = sum(r["outcome"] == "reject" for r in agg.rows)
    assert agg.reject_fraction == Fraction(n_rej, 30)
    assert sum(agg.first_rejecting_histogram.values()) == n_rej
    assert list(agg.first_rejecting_histogram) == sorted(agg.first_rejecting_histogram)


def test_aggregate_with_aborts_sums_to_one(k4):
    cfg = TesterConfig(0.5, 0.5, walks=500, length=4, congestion_limit=1, source_constant=1.0)
    agg = aggregate(run_trials(k4, cfg, 12))
    assert agg.aborted_fraction > 0
    assert agg.accept_fraction + agg.reject_fraction + agg.aborted_fraction == 1


def test_aggregate_order_independent(k4):
    reports = run_trials(k4, ROOT_CFG, 4)
    a = aggregate(reports).to_dict()
    b = aggregate(reports[::-1]).to_dict()
    for key in ("accept_fraction", "reject_fraction", "first_rejecting_histogram", "messages_total"):
        assert a[key] == b[key]


def test_aggregate_rejects_mixed_configs(k4):
    a = run_trials(k4, ROOT_CFG, 1)
    b = run_trials(k4, TesterConfig(0.5, 0.5, length=7, tau_slack=1.0), 1)
    with pytest.raises(HeterogeneousConfigs):
        aggregate(a + b)
    with pytest.raises(ValueError):
        aggregate([])


def test_csv_columns(k4):
    text = aggregate(run_trials(k4, ROOT_CFG, 2)).csv_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_test_mode_reports_accept_fraction(tmp_path, capsys):
    out = tmp_path / "r.json"
    args = ["test", "--gen", "complete:16", "--alpha", "0.6", "--epsilon", "0.3", "--trials", "3", "--seed", "7"]
    code, stdout, _ = run_cli(args + ["--length", "30", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["aggregate"]["accept_fraction"]["value"] == 1.0
    assert rep["spec"]["overrides"] == {"length": 30}
    assert [r["seed"] for r in rep["aggregate"]["per_trial"]] == [7, 8, 9]
    assert "accept fraction" in stdout


def test_cli_verify_cheeger(capsys):
    code, stdout, _ = run_cli(["verify-cheeger", "--gen", "dumbbell:4", "--deterministic"], capsys)
    assert code == 0
    assert json.loads(stdout)["pass"] is True


@pytest.mark.parametrize("mode", ["verify-lemmas", "mixing", "brute-conductance"])
def test_cli_other_modes(mode, capsys):
    code, stdout, _ = run_cli(["--mode", mode, "--gen", "dumbbell:4", "--deterministic"], capsys)
    assert code == 0
    rep = json.loads(stdout)
    assert rep["mode"] == mode
    assert rep["pass"] in (True, None)


@pytest.mark.parametrize(
    "args, code",
    [
        (["brute-conductance", "--gen", "dumbbell:0"], 2),
        (["test", "--gen", "complete:4"], 2),
        (["test", "--gen", "complete:4", "--alpha", "2", "--epsilon", "0.1"], 2),
        (["--gen", "complete:4"], 2),
        (["verify-cheeger"], 2),
        (["verify-cheeger", "--graph", "/nonexistent/g.txt"], 2),
        (["verify-cheeger", "--gen", "cycle:4", "--bogus"], 2),
        (["brute-conductance", "--gen", "cycle:30"], 3),
    ],
)
def test_cli_exit_codes(args, code, capsys):
    got, _, err = run_cli(args, capsys)
    assert got == code
    assert err


def test_cli_validation_failure(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("4 2\n1 2\n3 4\n")
    code, _, err = run_cli(["verify-cheeger", "--graph", str(f)], capsys)
    assert code == 3
    assert "Disconnected" in err


def test_cli_help_documents_grammar(capsys):
    code, stdout, _ = run_cli(["--help"], capsys)
    assert code == 0
    assert "random_regular:D:N" in stdout


def test_cli_config_fixture_and_override(tmp_path, capsys):
    fixture = tmp_path / "f.json"
    fixture.write_text(json.dumps({"mode": "test", "gen": "dumbbell:4", "alpha": 0.5, "epsilon": 0.5, "trials": 2,
                                   "overrides": {"length": 5, "walks": 300}}))
    out = tmp_path / "r.json"
    code, _, _ = run_cli(["--config", str(fixture), "--tau-slack", "0.5", "--deterministic", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["spec"]["overrides"] == {"length": 5, "walks": 300, "tau_slack": 0.5}
    assert rep["resolved"]["tau_slack"] == 0.5


def test_cli_deterministic_byte_identical(tmp_path, capsys):
    base = ["test", "--gen", "random_regular:3:12", "--alpha", "0.4", "--epsilon", "0.5", "--trials", "3",
            "--length", "8", "--walks", "2000", "--deterministic", "--histograms"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_csv_and_transcript(tmp_path, capsys):
    c, t = tmp_path / "rows.csv", tmp_path / "t.jsonl"
    args = ["test", "--gen", "cycle:6", "--alpha", "0.4", "--epsilon", "0.5", "--trials", "2", "--length", "4",
            "--walks", "100", "--csv", str(c), "--transcript", str(t), "--out", str(tmp_path / "r.json")]
    assert main(args) == 0
    assert c.read_text().splitlines()[0].split(",") == list(CSV_COLUMNS)
    lines = [json.loads(x) for x in t.read_text().splitlines()]
    assert len(lines) == 8 and {x["trial"] for x in lines} == {0, 1}


def test_cli_export_csv(tmp_path, capsys):
    assert main(["verify-cheeger", "--gen", "cycle:5", "--export-csv", str(tmp_path / "m")]) == 0
    assert (tmp_path / "m" / "eigenvalues.csv").exists()
