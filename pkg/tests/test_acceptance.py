"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conductest import congest
from conductest import generators as gen
from conductest.cli import main as cli_main
from conductest.conductance import make_cut
from conductest.congest import Outcome
from conductest.harness import ExperimentSpec, aggregate, run_trials
from conductest.spectral import (
    build_spectral,
    heavy_coefficient_mass,
    verify_cheeger,
    verify_mixing,
    verify_trap_lemma_S,
    verify_trap_lemma_T,
    walk_distribution,
)
from conductest.tester import TesterConfig, TesterProgram, run_tester

from .conftest import ACCEPTANCE_LINES

FIXTURES = Path(__file__).resolve().parent.parent / "configs" / "acceptance"


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def fixture_runs():
    """All three calibrated fixtures, 30 trials each, with wall times."""
    out = {}
    for name in ("k16", "expander64", "dumbbell12"):
        spec = ExperimentSpec.from_fixture(FIXTURES / f"{name}.json")
        graph = spec.build_graph()
        t0 = time.perf_counter()
        reports = run_trials(graph, spec.tester_config(), spec.trials)
        out[name] = (graph, reports, time.perf_counter() - t0)
    return out


def cheeger_family():
    graphs = [gen.complete(n) for n in range(2, 9)]
    graphs += [gen.cycle(n) for n in range(4, 13)]
    graphs += [gen.path(n) for n in range(3, 11)]
    graphs += [gen.dumbbell(k) for k in range(3, 6)]
    graphs += [gen.random_regular(3, 10, seed) for seed in range(5)]
    return graphs


def test_criterion_01_cheeger_sandwich():
    t0 = time.perf_counter()
    reps = [verify_cheeger(build_spectral(g), g, tol=1e-8) for g in cheeger_family()]
    elapsed = time.perf_counter() - t0
    bad = sum(not r.passed for r in reps)
    worst = min(min(r.gap - r.lower, r.upper - r.gap) for r in reps)
    record(1, bad == 0 and elapsed < 10, f"{len(reps)} graphs, {bad} violations, min margin {worst:.3g}, {elapsed:.2f}s")


@pytest.mark.parametrize("k", [4, 5])
def test_criterion_02_trap_lemma_S(k):
    t0 = time.perf_counter()
    g = gen.dumbbell(k)
    rep = verify_trap_lemma_S(build_spectral(g), make_cut(g, range(1, k + 1)), 50)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.min_slack >= -1e-9 and len(rep.rows) == 51 and elapsed < 5
    record(2, ok, f"dumbbell({k}) l=0..50 min slack {rep.min_slack:.3g}, {elapsed:.2f}s")


@pytest.mark.parametrize("k", [4, 5])
def test_criterion_03_trap_lemma_T(k):
    g = gen.dumbbell(k)
    s = make_cut(g, range(1, k + 1))
    t = g.vertex_set(range(1, k))
    rep = verify_trap_lemma_T(build_spectral(g), s, t, 50)
    eta = rep.params["eta"]
    ok = 0 < eta < 5 / 6 and rep.passed and rep.min_slack >= -1e-9
    record(3, ok, f"dumbbell({k}) eta={eta:.4f} min slack {rep.min_slack:.3g}")


def test_criterion_04_heavy_coefficients():
    rng = np.random.default_rng(2024)
    pool = [gen.dumbbell(k) for k in range(3, 6)] + [gen.barbell_path(4, 2), gen.barbell_path(3, 3)]
    pool += [gen.cycle(n) for n in (10, 12)] + [gen.path(n) for n in (8, 10)]
    bundles = [build_spectral(g) for g in pool]
    cuts, tries = [], 0
    while len(cuts) < 50 and tries < 200_000:
        tries += 1
        i = int(rng.integers(len(pool)))
        g = pool[i]
        members = np.flatnonzero(rng.random(g.n) < rng.uniform(0.1, 0.9)) + 1
        if members.size in (0, g.n):
            continue
        cut = make_cut(g, members.tolist())
        if cut.side.volume > g.m:
            cut = make_cut(g, cut.side.complement(g))
        if cut.conductance < 1 / 3:
            cuts.append((bundles[i], cut))
    margins = []
    for b, cut in cuts:
        mass, need = heavy_coefficient_mass(b, cut)
        margins.append(mass - need)
    ok = len(cuts) == 50 and min(margins) >= -1e-8
    record(4, ok, f"{len(cuts)} cuts, min margin {min(margins):.3g}")


def test_criterion_05_mixing_bound():
    graphs = {"K16": gen.complete(16), "3-regular n=32": gen.random_regular(3, 32, 1)}
    worst, ok = -np.inf, True
    for g in graphs.values():
        b = build_spectral(g)
        for ell in (1, 5, 20):
            rep = verify_mixing(b, ell)
            ok &= rep.max_deviation <= rep.bound + 1e-9
            worst = max(worst, rep.max_violation)
    record(5, ok, f"6 (graph, l) pairs, worst deviation minus bound {worst:.3g}")


def test_criterion_06_walk_conservation():
    runs = []
    for name, seeds in (("k16", range(4)), ("dumbbell12", range(3)), ("expander64", range(3))):
        spec = ExperimentSpec.from_fixture(FIXTURES / f"{name}.json")
        g = spec.build_graph()
        for s in seeds:
            runs.append(run_tester(g, spec.tester_config().with_seed(1000 + s), track_ledger=True))
    checked, ok = 0, True
    for rep in runs:
        k = rep.params.walks
        ok &= len(rep.ledger_totals) == rep.params.length + 1
        for snap in rep.ledger_totals:
            ok &= snap == {q: k for q in rep.sources}
            checked += 1
        ok &= all(sum(rep.endpoints[q].values()) == k for q in rep.sources)
    record(6, ok, f"{len(runs)} runs, {checked} step snapshots, exact")


def _tv_single_source(seed, walks=10**6, ell=20):
    g = gen.dumbbell(4)
    ref = walk_distribution(build_spectral(g), 1, ell)
    cfg = TesterConfig(0.5, 0.5, master_seed=seed, walks=walks, length=ell, sources=(1,))
    rep = run_tester(g, cfg)
    emp = np.zeros(g.n)
    for v, c in rep.endpoints[1].items():
        emp[v - 1] = c
    return 0.5 * float(np.abs(emp / walks - ref).sum())


def test_criterion_07_distributional_fidelity():
    tol = 3 * math.sqrt(8 / 10**6)
    pilot = np.array([_tv_single_source(10_000 + i) for i in range(100)])
    calibrated = pilot.max() <= tol
    tvs = [_tv_single_source(seed) for seed in range(5)]
    ok = calibrated and max(tvs) <= tol
    record(
        7,
        ok,
        f"tol {tol:.4f}; pilot(100) mean {pilot.mean():.5f} p99 {np.quantile(pilot, 0.99):.5f}; "
        f"seeds 0-4 max TV {max(tvs):.5f}",
    )


def test_criterion_08_end_to_end(fixture_runs):
    parts, ok = [], True
    for name, want in (("k16", "accept"), ("expander64", "accept"), ("dumbbell12", "reject")):
        _, reports, secs = fixture_runs[name]
        agg = aggregate(reports)
        frac = agg.accept_fraction if want == "accept" else agg.reject_fraction
        ok &= len(reports) == 30 and frac >= 2 / 3 and secs < 300
        parts.append(f"{name} {want} {float(frac):.2f} ({secs:.0f}s)")
    record(8, ok, "; ".join(parts))


def test_criterion_09_round_accounting(fixture_runs):
    ok, total = True, 0
    for graph, reports, _ in fixture_runs.values():
        for rep in reports:
            total += 1
            ok &= rep.rounds == rep.params.length
            ok &= rep.preprocessing_rounds == 0 and rep.post_walk_rounds == 0
            ok &= all(s.messages <= 2 * graph.m for s in rep.stats)
            ok &= all(vd.round == rep.params.length for vd in rep.verdicts.values())
    record(9, ok, f"{total} runs: exactly l rounds, no extra rounds, messages <= 2m")


def test_criterion_10_congestion(fixture_runs):
    g = gen.complete(4)
    cfg = TesterConfig(0.5, 0.5, walks=1000, length=5, congestion_limit=1, sources=(1, 2))
    params = cfg.resolve(g)
    res = congest.run(g, lambda v: TesterProgram(v, cfg, params), params.length, 0)
    offenders = {v for v, p in res.programs.items() if ((p.ledger.d_split > 0).sum(axis=0) > 1).any()}
    aborted = {v for v, vd in res.verdicts.items() if vd.outcome is Outcome.ABORTED_CONGESTION}
    forced = bool(offenders) and aborted == offenders and res.stats[-1].halted
    n_abort = sum(bool(r.aborted) for _, reps, _ in fixture_runs.values() for r in reps)
    ok = forced and n_abort == 0
    record(10, ok, f"forced limit 1: aborted {sorted(aborted)} at round {res.stats[-1].round}; fixture aborts {n_abort}/90")


def test_criterion_11_determinism(tmp_path):
    outs = []
    fixture = str(FIXTURES / "dumbbell12.json")
    for workers in (1, 4, 1):
        out = tmp_path / f"r{len(outs)}.json"
        code = cli_main(["--config", fixture, "--deterministic", "--histograms", "--out", str(out), "--workers", str(workers)])
        assert code == 0
        outs.append(out.read_bytes())
    lemma = []
    for workers in (1, 3):
        out = tmp_path / f"l{workers}.json"
        assert cli_main(["verify-lemmas", "--gen", "dumbbell:5", "--deterministic", "--out", str(out), "--workers", str(workers)]) == 0
        lemma.append(out.read_bytes())
    ok = len(set(outs)) == 1 and len(set(lemma)) == 1
    assert json.loads(outs[0])["aggregate"]["trials"] == 30
    record(11, ok, f"dumbbell12 fixture x3 (workers 1/4/1) and verify-lemmas x2 byte-identical")
