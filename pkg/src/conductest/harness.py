"""Experiment runner and trial aggregation behind the command line."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .conductance import make_cut, min_conductance_bruteforce, min_cut_bruteforce
from .congest import Outcome
from .generators import parse_spec
from .graph import Graph, load_edge_list
from .spectral import (
    DeltaTooLarge,
    EtaOutOfRange,
    build_spectral,
    heavy_coefficient_mass,
    sticky_set,
    verify_cheeger,
    verify_mixing,
    verify_trap_lemma_S,
    verify_trap_lemma_T,
)
from .tester import RunReport, TesterConfig, run_tester

MODES = ("test", "verify-lemmas", "verify-cheeger", "mixing", "brute-conductance")

# CSV layout version 1; see README before changing.
CSV_COLUMNS = (
    "trial",
    "seed",
    "outcome",
    "n_sources",
    "n_rejecting",
    "n_aborted",
    "first_rejecting_vertex",
    "rounds",
    "messages",
    "tuples",
    "max_edge_tuples",
)


class HeterogeneousConfigs(ValueError):
    pass


class IncompleteSpec(ValueError):
    pass


@dataclass
class ExperimentSpec:
    """One experiment: graph source, tester settings, trial count and mode."""

    mode: str
    graph: str | None = None
    gen: str | None = None
    relabel: bool = False
    alpha: float | None = None
    epsilon: float | None = None
    seed: int = 0
    trials: int = 1
    graph_seed: int | None = None
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise IncompleteSpec(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if bool(self.graph) == bool(self.gen):
            raise IncompleteSpec("exactly one of a graph file or a generator spec is required")
        if self.trials < 1:
            raise IncompleteSpec("trials must be >= 1")
        if self.seed < 0:
            raise IncompleteSpec("seed must be non-negative")
        if self.mode == "test" and (self.alpha is None or self.epsilon is None):
            raise IncompleteSpec("test mode needs alpha and epsilon")

    @classmethod
    def from_fixture(cls, path) -> "ExperimentSpec":
        data = json.loads(Path(path).read_text())
        return cls(**data)

    def build_graph(self) -> Graph:
        if self.graph:
            return load_edge_list(self.graph, relabel=self.relabel)
        return parse_spec(self.gen, seed=self.seed if self.graph_seed is None else self.graph_seed)

    def tester_config(self) -> TesterConfig:
        return TesterConfig.from_dict(
            {"alpha": self.alpha, "epsilon": self.epsilon, "master_seed": self.seed, "overrides": self.overrides}
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def first_rejecting_vertex(report: RunReport) -> int | None:
    bad = [
        (vd.round, v)
        for v, vd in report.verdicts.items()
        if vd.outcome in (Outcome.REJECT, Outcome.ABORTED_CONGESTION)
    ]
    return min(bad)[1] if bad else None


def trial_row(index: int, report: RunReport) -> dict:
    return {
        "trial": index,
        "seed": report.config.master_seed,
        "outcome": report.outcome,
        "n_sources": len(report.sources),
        "n_rejecting": len(report.rejecting),
        "n_aborted": len(report.aborted),
        "first_rejecting_vertex": first_rejecting_vertex(report),
        "rounds": report.rounds,
        "messages": sum(s.messages for s in report.stats),
        "tuples": sum(s.tuples for s in report.stats),
        "max_edge_tuples": max((s.max_edge_tuples for s in report.stats), default=0),
    }


@dataclass
class AggregateReport:
    rows: list[dict]
    accept_fraction: Fraction
    reject_fraction: Fraction
    aborted_fraction: Fraction
    first_rejecting_histogram: dict[int, int]
    rounds_total: int
    messages_total: int
    oracle: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.rows)

    def to_dict(self) -> dict:
        def frac(f):
            return {"value": float(f), "exact": f"{f.numerator}/{f.denominator}"}

        return {
            "trials": self.trials,
            "accept_fraction": frac(self.accept_fraction),
            "reject_fraction": frac(self.reject_fraction),
            "aborted_fraction": frac(self.aborted_fraction),
            "first_rejecting_histogram": {str(k): v for k, v in sorted(self.first_rejecting_histogram.items())},
            "rounds_total": self.rounds_total,
            "messages_total": self.messages_total,
            "per_trial": self.rows,
            "oracle": self.oracle,
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_COLUMNS})
        return buf.getvalue()


def _config_key(report: RunReport) -> tuple:
    cfg = report.config.to_dict()
    cfg.pop("master_seed")
    return repr(sorted(cfg.items())), repr(sorted(report.graph_summary.items()))


def aggregate(reports: list[RunReport]) -> AggregateReport:
    """Summarise trials that share one config (seeds may differ)."""
    if not reports:
        raise ValueError("aggregate needs at least one trial report")
    keys = {_config_key(r) for r in reports}
    if len(keys) > 1:
        raise HeterogeneousConfigs("trial reports disagree on config or graph")
    rows = [trial_row(i, r) for i, r in enumerate(reports)]
    n = len(rows)
    counts = Counter(row["outcome"] for row in rows)
    hist = Counter(row["first_rejecting_vertex"] for row in rows if row["first_rejecting_vertex"] is not None)
    return AggregateReport(
        rows=rows,
        accept_fraction=Fraction(counts["accept"], n),
        reject_fraction=Fraction(counts["reject"], n),
        aborted_fraction=Fraction(counts["aborted"], n),
        first_rejecting_histogram=dict(sorted(hist.items())),
        rounds_total=sum(row["rounds"] for row in rows),
        messages_total=sum(row["messages"] for row in rows),
    )


def run_trials(graph: Graph, config: TesterConfig, trials: int, workers: int = 1) -> list[RunReport]:
    """Independent trials with seeds ``master_seed + trial_index``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = config.master_seed
    return [run_tester(graph, config.with_seed(base + i), workers=workers) for i in range(trials)]


def lowest_degree_vertex(graph: Graph, members) -> int:
    return min(members, key=lambda v: (graph.degree(v), v))


def verify_lemmas(graph: Graph, ell_max: int = 50, eta: float = 0.1, sticky_ell: int = 20) -> dict:
    """Trap lemmas, heavy-coefficient claim and sticky-set extraction on the min-conductance cut."""
    bundle = build_spectral(graph)
    cut = min_cut_bruteforce(graph)
    out: dict = {
        "cut": {"side": cut.side.sorted(), "conductance": cut.conductance, "crossing_edges": cut.crossing_edges},
    }
    try:
        rep_s = verify_trap_lemma_S(bundle, cut, ell_max)
        out["trap_S"] = {"pass": rep_s.passed, "min_slack": rep_s.min_slack, "rows": rep_s.to_json()}
    except DeltaTooLarge as exc:
        out["trap_S"] = {"skipped": str(exc)}
    if len(cut.side) >= 2:
        drop = lowest_degree_vertex(graph, cut.side)
        t = graph.vertex_set(set(cut.side.members) - {drop})
        try:
            rep_t = verify_trap_lemma_T(bundle, cut, t, ell_max)
            out["trap_T"] = {
                "dropped_vertex": drop,
                "eta": rep_t.params["eta"],
                "pass": rep_t.passed,
                "min_slack": rep_t.min_slack,
                "rows": rep_t.to_json(),
            }
        except (DeltaTooLarge, EtaOutOfRange) as exc:
            out["trap_T"] = {"skipped": str(exc)}
    mass, need = heavy_coefficient_mass(bundle, cut)
    out["heavy_coefficients"] = {"mass": mass, "required": need, "pass": bool(mass >= need - 1e-8)}
    try:
        st = sticky_set(bundle, cut, eta, sticky_ell)
        out["sticky_set"] = {
            "eta": eta,
            "ell": sticky_ell,
            "members": st.members.sorted(),
            "volume": st.members.volume,
            "target_volume": st.target_volume,
        }
    except (DeltaTooLarge, EtaOutOfRange) as exc:
        out["sticky_set"] = {"skipped": str(exc)}
    checks = [v.get("pass") for v in out.values() if isinstance(v, dict) and "pass" in v]
    out["pass"] = all(checks)
    return out


def verify_cheeger_mode(graph: Graph) -> dict:
    rep = verify_cheeger(build_spectral(graph), graph)
    out = rep.to_dict()
    out["pass"] = out.pop("passed")
    return out


def mixing_mode(graph: Graph, ells) -> dict:
    bundle = build_spectral(graph)
    rows = []
    for ell in ells:
        d = verify_mixing(bundle, ell).to_dict()
        d["pass"] = d.pop("passed")
        rows.append(d)
    return {"rows": rows, "pass": all(r["pass"] for r in rows)}


def brute_conductance_mode(graph: Graph) -> dict:
    phi, side = min_conductance_bruteforce(graph)
    cut = make_cut(graph, side)
    return {
        "min_conductance": phi,
        "exact": f"{cut.fraction.numerator}/{cut.fraction.denominator}",
        "witness": side.sorted(),
        "witness_volume": side.volume,
        "crossing_edges": cut.crossing_edges,
        "cheeger_constant_lazy": phi / 2.0,
    }
