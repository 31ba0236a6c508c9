"""Fully local conductance tester as a CONGEST vertex program.

Each vertex flips a degree-biased coin to become a source of ``K`` lazy random
walks. Walks are moved as per-source counts: a vertex holding ``k`` walks of
source ``q`` splits them multinomially between staying (prob 1/2) and each
neighbour (prob 1/(2 deg)), and forwards one message per neighbour carrying
all sources' tuples. After ``ell`` rounds a vertex rejects iff some source
delivered more than ``tau_v`` walk endpoints to it.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import congest
from .congest import Message, Outcome, RoundStats, Verdict, VertexContext
from .graph import Graph

DEFAULT_SOURCE_CONSTANT = 5000.0
DEFAULT_CONGESTION_CONSTANT = 5500.0
_EMPTY = np.zeros(0, dtype=np.int64)
_INT64_MAX = np.iinfo(np.int64).max


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TesterConfig:
    """Tester parameters.

    ``alpha`` and ``epsilon`` fix the defaults; every other field left as None
    takes its default when resolved against a graph:

    * walks: K = 2 m^2
    * length: ell = ceil(32 / alpha^2 * ln n)
    * tau_slack: 2 n^(-1/4), so tau_v = m deg(v) (1 + tau_slack)
    * source_constant: 5000, coin probability min(1, c deg(v) / (epsilon 2m))
    * congestion_limit: 5500 / epsilon tuples per message
    * sources: forced source set instead of coin flips (experiments only)
    """

    alpha: float
    epsilon: float
    master_seed: int = 0
    walks: int | None = None
    length: int | None = None
    tau_slack: float | None = None
    source_constant: float | None = None
    congestion_limit: float | None = None
    sources: tuple[int, ...] | None = None

    OVERRIDES = ("walks", "length", "tau_slack", "source_constant", "congestion_limit", "sources")

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")
        if self.walks is not None and self.walks < 1:
            raise ConfigError("walks must be >= 1")
        if self.length is not None and self.length < 1:
            raise ConfigError("length must be >= 1")
        if self.source_constant is not None and self.source_constant < 0:
            raise ConfigError("source_constant must be >= 0")
        if self.tau_slack is not None and self.tau_slack < 0:
            raise ConfigError("tau_slack must be >= 0")
        if self.sources is not None:
            object.__setattr__(self, "sources", tuple(sorted(set(int(v) for v in self.sources))))

    def overrides(self) -> dict:
        out = {}
        for name in self.OVERRIDES:
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value) if name == "sources" else value
        return out

    def with_seed(self, seed: int) -> "TesterConfig":
        return dataclasses.replace(self, master_seed=seed)

    def resolve(self, graph: Graph) -> "ResolvedParams":
        n, m = graph.n, graph.m
        walks = self.walks if self.walks is not None else 2 * m * m
        length = self.length if self.length is not None else math.ceil(32.0 / self.alpha**2 * math.log(n))
        slack = self.tau_slack if self.tau_slack is not None else 2.0 * n ** -0.25
        sc = self.source_constant if self.source_constant is not None else DEFAULT_SOURCE_CONSTANT
        limit = self.congestion_limit if self.congestion_limit is not None else DEFAULT_CONGESTION_CONSTANT / self.epsilon
        if walks > _INT64_MAX // max(n, 1):
            raise ConfigError(f"K * n = {walks} * {n} overflows 64-bit counts")
        if length < 1:
            raise ConfigError(f"resolved walk length {length} < 1")
        if self.sources is not None:
            bad = [v for v in self.sources if not 1 <= v <= n]
            if bad:
                raise ConfigError(f"forced sources {bad} outside 1..{n}")
        return ResolvedParams(n, m, int(walks), int(length), float(slack), float(sc), float(limit))

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "epsilon": self.epsilon, "master_seed": self.master_seed, "overrides": self.overrides()}

    @classmethod
    def from_dict(cls, data: dict) -> "TesterConfig":
        data = dict(data)
        data.update(data.pop("overrides", {}) or {})
        if data.get("sources") is not None:
            data["sources"] = tuple(data["sources"])
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ResolvedParams:
    n: int
    m: int
    walks: int
    length: int
    tau_slack: float
    source_constant: float
    congestion_limit: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def source_probability(params: ResolvedParams, degree: int, epsilon: float) -> float:
    return min(1.0, params.source_constant * degree / (epsilon * 2 * params.m))


def _is_source(config: TesterConfig, params: ResolvedParams, ctx_rng, vertex: int, degree: int) -> bool:
    if config.sources is not None:
        return vertex in config.sources
    p = source_probability(params, degree, config.epsilon)
    return bool(ctx_rng.random() < p)


def sample_sources(graph: Graph, config: TesterConfig) -> list[int]:
    """Source set Q as the vertex programs will draw it (same RNG streams)."""
    params = config.resolve(graph)
    return [
        v
        for v in graph.vertices()
        if _is_source(config, params, congest.vertex_rng(config.master_seed, v, 0), v, graph.degree(v))
    ]


def threshold(graph: Graph, config: TesterConfig, v: int) -> float:
    """tau_v = m deg(v) (1 + tau_slack)."""
    params = config.resolve(graph)
    return params.m * graph.degree(v) * (1.0 + params.tau_slack)


def _sum_by(inv: np.ndarray, counts: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=np.int64)
    np.add.at(out, inv, counts)
    return out


@dataclass
class WalkLedger:
    """Per-vertex walk bookkeeping.

    ``w_sources``/``w_counts``: walks stationed here, all at step ``w_step``.
    ``d_sources``/``d_split``: last round's next-hop draw, row per source,
    column per neighbour (see :meth:`next_hops`).
    ``c``: {source: count} of walks that ended here, filled at step ell.
    """

    w_sources: np.ndarray = field(default_factory=lambda: _EMPTY)
    w_counts: np.ndarray = field(default_factory=lambda: _EMPTY)
    w_step: int = 0
    d_sources: np.ndarray = field(default_factory=lambda: _EMPTY)
    d_split: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    neighbors: tuple[int, ...] = ()
    c: dict = field(default_factory=dict)

    def next_hops(self) -> dict[tuple[int, int], int]:
        """Last round's forwarding assignments as {(source, dest): count}."""
        out = {}
        for i, q in enumerate(self.d_sources.tolist()):
            for j, dst in enumerate(self.neighbors):
                k = int(self.d_split[i, j])
                if k:
                    out[(q, dst)] = k
        return out

    def absorb(self, inbox: Sequence[Message], step: int) -> None:
        """Fold arrivals (all at ``step``) into the stationed walks."""
        if inbox:
            for msg in inbox:
                if msg.step != step:
                    raise ValueError(f"tuple at step {msg.step} arrived when step {step} was expected")
            srcs = np.concatenate([self.w_sources] + [msg.sources for msg in inbox])
            cnts = np.concatenate([self.w_counts] + [msg.counts for msg in inbox])
            uniq, inv = np.unique(srcs, return_inverse=True)
            self.w_sources, self.w_counts = uniq, _sum_by(inv, cnts, uniq.size)
        self.w_step = step

    def stationed(self) -> dict[int, int]:
        return {int(q): int(k) for q, k in zip(self.w_sources, self.w_counts)}


class TesterProgram:
    """The tester's per-vertex program for :func:`congest.run`."""

    def __init__(self, vertex: int, config: TesterConfig, params: ResolvedParams):
        self.vertex = vertex
        self.config = config
        self.params = params
        self.ledger = WalkLedger()
        self.is_source = False
        self.tau = 0.0
        self._pvals = None

    def init(self, ctx: VertexContext) -> None:
        self.tau = self.params.m * ctx.degree * (1.0 + self.params.tau_slack)
        self.is_source = _is_source(self.config, self.params, ctx.rng(0), ctx.vertex, ctx.degree)
        if self.is_source:
            self.ledger.w_sources = np.array([ctx.vertex], dtype=np.int64)
            self.ledger.w_counts = np.array([self.params.walks], dtype=np.int64)
        self.ledger.w_step = 0
        self.ledger.neighbors = tuple(ctx.neighbors)
        self._pvals = np.concatenate([[0.5], np.full(ctx.degree, 0.5 / ctx.degree)])

    def on_round(self, ctx: VertexContext, round_index: int, inbox: Sequence[Message]) -> list[Message]:
        ledger = self.ledger
        ledger.absorb(inbox, round_index - 1)
        return self.advance_step(ctx, round_index)

    def advance_step(self, ctx: VertexContext, round_index: int) -> list[Message]:
        """Move every stationed walk one lazy step; return the outgoing messages."""
        ledger = self.ledger
        if ledger.w_sources.size == 0:
            ledger.d_sources = _EMPTY
            ledger.d_split = np.zeros((0, ctx.degree), dtype=np.int64)
            ledger.w_step = round_index
            return []
        split = ctx.rng(round_index).multinomial(ledger.w_counts, self._pvals).astype(np.int64, copy=False)
        ledger.d_sources = ledger.w_sources
        ledger.d_split = split[:, 1:]
        out = []
        for j, dst in enumerate(ctx.neighbors):
            col = split[:, j + 1]
            nz = col > 0
            if nz.all():
                out.append(Message(ctx.vertex, dst, round_index, ledger.w_sources, col))
            elif nz.any():
                out.append(Message(ctx.vertex, dst, round_index, ledger.w_sources[nz], col[nz]))
        stay = split[:, 0]
        keep = stay > 0
        ledger.w_sources = ledger.w_sources[keep]
        ledger.w_counts = stay[keep]
        ledger.w_step = round_index
        if any(msg.n_tuples > self.params.congestion_limit for msg in out):
            ctx.halt_all("congestion")
        return out

    def finalize(self, ctx: VertexContext, inbox: Sequence[Message]) -> Outcome:
        ledger = self.ledger
        ledger.absorb(inbox, ledger.w_step)
        if ledger.w_step == self.params.length:
            ledger.c = ledger.stationed()
            ledger.w_sources, ledger.w_counts = _EMPTY, _EMPTY
        return decide(ledger.c, self.tau)


def decide(endpoints: dict[int, int], tau: float) -> Outcome:
    """Reject iff some source delivered strictly more than ``tau`` endpoints."""
    return Outcome.REJECT if any(count > tau for count in endpoints.values()) else Outcome.ACCEPT


@dataclass
class RunReport:
    config: TesterConfig
    params: ResolvedParams
    graph_summary: dict
    sources: list[int]
    verdicts: dict[int, Verdict]
    stats: list[RoundStats]
    endpoints: dict[int, dict[int, int]]
    ledger_totals: list[dict[int, int]] | None = None
    preprocessing_rounds: int = 0
    post_walk_rounds: int = 0

    @property
    def rounds(self) -> int:
        return len(self.stats)

    @property
    def rejecting(self) -> list[int]:
        return [v for v, vd in self.verdicts.items() if vd.outcome is Outcome.REJECT]

    @property
    def aborted(self) -> list[int]:
        return [v for v, vd in self.verdicts.items() if vd.outcome is Outcome.ABORTED_CONGESTION]

    @property
    def outcome(self) -> str:
        """Trial-level summary: 'aborted', 'reject' or 'accept'."""
        if self.aborted:
            return "aborted"
        if self.rejecting:
            return "reject"
        return "accept"

    def to_dict(self, histograms: bool = False) -> dict:
        out = {
            "config": self.config.to_dict(),
            "resolved": self.params.to_dict(),
            "graph": self.graph_summary,
            "seed": self.config.master_seed,
            "sources": list(self.sources),
            "verdicts": {str(v): vd.to_dict() for v, vd in sorted(self.verdicts.items())},
            "rejecting_vertices": self.rejecting,
            "aborted_vertices": self.aborted,
            "outcome": self.outcome,
            "rounds": self.rounds,
            "preprocessing_rounds": self.preprocessing_rounds,
            "post_walk_rounds": self.post_walk_rounds,
            "round_stats": [s.to_dict() for s in self.stats],
        }
        if histograms:
            out["endpoint_histograms"] = {
                str(q): {str(v): c for v, c in sorted(h.items())} for q, h in sorted(self.endpoints.items())
            }
        return out


def run_tester(
    graph: Graph,
    config: TesterConfig,
    workers: int = 1,
    track_ledger: bool = False,
) -> RunReport:
    """Run the tester for exactly ell rounds and collect the report.

    With ``track_ledger`` the per-source walk totals at every completed step
    are recorded in ``ledger_totals[step]``: stationed walks plus walks
    delivered but not yet absorbed.
    """
    params = config.resolve(graph)
    totals: list[dict[int, int]] = []

    def snapshot(programs, inboxes):
        acc: dict[int, int] = {}
        for v, prog in programs.items():
            for q, k in zip(prog.ledger.w_sources.tolist(), prog.ledger.w_counts.tolist()):
                acc[q] = acc.get(q, 0) + k
            for msg in inboxes.get(v, ()):
                for q, k in zip(msg.sources.tolist(), msg.counts.tolist()):
                    acc[q] = acc.get(q, 0) + k
        return dict(sorted(acc.items()))

    observer = None
    if track_ledger:
        def observer(r, programs, inboxes):
            totals.append(snapshot(programs, inboxes))

    def factory(v):
        return TesterProgram(v, config, params)

    result = congest.run(graph, factory, params.length, config.master_seed, workers=workers, observer=observer)
    programs = result.programs
    sources = sorted(v for v, p in programs.items() if p.is_source)
    if track_ledger:
        totals.insert(0, {q: params.walks for q in sources})
    endpoints: dict[int, dict[int, int]] = {}
    for v, prog in sorted(programs.items()):
        for q, k in prog.ledger.c.items():
            endpoints.setdefault(q, {})[v] = k
    return RunReport(
        config=config,
        params=params,
        graph_summary=graph.summary(),
        sources=sources,
        verdicts=result.verdicts,
        stats=result.stats,
        endpoints=endpoints,
        ledger_totals=totals if track_ledger else None,
    )
