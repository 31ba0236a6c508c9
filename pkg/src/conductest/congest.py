"""Synchronous CONGEST-round engine.

Every vertex runs its own program object. In round ``r`` each program sees
only the messages its neighbours sent in round ``r - 1`` and returns an
outbox; the engine checks locality and the one-message-per-directed-edge cap,
records tuple traffic, then delivers. Bandwidth is accounted in tuples.
"""

from __future__ import annotations

import enum
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .graph import Graph


class ProgramPanic(RuntimeError):
    """A vertex handler raised or broke an engine rule."""

    def __init__(self, vertex: int, round_index: int, message: str):
        super().__init__(f"vertex {vertex}, round {round_index}: {message}")
        self.vertex = vertex
        self.round_index = round_index


class Outcome(str, enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    ABORTED_CONGESTION = "AbortedCongestion"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    round: int

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value, "round": self.round}


@dataclass(frozen=True, eq=False)
class Message:
    """Tuples ``(source, count, step)`` travelling along one directed edge.

    Sources and counts are held as parallel int64 arrays; every tuple of a
    message shares the same step.
    """

    src: int
    dst: int
    step: int
    sources: np.ndarray
    counts: np.ndarray

    @property
    def n_tuples(self) -> int:
        return int(self.sources.shape[0])

    def tuples(self) -> list[tuple[int, int, int]]:
        return [(int(q), int(c), self.step) for q, c in zip(self.sources, self.counts)]


@dataclass
class RoundStats:
    round: int
    messages: int
    tuples: int
    max_edge_tuples: int
    halted: bool = False

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "messages": self.messages,
            "tuples": self.tuples,
            "max_edge_tuples": self.max_edge_tuples,
            "halted": self.halted,
        }


class VertexContext:
    """What a vertex may see: its ID, its neighbourhood, n, m and its RNG streams."""

    def __init__(self, engine: "_Engine", vertex: int, graph: Graph):
        self._engine = engine
        self.vertex = vertex
        self.neighbors = graph.neighbors(vertex)
        self.degree = len(self.neighbors)
        self.n = graph.n
        self.m = graph.m

    def rng(self, round_index: int) -> np.random.Generator:
        return vertex_rng(self._engine.master_seed, self.vertex, round_index)

    def halt_all(self, reason: str = "reject") -> None:
        self._engine.request_halt(self.vertex, reason)


def vertex_rng(master_seed: int, vertex: int, round_index: int) -> np.random.Generator:
    """Counter-based stream for ``(master_seed, vertex, round)``.

    Philox keyed on the master seed; the high counter words carry the round and
    vertex, so streams never overlap and do not depend on execution order.
    """
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    key = [master_seed & 0xFFFFFFFFFFFFFFFF, master_seed >> 64]
    return np.random.Generator(np.random.Philox(counter=[0, 0, round_index, vertex], key=key))


class VertexProgram(Protocol):
    def init(self, ctx: VertexContext) -> None: ...

    def on_round(self, ctx: VertexContext, round_index: int, inbox: Sequence[Message]) -> list[Message]: ...

    def finalize(self, ctx: VertexContext, inbox: Sequence[Message]) -> Outcome: ...


@dataclass
class RunResult:
    verdicts: dict[int, Verdict]
    stats: list[RoundStats]
    programs: dict[int, object]
    rounds_requested: int
    halted_by: dict[int, str] = field(default_factory=dict)

    @property
    def rounds_executed(self) -> int:
        return len(self.stats)

    def transcript_lines(self) -> list[str]:
        return [json.dumps(s.to_dict(), sort_keys=True) for s in self.stats]


class _Engine:
    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        self._halts: dict[int, str] = {}
        self._lock = threading.Lock()

    def request_halt(self, vertex: int, reason: str) -> None:
        with self._lock:
            self._halts.setdefault(vertex, reason)

    def halts(self) -> dict[int, str]:
        with self._lock:
            return dict(sorted(self._halts.items()))


def _check_outbox(graph: Graph, v: int, r: int, outbox) -> None:
    seen = set()
    nbrs = set(graph.neighbors(v))
    for msg in outbox:
        if not isinstance(msg, Message):
            raise ProgramPanic(v, r, f"outbox holds {type(msg).__name__}, not Message")
        if msg.src != v:
            raise ProgramPanic(v, r, f"message claims src {msg.src}")
        if msg.dst not in nbrs:
            raise ProgramPanic(v, r, f"message to non-neighbour {msg.dst}")
        if msg.dst in seen:
            raise ProgramPanic(v, r, f"second message on edge ({v}, {msg.dst})")
        seen.add(msg.dst)
        if msg.step != r:
            raise ProgramPanic(v, r, f"tuple step {msg.step} does not match round {r}")
        if msg.counts.shape != msg.sources.shape or (msg.counts.size and msg.counts.min() < 1):
            raise ProgramPanic(v, r, "tuple counts must be >= 1 and aligned with sources")


def run(
    graph: Graph,
    program_factory: Callable[[int], VertexProgram],
    rounds: int,
    master_seed: int,
    workers: int = 1,
    observer: Callable[[int, dict, dict], None] | None = None,
) -> RunResult:
    """Run ``rounds`` synchronous rounds of the vertex programs on ``graph``.

    ``observer(round, programs, inboxes)`` is called after each delivered
    round with the program objects and the freshly delivered inboxes; it is an
    instrumentation hook and must not mutate them.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    engine = _Engine(master_seed)
    vertices = list(graph.vertices())
    ctxs = {v: VertexContext(engine, v, graph) for v in vertices}
    programs = {v: program_factory(v) for v in vertices}
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def call(fn, v, r):
        try:
            return fn()
        except ProgramPanic:
            raise
        except Exception as exc:
            raise ProgramPanic(v, r, f"{type(exc).__name__}: {exc}") from exc

    def each(fn, r):
        if pool is None:
            return [call(lambda v=v: fn(v), v, r) for v in vertices]
        return list(pool.map(lambda v: call(lambda: fn(v), v, r), vertices))

    try:
        each(lambda v: programs[v].init(ctxs[v]), 0)
        inboxes: dict[int, list[Message]] = {v: [] for v in vertices}
        stats: list[RoundStats] = []
        halted_round = 0 if engine.halts() else None
        for r in range(1, rounds + 1 if halted_round is None else 1):
            outboxes = each(lambda v: list(programs[v].on_round(ctxs[v], r, inboxes[v]) or []), r)
            sent = tuples = widest = 0
            fresh: dict[int, list[Message]] = {v: [] for v in vertices}
            for v, outbox in zip(vertices, outboxes):
                _check_outbox(graph, v, r, outbox)
                for msg in outbox:
                    sent += 1
                    tuples += msg.n_tuples
                    widest = max(widest, msg.n_tuples)
                    fresh[msg.dst].append(msg)
            halts = engine.halts()
            stats.append(RoundStats(r, sent, tuples, widest, bool(halts)))
            if halts:
                # end-of-round stop: nothing from this round is delivered
                halted_round = r
                inboxes = {v: [] for v in vertices}
                break
            for v in vertices:
                fresh[v].sort(key=lambda msg: msg.src)
            inboxes = fresh
            if observer is not None:
                observer(r, programs, inboxes)

        halts = engine.halts()
        final_round = halted_round if halted_round is not None else rounds
        outcomes = each(
            lambda v: None if v in halts else programs[v].finalize(ctxs[v], inboxes[v]),
            final_round,
        )
    finally:
        if pool is not None:
            pool.shutdown()

    verdicts = {}
    for v, outcome in zip(vertices, outcomes):
        if v in halts:
            outcome = Outcome.ABORTED_CONGESTION if halts[v] == "congestion" else Outcome.REJECT
        verdicts[v] = Verdict(Outcome(outcome), final_round)
    return RunResult(verdicts, stats, programs, rounds, halts)
