"""Dense spectral oracle for lazy random walks on small graphs.

Everything here is exact linear algebra in float64: the lazy walk matrix, the
normalized Laplacian and its Jacobi eigen-decomposition, trap probabilities,
and numerical checks of the trap, Cheeger and mixing bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .conductance import BRUTE_FORCE_MAX_N, Cut, TooLarge, cheeger_constant_lazy
from .graph import Graph, GraphError, VertexSet

SPECTRAL_MAX_N = 2000
JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
RENORMALIZE_EVERY = 64
PASS_SLACK = 1e-9


class NoConvergence(RuntimeError):
    pass


class StartOutsideRegion(GraphError):
    pass


class DeltaTooLarge(GraphError):
    pass


class EtaOutOfRange(GraphError):
    pass


class NotSubset(GraphError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralBundle:
    graph: Graph
    walk_matrix: np.ndarray
    laplacian: np.ndarray
    omegas: np.ndarray
    lambdas: np.ndarray
    eigvecs: np.ndarray
    stationary: np.ndarray
    sweeps: int

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def lambda2(self) -> float:
        """Second largest eigenvalue of the lazy walk."""
        return float(self.lambdas[1]) if self.n > 1 else 0.0

    def coefficients(self, s: VertexSet) -> np.ndarray:
        """Coordinates of D^{1/2} 1_S in the eigenbasis of N."""
        x = np.sqrt(self.graph.degrees) * s.indicator()
        return self.eigvecs.T @ x

    def export_csv(self, directory) -> list[Path]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "walk_matrix.csv": self.walk_matrix,
            "laplacian.csv": self.laplacian,
            "eigenvalues.csv": np.column_stack([self.omegas, self.lambdas]),
            "eigenvectors.csv": self.eigvecs,
            "stationary.csv": self.stationary[:, None],
        }
        written = []
        for name, arr in files.items():
            header = "omega,lambda" if name == "eigenvalues.csv" else ""
            np.savetxt(out / name, arr, delimiter=",", fmt="%.17g", header=header, comments="")
            written.append(out / name)
        return written


def _fix_signs(vecs: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > eps)
        if nz.size and col[nz[0]] < 0:
            vecs[:, j] = -col
    return vecs


def build_spectral(graph: Graph, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralBundle:
    if graph.n > SPECTRAL_MAX_N:
        raise TooLarge(f"dense spectral oracle capped at n <= {SPECTRAL_MAX_N}, got n={graph.n}")
    a = graph.adjacency_matrix()
    deg = graph.degrees.astype(np.float64)
    n = graph.n
    walk = 0.5 * (np.eye(n) + a / deg[None, :])
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(n) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)

    w, v, sweeps = kernels.jacobi_eigh(lap, tol, max_sweeps)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not reach off-diagonal norm {tol} in {max_sweeps} sweeps")
    order = np.argsort(w, kind="stable")
    omegas = w[order]
    vecs = _fix_signs(v[:, order])
    for arr in (walk, lap, omegas, vecs):
        arr.setflags(write=False)
    lambdas = 1.0 - omegas / 2.0
    lambdas.setflags(write=False)
    pi = deg / deg.sum()
    pi.setflags(write=False)
    return SpectralBundle(graph, walk, lap, omegas, lambdas, vecs, pi, sweeps)


def walk_distribution(bundle: SpectralBundle, start: int, steps: int) -> np.ndarray:
    """Endpoint distribution of a ``steps``-step lazy walk from ``start``."""
    if not 0 <= steps <= 10**6:
        raise ValueError(f"steps must lie in [0, 1e6], got {steps}")
    p = np.zeros(bundle.n)
    p[start - 1] = 1.0
    return _iterate(bundle.walk_matrix, p, steps)


def _iterate(walk: np.ndarray, p: np.ndarray, steps: int) -> np.ndarray:
    for i in range(1, steps + 1):
        p = walk @ p
        if i % RENORMALIZE_EVERY == 0:
            p /= p.sum()
    return p


@dataclass(frozen=True)
class TrapQuery:
    """Trap query; ``start=None`` asks for the degree-weighted average over the region."""

    region: VertexSet
    length: int
    start: int | None = None

    def __post_init__(self):
        if len(self.region) == 0:
            raise GraphError("trap region must be nonempty")
        if self.start is not None and self.start not in self.region:
            raise StartOutsideRegion(f"start vertex {self.start} is not in the region")


def trap_probability(bundle: SpectralBundle, query: TrapQuery) -> float:
    t = query.region
    if query.start is not None:
        end = walk_distribution(bundle, query.start, query.length)
    else:
        p0 = bundle.graph.degrees * t.indicator() / t.volume
        end = _iterate(bundle.walk_matrix, p0, query.length)
    return float(end @ t.indicator())


def trap_curve(bundle: SpectralBundle, region: VertexSet, ell_max: int) -> np.ndarray:
    """Averaged trap(region, l) for l = 0..ell_max by iterated products."""
    ind = region.indicator()
    p = bundle.graph.degrees * ind / region.volume
    out = np.empty(ell_max + 1)
    out[0] = p @ ind
    for ell in range(1, ell_max + 1):
        p = bundle.walk_matrix @ p
        if ell % RENORMALIZE_EVERY == 0:
            p /= p.sum()
        out[ell] = p @ ind
    return out


def trap_spectral(bundle: SpectralBundle, region: VertexSet, length: int) -> float:
    """Averaged trap probability from the eigen-expansion sum(alpha_i^2 lambda_i^l) / vol."""
    alpha = bundle.coefficients(region)
    return float(np.sum(alpha**2 * bundle.lambdas**length) / region.volume)


def heavy_coefficient_mass(bundle: SpectralBundle, cut: Cut) -> tuple[float, float]:
    """Return (sum of alpha_i^2 over lambda_i >= 1 - 3 delta, 5/6 vol(S))."""
    alpha = bundle.coefficients(cut.side)
    heavy = bundle.lambdas >= 1.0 - 3.0 * cut.conductance
    return float(np.sum(alpha[heavy] ** 2)), 5.0 * cut.side.volume / 6.0


@dataclass
class LemmaRow:
    ell: int
    trap: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        return {"ell": self.ell, "trap": self.trap, "bound": self.bound, "pass": self.passed}


@dataclass
class LemmaReport:
    name: str
    rows: list[LemmaRow]
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def min_slack(self) -> float:
        return min(r.trap - r.bound for r in self.rows)

    def to_json(self) -> list[dict]:
        return [r.to_dict() for r in self.rows]

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _trap_bound(vol_region: float, two_m: float, head: float, delta: float, ell: int) -> float:
    share = vol_region / two_m
    return share + (head - share) * (1.0 - 3.0 * delta) ** ell


def _check_delta(cut: Cut) -> float:
    delta = cut.conductance
    if delta >= 1.0 / 3.0:
        raise DeltaTooLarge(f"cut conductance {delta:.6g} is not below 1/3")
    return delta


def verify_trap_lemma_S(bundle: SpectralBundle, s: Cut, ell_max: int) -> LemmaReport:
    """trap(S, l) >= vol(S)/2m + (5/6 - vol(S)/2m)(1 - 3 delta)^l for l = 0..ell_max."""
    delta = _check_delta(s)
    two_m = bundle.graph.total_volume
    traps = trap_curve(bundle, s.side, ell_max)
    rows = []
    for ell, tr in enumerate(traps):
        b = _trap_bound(s.side.volume, two_m, 5.0 / 6.0, delta, ell)
        rows.append(LemmaRow(ell, float(tr), b, bool(tr >= b - PASS_SLACK)))
    return LemmaReport("trap_S", rows, {"delta": delta, "vol_S": s.side.volume, "two_m": two_m})


def eta_head(eta: float) -> float:
    """(5/6)(1 - sqrt(6 eta / 5))^2."""
    return 5.0 / 6.0 * (1.0 - math.sqrt(6.0 * eta / 5.0)) ** 2


def verify_trap_lemma_T(bundle: SpectralBundle, s: Cut, t: VertexSet, ell_max: int) -> LemmaReport:
    """Averaged trap over T subset of S against the eta-discounted bound."""
    if not t.members <= s.side.members:
        raise NotSubset("T must be a subset of S")
    if len(t) == 0:
        raise EtaOutOfRange("T is empty")
    eta = 1.0 - t.volume / s.side.volume
    if not 0.0 <= eta < 5.0 / 6.0:
        raise EtaOutOfRange(f"eta = {eta:.6g} outside [0, 5/6)")
    delta = _check_delta(s)
    two_m = bundle.graph.total_volume
    head = eta_head(eta)
    traps = trap_curve(bundle, t, ell_max)
    rows = []
    for ell, tr in enumerate(traps):
        b = _trap_bound(t.volume, two_m, head, delta, ell)
        rows.append(LemmaRow(ell, float(tr), b, bool(tr >= b - PASS_SLACK)))
    return LemmaReport("trap_T", rows, {"delta": delta, "eta": eta, "vol_S": s.side.volume, "vol_T": t.volume, "two_m": two_m})


@dataclass(frozen=True)
class StickyWitness:
    vertex: int
    region: VertexSet
    trap: float
    bound: float


@dataclass(frozen=True)
class StickyResult:
    members: VertexSet
    witnesses: tuple[StickyWitness, ...]
    target_volume: float


def sticky_set(bundle: SpectralBundle, s: Cut, eta: float, ell: int) -> StickyResult:
    """Extract sticky vertices of S by repeated sub-region selection.

    Each iteration takes the remaining part R of S, orders its vertices by
    trap(v, R, ell) descending and keeps the shortest prefix T with
    vol(T) >= (1 - eta) vol(S). The vertex of T with the largest
    trap(v, T, ell) moves into the result if it meets the eta-discounted
    bound. The loop stops once vol(R) drops below (1 - eta) vol(S), or when no
    vertex of T meets the bound.
    """
    g = bundle.graph
    if g.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"sticky_set capped at n <= {BRUTE_FORCE_MAX_N}, got n={g.n}")
    if not 0.0 < eta < 5.0 / 6.0:
        raise EtaOutOfRange(f"eta = {eta:.6g} outside (0, 5/6)")
    delta = _check_delta(s)
    two_m = g.total_volume
    head = eta_head(eta)
    target = (1.0 - eta) * s.side.volume
    mpow = np.linalg.matrix_power(np.asarray(bundle.walk_matrix), ell)

    def trap_into(region: set[int]) -> dict[int, float]:
        idx = [v - 1 for v in region]
        mass = mpow[idx, :].sum(axis=0)  # column u: mass landing in region from u
        return {v: float(mass[v - 1]) for v in region}

    remaining = set(s.side.members)
    picked: list[StickyWitness] = []
    while remaining and sum(g.degree(v) for v in remaining) >= target:
        scores = trap_into(remaining)
        order = sorted(remaining, key=lambda v: (-scores[v], v))
        region, vol = [], 0
        for v in order:
            region.append(v)
            vol += g.degree(v)
            if vol >= target:
                break
        t_scores = trap_into(set(region))
        best = min(region, key=lambda v: (-t_scores[v], v))
        bound = _trap_bound(vol, two_m, head, delta, ell)
        if t_scores[best] < bound - PASS_SLACK:
            break
        picked.append(StickyWitness(best, g.vertex_set(region), t_scores[best], bound))
        remaining.discard(best)
    return StickyResult(g.vertex_set(w.vertex for w in picked), tuple(picked), target)


@dataclass
class CheegerReport:
    phi_star: float
    lambda2: float
    lower: float
    gap: float
    upper: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_cheeger(bundle: SpectralBundle, graph: Graph | None = None, tol: float = 1e-8) -> CheegerReport:
    """phi*^2 / 2 <= 1 - lambda_2 <= 2 phi*, with phi* from brute force."""
    graph = graph or bundle.graph
    if graph.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"needs brute-force conductance, n <= {BRUTE_FORCE_MAX_N}")
    phi = cheeger_constant_lazy(graph)
    lam2 = bundle.lambda2
    gap = 1.0 - lam2
    lower, upper = phi * phi / 2.0, 2.0 * phi
    ok = lower <= gap + tol and gap <= upper + tol
    return CheegerReport(phi, lam2, lower, gap, upper, bool(ok))


@dataclass
class MixingReport:
    ell: int
    lambda2: float
    bound: float
    max_deviation: float
    max_violation: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_mixing(bundle: SpectralBundle, ell: int) -> MixingReport:
    """max over (u, v) of |M^l(v, u) - deg(v)/2m| against lambda_2^l."""
    mpow = np.linalg.matrix_power(np.asarray(bundle.walk_matrix), ell)
    dev = np.abs(mpow - bundle.stationary[:, None])
    lam2 = max(bundle.lambda2, 0.0)
    bound = lam2**ell
    worst = float(dev.max())
    violation = worst - bound
    return MixingReport(ell, lam2, bound, worst, violation, bool(violation <= PASS_SLACK))
