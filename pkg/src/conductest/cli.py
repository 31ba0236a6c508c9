"""``conductest`` command line.

Exit codes: 0 ok, 2 bad flags or missing file, 3 graph validation failure,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import kernels
from .conductance import EmptySide, TooLarge
from .generators import InfeasibleParameters, parse_spec
from .graph import EdgeListFormatError, GraphError, load_edge_list
from .harness import (
    MODES,
    ExperimentSpec,
    IncompleteSpec,
    aggregate,
    brute_conductance_mode,
    mixing_mode,
    run_trials,
    verify_cheeger_mode,
    verify_lemmas,
)
from .spectral import build_spectral
from .tester import ConfigError

EXIT_OK, EXIT_BAD_FLAGS, EXIT_VALIDATION, EXIT_INTERNAL = 0, 2, 3, 4

EPILOG = """\
generator specs (--gen):
  complete:N           complete graph K_N
  cycle:N              cycle C_N
  path:N               path P_N
  dumbbell:K           two K_K joined by one edge (n = 2K)
  random_regular:D:N   random connected D-regular graph on N vertices (uses --graph-seed)
  barbell_path:K:L     two K_K joined by a path of L edges

examples:
  conductest test --gen complete:16 --alpha 0.6 --epsilon 0.3 --trials 30 --seed 7
  conductest verify-cheeger --gen dumbbell:4
  conductest test --config configs/acceptance/dumbbell12.json --deterministic --out r.json
"""


class BadFlags(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conductest",
        description="Distributed conductance tester simulator and spectral oracle.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("mode_pos", nargs="?", choices=MODES, metavar="MODE", help=f"one of {', '.join(MODES)}")
    p.add_argument("--mode", choices=MODES, help="alternative to the positional MODE")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="edge-list file ('n m' header, then 'u v' lines)")
    src.add_argument("--gen", metavar="SPEC", help="generator spec family:param[:param]")
    p.add_argument("--relabel", action="store_true", help="map arbitrary vertex labels in --graph to 1..n")
    p.add_argument("--config", metavar="FILE", help="JSON experiment fixture; explicit flags win")
    p.add_argument("--alpha", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--graph-seed", type=int, help="seed for random generators (default: --seed)")
    over = p.add_argument_group("desk-scale overrides")
    over.add_argument("--walks", type=int, metavar="K")
    over.add_argument("--length", type=int, metavar="L")
    over.add_argument("--tau-slack", type=float, metavar="X")
    over.add_argument("--source-constant", type=float, metavar="C")
    over.add_argument("--congestion-limit", type=float, metavar="Q")
    over.add_argument("--sources", metavar="V1,V2,...", help="force the source set")
    p.add_argument("--ell-max", type=int, default=50, help="verify-lemmas: largest walk length (default 50)")
    p.add_argument("--eta", type=float, default=0.1, help="verify-lemmas: sticky-set eta (default 0.1)")
    p.add_argument("--sticky-ell", type=int, default=20, help="verify-lemmas: sticky-set walk length")
    p.add_argument("--ell", type=int, action="append", help="mixing: walk length, repeatable (default 1 5 20)")
    p.add_argument("--out", metavar="PATH", help="write the JSON report here (default stdout)")
    p.add_argument("--csv", metavar="PATH", help="test: per-trial CSV rows")
    p.add_argument("--transcript", metavar="PATH", help="test: JSON-lines round transcript of every trial")
    p.add_argument("--export-csv", metavar="DIR", help="dump walk matrix, Laplacian and eigenpairs as CSV")
    p.add_argument("--histograms", action="store_true", help="test: include endpoint histograms per trial")
    p.add_argument("--deterministic", action="store_true", help="omit timestamps so reports are byte-identical")
    p.add_argument("--workers", type=int, default=1, help="threads per synchronous round (default 1)")
    return p


def _load_fixture(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise BadFlags(f"--config {path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise BadFlags(f"--config {path}: expected a JSON object")
    return data


def _resolve_spec(args) -> ExperimentSpec:
    fixture = _load_fixture(args.config) if args.config else {}
    mode = args.mode_pos or args.mode or fixture.get("mode")
    if args.mode_pos and args.mode and args.mode_pos != args.mode:
        raise BadFlags(f"positional mode {args.mode_pos!r} conflicts with --mode {args.mode!r}")
    if mode is None:
        raise BadFlags(f"a mode is required: one of {', '.join(MODES)}")
    graph_file = args.graph or (None if args.gen else fixture.get("graph"))
    gen = args.gen or (None if args.graph else fixture.get("gen"))
    if not graph_file and not gen:
        raise BadFlags("one of --graph FILE or --gen SPEC is required")

    overrides = dict(fixture.get("overrides", {}))
    for flag in ("walks", "length", "tau_slack", "source_constant", "congestion_limit"):
        value = getattr(args, flag)
        if value is not None:
            overrides[flag] = value
    if args.sources:
        try:
            overrides["sources"] = [int(x) for x in args.sources.split(",") if x.strip()]
        except ValueError:
            raise BadFlags(f"--sources expects comma-separated integers, got {args.sources!r}") from None

    def pick(name, default=None):
        value = getattr(args, name)
        return value if value is not None else fixture.get(name, default)

    try:
        return ExperimentSpec(
            mode=mode,
            graph=graph_file,
            gen=gen,
            relabel=bool(args.relabel or fixture.get("relabel", False)),
            alpha=pick("alpha"),
            epsilon=pick("epsilon"),
            seed=pick("seed", 0),
            trials=pick("trials", 1),
            graph_seed=pick("graph_seed"),
            overrides=overrides,
        )
    except (IncompleteSpec, TypeError) as exc:
        raise BadFlags(str(exc)) from None


def _build_graph(spec: ExperimentSpec):
    try:
        return spec.build_graph()
    except InfeasibleParameters as exc:
        raise BadFlags(f"--gen {spec.gen}: {exc}") from None


def _run(args, spec: ExperimentSpec) -> dict:
    graph = _build_graph(spec)
    mode = spec.mode
    report: dict = {"mode": mode, "spec": spec.to_dict(), "graph": graph.summary()}
    if not args.deterministic:
        report["backend"] = kernels.BACKEND
    if args.export_csv:
        build_spectral(graph).export_csv(args.export_csv)

    if mode == "test":
        if args.workers < 1:
            raise BadFlags("--workers must be >= 1")
        try:
            config = spec.tester_config()
            config.resolve(graph)
        except (ConfigError, TypeError) as exc:
            raise BadFlags(str(exc)) from None
        reports = run_trials(graph, config, spec.trials, workers=args.workers)
        agg = aggregate(reports)
        report["resolved"] = reports[0].params.to_dict()
        report["aggregate"] = agg.to_dict()
        if args.histograms:
            report["trial_reports"] = [r.to_dict(histograms=True) for r in reports]
        if args.csv:
            Path(args.csv).write_text(agg.csv_text())
        if args.transcript:
            lines = []
            for i, r in enumerate(reports):
                for s in r.stats:
                    rec = {"trial": i, **s.to_dict()}
                    lines.append(json.dumps(rec, sort_keys=True))
            Path(args.transcript).write_text("\n".join(lines) + ("\n" if lines else ""))
        report["pass"] = None
    elif mode == "verify-lemmas":
        report["result"] = verify_lemmas(graph, args.ell_max, args.eta, args.sticky_ell)
    elif mode == "verify-cheeger":
        report["result"] = verify_cheeger_mode(graph)
    elif mode == "mixing":
        report["result"] = mixing_mode(graph, args.ell or [1, 5, 20])
    elif mode == "brute-conductance":
        report["result"] = brute_conductance_mode(graph)
    if "result" in report:
        report["pass"] = report["result"].get("pass")
    return report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_BAD_FLAGS
    started = time.perf_counter()
    try:
        spec = _resolve_spec(args)
        report = _run(args, spec)
    except BadFlags as exc:
        print(f"conductest: error: {exc}", file=sys.stderr)
        return EXIT_BAD_FLAGS
    except FileNotFoundError as exc:
        print(f"conductest: error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_BAD_FLAGS
    except (EdgeListFormatError, GraphError, TooLarge, EmptySide) as exc:
        print(f"conductest: validation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"conductest: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if not args.deterministic:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
        report["elapsed_seconds"] = time.perf_counter() - started
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        agg = report.get("aggregate")
        if agg is not None:
            frac = agg["accept_fraction"]["value"]
            print(f"accept fraction {frac:.4f} over {agg['trials']} trials; report written to {args.out}")
        else:
            print(f"pass={report.get('pass')}; report written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
