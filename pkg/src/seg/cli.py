"""Command-line pipeline: detections -> events -> graph -> answers.

Every stage reads and writes plain JSON files, so stages can be run
stepwise, piped from other tooling, or replaced wholesale. Exit codes:
0 success, 1 usage error, 2 bad input data, 3 backend failure. Every
subcommand takes --json for machine-readable output on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import synth as synthmod
from .backend import AnswerRequest, make_answerer, make_judge
from .detlog import load_detection_log
from .errors import BackendError, DataError
from .events import ExtractionConfig, extract_events, events_to_json, load_events
from .graph import build_graph, export_dot
from .harness import (CONDITIONS, DEFAULT_WINDOW, FULL_LOG, SHORT_CONTEXT, TSG,
                      prepare_context, run_eval, write_report)
from .narrative import ESTIMATORS, verbalize
from .prune import PruneConfig, prune
from .synth import (generate, heavy_scenario, qa_from_json, standard_scenario,
                    tiny_scenario, write_scenario)

_PRESETS = {
    "standard": standard_scenario,
    "heavy": heavy_scenario,
    "tiny": tiny_scenario,
}

_MODES = {"short": SHORT_CONTEXT, "full": FULL_LOG, "tsg": TSG}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for data errors."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_extract_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, default=100.0,
                   help="interaction radius in pixels (default 100; "
                        "use 200 for wide-angle footage)")
    p.add_argument("--beta", type=int, default=5,
                   help="frames of hysteresis before an interaction ends "
                        "(default 5)")
    p.add_argument("--focus-class", default="person",
                   help="class that must participate in every interaction "
                        "(default person)")


def _add_prune_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, default=0.3,
                   help="lexical relevance threshold in [0,1] (default 0.3)")
    p.add_argument("--no-stopwords", action="store_true",
                   help="score against all query tokens, stopwords included")
    p.add_argument("--max-events", type=int, default=None,
                   help="cap on retrieved events")


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", default="mock",
                   help="'mock' or an http(s) answer service base URL")
    p.add_argument("--request-timeout", type=float, default=60.0,
                   help="HTTP timeout in seconds (default 60)")
    p.add_argument("--max-retries", type=int, default=3,
                   help="HTTP retries after the first attempt (default 3)")


def _prune_config(args: argparse.Namespace) -> PruneConfig:
    return PruneConfig(tau=args.tau, use_stopwords=not args.no_stopwords,
                       max_events=getattr(args, "max_events", None))


def _extraction_config(args: argparse.Namespace) -> ExtractionConfig:
    return ExtractionConfig(delta=args.delta, beta=args.beta,
                            focus_class=args.focus_class)


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(args: argparse.Namespace, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def _cmd_extract(args: argparse.Namespace) -> int:
    log = load_detection_log(args.infile)
    events = extract_events(log, _extraction_config(args))
    _write_text(args.out, events_to_json(events))
    _emit(args, {"events": len(events), "frames": log.n_frames,
                 "entities": len(log.entities()), "out": args.out},
          f"extracted {len(events)} events from {log.n_frames} frames "
          f"-> {args.out}")
    return 0


def _cmd_graph(args: argparse.Namespace) -> int:
    g = build_graph(load_events(args.events))
    nodes = [{"id": n.id, "class": n.cls, "degree": n.degree}
             for n in g.nodes()]
    _emit(args, {"nodes": g.n_nodes, "edges": g.n_edges, "entities": nodes},
          f"graph: {g.n_nodes} nodes, {g.n_edges} edges\n" + "\n".join(
              f"  {n['id']} ({n['class']}) degree {n['degree']}"
              for n in nodes))
    return 0


def _cmd_prune(args: argparse.Namespace) -> int:
    g = build_graph(load_events(args.events))
    result = prune(g, args.query, _prune_config(args))
    if args.json:
        sys.stdout.write(result.to_json())
    else:
        print(f"mode: {result.mode}")
        print(f"anchors: {', '.join(sorted(result.anchors)) or '-'}")
        print(f"kept {len(result.events)} of {result.total_events} events "
              f"(compression {result.compression:.4f})")
    return 0


def _cmd_narrate(args: argparse.Namespace) -> int:
    events = load_events(args.events)
    if args.query is not None:
        result = prune(build_graph(events), args.query, _prune_config(args))
        narrative = verbalize(result.events, args.estimator)
    else:
        narrative = verbalize(sorted(events, key=lambda e: (e.frame, e.seq)),
                              args.estimator)
    _write_text(args.out, narrative.text + "\n")
    if args.out != "-":
        _emit(args, {"lines": len(narrative.lines),
                     "estimated_tokens": narrative.estimated_tokens,
                     "events": narrative.source_event_count, "out": args.out},
              f"wrote {len(narrative.lines)} lines "
              f"(~{narrative.estimated_tokens} tokens) -> {args.out}")
    return 0


def _cmd_answer(args: argparse.Namespace) -> int:
    events = load_events(args.events)
    prep = prepare_context(
        sorted(events, key=lambda e: (e.frame, e.seq)), _MODES[args.mode],
        args.question, prune_cfg=_prune_config(args), window=args.window,
        t_max=args.t_max, estimator=args.estimator)
    backend = make_answerer(args.backend, timeout=args.request_timeout,
                            max_retries=args.max_retries)
    resp = backend.answer(AnswerRequest(context=prep.context,
                                        question=args.question))
    _emit(args, {"answer": resp.answer, "mode": prep.mode,
                 "compression": prep.compression,
                 "reported_input_tokens": resp.reported_input_tokens},
          resp.answer)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    seed = args.seed
    if args.seed is not None:
        scenario = generate(standard_scenario(args.seed))
        events = extract_events(scenario.log, _extraction_config(args))
        qa = scenario.qa
        t_max = scenario.log.span()
    else:
        if args.qa is None:
            raise DataError("eval needs --qa (or --seed for the built-in workload)")
        with open(args.qa, "rb") as fh:
            qa = qa_from_json(fh.read())
        if args.events is not None:
            events = load_events(args.events)
            log = load_detection_log(args.detections) if args.detections else None
        elif args.detections is not None:
            log = load_detection_log(args.detections)
            events = extract_events(log, _extraction_config(args))
        else:
            raise DataError("eval needs --events or --detections (or --seed)")
        t_max = args.t_max if args.t_max is not None else (
            log.span() if log is not None else None)

    backend = make_answerer(args.backend, timeout=args.request_timeout,
                            max_retries=args.max_retries)
    judge = make_judge(args.judge, timeout=args.request_timeout,
                       max_retries=args.max_retries)
    report = run_eval(events, qa, backend, judge,
                      conditions=tuple(args.conditions.split(",")) if args.conditions
                      else CONDITIONS,
                      window=args.window, prune_cfg=_prune_config(args),
                      t_max=t_max, estimator=args.estimator,
                      concurrency=args.concurrency, seed=seed,
                      backend_name=args.backend, judge_name=args.judge)
    paths = write_report(report, args.out_dir)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    else:
        for cond in CONDITIONS:
            if cond in report.conditions:
                s = report.conditions[cond]
                print(f"{cond:>13}: accuracy {100 * s.accuracy:5.1f}%  "
                      f"avg tokens {s.avg_tokens:8.1f}  "
                      f"avg compression {100 * s.avg_compression:5.1f}%")
        print(f"report -> {paths['md']}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    scenario = generate(_PRESETS[args.preset](args.seed))
    paths = write_scenario(scenario, args.out_dir)
    _emit(args, {"preset": args.preset, "seed": args.seed,
                 "entities": scenario.spec.n_entities,
                 "frames": scenario.spec.duration,
                 "gold_events": len(scenario.gold_events),
                 "qa": len(scenario.qa), **paths},
          f"{args.preset} scenario (seed {args.seed}): "
          f"{scenario.spec.n_entities} entities, {scenario.spec.duration} "
          f"frames, {len(scenario.gold_events)} gold events, "
          f"{len(scenario.qa)} QA -> {args.out_dir}")
    return 0


def _cmd_export_dot(args: argparse.Namespace) -> int:
    g = build_graph(load_events(args.events))
    _write_text(args.out, export_dot(g))
    if args.out != "-":
        _emit(args, {"nodes": g.n_nodes, "edges": g.n_edges, "out": args.out},
              f"wrote DOT graph ({g.n_nodes} nodes, {g.n_edges} edges) "
              f"-> {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="seg",
                     description="Symbolic interaction-event indexing for "
                                 "long videos.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text,
                           description=help_text)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        return p

    p = add("extract", _cmd_extract,
            "Extract START/END interaction events from a detection log.")
    p.add_argument("--in", dest="infile", required=True,
                   help="detection-log JSON")
    p.add_argument("--out", required=True, help="event-log JSON ('-' for stdout)")
    _add_extract_flags(p)

    p = add("graph", _cmd_graph,
            "Summarize the temporal scene graph of an event log.")
    p.add_argument("--events", required=True, help="event-log JSON")

    p = add("prune", _cmd_prune,
            "Retrieve the query-relevant slice of the scene graph.")
    p.add_argument("--events", required=True, help="event-log JSON")
    p.add_argument("--query", required=True, help="natural-language query")
    _add_prune_flags(p)

    p = add("narrate", _cmd_narrate,
            "Verbalize an event log (optionally pruned by a query).")
    p.add_argument("--events", required=True, help="event-log JSON")
    p.add_argument("--query", default=None,
                   help="prune to this query before verbalizing")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--estimator", choices=ESTIMATORS, default="bytes",
                   help="token estimator (default bytes)")
    _add_prune_flags(p)

    p = add("answer", _cmd_answer, "Answer one question over an event log.")
    p.add_argument("--events", required=True, help="event-log JSON")
    p.add_argument("--question", required=True)
    p.add_argument("--mode", choices=sorted(_MODES), default="tsg",
                   help="context condition (default tsg)")
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW,
                   help="short-context window seconds (default 30)")
    p.add_argument("--t-max", type=float, default=None,
                   help="video end time for the short-context window")
    p.add_argument("--estimator", choices=ESTIMATORS, default="bytes")
    _add_prune_flags(p)
    _add_backend_flags(p)

    p = add("eval", _cmd_eval,
            "Run the three-condition evaluation and write report files.")
    p.add_argument("--events", default=None, help="event-log JSON")
    p.add_argument("--qa", default=None, help="QA-set JSON")
    p.add_argument("--detections", default=None,
                   help="detection-log JSON (event source if --events "
                        "missing; also fixes the video span)")
    p.add_argument("--seed", type=int, default=None,
                   help="run the built-in synthetic workload with this seed")
    p.add_argument("--judge", default="exact",
                   help="'exact', 'substring', or a judge service URL")
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW,
                   help="short-context window seconds (default 30)")
    p.add_argument("--t-max", type=float, default=None,
                   help="video end time override")
    p.add_argument("--out-dir", default="seg-report",
                   help="directory for report.md/csv/json (default seg-report)")
    p.add_argument("--concurrency", type=int, default=4,
                   help="parallel backend requests (default 4)")
    p.add_argument("--estimator", choices=ESTIMATORS, default="bytes")
    p.add_argument("--conditions", default=None,
                   help="comma-separated subset of "
                        "SHORT_CONTEXT,FULL_LOG,TSG (default all)")
    _add_prune_flags(p)
    _add_extract_flags(p)
    _add_backend_flags(p)

    p = add("synth", _cmd_synth,
            "Generate a synthetic detection log with gold events and QA.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=sorted(_PRESETS), default="standard")
    p.add_argument("--out-dir", required=True)

    p = add("export-dot", _cmd_export_dot,
            "Export the scene graph in Graphviz DOT form.")
    p.add_argument("--events", required=True, help="event-log JSON")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except BackendError as exc:
        print(f"seg: backend error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"seg: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"seg: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"seg: invalid arguments: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
