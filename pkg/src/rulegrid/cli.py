"""Command-line entry points: extract, reduce, evaluate, serve.

Exit codes: 0 success, 1 input or solver error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback

import numpy as np

from .ingest import (
    DataError,
    ModelError,
    SchemaError,
    extract_rules,
    load_schema,
    parse_ensemble,
    rules_to_json,
)
from .reduction import SolverError, fidelity, random_selection, reduce_rules
from .workspace import load_workspace


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; this CLI reserves 2 for
    internal failures, so route them to 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="rulegrid", description="rule-set analysis for tree ensembles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write every rule of a model as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--format", choices=["json", "gbt-text"], default="json")
    p.add_argument("--schema", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reduce", help="select a representative rule subset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--format", choices=["json", "gbt-text"], default="json")
    p.add_argument("--m", dest="budget", type=int, default=80)
    p.add_argument("--xi", dest="margin", type=float, default=None)
    p.add_argument("--lambda", dest="tradeoff", type=float, default=None)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--report", required=True)

    p = sub.add_parser("evaluate", help="compare the reducer against baselines")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--format", choices=["json", "gbt-text"], default="json")
    p.add_argument("--m", dest="budget", type=int, default=80)
    p.add_argument("--baselines", default="random")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="run the exploration service")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--format", choices=["json", "gbt-text"], default="json")
    p.add_argument("--m", dest="budget", type=int, default=80)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_extract(args) -> int:
    schema = load_schema(args.schema)
    ensemble = parse_ensemble(args.model, args.format, schema)
    rules = extract_rules(ensemble, schema)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(rules_to_json(rules, schema), fh, indent=2)
        fh.write("\n")
    print(f"{len(rules)} rules written to {args.out}")
    return 0


def _cmd_reduce(args) -> int:
    fixed = args.margin is not None or args.tradeoff is not None
    if fixed and args.grid:
        raise ValueError("--grid conflicts with --xi/--lambda")
    if fixed and (args.margin is None or args.tradeoff is None):
        raise ValueError("--xi and --lambda go together")
    if not fixed and not args.grid:
        raise ValueError("pass --grid, or fix both --xi and --lambda")

    ws = load_workspace(args.model, args.data, args.schema, args.format)
    start = time.perf_counter()
    selection = reduce_rules(
        ws.rules, ws.samples, ws.schema,
        np.asarray(ws.ensemble.base_scores, dtype=float), ws.original_labels,
        budget=args.budget, scores=ws.scores,
        margin=args.margin, tradeoff=args.tradeoff,
    )
    elapsed = time.perf_counter() - start
    report = {
        "rule_count": len(ws.rules),
        "budget": args.budget,
        "selected_rule_ids": list(selection.rule_ids),
        "margin": selection.margin,
        "tradeoff": selection.tradeoff,
        "fidelity_train": selection.fidelity_train,
        "fidelity_test": selection.fidelity_test,
        "average_anomaly_score": selection.average_anomaly,
        "objective": selection.objective_value,
        "wall_time_seconds": elapsed,
    }
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"selected {len(selection.rule_ids)} of {len(ws.rules)} rules; "
          f"report written to {args.report}")
    return 0


def _cmd_evaluate(args) -> int:
    if args.baselines != "random":
        raise ValueError(f"unknown baseline: {args.baselines}")
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    if args.seed < 0:
        raise ValueError("--seed must be non-negative")

    ws = load_workspace(args.model, args.data, args.schema, args.format)
    base = np.asarray(ws.ensemble.base_scores, dtype=float)
    selection = reduce_rules(ws.rules, ws.samples, ws.schema, base,
                             ws.original_labels, budget=args.budget,
                             scores=ws.scores)
    scores_by_id = ws.scores_by_id()

    rng = np.random.default_rng(args.seed)
    fid_train, fid_test, anomaly = [], [], []
    all_ids = [r.id for r in ws.rules]
    for _ in range(args.trials):
        chosen = random_selection(all_ids, args.budget, rng)
        fid_train.append(fidelity(chosen, ws.rules, ws.samples, ws.schema,
                                  base, ws.original_labels, "train"))
        fid_test.append(fidelity(chosen, ws.rules, ws.samples, ws.schema,
                                 base, ws.original_labels, "test"))
        anomaly.append(float(np.mean([scores_by_id[i] for i in chosen])))

    report = {
        "budget": args.budget,
        "ours": {
            "fidelity_train": selection.fidelity_train,
            "fidelity_test": selection.fidelity_test,
            "average_anomaly_score": selection.average_anomaly,
            "margin": selection.margin,
            "tradeoff": selection.tradeoff,
        },
        "random": {
            "fidelity_train_mean": float(np.mean(fid_train)),
            "fidelity_test_mean": float(np.mean(fid_test)),
            "average_anomaly_score_mean": float(np.mean(anomaly)),
            "trials": args.trials,
            "seed": args.seed,
        },
    }
    print(json.dumps(report, indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ws = load_workspace(args.model, args.data, args.schema, args.format)
    app = create_app(ws, budget=args.budget)
    print(f"serving on http://{args.host}:{args.port}")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        raise ValueError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    except SystemExit as exc:
        # uvicorn turns startup failures (port in use, bad host) into exit 3
        if exc.code:
            raise ValueError(f"server failed to start on {args.host}:{args.port}") from exc
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "extract": _cmd_extract,
        "reduce": _cmd_reduce,
        "evaluate": _cmd_evaluate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (SchemaError, DataError, ModelError, SolverError,
            FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
