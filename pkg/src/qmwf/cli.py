"""Command-line entry point ``qmwf``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import __version__
from .config import load_config, parse_config
from .corpus import CORPUS, corpus_names
from .decay import ClassifierParams
from .exceptions import ConfigurationError, WavefrontError
from .grid import load_signal_csv, save_signal_csv
from .operators import OperatorSpec, apply_operator
from .parametrix import build_parametrix, scale_threshold, truncation_order, verify_parametrix
from .runner import EXIT_CONFIG, EXIT_INTERNAL, EXIT_MISMATCH, EXIT_OK, propagation_summary, run
from .scanner import HEATMAP_HEADER, ProbeSet, heatmap_rows

log = logging.getLogger("qmwf")


def _floats(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigurationError(f"expected a comma-separated list of numbers, got {text!r}") from None


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    result = run(cfg)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return result.exit_code


def cmd_corpus(args) -> int:
    if args.action == "list":
        for name in corpus_names():
            e = CORPUS[name]
            print(f"{name}\tcentres={list(e.centers)}\t{e.provenance}")
        return EXIT_OK
    if not args.name:
        raise ConfigurationError("corpus run needs an entry name", "name")
    doc = {"signal": {"corpus": args.name}, "scan": {}}
    if args.s:
        doc["scan"]["s_values"] = _floats(args.s)
    doc["output"] = {"json": args.json, "heatmap": args.heatmap, "summary": args.summary}
    result = run(parse_config(doc))
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return result.exit_code


def cmd_propagate(args) -> int:
    P = OperatorSpec.parse(args.operator)
    u = load_signal_csv(args.signal)
    centers = _floats(args.centers)
    probes = ProbeSet(tuple(centers), (1, -1), args.radius)
    summary = propagation_summary(u, P, probes, [args.s], ClassifierParams(s=args.s),
                                  ("global", "zero-fill", "constant-fill"))
    if args.out:
        save_signal_csv(apply_operator(P, u), args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if summary["passed"] else EXIT_MISMATCH


PARAMETRIX_HEADER = ["N", "xi", "identity_residual", "remainder_sup", "remainder_constant", "term_count_S",
                     "remainder_count_s"]


def cmd_parametrix(args) -> int:
    P = OperatorSpec.parse(args.operator)
    r = args.scale_r if args.scale_r is not None else max(2.0, 1.1 * scale_threshold(P))
    rows = []
    for xi in _floats(args.xi_sweep):
        st = build_parametrix(P, args.N, xi, r)
        rep = verify_parametrix(P, st)
        rows.append([args.N, repr(xi), repr(rep.identity_residual), repr(rep.remainder_sup),
                     repr(rep.remainder_constant), st.term_count_S, st.remainder_count_s])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(PARAMETRIX_HEADER)
        w.writerows(rows)
    finally:
        if args.out:
            out.close()
    xs = [float(row[1]) for row in rows]
    sups = [float(row[3]) for row in rows]
    if len(xs) >= 2 and all(s > 0 for s in sups):
        slope = float(np.polyfit(np.log(np.abs(xs)), np.log(sups), 1)[0])
        log.info("remainder slope %.3f (order bound %d)", slope, -truncation_order(args.N, P.order_m))
    return EXIT_OK


def cmd_plotdata(args) -> int:
    with open(args.result) as fh:
        doc = json.load(fh)
    records = doc["probes"] if isinstance(doc, dict) else doc
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEATMAP_HEADER)
        w.writerows(heatmap_rows(records))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmwf", description="Gevrey wave-front set estimation on sampled signals.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run a JSON or YAML configuration")
    a.add_argument("config")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("corpus", help="list or run ground-truth corpus entries")
    c.add_argument("action", choices=("list", "run"))
    c.add_argument("name", nargs="?")
    c.add_argument("--s", help="comma-separated s values (default 0.5)")
    c.add_argument("--json", help="write probe records here")
    c.add_argument("--heatmap", help="write heatmap CSV here")
    c.add_argument("--summary", help="write the pass/fail summary here")
    c.set_defaults(func=cmd_corpus)

    pr = sub.add_parser("propagate", help="check the propagation inclusions for P(D) on a signal file")
    pr.add_argument("--operator", required=True, help="coefficients c0,c1,...,cm of P(D) = sum c_k D^k")
    pr.add_argument("--signal", required=True, help="CSV with columns x,re,im")
    pr.add_argument("--s", type=float, default=0.5)
    pr.add_argument("--centers", default="-2,0,2")
    pr.add_argument("--radius", type=float, default=1.0)
    pr.add_argument("--out", help="write P(D)u as CSV here")
    pr.set_defaults(func=cmd_propagate)

    pa = sub.add_parser("parametrix", help="residual report for the Neumann parametrix")
    pa.add_argument("--operator", required=True)
    pa.add_argument("--N", type=int, required=True)
    pa.add_argument("--xi-sweep", default="4,8,16,32")
    pa.add_argument("--scale-r", type=float, default=None)
    pa.add_argument("--out", help="CSV path (default stdout)")
    pa.set_defaults(func=cmd_parametrix)

    pd = sub.add_parser("plotdata", help="heatmap CSV from a result JSON")
    pd.add_argument("result")
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WavefrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
