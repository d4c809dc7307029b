"""Config-driven runs: scan a signal, compare with corpus ground truth, write artifacts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .corpus import corpus_entry
from .decay import REGULAR
from .grid import load_signal_csv
from .operators import inclusion_check
from .scanner import ProbeSet, WavefrontEstimate, scan, singular_support, write_heatmap_csv, write_json

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_MISMATCH = 3


@dataclass
class RunResult:
    estimate: WavefrontEstimate
    summary: dict
    exit_code: int
    extra: dict = field(default_factory=dict)


def load_run_signal(cfg: RunConfig):
    if cfg.signal.corpus is not None:
        return corpus_entry(cfg.signal.corpus).build(cfg.grid.build())
    return load_signal_csv(cfg.signal.file)


def compare_ground_truth(wf: WavefrontEstimate, truth: dict) -> list:
    """Probes whose verdict differs from the expected one, at every scanned ``s``."""
    mismatches = []
    for s in wf.s_values:
        for e in wf.at(s):
            want = truth.get((e.x0, e.direction))
            if want is not None and e.decision != want:
                mismatches.append({"x0": e.x0, "direction": e.direction, "s": s, "expected": want,
                                   "got": e.decision})
    return mismatches


def run(cfg: RunConfig) -> RunResult:
    params = cfg.classifier_params()
    f = load_run_signal(cfg)
    probes = ProbeSet(tuple(cfg.probe_centers()), (1, -1), cfg.probes.radius)
    wf = scan(f, probes, params, cfg.extension_kinds, cfg.s_values(), cfg.scan.s_star)
    summary = {
        "signal": cfg.signal.corpus or cfg.signal.file,
        "s_values": wf.s_values,
        "singular": {repr(s): sorted([x0, d] for x0, d in wf.singular_set(s)) for s in wf.s_values},
        "singular_support": {repr(s): sorted(singular_support(wf, s)) for s in wf.s_values},
        "all_regular": all(e.decision == REGULAR for e in wf.entries),
        "uniformity": {repr(s): wf.uniformity(s) for s in wf.s_values},
        "warnings": list(wf.warnings),
        "errors": [e.to_record() for e in wf.entries if e.error is not None],
    }
    exit_code = EXIT_OK
    if cfg.signal.corpus is not None:
        mism = compare_ground_truth(wf, corpus_entry(cfg.signal.corpus).ground_truth)
        summary["ground_truth"] = {"passed": not mism, "mismatches": mism}
        if mism:
            exit_code = EXIT_MISMATCH
    extra = {}
    P = cfg.operator_spec()
    if P is not None:
        extra["propagation"] = propagation_summary(f, P, probes, wf.s_values, params, cfg.extension_kinds)
        summary["propagation"] = extra["propagation"]
    result = RunResult(wf, summary, exit_code, extra)
    write_outputs(cfg, result)
    return result


def propagation_summary(u, P, probes, s_values, params, kinds) -> dict:
    out = {"operator": [_coeff_repr(c) for c in P.to_list()], "by_s": {}}
    for s in s_values:
        rep = inclusion_check(u, P, probes, s, params, kinds)
        out["by_s"][repr(s)] = {
            "passed": rep.passed,
            "singular_u": sorted([x0, d] for x0, d in rep.singular_u),
            "singular_Pu": sorted([x0, d] for x0, d in rep.singular_pu),
            "characteristic": list(rep.characteristic),
            "first_violations": [list(p) for p in rep.first_violations],
            "second_violations": [list(p) for p in rep.second_violations],
        }
    out["passed"] = all(v["passed"] for v in out["by_s"].values())
    return out


def _coeff_repr(c):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def write_outputs(cfg: RunConfig, result: RunResult):
    out = cfg.output
    if out.json:
        _mkparent(out.json)
        write_json(result.estimate, out.json, {"config": cfg.to_dict()})
    if out.heatmap:
        _mkparent(out.heatmap)
        write_heatmap_csv(result.estimate.to_records(), out.heatmap)
    if out.summary:
        _mkparent(out.summary)
        with open(out.summary, "w") as fh:
            json.dump(result.summary, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _mkparent(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)


__all__ = ["run", "RunResult", "compare_ground_truth", "propagation_summary", "load_run_signal",
           "EXIT_OK", "EXIT_INTERNAL", "EXIT_CONFIG", "EXIT_MISMATCH"]
