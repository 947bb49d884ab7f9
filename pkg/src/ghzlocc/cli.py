"""Command-line campaigns: ``python -m ghzlocc --command verify ...``.

Exit status is 0 when every check passes, 1 on a verification failure and
2 on bad arguments. ``--format machine`` prints a single JSON document; its
fields are listed in the README.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .analysis import (
    ResourceRow,
    VerificationError,
    lower_bound_demo,
    render_table,
    resource_comparison,
    trial_inputs,
)
from .gates import MAX_BLOCK_QUBITS
from .locc import transcript_to_jsonl
from .protocols import (
    CORRECTIONS,
    Verdict,
    ghz_protocol,
    schedule_deviation,
    sweep_schedules,
    two_bell_baseline,
    verify_report,
)
from .qstate import VERIFY_TOL

COMMANDS = ("verify", "enumerate", "lower-bound", "compare")
SWEEP_SAMPLES = 10


@dataclass(frozen=True)
class RunConfig:
    command: str
    protocol: str
    dims: tuple
    trials: int
    seed: int
    mode: str
    output_format: str
    schedule_sweep: bool
    skip_correction: tuple = ()

    def as_dict(self) -> dict:
        return {
            "command": self.command, "protocol": self.protocol, "dims": list(self.dims),
            "trials": self.trials, "seed": self.seed, "mode": self.mode,
            "format": self.output_format, "schedule_sweep": self.schedule_sweep,
            "skip_correction": list(self.skip_correction),
        }


def _dims(text: str) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,M, got {text!r}")
    if not (1 <= n <= MAX_BLOCK_QUBITS and 1 <= m <= MAX_BLOCK_QUBITS):
        raise argparse.ArgumentTypeError(f"N and M must be in [1, {MAX_BLOCK_QUBITS}], got {text!r}")
    return n, m


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ghzlocc",
        description="Verify the GHZ-assisted implementation of two consecutive controlled-block gates.")
    p.add_argument("--command", choices=COMMANDS, default="verify")
    p.add_argument("--protocol", choices=("ghz", "two-bell"), default="ghz")
    p.add_argument("--dims", type=_dims, default=(1, 1), metavar="N,M",
                   help="qubits in Bob's and Charlie's registers (each 1..3)")
    p.add_argument("--trials", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("sampled", "enumerate"), default="enumerate")
    p.add_argument("--format", dest="output_format", choices=("text", "machine"), default="text")
    p.add_argument("--schedule-sweep", action="store_true",
                   help="rerun each trial under all serial and some random party interleavings")
    p.add_argument("--skip-correction", action="append", choices=CORRECTIONS, default=[],
                   help="disable a classical correction (to see verification fail)")
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(ns.command, ns.protocol, ns.dims, ns.trials, ns.seed, ns.mode,
                     ns.output_format, ns.schedule_sweep, tuple(ns.skip_correction))


def _branch_table(report) -> list[dict]:
    return [
        {"outcomes": br.outcomes, "probability": br.probability,
         "exact_distance": br.exact_distance, "fidelity": br.fidelity}
        for br in report.branches
    ]


def _campaign(cfg: RunConfig) -> tuple[dict, bool]:
    run = ghz_protocol if cfg.protocol == "ghz" else two_bell_baseline
    scheme = "ghz" if cfg.protocol == "ghz" else "two_bell"
    mode = "enumerate" if cfg.command == "enumerate" else cfg.mode
    n_b, n_c = cfg.dims
    trials, failure, tally = [], None, None
    for t in range(cfg.trials):
        u, v, initial, ts = trial_inputs(n_b, n_c, cfg.seed, t)
        report = run(u, v, initial, mode=mode, seed=ts, skip=cfg.skip_correction)
        verdict = verify_report(report, VERIFY_TOL)
        row = {"trial": t, "trial_seed": ts, "max_exact_distance": report.max_exact_distance,
               "min_fidelity": report.min_fidelity, "passed": verdict.passed}
        if cfg.command == "enumerate":
            row["branches"] = _branch_table(report)
        if cfg.schedule_sweep and verdict:
            schedules = sweep_schedules(scheme, u, v, SWEEP_SAMPLES, ts)
            dev = schedule_deviation(scheme, u, v, initial, schedules, cfg.skip_correction)
            row["schedules"] = len(schedules)
            row["schedule_deviation"] = dev
            if not dev < VERIFY_TOL:
                verdict = Verdict(False, verdict.worst_branch, f"schedule deviation {dev:.3g}")
                row["passed"] = False
        tally = tally or report.tally.as_dict()
        trials.append(row)
        if not verdict:
            worst = verdict.worst_branch
            failure = {
                "trial": t, "trial_seed": ts, "reason": verdict.reason,
                "branch": worst.outcomes if worst else None,
                "branches": _branch_table(report),
                "transcript": transcript_to_jsonl(report.transcripts[worst.key]) if worst else "",
            }
            break
    doc = {"config": cfg.as_dict(), "trials": trials, "resource_tally": tally,
           "max_exact_distance": max(r["max_exact_distance"] for r in trials),
           "passed": failure is None}
    if failure:
        doc["failure"] = failure
    return doc, failure is None


def _lower_bound(cfg: RunConfig) -> tuple[dict, bool]:
    try:
        rep = lower_bound_demo()
    except VerificationError as err:
        return {"config": cfg.as_dict(), "passed": False, "failure": {"reason": str(err)}}, False
    doc = {
        "config": cfg.as_dict(),
        "branch_distances": rep.branch_distances,
        "branch_fidelities": rep.branch_fidelities,
        "output_entropies": rep.output_entropies,
        "resource_entropy": rep.resource_entropy,
        "two_bell_resource_entropy": rep.two_bell_resource_entropy,
        "resource_tally": rep.report.tally.as_dict(),
        "passed": rep.witness_holds,
    }
    return doc, rep.witness_holds


def _compare(cfg: RunConfig) -> tuple[dict, bool]:
    try:
        rows = resource_comparison(*cfg.dims, cfg.trials, cfg.seed)
    except VerificationError as err:
        return {"config": cfg.as_dict(), "passed": False,
                "failure": {"reason": str(err), "trial": err.trial, "trial_seed": err.seed}}, False
    return {"config": cfg.as_dict(), "rows": [r.as_dict() for r in rows], "passed": True}, True


def _text(doc: dict) -> str:
    cfg = doc["config"]
    lines = [f"ghzlocc {cfg['command']}: " + ("PASS" if doc["passed"] else "FAIL")]
    if cfg["command"] in ("verify", "enumerate"):
        lines.append(f"protocol={cfg['protocol']} dims={cfg['dims']} trials={len(doc['trials'])} "
                     f"seed={cfg['seed']} mode={cfg['mode']}")
        lines.append(f"max exact distance to target: {doc['max_exact_distance']:.3e}")
        lines.append(f"resources per run: {doc['resource_tally']}")
        if cfg["schedule_sweep"]:
            devs = [r.get("schedule_deviation", float("nan")) for r in doc["trials"]]
            lines.append(f"schedule sweep: max deviation {max(devs):.3e}")
        if cfg["command"] == "enumerate":
            for r in doc["trials"]:
                lines.append(f"trial {r['trial']} (seed {r['trial_seed']}):")
                for br in r["branches"]:
                    lines.append(f"  {br['outcomes']}  p={br['probability']:.6f}  "
                                 f"dist={br['exact_distance']:.2e}")
    elif cfg["command"] == "lower-bound" and "output_entropies" in doc:
        lines.append(f"GHZ-output fidelity (min over branches): {min(doc['branch_fidelities'].values()):.12f}")
        for cut, s in doc["output_entropies"].items():
            lines.append(f"output entropy {cut}: {s:.12f}")
        lines.append(f"consumed GHZ entropy A1|B1C1: {doc['resource_entropy']:.12f}")
        lines.append(f"two Bell pairs entropy Alice|rest: {doc['two_bell_resource_entropy']:.12f}")
    elif cfg["command"] == "compare" and "rows" in doc:
        lines.append(render_table([ResourceRow(**r) for r in doc["rows"]]))
    if "failure" in doc:
        f = doc["failure"]
        lines.append(f"failure: {f['reason']}")
        for key in ("trial", "trial_seed", "branch"):
            if f.get(key) is not None:
                lines.append(f"  {key}: {f[key]}")
        if f.get("transcript"):
            lines.append("  transcript:")
            lines.extend("    " + line for line in f["transcript"].splitlines())
    return "\n".join(lines)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"verify": _campaign, "enumerate": _campaign,
               "lower-bound": _lower_bound, "compare": _compare}[cfg.command]
    doc, ok = handler(cfg)
    if cfg.output_format == "machine":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_text(doc) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
