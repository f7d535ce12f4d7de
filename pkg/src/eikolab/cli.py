"""Command line front end: run scenarios, dump the kernel curve, check identities."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import EikolabError
from .inclusion import c0_bruteforce, det_kernel
from .scenario import (ScenarioConfig, ScenarioReport, run_scenario,
                       validate_config)


def _apply_overrides(raw: dict, pairs: list[str]) -> dict:
    for pair in pairs:
        if "=" not in pair:
            raise EikolabError(f"--set expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            val = json.loads(val)
        except json.JSONDecodeError:
            pass  # keep as string
        node = raw
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = val
    return raw


def _output_dir(args, name: str) -> str:
    if args.output:
        return args.output
    root = os.environ.get("EIKOLAB_OUTPUT_ROOT", "eikolab_out")
    return os.path.join(root, name)


def cmd_run(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        raw = json.load(fh)
    _apply_overrides(raw, args.set or [])
    validate_config(raw)
    cfg = ScenarioConfig(raw)
    outdir = _output_dir(args, cfg.name)
    rep = run_scenario(cfg, output_dir=outdir)
    for v in rep.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        print(f"[{mark}] {v.probe}: {v.check} ({v.threshold}) measured={v.measured}")
    print(f"report written to {outdir}")
    return 0 if rep.all_passed else 1


def cmd_kcurve(args) -> int:
    import numpy as np

    n = args.samples
    alphas = np.linspace(1e-3, 2 * np.pi - 1e-3, n)
    k = det_kernel(alphas)
    lines = ["alpha,f,g,ratio"]
    for a, fv, gv, rv in zip(alphas, k.f, k.g, k.ratio):
        lines.append(f"{a:.17g},{fv:.17g},{gv:.17g},{rv:.17g}")
    payload = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(payload)
    res = c0_bruteforce(n_samples=max(n, 10_000))
    print(f"certified min f/g^2 = {res.c0:.12g} at alpha = {res.alpha_at_min:.6g} "
          f"(min f = {res.f_min:.3e} > 0) [{res.conjecture}]")
    return 0


def cmd_identities(args) -> int:
    from .scenario import probe_beltrami, probe_identities

    raw = {"name": "identities", "seed": 0,
           "domain": {"origin": [-0.5, -0.5], "extent": [1.0, 1.0], "n": 16},
           "generator": {"kind": "planar"}, "probes": []}
    rep = ScenarioReport(name="identities", config=raw)
    cfg = ScenarioConfig(raw)
    probe_identities(cfg, rep)
    probe_beltrami(cfg, rep)
    for v in rep.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        print(f"[{mark}] {v.check} ({v.threshold}) measured={v.measured}")
    return 0 if rep.all_passed else 1


def cmd_report(args) -> int:
    path = os.path.join(args.dir, "report.json")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    print(f"scenario: {doc['name']}  (version {doc['metadata'].get('version', '?')})")
    for v in doc["verdicts"]:
        mark = "PASS" if v["passed"] else "FAIL"
        print(f"[{mark}] {v['probe']}: {v['check']} ({v['threshold']}) measured={v['measured']}")
    return 0 if doc["all_passed"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="eikolab",
                                     description="numerical laboratory for unit-gradient fields")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="path to a scenario JSON config")
    p_run.add_argument("--output", help="output directory (default: $EIKOLAB_OUTPUT_ROOT/<name>)")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config field, dotted path (repeatable)")
    p_run.set_defaults(fn=cmd_run)

    p_k = sub.add_parser("kcurve", help="emit the det/norm kernel table and certified bound")
    p_k.add_argument("--samples", type=int, default=100_000)
    p_k.add_argument("--output", help="CSV path (default: stdout)")
    p_k.set_defaults(fn=cmd_kcurve)

    p_i = sub.add_parser("identities", help="run the closed-form identity suite")
    p_i.set_defaults(fn=cmd_identities)

    p_r = sub.add_parser("report", help="pretty-print a scenario report directory")
    p_r.add_argument("dir")
    p_r.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EikolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
