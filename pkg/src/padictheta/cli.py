"""Command line entry point: ``padictheta <subcommand> [options]``."""

import argparse
import json
import sys

from .config import ConfigError, load_config
from .pipeline import STAGES, Pipeline

SUBCOMMANDS = {
    "validate": ("validate",),
    "run": STAGES,
    "table1": ("validate", "table1"),
    "table2": ("validate", "table2"),
    "jside": ("validate", "jside"),
    "lift": ("validate", "lift"),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="padictheta", description="p-adic theta series of ternary quaternion lattices")
    ap.add_argument("command", choices=sorted(SUBCOMMANDS))
    ap.add_argument("--config", help="TOML config (default: the bundled p = 7 example)")
    ap.add_argument("--bound", type=int, help="dense coefficient bound X")
    ap.add_argument("--precision", type=int, help="p-adic working precision N")
    ap.add_argument("--out", help="output directory for CSV/JSON artifacts")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--stage", choices=STAGES, help="with 'run': execute only this stage (after validate)")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(json.dumps({"status": "error", "error": str(exc)}), file=sys.stderr)
        return 2
    stages = SUBCOMMANDS[args.command]
    if args.stage:
        if args.command != "run":
            print("--stage only applies to 'run'", file=sys.stderr)
            return 2
        stages = ("validate", args.stage)
    pipe = Pipeline(cfg, bound=args.bound, precision=args.precision, threads=args.threads, out=args.out)
    report = pipe.run(stages)
    pipe.emit(report)
    summary = {name: s["status"] for name, s in report["stages"].items()}
    print(json.dumps({"status": report["status"], "t": report.get("t"), "stages": summary}, sort_keys=True))
    for name, s in report["stages"].items():
        for check, ok in sorted(s["checks"].items()):
            if not ok:
                print(f"FAILED {name}.{check}", file=sys.stderr)
        if s["status"] == "error":
            print(f"ERROR {name}: {s['error']}", file=sys.stderr)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
