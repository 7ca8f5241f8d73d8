"""Command-line entry point: ``whitham-lab <subcommand> [options]``."""

import argparse
import sys

from .config import ConfigError, config_from_mapping, load_config, make_config, with_updates
from .runner import (ExperimentError, default_suite, load_tables, report, report_lines, run,
                     write_report)

SUBCOMMANDS = {
    "symbols": "symbol-bounds",
    "decay": "decay",
    "strichartz": "strichartz",
    "evolve": "evolve",
    "picard": "picard",
    "global": "global-smalldata",
    "converge": "convergence",
}


def build_parser():
    p = argparse.ArgumentParser(prog="whitham-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, kind in list(SUBCOMMANDS.items()) + [("report", None)]:
        sp = sub.add_parser(name, help=f"run the {kind} experiment" if kind else
                            "summarise results in --out against the acceptance criteria")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", default=None, help="output directory (default: results)")
        sp.add_argument("--seed", type=int, default=None, help="random seed (u64)")
        sp.add_argument("--dim", type=int, choices=(1, 2), default=None)
        sp.add_argument("--quiet", action="store_true", help="suppress the summary lines")
        if kind is None:
            sp.add_argument("--all", action="store_true",
                            help="run the full default suite into --out first")
    return p


def _config_for(kind, args):
    overrides = {k: getattr(args, k) for k in ("seed", "dim", "out")
                 if getattr(args, k) is not None}
    if args.config:
        cfg = load_config(args.config, kind)
        if cfg.kind != kind:
            raise ConfigError({"kind": f"config is for {cfg.kind!r}, not {kind!r}"})
        if "dim" in overrides and overrides["dim"] != cfg.dim:
            # re-derive dimension-dependent defaults
            from dataclasses import asdict
            data = {k: v for k, v in asdict(cfg).items() if k not in ("lams", "ts", "r")}
            data.update(overrides)
            return config_from_mapping(data)
        return with_updates(cfg, **overrides) if overrides else cfg
    return make_config(kind, **overrides)


def main(argv=None):
    args = build_parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else print
    out_dir = args.out or "results"
    try:
        if args.command == "report":
            if args.all:
                over = {k: getattr(args, k) for k in ("seed",) if getattr(args, k) is not None}
                for cfg in default_suite(out=out_dir, **over):
                    run(cfg)
            doc = report(load_tables(out_dir))
            path = write_report(doc, out_dir)
            for line in report_lines(doc):
                say(line)
            say(f"report written to {path}")
            return 0 if doc["passed"] else 1
        cfg = _config_for(SUBCOMMANDS[args.command], args)
        table = run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for chk in table.checks:
        say(f"[{'PASS' if chk.passed else 'FAIL'}] {chk.name} = {chk.value:.6g} "
            f"(band [{chk.lo:.3g}, {chk.hi:.3g}])")
    return 0 if table.passed else 1


if __name__ == "__main__":
    sys.exit(main())
