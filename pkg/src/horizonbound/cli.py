"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on an inequality or property
violation, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys


from .config import ConfigError, load_config, load_work_config, to_matrix
from .errors import HorizonBoundError
from .harness import (
    SweepRanges,
    execute,
    format_row,
    row_violations,
    sweep,
    write_csv,
)
from .ledger import WorkIntegralSpec, work_integral
from .verify import SUITES, WORK_TOL, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    res = execute(cfg, timing=args.timing)
    if args.out:
        write_csv([res.row], args.out)
    led = res.ledger
    print(format_row(res.row, {"matter_residual": f"{led.matter_residual:.3e}",
                               "saturation_residual": f"{led.saturation_residual:.3e}"}))
    bad = row_violations(res.row)
    for b in bad:
        print(f"VIOLATION {b}")
    return EXIT_VIOLATION if bad else EXIT_OK


def _cmd_sweep(args) -> int:
    ranges = SweepRanges(dim_max=args.dim_max, kraus_max=args.kraus_max, slack=args.slack)
    res = sweep(args.instances, ranges, master_seed=args.master_seed, workers=args.workers, timing=args.timing)
    write_csv(res.rows, args.out)
    print(res.summary.format())
    return EXIT_OK if res.summary.passed else EXIT_VIOLATION


def _cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_INPUT
    checks = run_suite(args.suite, args.instances)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return EXIT_OK if ok else EXIT_VIOLATION


def _cmd_work(args) -> int:
    wc = load_work_config(args.config)
    spec = WorkIntegralSpec(tuple(to_matrix(h) for h in wc.path), wc.beta, wc.steps)
    res = work_integral(spec)
    print(f"work               {res.work:.17g}")
    print(f"free_energy_delta  {res.free_energy_delta:.17g}")
    print(f"rel_error          {res.rel_error:.3e}")
    return EXIT_OK if res.rel_error <= WORK_TOL else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horizonbound",
                                description="Entropy-bound experiments for POVMs near a black hole horizon.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--timing", action="store_true", help="fill wall_time_ms (breaks byte-identical output)")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="randomized verification sweep written to CSV")
    s.add_argument("--instances", type=int, default=500)
    s.add_argument("--master-seed", type=int, default=0)
    s.add_argument("--dim-max", type=int, default=6)
    s.add_argument("--kraus-max", type=int, default=4)
    s.add_argument("--slack", type=float, default=0.0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="fill wall_time_ms (breaks byte-identical output)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sweep)

    v = sub.add_parser("verify", help="run named property suites")
    v.add_argument("--suite", default="all")
    v.add_argument("--instances", type=int)
    v.set_defaults(func=_cmd_verify)

    w = sub.add_parser("work-integral", help="quasi-static work vs free-energy change")
    w.add_argument("--config", required=True)
    w.set_defaults(func=_cmd_work)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, HorizonBoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
