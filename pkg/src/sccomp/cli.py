"""Command-line front end.

Subcommands: ``coeffs`` (table export), ``verify`` (invariant suite),
``kepler`` and ``parabolic`` (work-precision benchmarks), ``efficiency``
(thread-cost comparison sweep).  A JSON config file may supply any flag
value; explicit flags win.  Exit codes: 0 ok, 1 verification failure,
2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

from . import coefficients as co
from .analysis import (
    efficiency_sweep,
    equal_cost_steps,
    write_energy_csv,
    write_records_csv,
)
from .coefficients import (
    basic_table,
    build_table,
    combination_table,
    recursion_table,
    triple_jump_table,
)
from .engine import StepFailure, fourth_order_complex_splitting, integrate
from .problems import kepler_energy, kepler_init, kepler_system

# Per-method step ladders for the default benchmark sweeps.  Resolutions
# differ per method: higher-order tables hit the roundoff floor within a
# few refinements, the basic scheme needs many more.
KEPLER_LADDERS = {
    "basic": (317, 631, 1259, 2503, 4999),
    "T1": (149, 211, 293, 419, 587, 839, 1181, 1693, 2417, 3449),
    "T2": (101, 131, 173, 223, 293, 379, 499, 647, 839, 1091, 1429),
    "T3": (71, 92, 120, 156, 203, 264, 343, 446),
}
PARABOLIC_LADDER = (2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64)

CONFIG_KEYS = {
    "kind", "n", "k", "e", "tf", "N", "h_list", "steps",
    "threads", "log2_threads", "out", "seed", "long",
}


def _default_workers() -> int:
    return min(os.cpu_count() or 1, 8)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sccomp",
        description="High-order integrators from weighted composition tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with flag defaults")
        p.add_argument("--kind", choices=["T", "R", "TJ", "basic"])
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--e", type=float, default=0.6)
        p.add_argument("--tf", type=float)
        p.add_argument("--N", type=int, default=128)
        p.add_argument("--h-list", dest="h_list", type=float, nargs="+")
        p.add_argument("--steps", type=int)
        p.add_argument("--threads", type=int, default=_default_workers())
        p.add_argument("--log2-threads", dest="log2_threads", type=int, default=2)
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--long", action="store_true")

    for name in ("coeffs", "verify", "kepler", "parabolic", "efficiency"):
        common(sub.add_parser(name))
    return parser


def _apply_config(args: argparse.Namespace, argv: Sequence[str]) -> None:
    """Config file fills in flags the command line left at their default."""
    if not args.config:
        return
    with open(args.config, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise SystemExit2(f"unknown config fields: {', '.join(unknown)}")
    explicit = {
        token.split("=")[0].lstrip("-").replace("-", "_")
        for token in argv
        if token.startswith("--")
    }
    for key, value in doc.items():
        if key not in explicit:
            setattr(args, key, value)


class SystemExit2(Exception):
    """Configuration error; the CLI maps it to exit code 2."""


def _resolved_config(args: argparse.Namespace) -> dict[str, object]:
    keys = sorted(CONFIG_KEYS | {"command"})
    resolved = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _selected_tables(args: argparse.Namespace) -> list[co.CompositionTable]:
    if args.kind is None:
        return [
            basic_table(args.n),
            combination_table(args.n, 1),
            combination_table(args.n, 2),
            combination_table(args.n, 3),
        ]
    if args.kind == "basic":
        return [basic_table(args.n)]
    return [build_table(args.kind, args.n, args.k)]


def _ladder_for(table: co.CompositionTable, t_final: float) -> list[float]:
    if table.kind == "T":
        key = f"T{table.k}"
    elif table.kind == "basic":
        key = "basic"
    else:
        key = "T2"  # same resolution serves the comparison kinds
    return [t_final / steps for steps in KEPLER_LADDERS[key]]


def cmd_coeffs(args: argparse.Namespace) -> int:
    if args.kind is None:
        raise SystemExit2("coeffs requires --kind")
    try:
        tables = _selected_tables(args)
    except ValueError as bad:
        raise SystemExit2(str(bad))
    table = tables[0]
    report = co.order_condition_sums(table, args.n)
    text = co.table_to_json(table, report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import format_report, run_checks

    results = run_checks(seed=args.seed)
    print(format_report(results))
    return 0 if all(result.passed for result in results) else 1


def _long_run_series(args: argparse.Namespace, t_final: float):
    """Equal-effective-cost energy series for the drift study."""
    tables = _selected_tables(args)
    method = fourth_order_complex_splitting()
    system = kepler_system()
    x0 = kepler_init(args.e)
    h0 = kepler_energy(x0)
    budget_per_unit = 6400 / (200 * math.pi)  # matches the drift-study density
    budget = _round_budget(
        tables, round(budget_per_unit * t_final), args.log2_threads
    )
    series = []
    for table, steps in zip(
        tables, equal_cost_steps(tables, budget, args.log2_threads)
    ):
        h = t_final / steps
        samples: list[tuple[float, float]] = []
        stride = max(1, steps // 2000)

        def observer(index: int, time: float, state) -> None:
            if index % stride == 0 or index == steps - 1:
                samples.append((time, abs(kepler_energy(state) - h0) / abs(h0)))

        integrate(
            table, method, system, h, steps, x0,
            observer=observer, workers=args.threads,
        )
        series.append((table, h, samples))
    return series


def _round_budget(tables, budget: int, log2_threads: int) -> int:
    lcm = 1
    for table in tables:
        lcm = math.lcm(lcm, table.effective_cost(log2_threads))
    return max(1, round(budget / lcm)) * lcm


def cmd_kepler(args: argparse.Namespace) -> int:
    t_final = args.tf if args.tf is not None else (
        2000 * math.pi if args.long else 20 * math.pi
    )
    out = args.out or ("kepler-long.csv" if args.long else "kepler.csv")
    config = _resolved_config(args)
    config["tf"] = t_final
    if args.long:
        series = _long_run_series(args, t_final)
        write_energy_csv(out, series, config)
        print(f"wrote {sum(len(s) for _, _, s in series)} samples to {out}")
        return 0
    tables = _selected_tables(args)
    records = []
    for table in tables:
        if args.steps is not None:
            h_list = [t_final / args.steps]
        elif args.h_list:
            h_list = list(args.h_list)
        else:
            h_list = _ladder_for(table, t_final)
        records.extend(
            efficiency_sweep(
                [table], "kepler", h_list, args.log2_threads,
                t_final=t_final, eccentricity=args.e, workers=args.threads,
            )
        )
    write_records_csv(out, records, config)
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_parabolic(args: argparse.Namespace) -> int:
    t_final = args.tf if args.tf is not None else 1.0
    out = args.out or "parabolic.csv"
    if args.N & (args.N - 1):
        raise SystemExit2(f"--N must be a power of two, got {args.N}")
    tables = _selected_tables(args)
    if args.steps is not None:
        h_list = [t_final / args.steps]
    elif args.h_list:
        h_list = list(args.h_list)
    else:
        h_list = [t_final / steps for steps in PARABOLIC_LADDER]
    records = efficiency_sweep(
        tables, "parabolic", h_list, args.log2_threads,
        t_final=t_final, size=args.N, workers=args.threads,
    )
    config = _resolved_config(args)
    config["tf"] = t_final
    write_records_csv(out, records, config)
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_efficiency(args: argparse.Namespace) -> int:
    """Comparison sweep: combination tables against their rivals."""
    t_final = args.tf if args.tf is not None else 20 * math.pi
    out = args.out or "efficiency.csv"
    n = args.n
    tables = [
        combination_table(n, 1), combination_table(n, 2), combination_table(n, 3),
        recursion_table(n, 2), recursion_table(n, 3),
        triple_jump_table(n, 1), triple_jump_table(n, 2), triple_jump_table(n, 3),
    ]
    if args.h_list:
        h_list = list(args.h_list)
    else:
        h_list = [t_final / steps for steps in (71, 101, 141, 199, 281, 397)]
    records = efficiency_sweep(
        tables, "kepler", h_list, args.log2_threads,
        t_final=t_final, eccentricity=args.e, workers=args.threads,
    )
    config = _resolved_config(args)
    config["tf"] = t_final
    write_records_csv(out, records, config)
    print(f"wrote {len(records)} records to {out}")
    return 0


COMMANDS = {
    "coeffs": cmd_coeffs,
    "verify": cmd_verify,
    "kepler": cmd_kepler,
    "parabolic": cmd_parabolic,
    "efficiency": cmd_efficiency,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, argv)
        return COMMANDS[args.command](args)
    except SystemExit2 as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    except StepFailure as failure:
        print(f"error: {failure}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
