"""Command-line front end.

Subcommands:
  run <cfg>                        execute a scenario, write report CSVs
  sweep <cfg> --var v --values ... run a one-variable sweep
  fcc <plan args>                  print a compliance report
  analyze <trace>                  occupancy of an exported trace file

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fcc, scenario
from .errors import ConfigError, TraceFormatError
from .units import GainDbi, PowerDbm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wifipower", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    run_p.add_argument("cfg", help="scenario config file")
    run_p.add_argument("--seed", type=int, default=None, help="override the seed")
    run_p.add_argument("--duration", type=float, default=None, help="seconds")
    run_p.add_argument("--out-dir", default="out", help="report directory")

    sweep_p = sub.add_parser("sweep", help="sweep one variable of a scenario")
    sweep_p.add_argument("cfg")
    sweep_p.add_argument("--var", required=True, choices=scenario.SWEEP_VARIABLES)
    sweep_p.add_argument(
        "--values", required=True, help="comma-separated values (numbers or names)"
    )
    sweep_p.add_argument("--seeds", type=int, default=1, help="seeds per value")
    sweep_p.add_argument("--seed", type=int, default=None, help="override base seed")
    sweep_p.add_argument("--duration", type=float, default=None)
    sweep_p.add_argument("--out-dir", default="out")

    fcc_p = sub.add_parser("fcc", help="check a transmit plan")
    fcc_p.add_argument("--n-ant", type=int, default=1)
    fcc_p.add_argument("--gain-dbi", type=float, default=6.0)
    fcc_p.add_argument("--total-dbm", type=float, default=30.0)
    fcc_p.add_argument("--correlated", action="store_true")
    fcc_p.add_argument("--efficiency", type=float, default=1.0)

    an_p = sub.add_parser("analyze", help="occupancy of a trace file")
    an_p.add_argument("trace")
    an_p.add_argument("--window", default=None, help="t0_us,t1_us")
    an_p.add_argument("--stations", default=None, help="comma-separated station ids")
    return p


def _cmd_run(args) -> int:
    sc = scenario.load_scenario(args.cfg)
    if args.seed is not None:
        sc.seed = args.seed
    if args.duration is not None:
        sc.duration_s = args.duration
    sc.validate()
    rep = scenario.run(sc)
    rep.write_outputs(args.out_dir)
    sys.stdout.write(rep.summary_text())
    return EXIT_OK


def _parse_sweep_values(var: str, raw: str) -> tuple:
    vals = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if var == "wall_material":
            vals.append(tok)
        else:
            try:
                vals.append(float(tok))
            except ValueError:
                raise ConfigError(f"sweep value {tok!r} is not a number") from None
    if not vals:
        raise ConfigError("no sweep values given")
    return tuple(vals)


def _cmd_sweep(args) -> int:
    sc = scenario.load_scenario(args.cfg)
    if args.seed is not None:
        sc.seed = args.seed
    if args.duration is not None:
        sc.duration_s = args.duration
    sc.validate()
    spec = scenario.SweepSpec(args.var, _parse_sweep_values(args.var, args.values))
    seeds = [sc.seed + i for i in range(max(1, args.seeds))]
    rows = scenario.sweep(sc, spec, seeds=seeds)
    csv_text = scenario.sweep_csv(rows)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, f"sweep_{args.var}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_fcc(args) -> int:
    plan = fcc.TxPlan(
        n_ant=args.n_ant,
        g_ant=GainDbi(args.gain_dbi),
        total_conducted=PowerDbm(args.total_dbm),
        correlated=args.correlated,
        beamforming_efficiency=args.efficiency,
    )
    report = fcc.check_compliance(plan)
    sys.stdout.write(report.as_text() + "\n")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    window = None
    if args.window:
        parts = args.window.split(",")
        if len(parts) != 2:
            raise ConfigError("--window expects t0_us,t1_us")
        window = (float(parts[0]), float(parts[1]))
    stations = None
    if args.stations:
        stations = [s.strip() for s in args.stations.split(",") if s.strip()]
    result = scenario.analyze_trace(args.trace, window_us=window, stations=stations)
    for ch, occ in sorted(result["per_channel"].items()):
        sys.stdout.write(f"occupancy_ch{ch}={occ:.6f}\n")
    sys.stdout.write(f"occupancy_cumulative={result['cumulative']:.6f}\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "fcc":
            return _cmd_fcc(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        raise AssertionError(args.command)
    except (ConfigError, TraceFormatError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
