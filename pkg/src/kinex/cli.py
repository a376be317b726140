"""Command-line front end: simulate, sweep, fit, and empirical workflows.

Configuration lives in one JSON document with ``simulate``, ``sweep``,
``empirical``, and ``output`` sections; unknown keys are rejected and
command-line flags win over file values. Every subcommand writes the
fully-resolved configuration into its output directory. All emitted
tables are plot-ready data (CSV by default, JSON via the output format
selector); no images are rendered.

Exit codes: 0 success, 1 runtime/numeric failure, 2 usage/config failure.
Same config + same seed always produce byte-identical output files,
independent of the KINEX_THREADS worker cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .empirical import (classify_groups, derive, fit_groups, load_countries,
                        percentile_thresholds)
from .errors import ConfigError, DegenerateDataError, KinexError, ParseError
from .exchange import SimulationParams, run_simulation
from .fitting import fit_linear, flow_gini_ratio_points, tau_vs_flow_points
from .metrics import gamma_fit, gini, histogram, kendall_tau, total_exchange
from .sweep import SweepCell, SweepSpec, run_sweep

SCHEMA_COMMENT = "# kinex-schema v1"

DEFAULT_CONFIG = {
    "simulate": {
        "n_agents": 1000,
        "saving_rate": 0.25,
        "surplus_rate": 0.5,
        "initial_asset": 1.0,
        "t_max": 100_000,
        "seed": 0,
        "snapshot_times": None,  # default: decades 10^3.. <= t_max, plus t1/t2
        "t1": None,              # default: round(0.99 * t_max)
        "t2": None,              # default: t_max
        "bins": 50,
    },
    "sweep": {
        "lambda_values": [round(0.05 * k, 2) for k in range(1, 20)],
        "gamma_values": [0.0, 0.1, 0.5, 1.0],
        "n_agents": 1000,
        "t_max": 100_000,
        "t1": None,
        "t2": None,
        "replicates": 5,
        "base_seed": 0,
    },
    "empirical": {
        "thresholds": None,  # [t_low, t_high] in f units; default: 33rd/67th percentiles
    },
    "output": {
        "dir": "out",
        "format": "csv",
    },
}


# ---------------------------------------------------------------------------
# configuration handling


def load_config(path: str | None) -> dict:
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    if path is None:
        return config
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(raw) - set(config))
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(unknown)}")
    for section, values in raw.items():
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        bad = sorted(set(values) - set(config[section]))
        if bad:
            raise ConfigError(f"unknown key(s) in config section {section!r}: "
                              f"{', '.join(bad)}")
        config[section].update(values)
    return config


def _echo_config(config: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "resolved_config.json"
    path.write_text(json.dumps(config, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _resolve_times(t_max: int, t1, t2) -> tuple[int, int]:
    if t2 is None:
        t2 = t_max
    if t1 is None:
        t1 = min(round(0.99 * t_max), t2 - 1)
    return int(t1), int(t2)


# ---------------------------------------------------------------------------
# table writers/readers


def _cell(value) -> str | int | float:
    return "" if value is None else value


def _write_table(out_dir: Path, stem: str, columns: list[str], rows: list[list],
                 fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out_dir / f"{stem}.json"
        doc = {"schema": SCHEMA_COMMENT.lstrip("# "), "columns": columns,
               "rows": [[_cell(v) for v in row] for row in rows]}
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path
    path = out_dir / f"{stem}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _write_json(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def read_sweep_table(path: str | Path) -> list[SweepCell]:
    """Read a sweep table previously written by ``kinex sweep``."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        rows = [dict(zip(doc["columns"], row)) for row in doc["rows"]]
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            lines = [line for line in fh if not line.startswith("#")]
        rows = list(csv.DictReader(lines))
    cells = []
    for line_number, row in enumerate(rows, start=1):
        try:
            cells.append(SweepCell(
                saving_rate=float(row["lambda"]),
                surplus_rate=float(row["gamma"]),
                mean_g=float(row["mean_g"]),
                mean_f=float(row["mean_f"]),
                mean_tau=float(row["mean_tau"]),
                std_g=float(row.get("std_g") or 0.0),
                std_f=float(row.get("std_f") or 0.0),
                std_tau=float(row.get("std_tau") or 0.0),
                replicates=int(row.get("replicates") or 1),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad sweep table row: {exc}", line_number) from exc
    return cells


def _fit_payload(fit) -> dict:
    return {"slope": fit.slope, "intercept": fit.intercept,
            "r_squared": fit.r_squared, "n_points": fit.n_points}


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    sim_cfg = config["simulate"]
    if args.seed is not None:
        sim_cfg["seed"] = args.seed
    if args.out is not None:
        config["output"]["dir"] = args.out
    out_dir = Path(config["output"]["dir"])
    fmt = _output_format(config)

    t_max = sim_cfg["t_max"]
    t1, t2 = _resolve_times(t_max, sim_cfg["t1"], sim_cfg["t2"])
    if not 0 <= t1 < t2 <= t_max:
        raise ConfigError(f"need 0 <= t1 < t2 <= t_max, got t1={t1}, t2={t2}, "
                          f"t_max={t_max}")
    sim_cfg["t1"], sim_cfg["t2"] = t1, t2
    if sim_cfg["snapshot_times"] is None:
        decades = []
        decade = 1000
        while decade <= t_max:
            decades.append(decade)
            decade *= 10
        snapshot_times = decades
    else:
        snapshot_times = list(sim_cfg["snapshot_times"])
    snapshot_times = sorted(set(snapshot_times) | {t1, t2, t_max})
    sim_cfg["snapshot_times"] = snapshot_times

    try:
        params = SimulationParams(
            n_agents=sim_cfg["n_agents"], saving_rate=sim_cfg["saving_rate"],
            surplus_rate=sim_cfg["surplus_rate"], initial_asset=sim_cfg["initial_asset"],
            t_max=t_max, seed=sim_cfg["seed"], snapshot_times=tuple(snapshot_times),
        )
        bins = int(sim_cfg["bins"])
        if bins < 1:
            raise ValueError(f"bins must be >= 1, got {bins}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _echo_config(config, out_dir)

    result = run_simulation(params)

    snap_dir = out_dir / "snapshots"
    gini_rows = []
    gamma_rows = []
    for t in snapshot_times:
        assets = result.snapshots[t]
        _write_table(snap_dir, str(t), ["agent", "asset"],
                     [[idx, float(v)] for idx, v in enumerate(assets)], fmt)
        hist = histogram(assets, bins=bins)
        _write_table(out_dir, f"histogram_{t}",
                     ["bin_lo", "bin_hi", "count"],
                     [[float(lo), float(hi), int(c)] for lo, hi, c in
                      zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts)], fmt)
        gini_rows.append([t, gini(assets)])
        positive = assets[assets > 0.0]
        try:
            fit = gamma_fit(positive)
            gamma_rows.append([t, int(positive.size), fit.shape, fit.scale])
        except (ValueError, DegenerateDataError):
            gamma_rows.append([t, int(positive.size), None, None])
    _write_table(out_dir, "gini_series", ["t", "gini"], gini_rows, fmt)
    _write_table(out_dir, "gamma_fits", ["t", "n_positive", "shape", "scale"],
                 gamma_rows, fmt)

    flow = total_exchange(result.cumulative_pool, t_max)
    tau = kendall_tau(result.snapshots[t1], result.snapshots[t2])
    _write_json(out_dir, "summary.json", {
        "cumulative_pool": result.cumulative_pool,
        "total_exchange": flow,
        "kendall_tau": tau,
        "final_gini": gini(result.snapshots[t2]),
        "t1": t1,
        "t2": t2,
    })
    print(f"simulate: wrote {len(snapshot_times)} snapshots to {out_dir} "
          f"(f={flow:.6g}, tau={tau:.6g})")
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    sweep_cfg = config["sweep"]
    if args.replicates is not None:
        sweep_cfg["replicates"] = args.replicates
    if args.out is not None:
        config["output"]["dir"] = args.out
    out_dir = Path(config["output"]["dir"])
    fmt = _output_format(config)

    try:
        spec = SweepSpec(
            lambda_values=tuple(sweep_cfg["lambda_values"]),
            gamma_values=tuple(sweep_cfg["gamma_values"]),
            n_agents=sweep_cfg["n_agents"], t_max=sweep_cfg["t_max"],
            t1=sweep_cfg["t1"], t2=sweep_cfg["t2"],
            replicates=sweep_cfg["replicates"], base_seed=sweep_cfg["base_seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sweep_cfg["t1"], sweep_cfg["t2"] = spec.t1, spec.t2
    _echo_config(config, out_dir)

    cells = run_sweep(spec)
    rows = [[c.saving_rate, c.surplus_rate, c.mean_g, c.std_g, c.mean_f, c.std_f,
             c.mean_tau, c.std_tau, c.replicates] for c in cells]
    path = _write_table(out_dir, "sweep",
                        ["lambda", "gamma", "mean_g", "std_g", "mean_f", "std_f",
                         "mean_tau", "std_tau", "replicates"], rows, fmt)
    print(f"sweep: wrote {len(cells)} cells to {path}")
    return 0


def cmd_fit(args) -> int:
    config = load_config(args.config)
    if args.out is not None:
        config["output"]["dir"] = args.out
    out_dir = Path(config["output"]["dir"])
    _echo_config(config, out_dir)

    try:
        cells = read_sweep_table(args.table)
    except OSError as exc:
        raise ConfigError(f"cannot read sweep table {args.table}: {exc}") from exc
    ratio_points, excluded = flow_gini_ratio_points(cells)
    if len(ratio_points) < 2:
        print(f"fit: only {len(ratio_points)} usable point(s) for the flow/gini "
              "ratio fit; need at least 2", file=sys.stderr)
        return 1
    ratio_fit = fit_linear(ratio_points)
    tau_points = tau_vs_flow_points(cells)
    tau_fit = fit_linear(tau_points)

    report = {
        "flow_gini_ratio": {
            **_fit_payload(ratio_fit),
            "x_axis": "ln((1 - lambda) * gamma)",
            "y_axis": "mean_f / mean_g",
            "excluded": [{"lambda": c.saving_rate, "gamma": c.surplus_rate}
                         for c in excluded],
        },
        "tau_vs_flow": {
            **_fit_payload(tau_fit),
            "x_axis": "mean_f",
            "y_axis": "mean_tau",
            "excluded": [],
        },
    }
    _write_json(out_dir, "fit_report.json", report)
    print("fit: flow/gini ratio vs ln((1-lambda)*gamma): "
          f"slope={ratio_fit.slope:.4f} intercept={ratio_fit.intercept:.4f} "
          f"R^2={ratio_fit.r_squared:.4f} "
          f"({ratio_fit.n_points} points, {len(excluded)} excluded)")
    print(f"fit: tau vs flow: slope={tau_fit.slope:.4f} "
          f"intercept={tau_fit.intercept:.4f} R^2={tau_fit.r_squared:.4f} "
          f"({tau_fit.n_points} points)")
    return 0


def cmd_empirical(args) -> int:
    config = load_config(args.config)
    if args.thresholds is not None:
        config["empirical"]["thresholds"] = _parse_thresholds(args.thresholds)
    if args.out is not None:
        config["output"]["dir"] = args.out
    out_dir = Path(config["output"]["dir"])
    fmt = _output_format(config)

    try:
        records = load_countries(args.data)
    except OSError as exc:
        raise ConfigError(f"cannot read data file {args.data}: {exc}") from exc
    derived, incomplete = derive(records)
    thresholds = config["empirical"]["thresholds"]
    if thresholds is None:
        thresholds = percentile_thresholds(derived)
        thresholds_source = "percentiles(33, 67) of f over complete records"
    else:
        if (not isinstance(thresholds, (list, tuple)) or len(thresholds) != 2):
            raise ConfigError(f"thresholds must be a [low, high] pair, got {thresholds!r}")
        thresholds = (float(thresholds[0]), float(thresholds[1]))
        thresholds_source = "explicit"
    config["empirical"]["thresholds"] = list(thresholds)
    _echo_config(config, out_dir)

    try:
        classified = classify_groups(derived, thresholds)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fits = fit_groups(classified)

    rows = [[r.name, r.f, r.g, r.lam, r.gamma, r.x, r.f_norm, r.y, r.group]
            for r in classified]
    _write_table(out_dir, "derived_countries",
                 ["country", "f", "g", "lambda", "gamma", "x", "f_norm", "y", "group"],
                 rows, fmt)
    payload = {
        "thresholds": {"low": thresholds[0], "high": thresholds[1],
                       "source": thresholds_source},
        "incomplete_records": [r.name for r in incomplete],
        "groups": [
            {
                "group": gf.group,
                "members": list(gf.members),
                "excluded_members": list(gf.excluded),
                "fit": _fit_payload(gf.fit) if gf.fit is not None else None,
                "reason": gf.reason,
            }
            for gf in fits
        ],
    }
    _write_json(out_dir, "group_fits.json", payload)
    for gf in fits:
        if gf.fit is None:
            print(f"empirical: group {gf.group}: unfittable ({gf.reason})")
        else:
            print(f"empirical: group {gf.group}: slope={gf.fit.slope:.4f} "
                  f"intercept={gf.fit.intercept:.4f} R^2={gf.fit.r_squared:.4f} "
                  f"({len(gf.members)} members)")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _output_format(config: dict) -> str:
    fmt = config["output"]["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be 'csv' or 'json', got {fmt!r}")
    return fmt


def _parse_thresholds(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--thresholds expects LO,HI, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError as exc:
        raise ConfigError(f"--thresholds expects numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinex",
        description="Kinetic wealth-exchange simulator and analysis toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one simulation and dump "
                           "snapshots, histograms, moment fits, and the Gini series")
    p_sim.add_argument("--config", help="JSON config file")
    p_sim.add_argument("--seed", type=int, help="override simulate.seed")
    p_sim.add_argument("--out", help="output directory (default from config)")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a (lambda, gamma) grid and write "
                             "the aggregated cell table")
    p_sweep.add_argument("--config", help="JSON config file")
    p_sweep.add_argument("--replicates", type=int, help="override sweep.replicates")
    p_sweep.add_argument("--out", help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_fit = sub.add_parser("fit", help="fit the emergent relations from a sweep table")
    p_fit.add_argument("--table", required=True, help="sweep table (csv or json)")
    p_fit.add_argument("--config", help="JSON config file")
    p_fit.add_argument("--out", help="output directory")
    p_fit.set_defaults(func=cmd_fit)

    p_emp = sub.add_parser("empirical", help="derive country columns and fit "
                           "per-GDP-group regressions")
    p_emp.add_argument("--data", required=True, help="country CSV "
                       "(header: country,f,g,lambda,gamma)")
    p_emp.add_argument("--thresholds", help="group thresholds LO,HI in f units "
                       "(default: 33rd/67th percentiles)")
    p_emp.add_argument("--config", help="JSON config file")
    p_emp.add_argument("--out", help="output directory")
    p_emp.set_defaults(func=cmd_empirical)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"kinex: {exc}", file=sys.stderr)
        return 2
    except (KinexError, ValueError, OSError) as exc:
        print(f"kinex: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
