"""Command-line front end: ``emptcp fit|estimate|region|run|sweep``."""

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import load_config
from .energy_model import (
    fit_gamma,
    fit_power_law,
    gamma_mse_curve,
    mptcp_energy,
    power_law_diagnostics,
    proportional_split,
    read_measurements,
)
from .errors import EmptcpError, SimTimeout
from .efficiency_map import export_grid
from .netsim import run as run_simulation
from .netsim.policies import POLICIES
from .netsim.scenarios import load_scenario, scenario_from_mapping

log = logging.getLogger("emptcp")

SUMMARY_HEADER = ["scenario", "policy", "seed", "energy_j", "time_s_or_bytes",
                  "energy_per_byte_uj", "energy_vs_mptcp", "time_or_bytes_vs_mptcp",
                  "energy_per_byte_vs_mptcp"]


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _overrides(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise EmptcpError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _config(args, extra=None):
    overrides = _overrides(args.set)
    if extra:
        overrides.update({k: str(v) for k, v in extra.items()})
    return load_config(args.config, overrides)


# -- fit -------------------------------------------------------------------

def cmd_fit(args):
    kind, data = read_measurements(args.input)
    if kind != args.mode:
        raise EmptcpError(f"{args.input}: file holds {kind} data but --mode is {args.mode}")
    cfg = _config(args)
    lines = []
    if kind == "power_law":
        groups = {}
        for s in data:
            groups.setdefault((s.interface, s.direction), []).append(s)
        for (iface, direction), samples in sorted(groups.items()):
            alpha, beta = fit_power_law(samples)
            r2, rms = power_law_diagnostics(samples, alpha, beta)
            lines.append(f"# {iface} {direction}: n={len(samples)} r2_log={r2:.9f} "
                         f"residual_rms_log={rms:.6g}")
            lines.append(f"{iface}.alpha_{direction} = {float(alpha)!r}")
            lines.append(f"{iface}.beta_{direction} = {float(beta)!r}")
        _write("\n".join(lines) + "\n", args.out)
        return 0

    by_dir = {}
    for direction, sample in data:
        by_dir.setdefault(direction, []).append(sample)
    curve_rows = ["direction,gamma,mse"]
    for direction, runs in sorted(by_dir.items()):
        gamma = fit_gamma(runs, direction, cfg.profiles)
        _, best = gamma_mse_curve(runs, direction, cfg.profiles, grid=[gamma])
        lines.append(f"# {direction}: n={len(runs)} mse={best[0]:.9g}")
        lines.append(f"gamma.{direction} = {float(gamma)!r}")
        grid, curve = gamma_mse_curve(runs, direction, cfg.profiles)
        curve_rows += [f"{direction},{g:.4f},{float(m)!r}" for g, m in zip(grid, curve)]
    _write("\n".join(lines) + "\n", args.out)
    curve_path = args.curve
    if curve_path is None and args.out is not None:
        out = Path(args.out)
        curve_path = out.with_name(out.stem + "_mse.csv")
    if curve_path is not None:
        _write("\n".join(curve_rows) + "\n", curve_path)
    return 0


# -- estimate --------------------------------------------------------------

def cmd_estimate(args):
    cfg = _config(args)
    if args.size is not None:
        if args.s_wifi is not None or args.s_lte is not None:
            raise EmptcpError("give either --size or --s-wifi/--s-lte, not both")
        s_wifi, s_lte = proportional_split(args.size, args.b_wifi, args.b_lte)
    else:
        if args.s_wifi is None or args.s_lte is None:
            raise EmptcpError("need --size or both --s-wifi and --s-lte")
        s_wifi, s_lte = args.s_wifi, args.s_lte
    gamma = cfg.gamma(args.direction) if args.gamma is None else args.gamma
    est = mptcp_energy(s_wifi, s_lte, args.b_wifi, args.b_lte, gamma, args.direction,
                       cfg.profiles)
    values = est.as_dict()
    values["fixed_wifi"] = est.fixed_wifi
    values["fixed_lte"] = est.fixed_lte
    _write("".join(f"{k}={v!r}\n" for k, v in values.items()), args.out)
    return 0


# -- region ----------------------------------------------------------------

def cmd_region(args):
    cfg = _config(args)
    gamma = cfg.gamma(args.direction) if args.gamma is None else args.gamma
    grid = export_grid(tuple(args.wifi_range), tuple(args.lte_range), args.step, args.mode,
                       args.file_size, gamma, args.direction, cfg.profiles)
    _write(grid.to_csv(), args.out)
    return 0


# -- run / sweep -----------------------------------------------------------

def _write_report(report, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.kv").write_text(report.summary_kv())
    (out_dir / "energy.csv").write_text(report.energy_csv())
    (out_dir / "throughput.csv").write_text(report.throughput_csv())
    (out_dir / "decisions.csv").write_text(report.decision_csv())


def _simulate(scenario, policy, cfg):
    try:
        return run_simulation(scenario, policy, config=cfg), None
    except SimTimeout as exc:
        return exc.report, str(exc)


def cmd_run(args):
    cfg = _config(args)
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    report, error = _simulate(scenario, args.policy, cfg)
    if args.out is None:
        sys.stdout.write(report.summary_kv())
    else:
        _write_report(report, args.out)
    if error:
        log.error("%s", error)
        return 1
    return 0


def _scenario_for(entry, base_dir, seed):
    source = entry["scenario"]
    if isinstance(source, str):
        path = Path(source)
        if not path.is_absolute():
            path = base_dir / path
        sc = load_scenario(path)
    else:
        raw = {k: str(v) for k, v in source.items()}
        sc = scenario_from_mapping(raw, base_dir=base_dir)
        # synthetic traces depend on the seed, so rebuild per seed
        if raw.get("trace") == "synthetic" or raw.get("synthetic", "").lower() in ("1", "true"):
            raw["seed"] = str(seed)
            return scenario_from_mapping(raw, base_dir=base_dir)
    return sc.with_seed(seed)


def _expand_matrix(matrix, base_dir, default_seed):
    runs = matrix.get("runs") if isinstance(matrix, dict) else None
    if not runs:
        raise EmptcpError("run matrix needs a nonempty 'runs' list")
    tasks = []
    seen = set()
    for i, entry in enumerate(runs):
        if "scenario" not in entry:
            raise EmptcpError(f"runs[{i}]: missing 'scenario'")
        policies = entry.get("policies") or [entry.get("policy")]
        for p in policies:
            if p not in POLICIES:
                raise EmptcpError(f"runs[{i}]: unknown policy {p!r}")
        seeds = entry.get("seeds", [default_seed])
        params = entry.get("params", {})
        for seed in seeds:
            sc = _scenario_for(entry, base_dir, int(seed))
            label = entry.get("name", sc.label)
            for p in policies:
                key = (label, p, int(seed))
                if key in seen:
                    raise EmptcpError(f"duplicate run {key}; give entries distinct names")
                seen.add(key)
                tasks.append((label, p, int(seed), sc, params))
    return tasks


def _sweep_one(task):
    label, policy, seed, scenario, params, config_path, overrides = task
    cfg = load_config(config_path, {**overrides, **{k: str(v) for k, v in params.items()}})
    try:
        report, error = _simulate(scenario, policy, cfg)
    except EmptcpError as exc:
        return label, policy, seed, None, str(exc)
    return label, policy, seed, report, error


def _ratio(a, b):
    return "" if not b else f"{a / b:.6f}"


def summary_table(results):
    """Summary CSV text from ``(label, policy, seed, report)`` tuples."""
    base = {(r[0], r[2]): r[3] for r in results if r[1] == "mptcp"}
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for label, policy, seed, rep in results:
        amount = rep.download_time_s if rep.download_time_s is not None else rep.bytes_downloaded
        ref = base.get((label, seed))
        row = [label, policy, seed, f"{rep.total_joules:.6f}",
               f"{amount:.3f}" if isinstance(amount, float) else amount,
               f"{rep.energy_per_byte_uj:.6f}"]
        if ref is None:
            row += ["", "", ""]
        else:
            ref_amount = ref.download_time_s if ref.download_time_s is not None else \
                ref.bytes_downloaded
            row += [_ratio(rep.total_joules, ref.total_joules), _ratio(amount, ref_amount),
                    _ratio(rep.energy_per_byte_uj, ref.energy_per_byte_uj)]
        w.writerow(row)
    return out.getvalue()


def cmd_sweep(args):
    matrix_path = Path(args.matrix)
    try:
        matrix = json.loads(matrix_path.read_text())
    except (OSError, ValueError) as exc:
        raise EmptcpError(f"cannot read run matrix {matrix_path}: {exc}") from None
    default_seed = 0 if args.seed is None else args.seed
    tasks = _expand_matrix(matrix, matrix_path.parent, default_seed)
    overrides = _overrides(args.set)
    load_config(args.config, overrides)  # fail fast on a bad config
    jobs = [t + (args.config, overrides) for t in tasks]
    workers = args.workers or matrix.get("workers", 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_one, jobs))
    else:
        outcomes = [_sweep_one(j) for j in jobs]

    out_dir = Path(args.out or "sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    done, failures = [], []
    for label, policy, seed, report, error in outcomes:
        if report is not None:
            _write_report(report, out_dir / label / policy / f"seed{seed}")
        if error is None:
            done.append((label, policy, seed, report))
        else:
            failures.append((label, policy, seed, error))
            log.error("%s/%s/seed%s: %s", label, policy, seed, error)
    (out_dir / "summary.csv").write_text(summary_table(done))
    fail_text = io.StringIO()
    w = csv.writer(fail_text, lineterminator="\n")
    w.writerow(["scenario", "policy", "seed", "error"])
    w.writerows(failures)
    (out_dir / "failures.csv").write_text(fail_text.getvalue())
    return 0 if not failures else 1


# -- parser ----------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file layered over the shipped defaults")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    p.add_argument("--seed", type=int, help="random seed (run/sweep)")
    p.add_argument("--out", help="output file or directory (default: stdout)")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="emptcp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit power-law or gamma coefficients")
    p.add_argument("input", help="measurement CSV")
    p.add_argument("--mode", choices=["power_law", "gamma"], required=True)
    p.add_argument("--curve", help="where to write the gamma MSE curve CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("estimate", parents=[common], help="evaluate the MPTCP energy model")
    p.add_argument("--size", type=float, help="total bytes, split in proportion to throughput")
    p.add_argument("--s-wifi", type=float)
    p.add_argument("--s-lte", type=float)
    p.add_argument("--b-wifi", type=float, required=True, help="WiFi throughput, Mbps")
    p.add_argument("--b-lte", type=float, required=True, help="LTE throughput, Mbps")
    p.add_argument("--gamma", type=float)
    p.add_argument("--direction", choices=["down", "up"], default="down")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("region", parents=[common], help="export an efficiency region grid")
    p.add_argument("--mode", choices=["per_byte", "total"], default="per_byte")
    p.add_argument("--wifi-range", type=float, nargs=2, default=[0.25, 20.0],
                   metavar=("LO", "HI"))
    p.add_argument("--lte-range", type=float, nargs=2, default=[0.25, 20.0],
                   metavar=("LO", "HI"))
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--file-size", type=float, help="bytes (total mode)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--direction", choices=["down", "up"], default="down")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("run", parents=[common], help="simulate one scenario under one policy")
    p.add_argument("scenario", help="scenario key=value file")
    p.add_argument("--policy", choices=sorted(POLICIES), required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="run a scenario x policy x seed matrix")
    p.add_argument("matrix", help="run matrix JSON")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="emptcp: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (EmptcpError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
