"""Command-line entry point: simulate, sweep, model, repro and dump-trace.

Exit codes: 0 when every run stays safe, 2 when an attack succeeds
(max unmitigated activations above the configured T_RH), 1 on bad input.
Output files go to ``--out``, else ``$PRACSIM_OUT``, else ./pracsim-out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analytics as an
from .config import ConfigError, ExperimentConfig
from .controller import SCHEMA_VERSION

OUT_ENV = "PRACSIM_OUT"
EXIT_OK, EXIT_ERROR, EXIT_ATTACK = 0, 1, 2
SWEEP_AXES = ("ath", "level", "mitigation_period", "banks", "pool")
SECURITY = {"jailbreak", "randomized_jailbreak", "refresh_postponement", "reset_straddle",
            "feinting", "ratchet", "fuzz"}


def out_dir(args) -> Path:
    path = Path(args.out or os.environ.get(OUT_ENV) or "pracsim-out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def csv_text(header: list[str], rows, title: str) -> str:
    buf = io.StringIO()
    buf.write(f"# pracsim {title} v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_text(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    keys = sorted(report)
    row = [json.dumps(report[k]) if isinstance(report[k], (dict, list)) else report[k] for k in keys]
    return csv_text(keys, [row], "report")


# -- simulate ---------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    dest = out_dir(args)
    attacked = False
    for repeat in range(cfg.repeat):
        sc, adversary, horizon = cfg.build(repeat)
        report = sc.run(adversary, horizon, cfg.t_rh).to_dict()
        report["config"] = cfg.name
        report["seed"] = cfg.seed
        report["repeat"] = repeat
        suffix = f"_r{repeat}" if cfg.repeat > 1 else ""
        ext = "json" if args.format == "json" else "csv"
        (dest / f"{cfg.name}{suffix}.report.{ext}").write_text(report_text(report, args.format))
        (dest / f"{cfg.name}{suffix}.series.csv").write_text(sc.series_csv())
        attacked |= bool(report["attack_success"])
        print(f"{cfg.name}{suffix}: max {report['max_acts']} ACTs on bank {report['attack_bank']} "
              f"row {report['attack_row']}, {report['alerts']} ALERTs, throughput {report['throughput']:.4f}"
              + ("" if cfg.t_rh is None else f", T_RH {cfg.t_rh}: "
                 + ("ATTACK SUCCESS" if report["attack_success"] else "safe")))
    return EXIT_ATTACK if attacked else EXIT_OK


# -- sweep ------------------------------------------------------------------


def parse_axis(text: str) -> tuple[str, list[int | None]]:
    if "=" not in text:
        raise ConfigError("--axis", "expected NAME=V1,V2,... or NAME=LO..HI[:STEP]")
    name, values = text.split("=", 1)
    if name not in SWEEP_AXES:
        raise ConfigError("--axis", f"unknown axis {name!r}; expected one of {SWEEP_AXES}")
    try:
        if ".." in values:
            span, _, step = values.partition(":")
            lo, hi = span.split("..")
            points = list(range(int(lo), int(hi) + 1, int(step or 1)))
        else:
            points = [None if v in ("none", "null") else int(v) for v in values.split(",")]
    except ValueError:
        raise ConfigError("--axis", f"cannot parse values {values!r}") from None
    if not points:
        raise ConfigError("--axis", "no values")
    return name, points


def point_config(cfg: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    data = cfg.to_dict()
    policy, adversary = data["policy"], data["adversary"]
    if axis == "ath":
        if policy["kind"] == "moat":
            policy["ath"] = value
            policy.pop("eth", None)
        if adversary["kind"] in ("ratchet", "tsa"):
            adversary["ath"] = value
    elif axis == "level":
        data["level"] = value
        # generalized MOAT-L tracks and mitigates L rows per ALERT
        if policy["kind"] == "moat":
            policy["entries"] = value
    elif axis == "mitigation_period":
        data["mitigation_period"] = value
    elif axis == "banks":
        data["banks"] = value
        if adversary["kind"] in ("tsa", "single_row", "multi_row", "fuzz", "benign"):
            adversary["banks"] = value
    elif axis == "pool":
        adversary["pool"] = value
    return ExperimentConfig.from_dict(data)


def model_value(cfg: ExperimentConfig):
    kind = cfg.adversary["kind"]
    t = cfg.timing_object()
    ath = cfg.policy.get("ath", 64)
    if kind == "ratchet":
        return an.RatchetModel(ath, cfg.level, t).t_rh_safe_exact
    if kind == "feinting" and cfg.mitigation_period:
        return an.feinting_bound(cfg.mitigation_period, t)
    if kind in ("single_row", "multi_row"):
        return an.kernel_throughput(kind, ath, t, cfg.level)
    if kind == "tsa":
        return an.kernel_throughput("tsa", ath, t, cfg.level, banks=cfg.banks)
    return None


def run_point(job):
    index, value, data = job
    cfg = ExperimentConfig.from_dict(data)
    sc, adversary, horizon = cfg.build()
    report = sc.run(adversary, horizon, cfg.t_rh)
    simulated = report.max_acts if cfg.adversary["kind"] in SECURITY else report.throughput
    model = model_value(cfg)
    delta = None if model is None else simulated - model
    fmt = (lambda x: "" if x is None else (x if isinstance(x, int) else round(x, 6)))
    return [index, "none" if value is None else value, fmt(model), fmt(simulated), fmt(delta),
            report.alerts, int(bool(report.attack_success))]


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    axis, values = parse_axis(args.axis)
    ext = "json" if args.format == "json" else "csv"
    target = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV) or "pracsim-out") / f"{cfg.name}.sweep.{ext}"
    if target.exists() or target.resolve() == Path(args.config).resolve():
        print(f"error: output path {target} already exists; refusing to overwrite", file=sys.stderr)
        return EXIT_ERROR
    jobs = [(i, v, point_config(cfg, axis, v).to_dict()) for i, v in enumerate(values)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_point, jobs))
    else:
        rows = [run_point(j) for j in jobs]
    header = ["index", axis, "model", "simulated", "delta", "alerts", "attack_success"]
    target.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        text = json.dumps({"schemaVersion": SCHEMA_VERSION, "axis": axis,
                           "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"
    else:
        text = csv_text(header, rows, f"sweep over {axis}")
    target.write_text(text)
    sys.stdout.write(text)
    return EXIT_ATTACK if any(r[-1] for r in rows) else EXIT_OK


# -- model ------------------------------------------------------------------


def model_rows(what: str):
    if what in ("all", "ratchet"):
        for ath in (32, 64, 128):
            for level in (1, 2, 4):
                m = an.RatchetModel(ath, level)
                yield ["ratchet", f"ATH={ath} L={level}", m.nc, round(m.t_rh_safe_exact, 3), m.t_rh_safe]
    if what in ("all", "feinting"):
        for k in range(1, 6):
            yield ["feinting", f"k={k}", an.feinting_periods(k), round(an.feinting_bound(k), 1),
                   round(an.feinting_bound(k))]
    if what in ("all", "throughput"):
        for level in (1, 2, 4):
            v = an.alert_saturation_throughput(level)
            yield ["saturation", f"L={level}", "", round(v, 4), f"{1 / v:.2f}x"]
        for kernel, banks in (("single_row", 1), ("multi_row", 1), ("tsa", 4), ("tsa", 17)):
            v = an.kernel_throughput(kernel, banks=banks)
            yield ["kernel", f"{kernel} banks={banks}", "", round(v, 4), f"{1 - v:.1%} loss"]
    if what in ("all", "benign"):
        for bf in (0.0, 0.9, 0.996, 1.0):
            m = an.benign_slowdown_model(bf)
            yield ["benign", f"benign={bf}", "", round(m.acts_per_alert, 1), f"{m.loss:.3%} loss"]
    if what in ("all", "storage"):
        for level in (1, 2, 4):
            yield ["storage", f"L={level}", "", an.bytes_per_bank(level), f"{an.bytes_per_chip(level)} B/chip"]


def cmd_model(args) -> int:
    header = ["model", "point", "pool", "value", "summary"]
    rows = list(model_rows(args.what))
    if args.format == "json":
        sys.stdout.write(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
    else:
        sys.stdout.write(csv_text(header, rows, "closed-form models"))
    return EXIT_OK


# -- repro ------------------------------------------------------------------


def cmd_repro(args) -> int:
    from . import repro

    config_dir = Path(args.config) if args.config else repro.default_config_dir()
    if not config_dir.is_dir():
        print(f"error: config directory {config_dir} does not exist", file=sys.stderr)
        return EXIT_ERROR
    only = set(args.only.split(",")) if args.only else None
    results = repro.run_all(config_dir, only)
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_ERROR if failed else EXIT_OK


# -- dump-trace -------------------------------------------------------------


def cmd_dump_trace(args) -> int:
    cfg = load_config(args)
    sc, adversary, horizon = cfg.build(trace=True)
    report = sc.run(adversary, horizon, cfg.t_rh)
    target = Path(args.out) if args.out else out_dir(argparse.Namespace(out=None)) / f"{cfg.name}.trace.csv"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(sc.trace_csv())
    print(f"wrote {len(sc.trace or [])} ACTs to {target}")
    return EXIT_ATTACK if report.attack_success else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pracsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a config over one parameter axis")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, help="e.g. ath=32,64,128 or ath=16..256:16")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (must not exist)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("model", help="print the closed-form models")
    p.add_argument("--what", choices=("all", "ratchet", "feinting", "throughput", "benign", "storage"),
                   default="all")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("repro", help="run the acceptance checks")
    p.add_argument("--config", help="scenario config directory (default: packaged configs)")
    p.add_argument("--only", help="comma-separated criterion ids, e.g. 1,4,benign")
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("dump-trace", help="write the ACT command trace of a run as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file")
    p.set_defaults(func=cmd_dump_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: bad config key '{exc.key}': {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
