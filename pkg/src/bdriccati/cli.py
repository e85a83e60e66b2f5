"""Command-line entry point: solve / verify / simulate / figure1..figure5.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .distribution import Distribution, PositivityError
from .dynamics import build_generator, null_space_stationary, stationarity_residual
from .riccati import (
    DParameter,
    distribution_to_riccati,
    max_riccati_residual,
    riccati_general,
    riccati_parametric,
    riccati_to_distribution,
)
from .schedules import (
    RateSchedule,
    ScheduleError,
    check_positivity_condition,
    schedule_from_dict,
    schedule_to_dict,
)
from .ssa import empirical_stationary, gillespie_run, total_variation
from .stationary import (
    asymmetric_closed_form,
    constant_case_closed_form,
    effective_schedule,
    parametric_stationary,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# verification gates
TOL_NORMALIZATION = 1e-12
TOL_RICCATI = 1e-10
TOL_CLOSED_FORM = 1e-12
TOL_ORACLE_TV = 1e-10
TOL_ROUND_TRIP = 1e-12
TOL_BALANCE = 1e-12


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    schedule: dict
    d_values: list[DParameter]
    out_dir: Path = Path("out")
    format: str = "csv"
    seed: int = 0
    events: int = 1_000_000
    burn_in_fraction: float = 0.1
    defaults: list[str] = field(default_factory=list)
    name: str = "run"

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("run config must be a mapping")
        if "schedule" not in doc:
            raise ConfigError("run config is missing 'schedule'")
        d_values = doc.get("d_values")
        if not isinstance(d_values, list) or not d_values:
            raise ConfigError("'d_values' must be a nonempty list")
        outputs = doc.get("outputs", {})
        sim = doc.get("simulation", {})
        fmt = outputs.get("format", "csv")
        if fmt != "csv":
            raise ConfigError(f"unsupported output format {fmt!r}")
        return cls(
            schedule=dict(doc["schedule"]),
            d_values=[_parse_d(v) for v in d_values],
            out_dir=Path(outputs.get("dir", "out")),
            format=fmt,
            seed=int(doc.get("seed", 0)),
            events=int(sim.get("events", 1_000_000)),
            burn_in_fraction=float(sim.get("burn_in_fraction", 0.1)),
            defaults=list(doc.get("defaults", [])),
            name=str(doc.get("name", "run")),
        )


def _parse_d(value) -> DParameter:
    try:
        return DParameter.parse(value)
    except ValueError as exc:
        raise ConfigError(f"bad D entry {value!r}: {exc}") from None


def _exp_preset(name, c_b, a_b, c_d, a_d, power, N=100):
    return {
        "name": name,
        "schedule": {
            "kind": "offset_exponential",
            "c_b": c_b,
            "alpha_b": a_b,
            "c_d": c_d,
            "alpha_d": a_d,
            "power": power,
            "N": N,
        },
        "d_values": [-4.0, -4000.0, "inf"],
        "defaults": ["N"],
    }


PRESETS: dict[str, dict] = {
    "figure1": {
        "name": "figure1",
        "schedule": {"kind": "constant", "b": 0.5, "N": 20},
        "d_values": [-1000.0, -2000.0, "inf"],
        "defaults": ["b"],
    },
    "figure2": {
        "name": "figure2",
        "schedule": {"kind": "asymmetric", "epsilon": 0.02, "N": 100},
        "d_values": [-4.0, -40.0, "inf"],
        "defaults": ["N"],
    },
    "figure3": _exp_preset("figure3", 0.1, 0.12, 0.1, 0.15, 1.0),
    "figure4": _exp_preset("figure4", 0.0, 0.12, 0.0, 0.15, 0.5),
    "figure5": _exp_preset("figure5", 0.01, 0.15, 0.01, 0.12, 1.0),
}


def preset_config(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfg = RunConfig.from_dict(json.loads(json.dumps(PRESETS[name])))
    cfg.out_dir = Path("out") / name
    return cfg


def _sorted_d(values: list[DParameter]) -> list[DParameter]:
    # finite D ascending, the -inf limit last
    return sorted(values, key=lambda dp: (dp.is_limit, dp.D))


def d_file_stem(dp: DParameter) -> str:
    return "P_D-inf" if dp.is_limit else f"P_D{dp.D:g}"


def write_distribution_csv(path: Path, dist: Distribution, meta: dict) -> None:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append("n,P_n")
    lines += [f"{n},{x:.17g}" for n, x in enumerate(dist.p.tolist())]
    path.write_text("\n".join(lines) + "\n")


def read_distribution_csv(path) -> tuple[np.ndarray, dict]:
    """Parse a CSV written by :func:`write_distribution_csv`."""
    meta, rows = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
        elif line and line != "n,P_n":
            rows.append(float(line.split(",")[1]))
    return np.array(rows), meta


def _schedule_params(s: RateSchedule) -> dict:
    doc = schedule_to_dict(s)
    if s.kind == "explicit":
        doc.pop("b")
        doc.pop("d")
    return doc


def _meta(cfg: RunConfig, s: RateSchedule, dp: DParameter, dist: Distribution) -> dict:
    return {
        "tool": f"bdriccati {__version__}",
        "preset": cfg.name,
        "schedule": s.label,
        "schedule_kind": s.kind,
        "schedule_params": json.dumps(_schedule_params(s)),
        "N": s.N,
        "D": dp.token(),
        "defaults_not_from_source": ",".join(cfg.defaults) or "none",
        "provenance": dist.provenance,
    }


def _build_schedule(cfg: RunConfig) -> RateSchedule:
    return schedule_from_dict(cfg.schedule)


def cmd_solve(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    s = _build_schedule(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    positivity = check_positivity_condition(s)
    entries = []
    for dp in _sorted_d(cfg.d_values):
        entry: dict[str, Any] = {"D": dp.token()}
        try:
            dist = parametric_stationary(s, dp)
        except PositivityError as exc:
            entry.update(status="error", error=type(exc).__name__, index=exc.index, message=str(exc))
            entries.append(entry)
            continue
        eff = effective_schedule(s, dp)
        path = cfg.out_dir / f"{d_file_stem(dp)}.csv"
        write_distribution_csv(path, dist, _meta(cfg, s, dp, dist))
        entry.update(
            status="ok",
            file=str(path),
            norm_constant=dist.norm_constant,
            min_p=float(dist.p.min()),
            positive=bool(dist.p.min() > 0),
            max_riccati_residual_general=max_riccati_residual(s, riccati_general(s, dp)),
            max_riccati_residual_parametric=max_riccati_residual(s, riccati_parametric(s, dp)),
            max_stationarity_residual_effective=stationarity_residual(build_generator(eff), dist.p),
        )
        entries.append(entry)
    summary = {
        "preset": cfg.name,
        "schedule": s.label,
        "N": s.N,
        "positivity_condition": {
            "verdict": positivity.verdict,
            "advisory": True,
            "violations": positivity.violations,
        },
        "results": entries,
    }
    (cfg.out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"{cfg.name}: {s.label}, N = {s.N}", file=out)
    print(f"  rate-ratio condition: {'holds' if positivity.verdict else 'violated (advisory)'}", file=out)
    for e in entries:
        if e["status"] == "ok":
            print(
                f"  D = {e['D']:>8}: P0~ = {e['norm_constant']:.6g}, min p = {e['min_p']:.3e}, "
                f"riccati res = {e['max_riccati_residual_general']:.1e}, "
                f"stationarity res (effective) = {e['max_stationarity_residual_effective']:.1e} -> {e['file']}",
                file=out,
            )
        else:
            print(f"  D = {e['D']:>8}: {e['error']} at index {e['index']}", file=out)
    return EXIT_OK


def verify_pair(s: RateSchedule, dp: DParameter) -> dict[str, dict]:
    """Run every gate for one (schedule, D) pair; each entry has value, tol, ok."""
    checks: dict[str, dict] = {}

    def gate(name, value, tol):
        checks[name] = {"value": float(value), "tol": tol, "ok": bool(value <= tol)}

    try:
        dist = parametric_stationary(s, dp)
    except PositivityError as exc:
        checks["parametric_defined"] = {"value": None, "tol": None, "ok": False, "error": str(exc)}
        return checks
    gate("normalization", abs(dist.p.sum() - 1.0), TOL_NORMALIZATION)
    checks["positivity"] = {"value": float(dist.p.min()), "tol": 0.0, "ok": bool(dist.p.min() > 0)}
    gate("riccati_residual", max_riccati_residual(s, riccati_general(s, dp)), TOL_RICCATI)
    if s.kind == "constant":
        cf = constant_case_closed_form(s.params["b"], s.N, dp)
        gate("closed_form_diff", np.max(np.abs(cf.p - dist.p)), TOL_CLOSED_FORM)
    elif s.kind == "asymmetric":
        cf = asymmetric_closed_form(s.params["epsilon"], s.N, dp)
        gate("closed_form_diff", np.max(np.abs(cf.p - dist.p)), TOL_CLOSED_FORM)
    eff = effective_schedule(s, dp)
    oracle = null_space_stationary(build_generator(eff))
    gate("oracle_tv", total_variation(oracle, dist), TOL_ORACLE_TV)
    back = riccati_to_distribution(distribution_to_riccati(dist.p, s), s)
    gate("round_trip", np.max(np.abs(back.p - dist.p)), TOL_ROUND_TRIP)
    lhs = dist.p[1:] * eff.death[1 : s.N + 1]
    rhs = dist.p[:-1] * eff.birth[: s.N]
    gate("detailed_balance_rel", np.max(np.abs(lhs - rhs) / np.abs(rhs)), TOL_BALANCE)
    return checks


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    s = _build_schedule(cfg)
    report = {"preset": cfg.name, "schedule": s.label, "N": s.N, "pairs": []}
    all_ok = True
    for dp in _sorted_d(cfg.d_values):
        checks = verify_pair(s, dp)
        ok = all(c["ok"] for c in checks.values())
        all_ok &= ok
        report["pairs"].append({"D": dp.token(), "ok": ok, "checks": checks})
        print(f"D = {dp.token():>8}: {'PASS' if ok else 'FAIL'}", file=out)
        for name, c in checks.items():
            val = "n/a" if c["value"] is None else f"{c['value']:.3e}"
            print(f"    {name:<22} {val:>11}  {'ok' if c['ok'] else 'FAIL'}", file=out)
    report["ok"] = all_ok
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "verify.json").write_text(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_simulate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    s = _build_schedule(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    d_list = _sorted_d(cfg.d_values)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(d_list))
    results = []
    for dp, ss in zip(d_list, seeds):
        try:
            target = parametric_stationary(s, dp)
        except PositivityError as exc:
            results.append({"D": dp.token(), "status": "error", "message": str(exc)})
            continue
        chain = effective_schedule(s, dp)
        g = build_generator(chain)
        mean_rate = float(np.dot(target.p, g.diag))
        t_max = 1.05 * cfg.events / mean_rate
        run_seed = int(ss.generate_state(1)[0])
        tr = gillespie_run(chain, 0, t_max, run_seed)
        emp = empirical_stationary(tr, cfg.burn_in_fraction * tr.t_end)
        tv = total_variation(emp, target)
        path = cfg.out_dir / f"empirical_{d_file_stem(dp)}.csv"
        meta = _meta(cfg, s, dp, emp)
        meta.update(seed=run_seed, jumps=tr.n_jumps, t_end=repr(tr.t_end), rng=tr.rng_algorithm)
        write_distribution_csv(path, emp, meta)
        results.append(
            {
                "D": dp.token(),
                "status": "frozen" if tr.frozen else "ok",
                "seed": run_seed,
                "jumps": tr.n_jumps,
                "tv_to_analytic": tv,
                "file": str(path),
            }
        )
        flag = " (chain froze)" if tr.frozen else ""
        print(f"D = {dp.token():>8}: {tr.n_jumps} jumps, TV to analytic = {tv:.4f}{flag} -> {path}", file=out)
    (cfg.out_dir / "simulate.json").write_text(
        json.dumps({"preset": cfg.name, "seed": cfg.seed, "results": results}, indent=2) + "\n"
    )
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bdriccati", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_seed=False):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", type=Path, help="JSON run config")
        src.add_argument("--preset", choices=sorted(PRESETS), help="built-in figure parameter set")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--d", action="append", dest="d_values", metavar="D", help="D value (negative or 'inf'); repeatable")
        p.add_argument("--format", choices=["csv"], default="csv")
        if with_seed:
            p.add_argument("--seed", type=int)
            p.add_argument("--events", type=int, help="target number of jumps per run")

    common(sub.add_parser("solve", help="write P_n(D) CSVs and a summary"))
    common(sub.add_parser("verify", help="run tolerance gates; exit 1 on failure"))
    common(sub.add_parser("simulate", help="SSA cross-check of the analytic solution"), with_seed=True)
    for name in sorted(PRESETS):
        p = sub.add_parser(name, help=f"write CSV data for {name}")
        p.add_argument("--out", type=Path)
    return ap


def _load_config(args) -> RunConfig:
    if getattr(args, "config", None) is not None:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        cfg = RunConfig.from_dict(doc)
    else:
        cfg = preset_config(getattr(args, "preset", None) or "figure1")
    if getattr(args, "d_values", None):
        cfg.d_values = [_parse_d(v) for v in args.d_values]
    if args.out is not None:
        cfg.out_dir = args.out
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "events", None) is not None:
        cfg.events = args.events
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command in PRESETS:
            cfg = preset_config(args.command)
            if args.out is not None:
                cfg.out_dir = args.out
            return cmd_solve(cfg)
        cfg = _load_config(args)
        _build_schedule(cfg)
        handler = {"solve": cmd_solve, "verify": cmd_verify, "simulate": cmd_simulate}[args.command]
        return handler(cfg)
    except (ConfigError, ScheduleError) as exc:
        where = f" (index {exc.index})" if getattr(exc, "index", None) is not None else ""
        print(f"invalid input{where}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
