"""Command-line front end: ``micz-lab run <config.toml>`` and ``micz-lab report <glob>``.

Exit codes: 0 when every configured check passes, 1 on a check failure (or an
unreadable summary in ``report``), 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import glob as _glob
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import dynamics, sampling, suites
from .brackets import COMPLEX_LABELS, REDUCED_LABELS, Curvature, DomainError, PhasePoint4C, SystemParams
from .claims import REGISTRY

OUTPUT_ENV = "MICZ_LAB_OUTPUT_DIR"
TIMESTAMP_FIELD = "timestamp"

TASKS = ("check-brackets", "simulate", "ks-verify", "separation-verify", "laplace-check", "flat-limit")
_TOP_KEYS = {"task", "system", "seed", "params", "states", "integrator", "output", "ks", "laplace", "flat_limit"}
_SECTION_KEYS = {
    "params": {f.name for f in fields(SystemParams)},
    "states": {"count", "explicit"},
    "integrator": {f.name for f in fields(dynamics.IntegratorConfig)},
    "output": {"dir", "name"},
    "ks": {"source", "trajectory_t_end"},
    "laplace": {"r0", "points", "h"},
    "flat_limit": {"radii", "pairs"},
}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"field '{field_name}': {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    task: str
    system: str | None
    params: SystemParams
    seed: int = 0
    count: int = 100
    explicit: list = field(default_factory=list)
    integrator: dynamics.IntegratorConfig = field(default_factory=dynamics.IntegratorConfig)
    output_dir: Path = Path("micz-lab-out")
    name: str = "summary"
    section: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be a table")
    unknown = set(sec) - _SECTION_KEYS[name]
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}", "unknown key")
    return sec


def _require(sec: dict, key: str, prefix: str):
    if key not in sec:
        raise ConfigError(f"{prefix}.{key}" if prefix else key, "required field is missing")
    return sec[key]


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<toml>", str(exc)) from None
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    task = _require(raw, "task", "")
    if task not in TASKS:
        raise ConfigError("task", f"expected one of {', '.join(TASKS)}")
    system = raw.get("system")
    if task in ("check-brackets", "simulate"):
        system = _require(raw, "system", "")
        if system not in {s.value for s in dynamics.SystemId}:
            raise ConfigError("system", f"unknown system {system!r}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed", "must be an integer")

    try:
        params = SystemParams(**_section(raw, "params"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("params", str(exc)) from None
    if system is not None:
        try:
            dynamics.system(system).check_params(params)
        except DomainError as exc:
            raise ConfigError("params.curvature", str(exc)) from None

    states = _section(raw, "states")
    count = states.get("count", 100)
    if not isinstance(count, int) or count < 1:
        raise ConfigError("states.count", "must be a positive integer")
    explicit = states.get("explicit", [])
    if system is not None and explicit:
        dim = dynamics.system(system).state_type.DIM
        for i, row in enumerate(explicit):
            if len(row) != dim:
                raise ConfigError(f"states.explicit[{i}]", f"expected {dim} components")

    integ = _section(raw, "integrator")
    if task == "simulate":
        _require(integ, "t_end", "integrator")
    try:
        icfg = dynamics.IntegratorConfig(**integ)
    except ValueError as exc:
        raise ConfigError("integrator", str(exc)) from None

    out = _section(raw, "output")
    out_dir = Path(os.environ.get(OUTPUT_ENV) or out.get("dir", "micz-lab-out"))
    extra = {}
    if task == "ks-verify":
        extra = _section(raw, "ks")
        src = _require(extra, "source", "ks")
        if src not in ("flat", "sphere", "pseudosphere"):
            raise ConfigError("ks.source", "expected flat, sphere or pseudosphere")
    elif task == "laplace-check":
        extra = _section(raw, "laplace")
    elif task == "flat-limit":
        extra = _section(raw, "flat_limit")
        radii = extra.get("radii", [10.0, 100.0, 1000.0, 10000.0])
        if len(radii) < 2 or any(not r > 0 for r in radii):
            raise ConfigError("flat_limit.radii", "need at least two positive radii")
        if params.curvature is Curvature.FLAT:
            raise ConfigError("params.curvature", "flat-limit needs sphere or pseudosphere")
    elif task == "separation-verify" and params.curvature is not Curvature.PSEUDOSPHERE:
        raise ConfigError("params.curvature", "separation-verify needs pseudosphere")
    return ExperimentConfig(task, system, params, seed, count, explicit, icfg, out_dir,
                            out.get("name", task), extra, raw)


# --- tasks -----------------------------------------------------------------

def _states_for(cfg: ExperimentConfig, rng, spec: dynamics.SystemSpec):
    if cfg.explicit:
        return [spec.make_state(v, cfg.params.s) for v in cfg.explicit], {"explicit": len(cfg.explicit)}
    if spec.state_type is PhasePoint4C:
        b = sampling.bounds_4c(cfg.params.curvature)
        return sampling.sample_4c(rng, cfg.count, b, cfg.params.curvature), b.as_dict()
    b = sampling.bounds_3(spec.id is dynamics.SystemId.MICZ_PSEUDO)
    return sampling.sample_3(rng, cfg.count, b), b.as_dict()


def _task_check_brackets(cfg, rng):
    spec = dynamics.system(cfg.system)
    states, bounds = _states_for(cfg, rng, spec)
    return suites.involution_suite(spec.id, cfg.params, states), bounds, None


def _task_simulate(cfg, rng):
    spec = dynamics.system(cfg.system)
    cfg_one = ExperimentConfig(**{**cfg.__dict__, "count": 1})
    states, bounds = _states_for(cfg_one, rng, spec)
    res, tr = suites.drift_check(spec.id, states[0], cfg.params, cfg.integrator)
    return [res], bounds, tr


def _task_ks(cfg, rng):
    src = cfg.section["source"]
    curv = Curvature(src)
    b = sampling.bounds_4c(curv, for_ks=True)
    states = sampling.sample_4c(rng, cfg.count, b, curv)
    results = suites.ks_suite(cfg.params, src, states)
    t_end = cfg.section.get("trajectory_t_end")
    if t_end:
        icfg = dynamics.IntegratorConfig(**{**asdict(cfg.integrator), "t_end": float(t_end)})
        results.append(suites.ks_trajectory_check(cfg.params, src, states[0], icfg))
    return results, b.as_dict(), None


def _task_separation(cfg, rng):
    b = sampling.bounds_3(True, off_axis=True)
    states = sampling.sample_3(rng, cfg.count, b)
    results = suites.separation_suite(cfg.params, states)
    # only the shifted relation; the unshifted reflection form is known not to hold
    results += [r for r in suites.reflection_checks(cfg.params, states) if r.claim == "curved:reflection-shift"]
    return results, b.as_dict(), None


def _task_laplace(cfg, rng):
    r0 = float(cfg.section.get("r0", 1.0))
    n = int(cfg.section.get("points", 20))
    h = float(cfg.section.get("h", 1e-2))
    pts = []
    while len(pts) < n:
        q = rng.uniform(-0.7, 0.7, 3)
        if 0.2 <= np.linalg.norm(q) <= 0.7:
            pts.append(q)
    return suites.laplace_checks(r0, pts, h), {"q_norm": [0.2, 0.7], "h": h}, None


def _task_flat_limit(cfg, rng):
    radii = [float(r) for r in cfg.section.get("radii", [10.0, 100.0, 1000.0, 10000.0])]
    n = int(cfg.section.get("pairs", 5))
    pairs = []
    for _ in range(n):
        u = tuple(complex(a, b) for a, b in rng.uniform(-1, 1, (2, 2)))
        w = tuple(complex(a, b) for a, b in rng.uniform(-1, 1, (2, 2)))
        pairs.append((u, w))
    return suites.flat_limit_checks(cfg.params, pairs, radii), {"u_box": 1.0, "w_box": 1.0}, None


_RUNNERS = {
    "check-brackets": _task_check_brackets,
    "simulate": _task_simulate,
    "ks-verify": _task_ks,
    "separation-verify": _task_separation,
    "laplace-check": _task_laplace,
    "flat-limit": _task_flat_limit,
}


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats so that the JSON stays standard."""
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps(summary: dict) -> str:
    return json.dumps(_clean(json.loads(json.dumps(summary, default=_jsonable))), sort_keys=True, indent=2)


def strip_timestamp(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if k != TIMESTAMP_FIELD}


def write_csv(path: Path, tr: dynamics.Trajectory):
    labels = COMPLEX_LABELS if tr.states.shape[1] == 8 else REDUCED_LABELS
    labels = [l.lower().replace(" ", "_") for l in labels]
    names = list(tr.observables)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *labels, *names])
        for i, t in enumerate(tr.times):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in tr.states[i]),
                        *(repr(float(tr.observables[n][i])) for n in names)])


def run_config(cfg: ExperimentConfig) -> tuple[dict, int]:
    rng = np.random.default_rng(cfg.seed)
    results, bounds, tr = _RUNNERS[cfg.task](cfg, rng)
    checks = [r.as_dict() for r in results]
    passed = all(c["passed"] for c in checks)
    summary = {
        "task": cfg.task,
        "system": cfg.system,
        "seed": cfg.seed,
        "params": {**asdict(cfg.params), "curvature": cfg.params.curvature.value},
        "sampling_bounds": bounds,
        "checks": checks,
        "passed": passed,
        "ledger_keys": sorted({k for c in checks for k in c["adjusted"]}),
        TIMESTAMP_FIELD: _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    (cfg.output_dir / f"{cfg.name}.json").write_text(dumps(summary) + "\n")
    if tr is not None:
        write_csv(cfg.output_dir / f"{cfg.name}.csv", tr)
    return summary, 0 if passed else 1


def cmd_run(path: str) -> int:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"config error: field '<file>': {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    summary, code = run_config(cfg)
    for c in summary["checks"]:
        verdict = "PASS" if c["passed"] else "FAIL"
        print(f"{verdict}  {c['claim']:<40} {c['value']:.3e}  {c['band']}")
    print(f"summary: {cfg.output_dir / (cfg.name + '.json')}")
    return code


# --- report ----------------------------------------------------------------

def build_report(paths: list[str]) -> tuple[dict, list[str]]:
    """Group checks by system; failures first.  Returns (report, unreadable)."""
    tables: dict[str, list] = {}
    unreadable = []
    for p in sorted(paths):
        try:
            data = json.loads(Path(p).read_text())
            checks = data["checks"]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            unreadable.append(f"{p}: {exc}")
            continue
        for c in checks:
            reg = REGISTRY.get(c.get("claim"))
            anchor_ok = reg is not None and reg.anchor == c.get("anchor")
            system = c.get("system") or "?"
            if system == "*":
                system = c.get("detail", {}).get("system") or data.get("system") or "*"
            tables.setdefault(system, []).append({
                "claim": c.get("claim"),
                "anchor": c.get("anchor"),
                "value": c.get("value"),
                "band": c.get("band"),
                "passed": bool(c.get("passed")) and anchor_ok,
                "anchor_registered": anchor_ok,
                "source": p,
            })
    for rows in tables.values():
        rows.sort(key=lambda r: (r["passed"], r["claim"] or "", r["source"]))
    return {"tables": dict(sorted(tables.items())), "unreadable": unreadable}, unreadable


def report_markdown(rep: dict) -> str:
    lines = []
    for system, rows in rep["tables"].items():
        lines += [f"## {system}", "", "| verdict | claim | anchor | value | band |", "|---|---|---|---|---|"]
        for r in rows:
            verdict = "pass" if r["passed"] else ("fail (unregistered anchor)" if not r["anchor_registered"] else "fail")
            val = r["value"]
            val = f"{val:.3e}" if isinstance(val, (int, float)) else str(val)
            lines.append(f"| {verdict} | {r['claim']} | {r['anchor']} | {val} | {r['band']} |")
        lines.append("")
    if rep["unreadable"]:
        lines += ["## unreadable", ""] + [f"- {u}" for u in rep["unreadable"]] + [""]
    return "\n".join(lines)


def cmd_report(pattern: str, out: str | None) -> int:
    paths = _glob.glob(pattern)
    if not paths:
        print(f"no summaries match {pattern!r}", file=sys.stderr)
        return 1
    rep, unreadable = build_report(paths)
    md = report_markdown(rep)
    out_dir = Path(out or os.environ.get(OUTPUT_ENV) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.md").write_text(md)
    (out_dir / "report.json").write_text(json.dumps(rep, sort_keys=True, indent=2) + "\n")
    print(md)
    failed = any(not r["passed"] for rows in rep["tables"].values() for r in rows)
    return 1 if unreadable or failed else 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="micz-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="execute one experiment config")
    r.add_argument("config")
    rp = sub.add_parser("report", help="consolidate JSON summaries")
    rp.add_argument("pattern")
    rp.add_argument("--out", default=None, help="directory for report.md and report.json")
    args = ap.parse_args(argv)
    if args.cmd == "run":
        return cmd_run(args.config)
    return cmd_report(args.pattern, args.out)


if __name__ == "__main__":
    sys.exit(main())
