"""Config-driven command line interface.

Subcommands: solve | verify | simulate | discrete | sweep | export.
Runs are defined by a TOML config; every artifact embeds the full config
so deterministic numbers (and stochastic ones given the seed) are exactly
reproducible from the artifact alone.

Exit codes: 0 success/verified-pass, 1 verified-fail, 2 usage or config
error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import __version__
from .model import (
    BAD,
    GOOD,
    INF,
    BenefitFn,
    CostFn,
    CostPair,
    ModelParams,
    belief_from_log_odds,
    log_odds_from_belief,
)
from .strategy import (
    Region,
    RegionKind,
    StrategyProfile,
    pooling_profile,
    validate_profile,
)
from .values import GridSpec, ValueTable, build_value_table, switched_value_solve
from .equilibrium import (
    SearchSpec,
    best_response_verify,
    check_primitive_conditions,
    check_primitive_conditions_bounded,
    check_value_conditions,
    find_equilibrium,
    scrutiny_bounds,
)
from .montecarlo import (
    DeviationSpec,
    estimate_value,
    horizon_for_tail,
    reputation_stats,
    standard_deviation_library,
    tail_bound,
)
from .dynamics import ensemble
from .discrete import DiscreteCandidate, DiscreteParams, check_discrete, search_discrete, solve_q


class ConfigError(Exception):
    """Malformed configuration; carries the offending section.key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"[{key}] {message}")
        self.key = key


def _need(table: dict, section: str, key: str):
    if key not in table:
        raise ConfigError(f"{section}.{key}", "missing required key")
    return table[key]


def _number(table: dict, section: str, key: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"{section}.{key}", "missing required key")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _threshold(table: dict, section: str, name: str, default=None):
    """Thresholds accept either log odds (l_*) or beliefs (mu_*); stored as l."""
    l_key = f"l_{name}" if name not in ("0", "1") else f"l{name}"
    mu_key = f"mu_{name}" if name not in ("0", "1") else f"mu{name}"
    has_l, has_mu = l_key in table, mu_key in table
    if has_l and has_mu:
        raise ConfigError(f"{section}.{l_key}", f"give either {l_key} or {mu_key}, not both")
    if has_l:
        return _number(table, section, l_key)
    if has_mu:
        mu = _number(table, section, mu_key)
        if not 0.0 <= mu <= 1.0:
            raise ConfigError(f"{section}.{mu_key}", "belief must lie in [0, 1]")
        return log_odds_from_belief(mu)
    return default


@dataclass
class RunConfig:
    raw: dict
    params: ModelParams
    benefit: BenefitFn
    costs: CostPair
    path: str
    threads: int = 1

    def normalized_thresholds(self) -> dict:
        prof = self.raw.get("profile", {})
        out = {}
        for name in ("under", "0", "1", "over"):
            value = _threshold(prof, "profile", name)
            if value is not None:
                out[f"l_{name}" if name in ("under", "over") else f"l{name}"] = value
        return out


def load_config(path: str) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"TOML parse error: {exc}")

    model = raw.get("model")
    if model is None:
        raise ConfigError("model", "missing required section")
    lam = _number(model, "model", "lambda", required=True)
    r = _number(model, "model", "r", required=True)
    d = _number(model, "model", "d", default=0.0)
    d_good = _number(model, "model", "d_good")
    d_bad = _number(model, "model", "d_bad")
    try:
        params = ModelParams(lam=lam, r=r, d=d, d_good=d_good, d_bad=d_bad)
    except ValueError as exc:
        raise ConfigError("model", str(exc))

    bsec = raw.get("benefit", {})
    try:
        benefit = BenefitFn(
            k=_number(bsec, "benefit", "k", default=0.0),
            m=_number(bsec, "benefit", "m", default=0.0),
            s=_number(bsec, "benefit", "s", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError("benefit", str(exc))

    csec = raw.get("cost", {})
    try:
        costs = CostPair(
            good=CostFn(
                a=_number(csec.get("good", {}), "cost.good", "a", required=True),
                b=_number(csec.get("good", {}), "cost.good", "b", default=0.0),
            ),
            bad=CostFn(
                a=_number(csec.get("bad", {}), "cost.bad", "a", required=True),
                b=_number(csec.get("bad", {}), "cost.bad", "b", default=0.0),
            ),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("cost", str(exc))

    threads = int(os.environ.get("SIGNALFLOW_THREADS", "1") or "1")
    return RunConfig(raw=raw, params=params, benefit=benefit, costs=costs,
                     path=path, threads=max(1, threads))


def _grid_spec(cfg: RunConfig) -> GridSpec:
    num = cfg.raw.get("numerics", {})
    spec = GridSpec()
    step = _number(num, "numerics", "scrutiny_step")
    if step is not None:
        if step <= 0:
            raise ConfigError("numerics.scrutiny_step", "must be positive")
        spec.scrutiny_step = step
    cap = _number(num, "numerics", "scrutiny_span_cap")
    if cap is not None:
        spec.scrutiny_span_cap = cap
    return spec


def _n_steps(cfg: RunConfig) -> int:
    num = cfg.raw.get("numerics", {})
    n = _number(num, "numerics", "switched_steps", default=2000.0)
    if n < 10:
        raise ConfigError("numerics.switched_steps", "must be at least 10")
    return int(n)


def _solve_from_config(cfg: RunConfig):
    """Resolve the profile: explicit thresholds, a search spec, or pooling."""
    prof = cfg.raw.get("profile", {})
    kind = prof.get("kind", "switched")
    if kind == "pooling":
        profile = pooling_profile()
        table = build_value_table(profile, cfg.params, cfg.benefit, cfg.costs, _grid_spec(cfg))
        return profile, table, None, None
    if kind != "switched":
        raise ConfigError("profile.kind", f"unknown profile kind {kind!r}")
    l_under = _threshold(prof, "profile", "under")
    l0 = _threshold(prof, "profile", "0")
    l1 = _threshold(prof, "profile", "1")
    l_over = _threshold(prof, "profile", "over", default=INF)
    search = cfg.raw.get("search")
    if l_under is None or l0 is None:
        raise ConfigError("profile", "switched profiles need l_under (or mu_under) and l0 (or mu0)")
    if l1 is None and search is None:
        raise ConfigError("profile", "give l1 (or mu1) or a [search] section")
    if l1 is not None:
        result = switched_value_solve(
            l_under, l0, l1, l_over, cfg.params, cfg.benefit, cfg.costs,
            n_steps=_n_steps(cfg), grid_spec=_grid_spec(cfg),
        )
        return result.profile, result.table, result, None
    lo = _number(search, "search", "l1_min", required=True)
    hi = _number(search, "search", "l1_max", required=True)
    coarse = int(_number(search, "search", "points", default=21.0))
    max_solves = int(_number(search, "search", "max_solves", default=12.0))
    spec = SearchSpec(l_under=l_under, l0=l0, l1=(lo, hi), l_over=l_over,
                      coarse=coarse, max_solves=max_solves)
    found = find_equilibrium(cfg.params, cfg.benefit, cfg.costs, spec,
                             n_steps=_n_steps(cfg), grid_spec=_grid_spec(cfg))
    return found.profile, found.table, found.solve, found


def _condition_rows(report) -> list[dict]:
    return [
        {
            "label": c.label,
            "description": c.description,
            "left": c.left,
            "right": c.right,
            "margin": c.margin,
            "strict": c.strict,
            "passed": c.passed,
            "note": c.note,
        }
        for c in report.conditions
    ]


def _table_columns(table: ValueTable, profile: StrategyProfile) -> dict:
    grid = table.grid
    e_good = np.empty_like(grid)
    e_bad = np.empty_like(grid)
    for i, l in enumerate(grid):
        e_good[i], e_bad[i] = profile.efforts(float(l))
    return {
        "l": grid.tolist(),
        "mu": [belief_from_log_odds(float(l)) for l in grid],
        "V_G": table.v_good.tolist(),
        "V_B": table.v_bad.tolist(),
        "e_B_star": e_bad.tolist(),
        "e_G_star": e_good.tolist(),
    }


CSV_COLUMNS = ("mu", "l", "V_G", "V_B", "e_B_star", "e_G_star")


def write_table_csv(columns: dict, path: Path) -> None:
    """UTF-8 CSV with a header row, '.' decimals, full float round-trip."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        n = len(columns["l"])
        for i in range(n):
            fh.write(",".join(repr(float(columns[c][i])) for c in CSV_COLUMNS) + "\n")


def read_table_csv(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return {name: [float(row[i]) for row in rows] for i, name in enumerate(header)}


# ---------------------------------------------------------------------------
# profile serialization (round-trips exactly through JSON)


def profile_to_dict(profile: StrategyProfile) -> dict:
    regions = []
    for region in profile.regions:
        entry = {
            "lower": region.lower,
            "upper": region.upper,
            "kind": region.kind.value,
            "closed_left": region.closed_left,
            "closed_right": region.closed_right,
        }
        if region.kind is RegionKind.CUSTOM:
            entry["e_good"] = region.e_good
            entry["e_bad"] = region.e_bad
        if region.kind is RegionKind.SWITCHED:
            entry["table_l"] = list(map(float, region.table_l))
            entry["table_e"] = list(map(float, region.table_e))
        regions.append(entry)
    return {
        "regions": regions,
        "l_under": profile.l_under,
        "l0": profile.l0,
        "l1": profile.l1,
        "l_over": profile.l_over,
    }


def profile_from_dict(data: dict) -> StrategyProfile:
    regions = []
    for entry in data["regions"]:
        regions.append(
            Region(
                lower=entry["lower"],
                upper=entry["upper"],
                kind=RegionKind(entry["kind"]),
                closed_left=entry["closed_left"],
                closed_right=entry["closed_right"],
                e_good=entry.get("e_good", 0.0),
                e_bad=entry.get("e_bad", 0.0),
                table_l=np.array(entry["table_l"]) if "table_l" in entry else None,
                table_e=np.array(entry["table_e"]) if "table_e" in entry else None,
            )
        )
    return StrategyProfile(
        regions=tuple(regions),
        l_under=data.get("l_under"),
        l0=data.get("l0"),
        l1=data.get("l1"),
        l_over=data.get("l_over"),
    )


# ---------------------------------------------------------------------------
# commands


def _artifact(command: str, cfg: RunConfig, results: dict, timings: dict) -> dict:
    return {
        "version": __version__,
        "command": command,
        "config": cfg.raw,
        "config_path": cfg.path,
        "normalized": cfg.normalized_thresholds(),
        "results": results,
        "timing_seconds": timings,
    }


def _write_artifact(artifact: dict, out_dir: Path, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{artifact['command']}_artifact.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(artifact, fh, indent=1, sort_keys=True)
    if fmt == "csv" and "table" in artifact.get("results", {}):
        write_table_csv(artifact["results"]["table"], out_dir / "table.csv")
    return path


def cmd_solve(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    t0 = time.time()
    profile, table, solve, _search = _solve_from_config(cfg)
    results: dict = {}
    if solve is not None and solve.failure is not None:
        results["construction_failure"] = vars(solve.failure)
        artifact = _artifact("solve", cfg, results, {"solve": time.time() - t0})
        _write_artifact(artifact, out_dir, fmt)
        print("solve: construction failed:", solve.failure.message)
        return 1
    results["profile"] = profile_to_dict(profile)
    results["table"] = _table_columns(table, profile)
    results["boundary"] = table.boundary
    artifact = _artifact("solve", cfg, results, {"solve": time.time() - t0})
    path = _write_artifact(artifact, out_dir, fmt)
    print(f"solve: wrote {path}")
    return 0


def cmd_verify(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    t0 = time.time()
    profile, table, solve, search = _solve_from_config(cfg)
    results: dict = {}
    verdict = "fail"
    if solve is not None and solve.failure is not None:
        results["construction_failure"] = vars(solve.failure)
    else:
        report = check_value_conditions(profile, table, cfg.params, cfg.benefit, cfg.costs)
        violation = best_response_verify(profile, table, cfg.params, cfg.benefit, cfg.costs)
        results["conditions"] = _condition_rows(report)
        results["verdict"] = report.verdict
        results["best_response_violation"] = violation
        results["n_star"] = report.n_star
        results["width_bound"] = report.width_bound
        prims = _primitive_report(cfg, profile)
        if prims is not None:
            results["primitive_conditions"] = _condition_rows(prims)
            results["primitive_verdict"] = prims.verdict
        verdict = report.verdict if violation <= 1e-6 else "fail"
        results["profile"] = profile_to_dict(profile)
        results["table"] = _table_columns(table, profile)
    if search is not None:
        results["search"] = {
            "thresholds": search.thresholds,
            "candidates_tried": search.candidates_tried,
            "verdict": search.verdict,
        }
    artifact = _artifact("verify", cfg, results, {"verify": time.time() - t0})
    _write_artifact(artifact, out_dir, fmt)
    print(f"verify: verdict={verdict}")
    return 0 if verdict == "pass" else 1


def _primitive_report(cfg: RunConfig, profile: StrategyProfile):
    if profile is None or profile.l_under is None or profile.l1 is None:
        return None
    p = cfg.params
    if not p.symmetric:
        return None
    try:
        if p.d == 0.0 and (profile.l_over is None or math.isinf(profile.l_over)):
            return check_primitive_conditions(profile.l_under, profile.l1, p, cfg.benefit, cfg.costs)
        if p.d > 0.0 and profile.l_over is not None and math.isfinite(profile.l_over):
            return check_primitive_conditions_bounded(
                profile.l_under, profile.l1, profile.l_over, p, cfg.benefit, cfg.costs
            )
    except ValueError:
        return None
    return None


def _sim_section(cfg: RunConfig, seed_override: int | None):
    sim = cfg.raw.get("simulation")
    if sim is None:
        raise ConfigError("simulation", "missing required section")
    l_start = _threshold(sim, "simulation", "start")
    if l_start is None:
        raise ConfigError("simulation", "need l_start (or mu_start)")
    horizon = _number(sim, "simulation", "T")
    if horizon is None:
        rel_tail = _number(sim, "simulation", "rel_tail", default=1e-3)
        horizon = horizon_for_tail(cfg.params, cfg.benefit, rel_tail)
    n_paths = int(_number(sim, "simulation", "n_paths", default=10000.0))
    seed = sim.get("seed")
    if seed_override is not None:
        seed = seed_override
    if seed is None:
        raise ConfigError("simulation.seed", "stochastic commands need a seed")
    return l_start, float(horizon), n_paths, int(seed), sim


def cmd_simulate(cfg: RunConfig, out_dir: Path, fmt: str, seed_override: int | None) -> int:
    t0 = time.time()
    profile, table, solve, _ = _solve_from_config(cfg)
    if solve is not None and solve.failure is not None:
        print("simulate: construction failed:", solve.failure.message)
        return 1
    l_start, horizon, n_paths, seed, sim = _sim_section(cfg, seed_override)
    results: dict = {"l_start": l_start, "horizon": horizon, "n_paths": n_paths, "seed": seed}
    for tag in (GOOD, BAD):
        est = estimate_value(profile, cfg.params, cfg.benefit, cfg.costs, tag,
                             l_start, horizon, n_paths, seed, workers=cfg.threads)
        results[f"estimate_{tag}"] = {
            "mean": est.mean, "stderr": est.stderr, "tail_bound": est.tail_bound,
            "table_value": table.value(l_start, tag),
        }
    mix = ensemble(l_start, profile, cfg.params, cfg.benefit, cfg.costs, None,
                   horizon, n_paths, seed, keep_paths=False, workers=cfg.threads)
    results["martingale"] = {
        "prior_belief": belief_from_log_odds(l_start),
        **{k: v for k, v in mix.summary().items() if k != "terminal_belief_histogram"},
    }
    if sim.get("reputation", True):
        stats = reputation_stats(profile, cfg.params, cfg.benefit, cfg.costs,
                                 l_start, horizon, n_paths, seed, workers=cfg.threads)
        results["reputation"] = vars(stats)
    if sim.get("deviations", False):
        rows = []
        for tag in (GOOD, BAD):
            for res in deviation_rows(cfg, profile, table, tag, l_start, horizon, n_paths, seed):
                rows.append(res)
        results["deviations"] = rows
    artifact = _artifact("simulate", cfg, results, {"simulate": time.time() - t0})
    path = _write_artifact(artifact, out_dir, fmt)
    print(f"simulate: wrote {path}")
    return 0


def deviation_rows(cfg, profile, table, tag, l_start, horizon, n_paths, seed) -> list[dict]:
    from .montecarlo import deviation_test

    results = deviation_test(
        profile, table, cfg.params, cfg.benefit, cfg.costs,
        standard_deviation_library(tag), l_start, horizon, n_paths, seed,
        workers=cfg.threads,
    )
    return [
        {
            "type": r.spec.type_tag,
            "label": r.spec.label,
            "gain": r.gain,
            "stderr": r.stderr,
            "gain_vs_value": r.gain_vs_value,
            "stderr_marginal": r.stderr_marginal,
            "tail_bound": r.tail_bound,
            "profitable": r.profitable(),
        }
        for r in results
    ]


def cmd_discrete(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    t0 = time.time()
    sec = cfg.raw.get("discrete")
    if sec is None:
        raise ConfigError("discrete", "missing required section")
    try:
        dparams = DiscreteParams(
            delta=_number(sec, "discrete", "delta", required=True),
            c_good=_number(sec, "discrete", "c_good", required=True),
            c_bad=_number(sec, "discrete", "c_bad", required=True),
            l0=_number(sec, "discrete", "l0", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError("discrete", str(exc))
    results: dict = {}
    if "e0" in sec and "e1" in sec:
        e0 = _number(sec, "discrete", "e0", required=True)
        e1 = _number(sec, "discrete", "e1", required=True)
        q = sec.get("q")
        if q is None:
            q = solve_q(dparams, e0, e1)
            results["q_solved"] = q
        if q is not None:
            report = check_discrete(dparams, DiscreteCandidate(e0=e0, q_good=float(q), e1=e1))
            results["check"] = {
                "scrutiny_good": report.scrutiny_good,
                "scrutiny_bad": report.scrutiny_bad,
                "bad_first_period": report.bad_first_period,
                "indifference_residual": report.indifference_residual,
                "inequalities_pass": report.inequalities_pass,
                "exact": report.exact,
            }
        else:
            results["check"] = {"error": "no interior mixing weight exists"}
    if "e0_grid" in sec or "e1_grid" in sec:
        e0_grid = sec.get("e0_grid", [0.1, 0.25, 0.5, 0.75, 1.0])
        e1_grid = sec.get("e1_grid", [0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
        found = search_discrete(dparams, e0_grid, e1_grid)
        results["search"] = [
            {"e0": c.e0, "q_good": c.q_good, "e1": c.e1,
             "residual": rep.indifference_residual}
            for c, rep in found
        ]
    artifact = _artifact("discrete", cfg, results, {"discrete": time.time() - t0})
    path = _write_artifact(artifact, out_dir, fmt)
    print(f"discrete: wrote {path}")
    return 0


def _set_dotted(raw: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = raw
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value


def cmd_sweep(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    t0 = time.time()
    sec = cfg.raw.get("sweep")
    if sec is None:
        raise ConfigError("sweep", "missing required section")
    parameter = sec.get("parameter")
    values = sec.get("values")
    if not parameter or not isinstance(values, list) or not values:
        raise ConfigError("sweep", "need 'parameter' (dotted key) and a nonempty 'values' list")
    rows = []
    for value in values:
        raw = json.loads(json.dumps(cfg.raw))  # deep copy via JSON round-trip
        _set_dotted(raw, parameter, value)
        raw.pop("sweep", None)
        sub = RunConfig(raw=raw, params=cfg.params, benefit=cfg.benefit,
                        costs=cfg.costs, path=cfg.path, threads=cfg.threads)
        sub = _reload_from_raw(sub)
        try:
            profile, table, solve, _ = _solve_from_config(sub)
            if solve is not None and solve.failure is not None:
                rows.append({"value": value, "verdict": "fail",
                             "failure": solve.failure.condition})
                continue
            report = check_value_conditions(profile, table, sub.params, sub.benefit, sub.costs)
            rows.append({"value": value, "verdict": report.verdict,
                         "min_margin": report.min_margin,
                         "scrutiny_width": (
                             (profile.l_over - profile.l1)
                             if profile.l_over is not None and profile.l1 is not None
                             and math.isfinite(profile.l_over) else None
                         )})
        except (ConfigError, ValueError) as exc:
            rows.append({"value": value, "verdict": "error", "error": str(exc)})
    artifact = _artifact("sweep", cfg, {"parameter": parameter, "rows": rows},
                         {"sweep": time.time() - t0})
    path = _write_artifact(artifact, out_dir, fmt)
    print(f"sweep: wrote {path}")
    return 0


def _reload_from_raw(cfg: RunConfig) -> RunConfig:
    """Rebuild the parsed objects after a sweep modified the raw dict."""
    model = cfg.raw.get("model", {})
    params = ModelParams(
        lam=float(model.get("lambda")),
        r=float(model.get("r")),
        d=float(model.get("d", 0.0)),
        d_good=model.get("d_good"),
        d_bad=model.get("d_bad"),
    )
    bsec = cfg.raw.get("benefit", {})
    benefit = BenefitFn(k=float(bsec.get("k", 0.0)), m=float(bsec.get("m", 0.0)),
                        s=float(bsec.get("s", 1.0)))
    csec = cfg.raw.get("cost", {})
    costs = CostPair(
        good=CostFn(a=float(csec["good"]["a"]), b=float(csec["good"].get("b", 0.0))),
        bad=CostFn(a=float(csec["bad"]["a"]), b=float(csec["bad"].get("b", 0.0))),
    )
    return RunConfig(raw=cfg.raw, params=params, benefit=benefit, costs=costs,
                     path=cfg.path, threads=cfg.threads)


def cmd_export(artifact_path: str, out_dir: Path, fmt: str) -> int:
    try:
        with open(artifact_path, "r", encoding="utf-8") as fh:
            artifact = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"export: cannot read artifact: {exc}", file=sys.stderr)
        return 2
    results = artifact.get("results", {})
    out_dir.mkdir(parents=True, exist_ok=True)
    wrote = []
    if fmt == "csv":
        if "table" not in results:
            print("export: artifact has no table to export", file=sys.stderr)
            return 2
        path = out_dir / "table.csv"
        write_table_csv(results["table"], path)
        wrote.append(path)
    else:
        path = out_dir / "report.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=1, sort_keys=True)
        wrote.append(path)
    print("export: wrote", ", ".join(str(p) for p in wrote))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="signalflow",
        description="Solve, verify and simulate switched-effort signalling equilibria.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "verify", "simulate", "discrete", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="json")
    p = sub.add_parser("export")
    p.add_argument("artifact", help="path to a previously written artifact JSON")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    try:
        if args.command == "export":
            return cmd_export(args.artifact, out_dir, args.format)
        cfg = load_config(args.config)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir, args.format)
        if args.command == "verify":
            return cmd_verify(cfg, out_dir, args.format)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, args.format, args.seed)
        if args.command == "discrete":
            return cmd_discrete(cfg, out_dir, args.format)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
