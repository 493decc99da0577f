"""Experiment runner: TOML config in, deterministic CSV/JSON artifacts out.

Exit codes: 0 success, 2 configuration/validation error, 3 budget exhaustion
(group ball overflow, truncation dominating, a failed search stage).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

from . import __version__
from .amenability import (build_kesten_walk, cogrowth_series, folner_search,
                          self_adjoint_check, spectral_radius_estimate)
from .errors import (BallTooLarge, ConfigError, FolnerStageFailed,
                     KestenLabError, NoConvergence, TruncationDominates)
from .extension import (Cocycle, ExtensionSystem, amenability_verdict,
                        psi_n, return_weight_series)
from .groups import (FiniteGroup, FreeGroup, Group, GroupElement,
                     Homomorphism, LamplighterGroup, QuotientGroup, ZdGroup,
                     cyclic_group)
from .potentials import (Potential, constant_potential, normalize,
                         pressure_estimate, symmetry_defects,
                         validate_potential)
from .sft import Shift, validate_involution, validate_shift

BUDGET_ERRORS = (BallTooLarge, TruncationDominates, FolnerStageFailed,
                 NoConvergence)

TASKS = ("pressure", "extension-pressure", "kesten", "cogrowth", "folner",
         "verify-symmetry", "report")


def fmt(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------------------
# config parsing


def load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"not a readable file: {path}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("config", f"TOML parse error: {e}") from None


def build_shift(cfg: dict) -> Shift:
    section = cfg.get("shift")
    if not isinstance(section, dict):
        raise ConfigError("shift", "missing [shift] section")
    m = section.get("alphabet_size")
    if not isinstance(m, int) or m < 1:
        raise ConfigError("shift.alphabet_size", "need a positive integer")
    if "transitions" in section:
        rows = section["transitions"]
    elif "forbidden_blocks" in section:
        rows = [[1] * m for _ in range(m)]
        for block in section["forbidden_blocks"]:
            if (not isinstance(block, list) or len(block) != 2
                    or any(not 0 <= c < m for c in block)):
                raise ConfigError("shift.forbidden_blocks",
                                  f"each block must be a letter pair, got {block}")
            rows[block[0]][block[1]] = 0
    else:
        rows = [[1] * m for _ in range(m)]
    try:
        return validate_shift(m, rows)
    except KestenLabError as e:
        raise ConfigError("shift.transitions", str(e)) from None


def build_potential(cfg: dict, shift: Shift) -> Potential:
    section = cfg.get("potential")
    if not isinstance(section, dict):
        raise ConfigError("potential", "missing [potential] section")
    if "constant" in section:
        value = section["constant"]
        if not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("potential.constant", "need a positive number")
        pot = constant_potential(shift, float(value))
    else:
        memory = section.get("memory")
        weights = section.get("log_weights")
        if not isinstance(memory, int) or memory < 1:
            raise ConfigError("potential.memory", "need a positive integer")
        if not isinstance(weights, dict):
            raise ConfigError("potential.log_weights",
                              "need a table of 'c1,c2,..' -> log weight")
        table = {}
        for key, value in weights.items():
            try:
                word = tuple(int(c) for c in key.split(","))
            except ValueError:
                raise ConfigError("potential.log_weights",
                                  f"bad block key {key!r}") from None
            if len(word) != memory:
                raise ConfigError("potential.log_weights",
                                  f"block {key!r} does not have length {memory}")
            table[word] = float(value)
        pot = Potential(memory, table)
    try:
        validate_potential(shift, pot)
    except (KestenLabError, ValueError) as e:
        raise ConfigError("potential", str(e)) from None
    if cfg.get("potential", {}).get("normalize", False):
        pot = normalize(shift, pot)
    return pot


def build_group(section: dict, field: str = "group") -> Group:
    if not isinstance(section, dict):
        raise ConfigError(field, f"missing [{field}] section")
    kind = section.get("type")
    try:
        if kind == "finite":
            return FiniteGroup(section["table"])
        if kind == "cyclic":
            return cyclic_group(int(section["n"]))
        if kind == "zd":
            return ZdGroup(int(section["d"]))
        if kind == "free":
            return FreeGroup(int(section["rank"]))
        if kind == "lamplighter":
            return LamplighterGroup()
        if kind == "quotient":
            target = build_group(section["target"], field + ".target")
            domain = FreeGroup(int(section["rank"]))
            images = [parse_element(target, lit, field + ".images")
                      for lit in section["images"]]
            return QuotientGroup(Homomorphism(domain, images))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(field, str(e)) from None
    raise ConfigError(f"{field}.type",
                      f"unknown group type {kind!r}; expected finite|cyclic|zd|"
                      "free|lamplighter|quotient")


def parse_element(group: Group, literal, field: str) -> GroupElement:
    try:
        if isinstance(group, QuotientGroup):
            return group.hom.apply(tuple(int(x) for x in literal))
        if isinstance(group, FiniteGroup):
            return group.element(int(literal))
        if isinstance(group, (ZdGroup, FreeGroup)):
            return group.element(tuple(int(x) for x in literal))
        if isinstance(group, LamplighterGroup):
            if isinstance(literal, dict):
                return group.element((tuple(literal["lamps"]), literal["pos"]))
            lamps, pos = literal
            return group.element((tuple(lamps), pos))
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(field, f"bad element literal {literal!r}: {e}") from None
    raise ConfigError(field, f"no element syntax for group {group.name}")


def build_cocycle(cfg: dict, shift: Shift, group: Group) -> Cocycle:
    section = cfg.get("cocycle")
    if not isinstance(section, dict) or "images" not in section:
        raise ConfigError("cocycle", "missing [cocycle] section with images")
    images = section["images"]
    if len(images) != shift.alphabet_size:
        raise ConfigError("cocycle.images",
                          f"need {shift.alphabet_size} images, got {len(images)}")
    return Cocycle(tuple(parse_element(group, lit, "cocycle.images")
                         for lit in images))


def build_involution(cfg: dict, shift: Shift):
    section = cfg.get("involution")
    if section is None:
        return None
    dagger = section.get("dagger")
    if not isinstance(dagger, list):
        raise ConfigError("involution.dagger", "need a letter permutation list")
    try:
        return validate_involution(shift, dagger)
    except KestenLabError as e:
        raise ConfigError("involution.dagger", str(e)) from None


def build_extension(cfg: dict) -> ExtensionSystem:
    shift = build_shift(cfg)
    pot = build_potential(cfg, shift)
    group = build_group(cfg.get("group"))
    cocycle = build_cocycle(cfg, shift, group)
    involution = build_involution(cfg, shift)
    try:
        return ExtensionSystem(shift, pot, cocycle, involution=involution)
    except (KestenLabError, ValueError) as e:
        raise ConfigError("cocycle", str(e)) from None


def param(cfg: dict, name: str, default, override=None):
    if override is not None:
        return override
    return cfg.get("params", {}).get(name, default)


# ---------------------------------------------------------------------------
# task runners: each returns (results dict, {csv filename: (header, rows)})


def run_pressure(cfg: dict, opts) -> tuple[dict, dict]:
    shift = build_shift(cfg)
    pot = build_potential(cfg, shift)
    anchor = param(cfg, "anchor_letter", 0)
    n_lo = param(cfg, "n_min", 8)
    n_hi = param(cfg, "n_max", 16, opts.n_max)
    est = pressure_estimate(shift, pot, anchor, range(n_lo, n_hi + 1))
    results = {
        "pressure_eigenvalue": est.eigenvalue_estimate,
        "pressure_orbit_slope": est.orbit_slope,
        "discrepancy": est.discrepancy,
        "anchor_letter": anchor,
        "n_range": [n_lo, n_hi],
    }
    rows = [(str(n), fmt(v)) for n, v in est.samples]
    return results, {"pressure_series.csv":
                     (("n", "normalized_log_partition"), rows)}


def run_extension_pressure(cfg: dict, opts) -> tuple[dict, dict]:
    ext = build_extension(cfg)
    if cfg.get("potential", {}).get("normalize") is False:
        raise ConfigError("potential.normalize",
                          "return-weight series needs a normalized potential")
    ext = ExtensionSystem(ext.shift, normalize(ext.shift, ext.potential),
                          ext.cocycle, involution=ext.involution)
    n_max = param(cfg, "n_max", 40, opts.n_max)
    ball_radius = param(cfg, "ball_radius", 12, opts.ball_radius)
    window = param(cfg, "window", [max(2, n_max // 2), n_max])
    threshold = param(cfg, "threshold", 0.02)
    loss_budget = param(cfg, "loss_budget", 0.5)
    radial = param(cfg, "radial", None)
    series = return_weight_series(ext, n_max, ball_radius=ball_radius,
                                  radial=radial)
    verdict = amenability_verdict(series, tuple(window), threshold=threshold,
                                  loss_budget=loss_budget)
    results = {
        "verdict": verdict.verdict,
        "rate": verdict.rate,
        "window": list(verdict.window),
        "threshold": threshold,
        "max_escaped_mass": verdict.max_loss,
        "radial": series.radial,
        "ball_radius": series.ball_radius,
        "fits": None if verdict.fits is None else {
            "exp_rate": verdict.fits.exp_rate,
            "exp_residual": verdict.fits.exp_residual,
            "poly_rate": verdict.fits.poly_rate,
            "poly_residual": verdict.fits.poly_residual,
            "joint_rate": verdict.fits.joint_rate,
            "joint_poly_rate": verdict.fits.joint_poly_rate,
        },
    }
    rows = [(str(n), fmt(y), fmt(series.truncation_loss.get(n, 0.0)))
            for n, y in series.samples]
    return results, {"return_weights.csv":
                     (("n", "log_return_weight", "escaped_mass"), rows)}


def run_kesten(cfg: dict, opts) -> tuple[dict, dict]:
    ext = build_extension(cfg)
    ext = ExtensionSystem(ext.shift, normalize(ext.shift, ext.potential),
                          ext.cocycle, involution=ext.involution)
    anchor = tuple(param(cfg, "anchor", []))
    n = param(cfg, "n", max(4, len(anchor) + 2), opts.n_max)
    k_max = param(cfg, "k_max", 20)
    ball_radius = param(cfg, "ball_radius", 12, opts.ball_radius)
    sa_radius = param(cfg, "self_adjoint_radius", 3)
    walk = build_kesten_walk(ext, anchor, n)
    residual = self_adjoint_check(walk, sa_radius)
    est = spectral_radius_estimate(walk, k_max, ball_radius=ball_radius)
    results = {
        "anchor": list(anchor),
        "xi_word": list(walk.xi_word),
        "walk_length": n,
        "walk_total": walk.total,
        "support_size": len(walk.weights),
        "self_adjoint_residual": residual,
        "spectral_radius_lower_bound": est.lower_bound,
        "rayleigh_quotient": est.rayleigh,
        "escaped_mass": est.escaped_mass,
        "radial": est.radial,
    }
    rows = [(str(k), fmt(r)) for k, r in est.rho_sequence]
    return results, {"spectral_radius.csv": (("k", "rho_hat"), rows)}


def run_cogrowth(cfg: dict, opts) -> tuple[dict, dict]:
    section = cfg.get("cogrowth")
    if not isinstance(section, dict):
        raise ConfigError("cogrowth", "missing [cogrowth] section")
    rank = section.get("rank")
    if not isinstance(rank, int) or rank < 1:
        raise ConfigError("cogrowth.rank", "need a positive integer")
    target = build_group(section.get("target"), "cogrowth.target")
    images = [parse_element(target, lit, "cogrowth.images")
              for lit in section.get("images", [])]
    if len(images) != rank:
        raise ConfigError("cogrowth.images", f"need {rank} images")
    hom = Homomorphism(FreeGroup(rank), images)
    n_max = param(cfg, "n_max", 12, opts.n_max)
    series = cogrowth_series(rank, hom, n_max)
    last_n, last_c = series[-1]
    exponent = math.log(last_c) / last_n if last_c > 0 else None
    results = {
        "rank": rank,
        "n_max": n_max,
        "counts": {str(n): c for n, c in series},
        "final_exponent": exponent,
        "amenable_target_bound": math.log(2 * rank - 1),
    }
    rows = [(str(n), str(c)) for n, c in series]
    return results, {"cogrowth.csv": (("n", "count"), rows)}


def run_folner(cfg: dict, opts) -> tuple[dict, dict]:
    group = build_group(cfg.get("group"))
    section = cfg.get("folner", {})
    epsilon = section.get("epsilon", param(cfg, "epsilon", 0.5))
    budget = section.get("budget", param(cfg, "budget", 20000))
    if "constraint" in section:
        constraint = [parse_element(group, lit, "folner.constraint")
                      for lit in section["constraint"]]
    else:
        constraint = group.generators()
    closed = {g.key: g for g in constraint}
    for g in list(closed.values()):
        gi = group.inverse(g)
        closed[gi.key] = gi
    trace: list = []
    result = folner_search(group, sorted(closed.values()), epsilon,
                           budget=budget, trace=trace)
    results = {
        "found": result.found,
        "epsilon": epsilon,
        "budget": budget,
        "best_defect": result.best_defect,
        "best_strategy": result.best_strategy,
    }
    if result.found:
        cert = result.certificate
        results.update({
            "defect": cert.defect,
            "strategy": cert.strategy,
            "set_size": len(cert.elements),
        })
        if len(cert.elements) <= 200:
            results["elements"] = [group.describe(g.key)
                                   for g in cert.elements]
    rows = [(name, str(size), fmt(d)) for name, size, d in trace]
    return results, {"folner.csv": (("strategy", "size", "defect"), rows)}


def run_verify_symmetry(cfg: dict, opts) -> tuple[dict, dict]:
    shift = build_shift(cfg)
    pot = build_potential(cfg, shift)
    involution = build_involution(cfg, shift)
    if involution is None:
        raise ConfigError("involution", "verify-symmetry needs an involution")
    # own knob: the defect sup is an exhaustive enumeration over words, so
    # the global n_max (meant for series lengths) must not leak into it
    n_max = param(cfg, "defect_n_max", 6)
    if n_max > 14:
        raise ConfigError("params.defect_n_max",
                          "exhaustive defect check capped at 14")
    log_d = symmetry_defects(shift, pot, involution, n_max=n_max)
    results = {
        "involution": list(involution.dagger),
        "log_symmetry_defects": {str(n): v for n, v in log_d.items()},
        "weakly_symmetric_trend": log_d[n_max] / n_max,
    }
    checks = {"involution_valid": True,
              "defects_finite": all(math.isfinite(v) for v in log_d.values())}
    if "cocycle" in cfg and "group" in cfg:
        ext = build_extension(cfg)
        ext = ExtensionSystem(ext.shift, normalize(ext.shift, ext.potential),
                              ext.cocycle, involution=ext.involution)
        checks["cocycle_symmetric"] = True   # enforced by ExtensionSystem
        walk = build_kesten_walk(ext, tuple(param(cfg, "anchor", [])),
                                 param(cfg, "n", 4))
        nm = walk.normalized()
        checks["walk_symmetric_exact"] = all(
            nm.get(g.inverse()) == w for g, w in nm.items())
        results["self_adjoint_residual"] = self_adjoint_check(
            walk, param(cfg, "self_adjoint_radius", 3))
        checks["self_adjoint"] = results["self_adjoint_residual"] <= 1e-15
    results["checks"] = checks
    results["all_passed"] = all(checks.values())
    rows = [(str(n), fmt(v)) for n, v in sorted(log_d.items())]
    return results, {"symmetry_defects.csv": (("n", "log_defect"), rows)}


def run_report(cfg: dict, opts) -> tuple[dict, dict]:
    tasks = cfg.get("report", {}).get("tasks")
    if tasks is None:
        tasks = []
        if "shift" in cfg and "potential" in cfg:
            tasks.append("pressure")
            if "group" in cfg and "cocycle" in cfg:
                tasks.append("extension-pressure")
                if "involution" in cfg:
                    tasks.extend(["kesten", "verify-symmetry"])
        if "group" in cfg:
            tasks.append("folner")
        if "cogrowth" in cfg:
            tasks.append("cogrowth")
    results: dict = {"tasks": list(tasks)}
    csvs: dict = {}
    for task in tasks:
        if task == "report" or task not in TASKS:
            raise ConfigError("report.tasks", f"unknown task {task!r}")
        sub_results, sub_csvs = RUNNERS[task](cfg, opts)
        results[task] = sub_results
        csvs.update(sub_csvs)
    return results, csvs


RUNNERS = {
    "pressure": run_pressure,
    "extension-pressure": run_extension_pressure,
    "kesten": run_kesten,
    "cogrowth": run_cogrowth,
    "folner": run_folner,
    "verify-symmetry": run_verify_symmetry,
    "report": run_report,
}


# ---------------------------------------------------------------------------
# artifact writing


def write_outputs(out_dir: str, task: str, cfg: dict, results: dict,
                  csvs: dict) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "task": task,
        "version": __version__,
        "config": cfg,
        "results": results,
    }
    with open(out / "results.json", "w", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    for name, (header, rows) in csvs.items():
        with open(out / name, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)


# ---------------------------------------------------------------------------
# entry point


def _env_int(name: str):
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(name, f"environment override must be an integer, got {raw!r}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kestenlab",
        description="pressure, group-extension return weights, and "
                    "amenability diagnostics for topological Markov chains")
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task)
        p.add_argument("--config", required=True, help="TOML experiment config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--n-max", type=int, default=None, dest="n_max")
        p.add_argument("--ball-radius", type=int, default=None,
                       dest="ball_radius")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="accepted for interface stability; all "
                            "computations run single-threaded for determinism")
    return parser


def run(task: str, config_path: str, out_dir: str, opts) -> int:
    cfg = load_config(config_path)
    results, csvs = RUNNERS[task](cfg, opts)
    write_outputs(out_dir, task, cfg, results, csvs)
    return 0


def main(argv=None) -> int:
    opts = make_parser().parse_args(argv)
    if opts.n_max is None:
        opts.n_max = _env_int("KESTENLAB_N_MAX")
    if opts.ball_radius is None:
        opts.ball_radius = _env_int("KESTENLAB_BALL_RADIUS")
    out_dir = opts.out or os.environ.get("KESTENLAB_OUT") or "."
    try:
        return run(opts.task, opts.config, out_dir, opts)
    except BUDGET_ERRORS as e:
        print(f"kestenlab: budget exhausted: {e}", file=sys.stderr)
        return 3
    except (KestenLabError, ValueError) as e:
        print(f"kestenlab: invalid configuration: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
