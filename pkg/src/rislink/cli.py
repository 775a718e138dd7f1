"""Scenario-driven command line: run experiment specs, validate scenario files.

``rislink run <spec.json>`` executes one experiment described by a JSON spec
and writes CSV; ``rislink validate <scenario>`` echoes a parsed scenario with
its derived link statistics.  All outputs are UTF-8, LF line endings, '.'
decimal separator, and byte-identical for identical (spec, seed), whatever
``--threads`` says.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, montecarlo, placement
from .channel import (Position3, RandomStream, ScenarioConfig, link_stats,
                      load_scenario, los_pair, scenario_from_mapping)
from .errors import ConfigError, DegenerateLosError, DomainError
from .phase import PhaseDesign, long_term_profile, equal_profile

KINDS = ("CoverageVsRate", "RateCdf", "SweepM", "PlacementRun", "Landscape",
         "ValidateMoments")

_DESIGN_NAMES = {
    "long_term": PhaseDesign.LONG_TERM,
    "short_term": PhaseDesign.SHORT_TERM,
    "equal": PhaseDesign.EQUAL,
    "random": PhaseDesign.RANDOM,
}

# Seed offset for the destination-position sampler, so destination draws do
# not alias the Monte Carlo substreams of the same experiment.
_DEST_SEED_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a kind, a scenario, sweep parameters, and an output path."""

    kind: str
    scenario: ScenarioConfig
    output: str
    seed: int = 1
    trials: int = 100000
    threads: int = 1
    rate_grid: tuple[float, ...] = ()
    m_list: tuple[int, ...] = ()
    target_rate: float = 2.0
    dest_box: tuple[Position3, Position3] | None = None
    dest_samples: int = 256
    designs: tuple[str, ...] = ("short_term", "long_term", "equal", "random")
    # placement / landscape fields
    box: placement.PlacementBox | None = None
    initial: Position3 | None = None
    step_size: float = 0.9
    epsilon: float = 1e-10
    max_iters: int = 2000
    grid_spacing: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind '{self.kind}' "
                              f"(expected one of {KINDS})")
        if self.kind == "CoverageVsRate" and not self.rate_grid:
            raise ConfigError("CoverageVsRate needs a non-empty rate_grid")
        if self.kind in ("SweepM", "ValidateMoments") and not self.m_list:
            raise ConfigError(f"{self.kind} needs a non-empty m_list")
        if self.kind in ("CoverageVsRate", "RateCdf", "SweepM", "ValidateMoments"):
            if self.trials < 1000:
                raise ConfigError("Monte Carlo experiments need trials >= 1000")
        if self.kind in ("RateCdf", "SweepM") and self.dest_box is None:
            raise ConfigError(f"{self.kind} needs a dest_box")
        if self.dest_box is not None and self.dest_samples < 1:
            raise ConfigError("dest_samples must be positive")
        if self.kind in ("PlacementRun", "Landscape") and self.box is None:
            raise ConfigError(f"{self.kind} needs a box")
        for name in self.designs:
            if name not in _DESIGN_NAMES:
                raise ConfigError(f"unknown design '{name}'")


def _position_from(value, key: str) -> Position3:
    if isinstance(value, dict):
        try:
            return Position3(float(value["x"]), float(value["y"]), float(value["z"]))
        except KeyError as exc:
            raise ConfigError(f"'{key}' needs x, y, z") from exc
    if isinstance(value, (list, tuple)) and len(value) == 3:
        return Position3(*(float(v) for v in value))
    raise ConfigError(f"'{key}' must be a 3-vector, got {value!r}")


def _box_from(value, key: str) -> placement.PlacementBox:
    if not isinstance(value, dict) or "min" not in value or "max" not in value:
        raise ConfigError(f"'{key}' must be an object with min and max 3-vectors")
    return placement.PlacementBox(_position_from(value["min"], f"{key}.min"),
                                  _position_from(value["max"], f"{key}.max"))


def _resolve_scenario_path(name: str, spec_path: str) -> str:
    # absolute path, then relative to the spec file, then the packaged
    # figure scenarios (fig1.cfg .. fig7.cfg)
    if os.path.isabs(name):
        return name
    relative = os.path.join(os.path.dirname(os.path.abspath(spec_path)), name)
    if os.path.exists(relative):
        return relative
    packaged = importlib.resources.files("rislink") / "scenarios" / name
    if packaged.is_file():
        return str(packaged)
    return relative  # let the loader report the missing file


def load_experiment(path: str) -> ExperimentSpec:
    """Parse an experiment spec JSON file (scenario inline or by path)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if "kind" not in data:
        raise ConfigError(f"{path}: missing experiment key 'kind'")
    if "scenario" not in data:
        raise ConfigError(f"{path}: missing experiment key 'scenario'")
    scenario = data["scenario"]
    if isinstance(scenario, str):
        cfg = load_scenario(_resolve_scenario_path(scenario, path))
    else:
        cfg = scenario_from_mapping(scenario)
    kwargs = {
        "kind": data["kind"],
        "scenario": cfg,
        "output": data.get("output", f"{data['kind'].lower()}.csv"),
    }
    for key in ("seed", "trials", "threads", "dest_samples", "max_iters"):
        if key in data:
            kwargs[key] = int(data[key])
    for key in ("target_rate", "step_size", "epsilon", "grid_spacing"):
        if key in data:
            kwargs[key] = float(data[key])
    if "rate_grid" in data:
        kwargs["rate_grid"] = tuple(float(v) for v in data["rate_grid"])
    if "m_list" in data:
        kwargs["m_list"] = tuple(int(v) for v in data["m_list"])
    if "designs" in data:
        kwargs["designs"] = tuple(str(v) for v in data["designs"])
    if "dest_box" in data:
        box = _box_from(data["dest_box"], "dest_box")
        kwargs["dest_box"] = (box.min, box.max)
    if "box" in data:
        kwargs["box"] = _box_from(data["box"], "box")
    if "initial" in data:
        kwargs["initial"] = _position_from(data["initial"], "initial")
    return ExperimentSpec(**kwargs)


def _closed_form_approx(cfg: ScenarioConfig, design: PhaseDesign):
    """Matched Gamma law for a design, or None when no closed form applies."""
    stats = link_stats(cfg)
    if design is PhaseDesign.LONG_TERM:
        return analytic.gamma_approx_long_term(stats, cfg.m_elements)
    if design is PhaseDesign.SHORT_TERM:
        return analytic.gamma_approx_short_term(stats, cfg.m_elements)
    if design is PhaseDesign.EQUAL:
        if cfg.m_elements == 0:
            alpha_sq = 0.0
        else:
            h_sr, h_rd = los_pair(cfg, stats)
            alpha_sq = float(np.abs(np.sum(np.conj(h_sr) * h_rd)) ** 2)
        return analytic.gamma_approx_fixed_profile(stats, cfg.m_elements, alpha_sq)
    return None  # per-trial random profiles have no fixed-profile Gamma fit


def _stratified_destinations(spec: ExperimentSpec) -> list[Position3]:
    """Latin-hypercube destination sample of the dest_box, seeded."""
    lo, hi = spec.dest_box
    n = spec.dest_samples
    stream = RandomStream(spec.seed ^ _DEST_SEED_SALT)
    coords = []
    for a, b in ((lo.x, hi.x), (lo.y, hi.y), (lo.z, hi.z)):
        if b <= a:
            coords.append(np.full(n, a))
            continue
        # one stratified draw per cell, in a seeded random cell order
        jitter = stream.uniforms(n)
        perm = np.argsort(stream.uniforms(n), kind="stable")
        coords.append(a + (b - a) * (perm + jitter) / n)
    return [Position3(float(x), float(y), float(z))
            for x, y, z in zip(*coords)]


def _fmt(value: float) -> str:
    if value != value:  # NaN: no closed form for this design
        return "nan"
    return f"{value:.10g}"


def _run_coverage_vs_rate(spec: ExperimentSpec, out_path: str) -> None:
    cfg = spec.scenario
    lines = ["xi,design,closed_form,mc,mc_stderr"]
    for xi in spec.rate_grid:
        for name in spec.designs:
            design = _DESIGN_NAMES[name]
            approx = _closed_form_approx(cfg, design)
            cf = (analytic.coverage_probability(approx, xi)
                  if approx is not None else math.nan)
            est = montecarlo.estimate_coverage(cfg, design, xi, spec.trials,
                                               spec.seed, spec.threads)
            lines.append(f"{_fmt(xi)},{name},{_fmt(cf)},{_fmt(est.value)},"
                         f"{_fmt(est.std_error)}")
    _write_lines(out_path, lines)


def _run_rate_cdf(spec: ExperimentSpec, out_path: str) -> None:
    rows = {name: [] for name in spec.designs}
    rows["none"] = []  # baseline link without the RIS
    for dest in _stratified_destinations(spec):
        cfg = replace(spec.scenario, destination=dest)
        stats = link_stats(cfg)
        no_ris = analytic.GammaApprox(shape=1.0, scale=stats.nu * stats.beta_sd,
                                      design=PhaseDesign.EQUAL,
                                      terms=analytic.LongTermTerms(0.0, 0.0))
        rows["none"].append((dest, analytic.ergodic_rate(no_ris)))
        for name in spec.designs:
            design = _DESIGN_NAMES[name]
            approx = _closed_form_approx(cfg, design)
            if approx is not None:
                rate = analytic.ergodic_rate(approx)
            else:
                rate = montecarlo.estimate_ergodic_rate(
                    cfg, design, spec.trials, spec.seed, spec.threads).value
            rows[name].append((dest, rate))
    lines = ["design,x_d,y_d,z_d,rate"]
    for name, entries in rows.items():
        for dest, rate in sorted(entries, key=lambda e: e[1]):
            lines.append(f"{name},{_fmt(dest.x)},{_fmt(dest.y)},{_fmt(dest.z)},"
                         f"{_fmt(rate)}")
    _write_lines(out_path, lines)


def _run_sweep_m(spec: ExperimentSpec, out_path: str) -> None:
    dests = _stratified_destinations(spec)
    lines = ["m,design,coverage,ergodic_rate"]
    for m in spec.m_list:
        base = replace(spec.scenario, m_elements=m, n_h=None)
        for name in spec.designs:
            design = _DESIGN_NAMES[name]
            covs, rates = [], []
            for dest in dests:
                cfg = replace(base, destination=dest)
                approx = _closed_form_approx(cfg, design)
                if approx is not None:
                    covs.append(analytic.coverage_probability(approx, spec.target_rate))
                    rates.append(analytic.ergodic_rate(approx))
                else:
                    covs.append(montecarlo.estimate_coverage(
                        cfg, design, spec.target_rate, spec.trials, spec.seed,
                        spec.threads).value)
                    rates.append(montecarlo.estimate_ergodic_rate(
                        cfg, design, spec.trials, spec.seed, spec.threads).value)
            lines.append(f"{m},{name},{_fmt(float(np.mean(covs)))},"
                         f"{_fmt(float(np.mean(rates)))}")
    _write_lines(out_path, lines)


def _run_placement(spec: ExperimentSpec, out_path: str) -> None:
    initial = spec.initial if spec.initial is not None else spec.scenario.ris
    design = _DESIGN_NAMES[spec.designs[0]]
    pcfg = placement.PlacementConfig(
        box=spec.box, initial=initial, step_size=spec.step_size,
        epsilon=spec.epsilon, max_iters=spec.max_iters, design=design,
        target_rate=spec.target_rate)
    trace = placement.optimize_placement(spec.scenario, pcfg)
    placement.write_trace_csv(trace, out_path)


def _run_landscape(spec: ExperimentSpec, out_path: str) -> None:
    design = _DESIGN_NAMES[spec.designs[0]]
    box = spec.box

    def resolution(lo, hi):
        return max(2, int(round((hi - lo) / spec.grid_spacing)) + 1)

    res = max(resolution(box.min.x, box.max.x), resolution(box.min.y, box.max.y),
              resolution(box.min.z, box.max.z))
    if spec.dest_box is None:
        grid = placement.coverage_landscape(spec.scenario, design,
                                            spec.target_rate, box, res)
    else:
        dests = _stratified_destinations(spec)
        total = None
        for dest in dests:
            cfg = replace(spec.scenario, destination=dest)
            g = placement.coverage_landscape(cfg, design, spec.target_rate, box, res)
            total = g.coverage if total is None else total + g.coverage
        grid = placement.LandscapeGrid(xs=g.xs, ys=g.ys, zs=g.zs,
                                       coverage=total / len(dests))
    placement.write_landscape_csv(grid, out_path)


def _run_validate_moments(spec: ExperimentSpec, out_path: str) -> None:
    lines = ["m,profile,second_cf,second_mc,second_se,fourth_cf,fourth_mc,fourth_se"]
    for m in spec.m_list:
        cfg = replace(spec.scenario, m_elements=m, n_h=None)
        stats = link_stats(cfg)
        h_sr, h_rd = los_pair(cfg, stats)
        profiles = {
            "equal": (equal_profile(m),
                      float(np.abs(np.sum(np.conj(h_sr) * h_rd)) ** 2)),
            "long_term": (long_term_profile(h_sr, h_rd),
                          analytic.optimal_long_term_alpha_sq(stats, m)),
        }
        for name, (profile, alpha_sq) in profiles.items():
            mom = analytic.cascaded_moments(stats, m, alpha_sq)
            second, fourth = montecarlo.estimate_cascaded_moments(
                cfg, profile, spec.trials, spec.seed, spec.threads)
            lines.append(
                f"{m},{name},{_fmt(mom.second)},{_fmt(second.value)},"
                f"{_fmt(second.std_error)},{_fmt(mom.fourth)},"
                f"{_fmt(fourth.value)},{_fmt(fourth.std_error)}")
    _write_lines(out_path, lines)


_RUNNERS = {
    "CoverageVsRate": _run_coverage_vs_rate,
    "RateCdf": _run_rate_cdf,
    "SweepM": _run_sweep_m,
    "PlacementRun": _run_placement,
    "Landscape": _run_landscape,
    "ValidateMoments": _run_validate_moments,
}


def run(spec: ExperimentSpec, out_dir: str = ".") -> str:
    """Execute one experiment; returns the written CSV path."""
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, spec.output)
    _RUNNERS[spec.kind](spec, out_path)
    return out_path


def validate(path: str, out=None) -> None:
    """Parse a scenario file and echo the configuration and derived stats."""
    if out is None:
        out = sys.stdout
    cfg = load_scenario(path)
    stats = link_stats(cfg)

    def db(x):
        return 10.0 * math.log10(x)

    out.write(f"scenario {path}\n")
    out.write(f"  source            = ({cfg.source.x:g}, {cfg.source.y:g}, {cfg.source.z:g}) m\n")
    out.write(f"  destination       = ({cfg.destination.x:g}, {cfg.destination.y:g}, {cfg.destination.z:g}) m\n")
    out.write(f"  ris               = ({cfg.ris.x:g}, {cfg.ris.y:g}, {cfg.ris.z:g}) m\n")
    out.write(f"  m_elements        = {cfg.m_elements} (n_h = {cfg.n_h})\n")
    out.write(f"  wavelength        = {cfg.wavelength:.6g} m "
              f"(spacing {cfg.spacing_wavelengths:g} wavelengths)\n")
    out.write(f"  tx_power_dbm      = {cfg.tx_power_dbm:g} dBm\n")
    out.write(f"  noise_power_dbm   = {cfg.noise_power_dbm:g} dBm\n")
    out.write(f"  direct_law        = {cfg.direct_law.k0_db:g} dB @1m, exponent {cfg.direct_law.exponent:g}\n")
    out.write(f"  indirect_law_sr   = {cfg.indirect_law_sr.k0_db:g} dB @1m, exponent {cfg.indirect_law_sr.exponent:g}\n")
    out.write(f"  indirect_law_rd   = {cfg.indirect_law_rd.k0_db:g} dB @1m, exponent {cfg.indirect_law_rd.exponent:g}\n")
    out.write(f"  rician law        = 10^({cfg.rician_intercept:g} - {cfg.rician_slope:g} d)\n")
    out.write("derived\n")
    out.write(f"  d_sd = {stats.d_sd:.4f} m, d_sr = {stats.d_sr:.4f} m, d_rd = {stats.d_rd:.4f} m\n")
    out.write(f"  beta_sd = {db(stats.beta_sd):.2f} dB ({stats.beta_sd:.6g})\n")
    out.write(f"  beta_sr = {db(stats.beta_sr):.2f} dB ({stats.beta_sr:.6g})\n")
    out.write(f"  beta_rd = {db(stats.beta_rd):.2f} dB ({stats.beta_rd:.6g})\n")
    out.write(f"  kappa_sr = {stats.kappa_sr:.4f}, kappa_rd = {stats.kappa_rd:.4f}\n")
    out.write(f"  nu = {stats.nu:.6g} ({db(stats.nu):.2f} dB)\n")


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rislink",
        description="RIS-assisted link analysis: run experiment specs, "
                    "validate scenario files.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment spec (JSON)")
    p_run.add_argument("spec", help="experiment spec file")
    p_run.add_argument("--seed", type=int, default=None, help="override RNG seed")
    p_run.add_argument("--trials", type=int, default=None,
                       help="override Monte Carlo trials")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--threads", type=int, default=None,
                       help="worker threads for Monte Carlo chunks")
    p_val = sub.add_parser("validate", help="parse and echo a scenario file")
    p_val.add_argument("scenario", help="scenario file (key=value or JSON)")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            validate(args.scenario)
            return 0
        spec = load_experiment(args.spec)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            spec = replace(spec, **overrides)
        out_path = run(spec, args.out)
        print(f"wrote {out_path}")
        return 0
    except (ConfigError, DomainError, DegenerateLosError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
