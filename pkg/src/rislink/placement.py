"""RIS placement: analytic coverage gradient w.r.t. the RIS coordinates and
the projected gradient-ascent loop with box constraints.

The gradient treats the Rician factors as locally independent of the RIS
position (they vary far more slowly than the path gains); the optimizer
refreshes them from the new distances after every accepted step.  The whole
position dependence enters through t = beta_sr * beta_rd, so each design
needs only d(shape)/dt and d(scale)/dt on top of the geometric dt/d(coord).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import specfun
from .analytic import (GammaApprox, coverage_probability,
                       gamma_approx_long_term, gamma_approx_short_term,
                       snr_threshold)
from .channel import (LinkStats, PathLossLaw, Position3, ScenarioConfig,
                      link_stats, make_link_stats, path_loss_linear,
                      rician_factor)
from .errors import ConfigError, DomainError, GeometryError
from .phase import PhaseDesign


@dataclass(frozen=True)
class PlacementBox:
    """Axis-aligned feasible region for the RIS position."""

    min: Position3
    max: Position3

    def __post_init__(self):
        if (self.min.x > self.max.x or self.min.y > self.max.y
                or self.min.z > self.max.z):
            raise ConfigError("box min must not exceed box max componentwise")

    def contains(self, pos: Position3, slack: float = 1e-9) -> bool:
        return (self.min.x - slack <= pos.x <= self.max.x + slack
                and self.min.y - slack <= pos.y <= self.max.y + slack
                and self.min.z - slack <= pos.z <= self.max.z + slack)

    def clamp(self, pos: Position3) -> Position3:
        return Position3(
            min(max(pos.x, self.min.x), self.max.x),
            min(max(pos.y, self.min.y), self.max.y),
            min(max(pos.z, self.min.z), self.max.z))


@dataclass(frozen=True)
class PlacementConfig:
    """Inputs of the gradient-ascent placement loop."""

    box: PlacementBox
    initial: Position3
    step_size: float
    epsilon: float
    max_iters: int
    design: PhaseDesign
    target_rate: float
    backtracking: bool = False

    def __post_init__(self):
        if not self.box.contains(self.initial):
            raise ConfigError("initial RIS position lies outside the box")
        if self.step_size < 0.0:
            raise ConfigError("step size must be non-negative")
        if not self.epsilon > 0.0:
            raise ConfigError("epsilon must be positive")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if self.design not in (PhaseDesign.LONG_TERM, PhaseDesign.SHORT_TERM):
            raise ConfigError("placement supports the long-term and short-term designs")


class StopReason(Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    ABORTED = "aborted"  # non-finite gradient; trace holds the iterates so far


@dataclass(frozen=True)
class PlacementIterate:
    position: Position3
    coverage: float
    gradient: np.ndarray


@dataclass(frozen=True)
class PlacementTrace:
    iterates: list[PlacementIterate]
    stop_reason: StopReason
    final: Position3

    @property
    def initial_coverage(self) -> float:
        return self.iterates[0].coverage

    @property
    def final_coverage(self) -> float:
        return self.iterates[-1].coverage


def _frozen_stats(cfg: ScenarioConfig, pos: Position3,
                  kappas: tuple[float, float] | None = None) -> LinkStats:
    # Link constants at an RIS position; Rician factors may be pinned to
    # values measured elsewhere (the frozen-kappa gradient convention).
    d_sd = cfg.source.distance_to(cfg.destination)
    d_sr = pos.distance_to(cfg.source)
    d_rd = pos.distance_to(cfg.destination)
    if d_sr <= 0.0 or d_rd <= 0.0:
        raise GeometryError(f"RIS position {pos} coincides with an endpoint")
    if kappas is None:
        kappas = (rician_factor(cfg.rician_intercept, cfg.rician_slope, d_sr),
                  rician_factor(cfg.rician_intercept, cfg.rician_slope, d_rd))
    return make_link_stats(
        beta_sd=path_loss_linear(cfg.direct_law, d_sd),
        beta_sr=path_loss_linear(cfg.indirect_law_sr, d_sr),
        beta_rd=path_loss_linear(cfg.indirect_law_rd, d_rd),
        kappa_sr=kappas[0], kappa_rd=kappas[1],
        nu=10.0 ** ((cfg.tx_power_dbm - cfg.noise_power_dbm) / 10.0),
        d_sd=d_sd, d_sr=d_sr, d_rd=d_rd)


def _approx_for(stats: LinkStats, m: int, design: PhaseDesign) -> GammaApprox:
    if design is PhaseDesign.LONG_TERM:
        return gamma_approx_long_term(stats, m)
    if design is PhaseDesign.SHORT_TERM:
        return gamma_approx_short_term(stats, m)
    raise ConfigError(f"no closed-form coverage for design {design}")


def coverage_at(cfg: ScenarioConfig, pos: Position3, design: PhaseDesign,
                target_rate: float,
                kappas: tuple[float, float] | None = None) -> float:
    """Closed-form coverage with the RIS at ``pos`` (kappas optionally pinned)."""
    stats = _frozen_stats(cfg, pos, kappas)
    return coverage_probability(_approx_for(stats, cfg.m_elements, design),
                                target_rate)


def _beta_and_gradient(law: PathLossLaw, pos: Position3, anchor: Position3
                       ) -> tuple[float, np.ndarray]:
    # beta = K0 (d^2)^(-eta/2) and its gradient w.r.t. the RIS coordinates.
    diff = pos.as_array() - anchor.as_array()
    d_sq = float(np.dot(diff, diff))
    if d_sq <= 0.0:
        raise GeometryError(f"RIS position {pos} coincides with an endpoint")
    k0 = 10.0 ** (law.k0_db / 10.0)
    beta = k0 * d_sq ** (-law.exponent / 2.0)
    grad = -law.exponent * k0 * diff * d_sq ** (-law.exponent / 2.0 - 1.0)
    return beta, grad


def _long_term_kw_dt(stats: LinkStats, m: int, t: float
                     ) -> tuple[float, float, float, float]:
    # Shape/scale of the long-term Gamma fit and their derivatives w.r.t.
    # t = beta_sr * beta_rd, at fixed Rician factors.  The fit is
    # k = Nu^2 / De, w = nu * De / Nu with Nu = beta_sd + o1_tilde t and
    # De = beta_sd^2 + o2_tilde t^2 + 2 beta_sd o1_tilde t.
    mf = float(m)
    ksr, krd = stats.kappa_sr, stats.kappa_rd
    denom = (1.0 + ksr) * (1.0 + krd)
    kt, kh = stats.kappa_tilde, stats.kappa_hat
    o1_t = (mf * mf * ksr * krd + kt * mf) / denom
    o2_t = (mf * mf * ksr * krd * (2.0 * mf * kt + 8.0)
            + mf * mf * kt * kt + 2.0 * mf * kh) / (denom * denom)
    bsd = stats.beta_sd
    nu_part = bsd + o1_t * t
    de_part = bsd * bsd + o2_t * t * t + 2.0 * bsd * o1_t * t
    d_nu = o1_t
    d_de = 2.0 * o2_t * t + 2.0 * bsd * o1_t
    k = nu_part * nu_part / de_part
    w = stats.nu * de_part / nu_part
    dk_dt = (2.0 * nu_part * d_nu * de_part - nu_part * nu_part * d_de) / (de_part * de_part)
    dw_dt = stats.nu * (d_de * nu_part - de_part * d_nu) / (nu_part * nu_part)
    return k, w, dk_dt, dw_dt


def _short_term_kw_dt(stats: LinkStats, m: int, t: float
                      ) -> tuple[float, float, float, float]:
    # Same quantities for the double-matching fit.  c2 = c2_tilde sqrt(t)
    # and c4 = c4_tilde t carry the whole t dependence; the chain runs
    # (k_c, w_c) -> (l1, l2) -> (k, w).
    t_sr = specfun.hyp1f1(-0.5, 1.0, -stats.kappa_sr)
    t_rd = specfun.hyp1f1(-0.5, 1.0, -stats.kappa_rd)
    mf = float(m)
    denom = (1.0 + stats.kappa_sr) * (1.0 + stats.kappa_rd)
    c1 = 0.5 * math.sqrt(math.pi * stats.beta_sd)
    c3 = (4.0 - math.pi) / 4.0 * stats.beta_sd
    c2_t = (math.pi / 4.0) * mf * t_sr * t_rd / math.sqrt(denom)
    c4_t = mf * (denom - (math.pi ** 2 / 16.0) * t_sr ** 2 * t_rd ** 2) / denom
    sqrt_t = math.sqrt(t)
    a = c1 + c2_t * sqrt_t
    b = c3 + c4_t * t
    if b <= 0.0:
        raise DomainError("short-term matching failed inside the gradient (c3+c4<=0)")
    k_c = a * a / b
    w_c = b / a
    da_dt = 0.5 * c2_t / sqrt_t
    db_dt = c4_t
    dkc_dt = (2.0 * a * da_dt * b - a * a * db_dt) / (b * b)
    dwc_dt = (db_dt * a - b * da_dt) / (a * a)

    l1 = w_c * w_c * k_c * (1.0 + k_c)
    l2 = w_c ** 4 * k_c * (k_c + 1.0) * (2.0 * k_c + 3.0)
    dl1_dt = (2.0 * w_c * dwc_dt * k_c * (1.0 + k_c)
              + w_c * w_c * (1.0 + 2.0 * k_c) * dkc_dt)
    dl2_dt = (4.0 * w_c ** 3 * dwc_dt * k_c * (k_c + 1.0) * (2.0 * k_c + 3.0)
              + w_c ** 4 * (6.0 * k_c * k_c + 10.0 * k_c + 3.0) * dkc_dt)

    k = l1 * l1 / (2.0 * l2)
    w = 2.0 * stats.nu * l2 / l1
    dk_dt = (2.0 * l1 * dl1_dt * l2 - l1 * l1 * dl2_dt) / (2.0 * l2 * l2)
    dw_dt = 2.0 * stats.nu * (dl2_dt * l1 - l2 * dl1_dt) / (l1 * l1)
    return k, w, dk_dt, dw_dt


def _dq_dk(k: float, u: float) -> float:
    # d/dk of the regularized upper incomplete gamma, by central difference;
    # the 2F2 closed form of this derivative is not worth its complexity.
    h = 1e-6 * max(1.0, k)
    if k - h <= 0.0:
        h = 0.5 * k
    return (specfun.gamma_upper_regularized(k + h, u)
            - specfun.gamma_upper_regularized(k - h, u)) / (2.0 * h)


def coverage_gradient(cfg: ScenarioConfig, pos: Position3, design: PhaseDesign,
                      target_rate: float) -> np.ndarray:
    """Gradient of the closed-form coverage w.r.t. the RIS coordinates.

    Rician factors are evaluated at ``pos`` and held fixed.  Writing the
    coverage as Q(k, tau/w) with the matched shape k and scale w, the
    derivative along a coordinate is

        dP = -du * u^(k-1) e^(-u) / Gamma(k) + dk * dQ/dk,  u = tau / w,

    with du = -tau w^(-2) dw, and dk, dw from the design-specific chain
    through t = beta_sr * beta_rd.
    """
    stats = _frozen_stats(cfg, pos)
    beta_sr, dbeta_sr = _beta_and_gradient(cfg.indirect_law_sr, pos, cfg.source)
    beta_rd, dbeta_rd = _beta_and_gradient(cfg.indirect_law_rd, pos, cfg.destination)
    t = beta_sr * beta_rd
    dt = dbeta_sr * beta_rd + beta_sr * dbeta_rd

    if design is PhaseDesign.LONG_TERM:
        if cfg.m_elements > 0 and stats.kappa_sr * stats.kappa_rd <= 0.0:
            raise DomainError("long-term gradient undefined for kappa = 0")
        k, w, dk_dt, dw_dt = _long_term_kw_dt(stats, cfg.m_elements, t)
    elif design is PhaseDesign.SHORT_TERM:
        k, w, dk_dt, dw_dt = _short_term_kw_dt(stats, cfg.m_elements, t)
    else:
        raise ConfigError(f"no closed-form gradient for design {design}")

    tau = snr_threshold(target_rate)
    if tau == 0.0:
        return np.zeros(3)
    u = tau / w
    # Density ratio u^(k-1) e^(-u) / Gamma(k), kept in the log domain so the
    # gradient stays finite at the large shapes reached by big panels.
    log_density = (k - 1.0) * math.log(u) - u - specfun.ln_gamma(k)
    density = math.exp(log_density) if log_density > -745.0 else 0.0
    dq_dk = _dq_dk(k, u)

    grad = np.empty(3)
    for i in range(3):
        dw = dw_dt * dt[i]
        dk = dk_dt * dt[i]
        du = -tau * dw / (w * w)
        grad[i] = -du * density + dk * dq_dk
    return grad


def gradient_finite_difference(cfg: ScenarioConfig, pos: Position3,
                               design: PhaseDesign, target_rate: float,
                               h: float = 1e-4) -> np.ndarray:
    """Central-difference oracle for :func:`coverage_gradient`.

    Uses the same frozen-kappa convention: the Rician factors are measured
    at ``pos`` and reused at the shifted evaluation points.
    """
    if not (1e-6 <= h <= 1e-2):
        raise DomainError(f"finite-difference step must lie in [1e-6, 1e-2], got {h}")
    stats = _frozen_stats(cfg, pos)
    kappas = (stats.kappa_sr, stats.kappa_rd)
    base = pos.as_array()
    grad = np.empty(3)
    for i in range(3):
        hi = base.copy()
        lo = base.copy()
        hi[i] += h
        lo[i] -= h
        grad[i] = (coverage_at(cfg, Position3(*hi), design, target_rate, kappas)
                   - coverage_at(cfg, Position3(*lo), design, target_rate, kappas)
                   ) / (2.0 * h)
    return grad


def optimize_placement(cfg: ScenarioConfig, pcfg: PlacementConfig) -> PlacementTrace:
    """Projected gradient ascent on the closed-form coverage.

    Each iteration moves along the frozen-kappa gradient with the fixed
    step size, clamps to the box, refreshes the Rician factors from the new
    distances, and stops once the squared displacement of consecutive
    iterates drops to epsilon (or max_iters is hit).
    """
    pos = pcfg.initial
    design, xi = pcfg.design, pcfg.target_rate
    iterates = [PlacementIterate(pos, coverage_at(cfg, pos, design, xi),
                                 coverage_gradient(cfg, pos, design, xi))]
    for _ in range(pcfg.max_iters):
        grad = iterates[-1].gradient
        if not np.all(np.isfinite(grad)):
            return PlacementTrace(iterates, StopReason.ABORTED, pos)
        step = pcfg.step_size
        while True:
            moved = pcfg.box.clamp(Position3(*(pos.as_array() + step * grad)))
            cov = coverage_at(cfg, moved, design, xi)
            if (not pcfg.backtracking or cov >= iterates[-1].coverage
                    or step < 1e-12 * pcfg.step_size):
                break
            step *= 0.5  # optional safeguard; off in the plain algorithm
        displacement_sq = float(np.sum((moved.as_array() - pos.as_array()) ** 2))
        pos = moved
        iterates.append(PlacementIterate(pos, cov,
                                         coverage_gradient(cfg, pos, design, xi)))
        if displacement_sq <= pcfg.epsilon:
            return PlacementTrace(iterates, StopReason.CONVERGED, pos)
    return PlacementTrace(iterates, StopReason.MAX_ITERS, pos)


@dataclass(frozen=True)
class LandscapeGrid:
    """Coverage evaluated on a rectilinear grid of RIS positions."""

    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    coverage: np.ndarray  # shape (len(xs), len(ys), len(zs))

    def max_coverage(self) -> float:
        return float(self.coverage.max())

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                for k, z in enumerate(self.zs):
                    yield x, y, z, self.coverage[i, j, k]


def _axis_points(lo: float, hi: float, resolution: int) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    return np.linspace(lo, hi, resolution)


def coverage_landscape(cfg: ScenarioConfig, design: PhaseDesign,
                       target_rate: float, box: PlacementBox,
                       resolution: int = 2) -> LandscapeGrid:
    """Closed-form coverage at every node of a grid over ``box``.

    Rician factors are taken from each node's own distances.  Degenerate
    axes (min == max) collapse to a single grid line.
    """
    if resolution < 2:
        raise ConfigError(f"resolution must be >= 2 per axis, got {resolution}")
    xs = _axis_points(box.min.x, box.max.x, resolution)
    ys = _axis_points(box.min.y, box.max.y, resolution)
    zs = _axis_points(box.min.z, box.max.z, resolution)
    cov = np.empty((xs.size, ys.size, zs.size))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            for k, z in enumerate(zs):
                cov[i, j, k] = coverage_at(cfg, Position3(float(x), float(y), float(z)),
                                           design, target_rate)
    return LandscapeGrid(xs=xs, ys=ys, zs=zs, coverage=cov)


def write_landscape_csv(grid: LandscapeGrid, path) -> None:
    """CSV dump with header ``x,y,z,coverage``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,z,coverage\n")
        for x, y, z, c in grid.rows():
            fh.write(f"{x:.10g},{y:.10g},{z:.10g},{c:.10g}\n")


def write_trace_csv(trace: PlacementTrace, path) -> None:
    """CSV dump with header ``iter,x,y,z,coverage,grad_norm``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iter,x,y,z,coverage,grad_norm\n")
        for i, it in enumerate(trace.iterates):
            norm = float(np.linalg.norm(it.gradient))
            fh.write(f"{i},{it.position.x:.10g},{it.position.y:.10g},"
                     f"{it.position.z:.10g},{it.coverage:.10g},{norm:.10g}\n")
