"""Sampling oracle for every closed form: empirical coverage, ergodic rate,
cascaded-channel moments, and empirical-CDF distances.

Trials are partitioned into fixed chunks of 4096, each driven by an
independent substream seeded with (base seed XOR chunk index).  Chunk
results are reduced in chunk order, so serial and threaded runs produce
bit-identical outputs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import GammaApprox, snr_threshold
from .channel import (LinkStats, RandomStream, ScenarioConfig, link_stats,
                      los_pair, sample_channel_block)
from .errors import ConfigError, DomainError
from .phase import PhaseDesign, PhaseProfile, long_term_profile, wrap_phase

CHUNK_TRIALS = 4096


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo point estimate with its standard error."""

    value: float
    std_error: float
    trials: int
    seed: int


def _chunk_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK_TRIALS)
    return [CHUNK_TRIALS] * full + ([rest] if rest else [])


def _batch_snr(h_sd, h_sr, h_rd, thetas, nu):
    # nu |h_sd + sum_m conj(h_sr)_m e^{j theta_m} h_rd_m|^2, vectorized over
    # the leading trial axis; thetas may be (M,) shared or (n, M) per trial.
    total = h_sd + np.sum(np.conj(h_sr) * np.exp(1j * thetas) * h_rd, axis=-1)
    return nu * np.abs(total) ** 2


def _snr_chunk(cfg: ScenarioConfig, stats: LinkStats, design: PhaseDesign,
               shared_thetas, seed: int, n: int) -> np.ndarray:
    # Draw order per chunk: the channel block first, then (random design
    # only) n*M profile phases.
    stream = RandomStream(seed)
    h_sd, h_sr, h_rd = sample_channel_block(cfg, stats, stream, n)
    if design is PhaseDesign.SHORT_TERM:
        ref = np.where(h_sd == 0, 0.0, np.angle(h_sd))
        thetas = wrap_phase(ref[:, None] - np.angle(np.conj(h_sr)) - np.angle(h_rd))
    elif design is PhaseDesign.RANDOM:
        thetas = stream.angles(n * cfg.m_elements).reshape(n, cfg.m_elements)
    else:
        thetas = shared_thetas
    return _batch_snr(h_sd, h_sr, h_rd, thetas, stats.nu)


def _run_chunks(worker, trials: int, seed: int, threads: int) -> list:
    sizes = _chunk_sizes(trials)
    seeds = [seed ^ i for i in range(len(sizes))]
    if threads <= 1:
        return [worker(s, n) for s, n in zip(seeds, sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, s, n) for s, n in zip(seeds, sizes)]
        return [f.result() for f in futures]


def _shared_profile_thetas(cfg: ScenarioConfig, stats: LinkStats,
                           design: PhaseDesign) -> np.ndarray | None:
    if design is PhaseDesign.EQUAL:
        return np.zeros(cfg.m_elements)
    if design is PhaseDesign.LONG_TERM:
        # Depends only on the LoS geometry, so it is computed once per
        # scenario and reused across every coherence interval.
        return long_term_profile(*los_pair(cfg, stats)).thetas
    return None


def sample_snr(cfg: ScenarioConfig, design: PhaseDesign, trials: int, seed: int,
               threads: int = 1) -> np.ndarray:
    """Instantaneous SNR samples for one phase design, in trial order."""
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    stats = link_stats(cfg)
    shared = _shared_profile_thetas(cfg, stats, design)

    def worker(chunk_seed, n):
        return _snr_chunk(cfg, stats, design, shared, chunk_seed, n)

    return np.concatenate(_run_chunks(worker, trials, seed, threads))


def _mean_estimate(values: np.ndarray, seed: int) -> McEstimate:
    n = values.size
    std = float(values.std(ddof=1)) if n > 1 else 0.0
    return McEstimate(value=float(values.mean()), std_error=std / math.sqrt(n),
                      trials=n, seed=seed)


def estimate_coverage(cfg: ScenarioConfig, design: PhaseDesign, target_rate: float,
                      trials: int, seed: int, threads: int = 1) -> McEstimate:
    """Empirical P(log2(1 + gamma) >= xi); SNR exactly at the threshold counts
    as covered."""
    if trials < 1000:
        raise DomainError(f"coverage estimation needs >= 1000 trials, got {trials}")
    tau = snr_threshold(target_rate)
    snr = sample_snr(cfg, design, trials, seed, threads)
    return _mean_estimate((snr >= tau).astype(float), seed)


def estimate_ergodic_rate(cfg: ScenarioConfig, design: PhaseDesign, trials: int,
                          seed: int, threads: int = 1) -> McEstimate:
    """Empirical E[log2(1 + gamma)] in b/s/Hz."""
    if trials < 1000:
        raise DomainError(f"rate estimation needs >= 1000 trials, got {trials}")
    snr = sample_snr(cfg, design, trials, seed, threads)
    return _mean_estimate(np.log2(1.0 + snr), seed)


def estimate_cascaded_moments(cfg: ScenarioConfig, profile: PhaseProfile,
                              trials: int, seed: int, threads: int = 1
                              ) -> tuple[McEstimate, McEstimate]:
    """Sample second and fourth moments of |h_sr^H Phi h_rd| for a fixed profile."""
    if trials < 10000:
        raise DomainError(f"moment estimation needs >= 10000 trials, got {trials}")
    if profile.thetas.size != cfg.m_elements:
        raise ConfigError("profile length does not match the scenario")
    stats = link_stats(cfg)

    def worker(chunk_seed, n):
        stream = RandomStream(chunk_seed)
        _, h_sr, h_rd = sample_channel_block(cfg, stats, stream, n)
        gain = np.abs(np.sum(np.conj(h_sr) * np.exp(1j * profile.thetas) * h_rd,
                             axis=-1))
        sq = gain * gain
        return sq, sq * sq

    chunks = _run_chunks(worker, trials, seed, threads)
    second = np.concatenate([c[0] for c in chunks])
    fourth = np.concatenate([c[1] for c in chunks])
    return _mean_estimate(second, seed), _mean_estimate(fourth, seed)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step CDF of a sample."""

    sorted_samples: np.ndarray

    def __call__(self, x) -> np.ndarray:
        idx = np.searchsorted(self.sorted_samples, np.asarray(x, dtype=float),
                              side="right")
        return idx / self.sorted_samples.size


def empirical_cdf(samples: np.ndarray) -> EmpiricalCdf:
    """Empirical CDF of at least 10^4 samples."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 10000:
        raise DomainError(f"empirical CDF needs >= 10^4 samples, got {samples.size}")
    return EmpiricalCdf(np.sort(samples))


def sup_distance(cdf: EmpiricalCdf, approx: GammaApprox) -> float:
    """Kolmogorov-Smirnov sup distance between the empirical CDF and the
    matched Gamma CDF."""
    xs = cdf.sorted_samples
    n = xs.size
    model = np.array([approx.cdf(float(x)) for x in xs])
    upper = np.abs(np.arange(1, n + 1) / n - model)
    lower = np.abs(np.arange(0, n) / n - model)
    return float(np.maximum(upper, lower).max())


def dump_samples(samples: np.ndarray, path) -> None:
    """Write raw samples as text, one float per line (external plotting hook)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in np.asarray(samples, dtype=float):
            fh.write(f"{v:.17g}\n")
