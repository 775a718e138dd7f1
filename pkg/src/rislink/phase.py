"""RIS phase-shift profiles and the instantaneous SNR they produce.

Four designs: the long-term (statistical) profile built from the LoS
components only, the short-term profile rebuilt per fading realization, and
the equal / random benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelRealization, RandomStream
from .errors import ConfigError, DegenerateLosError


class PhaseDesign(Enum):
    LONG_TERM = "long_term"
    SHORT_TERM = "short_term"
    EQUAL = "equal"
    RANDOM = "random"


def wrap_phase(theta):
    """Wrap angles to [-pi, pi), with -pi kept at the boundary."""
    return (np.asarray(theta, dtype=float) + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class PhaseProfile:
    """M per-element phase shifts plus the design that produced them."""

    thetas: np.ndarray
    design: PhaseDesign

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=float)
        object.__setattr__(self, "thetas", thetas)
        if thetas.ndim != 1:
            raise ConfigError("phase profile must be a 1-d angle vector")
        if thetas.size and (thetas.min() < -math.pi or thetas.max() >= math.pi):
            raise ConfigError("phase shifts must lie in [-pi, pi)")
        thetas.flags.writeable = False


def long_term_profile(los_sr: np.ndarray, los_rd: np.ndarray) -> PhaseProfile:
    """Statistical-CSI profile theta_m = -arg(conj(los_sr)_m) - arg(los_rd_m).

    Maximizes the average received SNR; defined only when both LoS vectors
    have non-vanishing entries (i.e. both Rician factors are positive).
    """
    los_sr = np.asarray(los_sr)
    los_rd = np.asarray(los_rd)
    if los_sr.shape != los_rd.shape:
        raise ConfigError("LoS vectors must have equal length")
    if los_sr.size and (np.any(los_sr == 0) or np.any(los_rd == 0)):
        raise DegenerateLosError(
            "long-term profile undefined: a LoS component vanishes (kappa = 0)")
    thetas = wrap_phase(-np.angle(np.conj(los_sr)) - np.angle(los_rd))
    return PhaseProfile(thetas, PhaseDesign.LONG_TERM)


def short_term_profile(h_sd: complex, h_sr: np.ndarray,
                       h_rd: np.ndarray) -> PhaseProfile:
    """Instantaneous-CSI profile aligning every cascaded path with h_sd.

    theta_m = arg(h_sd) - arg(conj(h_sr)_m) - arg(h_rd_m); arg(0) is taken
    as 0, which only matters on the measure-zero event h_sd = 0.
    """
    h_sr = np.asarray(h_sr)
    h_rd = np.asarray(h_rd)
    if h_sr.shape != h_rd.shape:
        raise ConfigError("channel vectors must have equal length")
    ref = np.angle(h_sd) if h_sd != 0 else 0.0
    thetas = wrap_phase(ref - np.angle(np.conj(h_sr)) - np.angle(h_rd))
    return PhaseProfile(thetas, PhaseDesign.SHORT_TERM)


def equal_profile(m: int) -> PhaseProfile:
    """All-zero phase shifts."""
    if m < 0:
        raise ConfigError(f"m must be non-negative, got {m}")
    return PhaseProfile(np.zeros(m), PhaseDesign.EQUAL)


def random_profile(m: int, stream: RandomStream) -> PhaseProfile:
    """I.i.d. phases uniform on [-pi, pi) from the stream."""
    if m < 0:
        raise ConfigError(f"m must be non-negative, got {m}")
    return PhaseProfile(stream.angles(m), PhaseDesign.RANDOM)


def cascade_gain(h_sr: np.ndarray, h_rd: np.ndarray, thetas: np.ndarray):
    """Cascaded channel h_sr^H diag(e^{j theta}) h_rd.

    Accepts (M,) vectors or (n, M) batches; broadcasting pairs a single
    profile with a batch of realizations.
    """
    return np.sum(np.conj(h_sr) * np.exp(1j * np.asarray(thetas)) * h_rd, axis=-1)


def instantaneous_snr(real: ChannelRealization, prof: PhaseProfile,
                      nu: float) -> float:
    """Received SNR nu * |h_sd + h_sr^H diag(e^{j theta}) h_rd|^2."""
    if prof.thetas.shape != real.h_sr.shape:
        raise ConfigError(
            f"profile length {prof.thetas.size} does not match M={real.h_sr.size}")
    total = real.h_sd + cascade_gain(real.h_sr, real.h_rd, prof.thetas)
    return float(nu) * float(np.abs(total)) ** 2
