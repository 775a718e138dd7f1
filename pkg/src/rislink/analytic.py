"""Closed-form performance of the link: cascaded-channel moments, Gamma
moment matching of the SNR for the long-term and short-term designs,
coverage probability, ergodic rate, and the large-panel asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun
from .channel import LinkStats
from .errors import DegenerateLosError, DomainError, MatchingFailureError
from .phase import PhaseDesign


@dataclass(frozen=True)
class CascadedMoments:
    """Second and fourth moments of |h_sr^H Phi h_rd| for a fixed profile.

    delta = |alpha_bar|^2 + M mu kappa_tilde is the second moment; the
    fourth moment is delta^2 + a_tilde.
    """

    second: float
    fourth: float
    alpha_bar_sq: float
    delta: float
    a_tilde: float


def cascaded_moments(stats: LinkStats, m: int, alpha_bar_sq: float) -> CascadedMoments:
    """Moments of the cascaded link given |alpha_bar|^2 of the applied profile."""
    if alpha_bar_sq < 0.0:
        raise DomainError(f"|alpha_bar|^2 must be non-negative, got {alpha_bar_sq}")
    mu, kt, kh = stats.mu, stats.kappa_tilde, stats.kappa_hat
    delta = alpha_bar_sq + m * mu * kt
    a_tilde = (2.0 * m * alpha_bar_sq * mu * kt
               + m * m * mu * mu * kt * kt
               + 2.0 * m * mu * mu * kh
               + 8.0 * alpha_bar_sq * mu)
    return CascadedMoments(second=delta, fourth=delta * delta + a_tilde,
                           alpha_bar_sq=alpha_bar_sq, delta=delta, a_tilde=a_tilde)


def optimal_long_term_alpha_sq(stats: LinkStats, m: int) -> float:
    """|alpha_bar|^2 under the optimal long-term profile: mu M^2 k_sr k_rd.

    Cauchy-Schwarz equality with unit-modulus steering phases; any other
    fixed profile can pass its own |alpha_bar|^2 to the matching functions.
    """
    return stats.mu * float(m) * float(m) * stats.kappa_sr * stats.kappa_rd


@dataclass(frozen=True)
class LongTermTerms:
    """o1 = E-side and o2 = Var-side channel aggregates of the matched profile."""

    o1: float
    o2: float


@dataclass(frozen=True)
class ShortTermTerms:
    """Amplitude-stage matching quantities of the double-matching method."""

    c1: float
    c2: float
    c3: float
    c4: float
    k_c: float
    w_c: float
    t_sr: float
    t_rd: float


@dataclass(frozen=True)
class GammaApprox:
    """Gamma(shape, scale) fit of the received SNR for one phase design."""

    shape: float
    scale: float
    design: PhaseDesign
    terms: LongTermTerms | ShortTermTerms

    def __post_init__(self):
        if not (self.shape > 0.0 and self.scale > 0.0):
            raise DomainError(
                f"Gamma parameters must be positive, got shape={self.shape}, "
                f"scale={self.scale}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale * self.scale

    def cdf(self, x: float) -> float:
        """Gamma CDF at x."""
        if x <= 0.0:
            return 0.0
        return 1.0 - specfun.gamma_upper_regularized(self.shape, x / self.scale)


def gamma_approx_fixed_profile(stats: LinkStats, m: int, alpha_bar_sq: float,
                               design: PhaseDesign = PhaseDesign.EQUAL) -> GammaApprox:
    """Gamma fit of the SNR under any fixed profile with known |alpha_bar|^2.

    Matches E{gamma} = nu (beta_sd + delta) and
    Var{gamma} = nu^2 (beta_sd^2 + a_tilde + 2 beta_sd delta).
    """
    mom = cascaded_moments(stats, m, alpha_bar_sq)
    o1, o2 = mom.delta, mom.a_tilde
    bsd = stats.beta_sd
    mean_over_nu = bsd + o1
    var_over_nu2 = bsd * bsd + o2 + 2.0 * bsd * o1
    shape = mean_over_nu * mean_over_nu / var_over_nu2
    scale = stats.nu * var_over_nu2 / mean_over_nu
    return GammaApprox(shape=shape, scale=scale, design=design,
                       terms=LongTermTerms(o1=o1, o2=o2))


def gamma_approx_long_term(stats: LinkStats, m: int) -> GammaApprox:
    """Gamma fit of the SNR under the optimal long-term profile."""
    if m > 0 and stats.kappa_sr * stats.kappa_rd <= 0.0:
        raise DegenerateLosError(
            "long-term design undefined: kappa_sr * kappa_rd = 0")
    approx = gamma_approx_fixed_profile(
        stats, m, optimal_long_term_alpha_sq(stats, m), PhaseDesign.LONG_TERM)
    return approx


def gamma_approx_short_term(stats: LinkStats, m: int) -> GammaApprox:
    """Gamma fit of the SNR under the per-realization optimal profile.

    Double matching: the amplitude sum C = |h_sd| + sum_m |h_sr,m||h_rd,m|
    is first fitted by Gamma(k_c, w_c) through its mean and variance built
    from the Rice-envelope moments (via t = 1F1(-1/2; 1; -kappa)); the SNR
    nu C^2 is then refitted through the induced moments
    E{gamma} = nu w_c^2 k_c (k_c + 1) and
    Var{gamma} = 2 nu^2 w_c^4 k_c (k_c + 1)(2 k_c + 3).
    """
    t_sr = specfun.hyp1f1(-0.5, 1.0, -stats.kappa_sr)
    t_rd = specfun.hyp1f1(-0.5, 1.0, -stats.kappa_rd)
    mf = float(m)
    c1 = 0.5 * math.sqrt(math.pi * stats.beta_sd)
    c2 = (math.pi / 4.0) * mf * math.sqrt(stats.mu) * t_sr * t_rd
    c3 = (4.0 - math.pi) / 4.0 * stats.beta_sd
    c4 = mf * stats.mu * ((1.0 + stats.kappa_sr) * (1.0 + stats.kappa_rd)
                          - (math.pi ** 2 / 16.0) * t_sr ** 2 * t_rd ** 2)
    if c3 + c4 <= 0.0:
        raise MatchingFailureError(
            "amplitude matching failed: c3 + c4 <= 0",
            inputs={"c1": c1, "c2": c2, "c3": c3, "c4": c4,
                    "kappa_sr": stats.kappa_sr, "kappa_rd": stats.kappa_rd,
                    "m": m})
    k_c = (c1 + c2) ** 2 / (c3 + c4)
    w_c = (c3 + c4) / (c1 + c2)
    shape = k_c * (k_c + 1.0) / (2.0 * (2.0 * k_c + 3.0))
    scale = 2.0 * stats.nu * w_c * w_c * (2.0 * k_c + 3.0)
    return GammaApprox(shape=shape, scale=scale, design=PhaseDesign.SHORT_TERM,
                       terms=ShortTermTerms(c1=c1, c2=c2, c3=c3, c4=c4,
                                            k_c=k_c, w_c=w_c,
                                            t_sr=t_sr, t_rd=t_rd))


def snr_threshold(target_rate: float) -> float:
    """SNR threshold tau = 2^xi - 1 equivalent to a rate target xi [b/s/Hz]."""
    if target_rate < 0.0:
        raise DomainError(f"target rate must be non-negative, got {target_rate}")
    return 2.0 ** target_rate - 1.0


def coverage_probability(approx: GammaApprox, target_rate: float) -> float:
    """P(log2(1 + gamma) >= xi) under the matched Gamma law.

    Equals Q(shape, tau / scale), the regularized upper incomplete gamma
    at the dimensionless SNR threshold tau = 2^xi - 1.
    """
    tau = snr_threshold(target_rate)
    if tau == 0.0:
        return 1.0
    return specfun.gamma_upper_regularized(approx.shape, tau / approx.scale)


def ergodic_rate(approx: GammaApprox, order: int = 96) -> float:
    """E[log2(1 + gamma)] in b/s/Hz under the matched Gamma law."""
    return specfun.log_expectation_gamma(approx.shape, approx.scale, order=order)


def asymptotic_coverage(approx: GammaApprox, target_rate: float) -> float:
    """Large-panel expansion 1 - (tau/scale)^shape / (shape^2 G(shape)).

    Valid once the matched shape exceeds 1 (it grows with the number of
    RIS elements); evaluated in the log domain and clamped to [0, 1].
    """
    if approx.shape < 1.0:
        raise DomainError(
            f"asymptotic expansion needs shape >= 1, got {approx.shape}")
    tau = snr_threshold(target_rate)
    if tau == 0.0:
        return 1.0
    log_term = (approx.shape * math.log(tau / approx.scale)
                - 2.0 * math.log(approx.shape)
                - specfun.ln_gamma(approx.shape))
    if log_term > 709.0:
        return 0.0
    return min(1.0, max(0.0, 1.0 - math.exp(log_term)))
