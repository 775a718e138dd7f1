"""Scenario geometry, large-scale propagation, LoS steering, channel sampling.

The link is a single-antenna source, a planar RIS with M passive elements
(N_H per row), and a single-antenna destination.  The direct channel is
Rayleigh; both RIS-side channels are Rician with distance-dependent K
factors.  Power quantities are linear unless a field name says dB/dBm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DomainError, GeometryError


@dataclass(frozen=True)
class Position3:
    """Cartesian position in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ConfigError(f"position coordinates must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance_to(self, other: "Position3") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class PathLossLaw:
    """Log-distance path loss: gain_dB(d) = k0_db - 10 * exponent * log10(d/1m)."""

    k0_db: float
    exponent: float

    def __post_init__(self):
        if not (1.0 < self.exponent <= 8.0):
            raise ConfigError(f"path-loss exponent must lie in (1, 8], got {self.exponent}")


def path_loss_linear(law: PathLossLaw, distance: float) -> float:
    """Linear power gain of ``law`` at ``distance`` meters."""
    if not distance > 0.0:
        raise DomainError(f"path loss needs distance > 0, got {distance}")
    return 10.0 ** ((law.k0_db - 10.0 * law.exponent * math.log10(distance)) / 10.0)


def rician_factor(intercept: float, slope: float, distance: float) -> float:
    """Distance-dependent Rician K factor 10^(intercept - slope * d)."""
    if not distance > 0.0:
        raise DomainError(f"rician_factor needs distance > 0, got {distance}")
    return 10.0 ** (intercept - slope * distance)


def default_panel_columns(m: int) -> int:
    """Largest divisor of m not exceeding sqrt(m); the default N_H."""
    if m <= 0:
        return 1
    best = 1
    for n in range(1, int(math.isqrt(m)) + 1):
        if m % n == 0:
            best = n
    return best


def boresight_angles(ris: Position3, node: Position3) -> tuple[float, float]:
    """Azimuth/elevation (radians) of the RIS-to-node direction vector."""
    dx, dy, dz = node.x - ris.x, node.y - ris.y, node.z - ris.z
    azimuth = math.atan2(dy, dx)
    elevation = math.atan2(dz, math.hypot(dx, dy))
    return azimuth, elevation


# Speed of light / 1.8 GHz carrier; the default operating wavelength.
DEFAULT_WAVELENGTH = 299792458.0 / 1.8e9


@dataclass(frozen=True)
class ScenarioConfig:
    """Full radio and geometry description of one RIS-assisted link.

    ``angles_sr`` / ``angles_rd`` are the (azimuth, elevation) pairs of the
    LoS steering vectors; when omitted they are derived from the RIS-to-node
    direction with :func:`boresight_angles`.  ``spacing_wavelengths`` is the
    inter-element pitch of the RIS panel in wavelengths (half-wavelength by
    default).
    """

    source: Position3
    destination: Position3
    ris: Position3
    m_elements: int
    tx_power_dbm: float
    noise_power_dbm: float
    direct_law: PathLossLaw
    indirect_law_sr: PathLossLaw
    indirect_law_rd: PathLossLaw
    n_h: int | None = None
    wavelength: float = DEFAULT_WAVELENGTH
    rician_intercept: float = 1.3
    rician_slope: float = 0.003
    angles_sr: tuple[float, float] | None = None
    angles_rd: tuple[float, float] | None = None
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.m_elements < 0:
            raise ConfigError(f"m_elements must be non-negative, got {self.m_elements}")
        if self.n_h is None:
            object.__setattr__(self, "n_h", default_panel_columns(self.m_elements))
        if self.n_h < 1:
            raise ConfigError(f"n_h must be positive, got {self.n_h}")
        if self.m_elements % self.n_h != 0:
            raise ConfigError(
                f"m_elements={self.m_elements} is not divisible by n_h={self.n_h}")
        if not self.wavelength > 0.0:
            raise ConfigError(f"wavelength must be positive, got {self.wavelength}")
        if not self.spacing_wavelengths > 0.0:
            raise ConfigError("spacing_wavelengths must be positive")
        if not self.tx_power_dbm > self.noise_power_dbm:
            raise ConfigError(
                f"tx_power_dbm={self.tx_power_dbm} must exceed "
                f"noise_power_dbm={self.noise_power_dbm}")
        if self.ris.distance_to(self.source) <= 0.0:
            raise GeometryError("RIS coincides with the source")
        if self.ris.distance_to(self.destination) <= 0.0:
            raise GeometryError("RIS coincides with the destination")

    def with_ris(self, ris: Position3) -> "ScenarioConfig":
        """Copy of the scenario with the RIS moved (angles re-derived unless pinned)."""
        return replace(self, ris=ris)

    def sr_angles(self) -> tuple[float, float]:
        if self.angles_sr is not None:
            return self.angles_sr
        return boresight_angles(self.ris, self.source)

    def rd_angles(self) -> tuple[float, float]:
        if self.angles_rd is not None:
            return self.angles_rd
        return boresight_angles(self.ris, self.destination)


@dataclass(frozen=True)
class LinkStats:
    """Large-scale constants of one scenario.

    mu = beta_sr * beta_rd / ((kappa_sr + 1) * (kappa_rd + 1)),
    kappa_tilde = kappa_sr + kappa_rd + 1,
    kappa_hat = 1 + 2 kappa_sr + 2 kappa_rd,
    nu = transmit SNR p / sigma^2 (linear).
    """

    beta_sd: float
    beta_sr: float
    beta_rd: float
    kappa_sr: float
    kappa_rd: float
    mu: float
    kappa_tilde: float
    kappa_hat: float
    nu: float
    d_sd: float = math.nan
    d_sr: float = math.nan
    d_rd: float = math.nan


def make_link_stats(beta_sd: float, beta_sr: float, beta_rd: float,
                    kappa_sr: float, kappa_rd: float, nu: float,
                    d_sd: float = math.nan, d_sr: float = math.nan,
                    d_rd: float = math.nan) -> LinkStats:
    """Assemble a LinkStats with the derived constants filled consistently."""
    if min(beta_sd, beta_sr, beta_rd) <= 0.0 or nu <= 0.0:
        raise DomainError("link gains and transmit SNR must be positive")
    if min(kappa_sr, kappa_rd) < 0.0:
        raise DomainError("Rician factors must be non-negative")
    mu = beta_sr * beta_rd / ((kappa_sr + 1.0) * (kappa_rd + 1.0))
    return LinkStats(
        beta_sd=beta_sd, beta_sr=beta_sr, beta_rd=beta_rd,
        kappa_sr=kappa_sr, kappa_rd=kappa_rd, mu=mu,
        kappa_tilde=kappa_sr + kappa_rd + 1.0,
        kappa_hat=1.0 + 2.0 * kappa_sr + 2.0 * kappa_rd,
        nu=nu, d_sd=d_sd, d_sr=d_sr, d_rd=d_rd)


def link_stats(cfg: ScenarioConfig) -> LinkStats:
    """Distances, linear gains, Rician factors and transmit SNR for a scenario."""
    d_sd = cfg.source.distance_to(cfg.destination)
    d_sr = cfg.ris.distance_to(cfg.source)
    d_rd = cfg.ris.distance_to(cfg.destination)
    if d_sr <= 0.0 or d_rd <= 0.0:
        raise GeometryError("zero-length RIS link distance")
    if d_sd <= 0.0:
        raise GeometryError("source and destination coincide")
    return make_link_stats(
        beta_sd=path_loss_linear(cfg.direct_law, d_sd),
        beta_sr=path_loss_linear(cfg.indirect_law_sr, d_sr),
        beta_rd=path_loss_linear(cfg.indirect_law_rd, d_rd),
        kappa_sr=rician_factor(cfg.rician_intercept, cfg.rician_slope, d_sr),
        kappa_rd=rician_factor(cfg.rician_intercept, cfg.rician_slope, d_rd),
        nu=10.0 ** ((cfg.tx_power_dbm - cfg.noise_power_dbm) / 10.0),
        d_sd=d_sd, d_sr=d_sr, d_rd=d_rd)


def los_vector(azimuth: float, elevation: float, m: int, n_h: int,
               wavelength: float, kappa: float, beta: float,
               spacing_wavelengths: float = 0.5) -> np.ndarray:
    """Deterministic LoS steering vector of an N_H-column planar RIS.

    Entry m' is sqrt(kappa*beta/(kappa+1)) * exp(j k(psi,phi)^T u_m') with
    wave vector k(psi,phi) = (2 pi / lambda) [cos(psi)cos(phi),
    sin(psi)cos(phi), sin(psi)]^T and element offset
    u_m' = spacing * lambda * [0, mod(m'-1, N_H), floor((m'-1)/N_H)]^T.
    """
    if m < 0:
        raise ConfigError(f"m must be non-negative, got {m}")
    if m % max(n_h, 1) != 0:
        raise ConfigError(f"m={m} is not divisible by n_h={n_h}")
    if kappa < 0.0 or beta <= 0.0:
        raise DomainError("kappa must be >= 0 and beta > 0")
    idx = np.arange(m, dtype=float)
    u_y = np.mod(idx, n_h)
    u_z = np.floor(idx / n_h)
    k_y = math.sin(azimuth) * math.cos(elevation)
    k_z = math.sin(azimuth)
    phases = 2.0 * math.pi * spacing_wavelengths * (k_y * u_y + k_z * u_z)
    amplitude = math.sqrt(kappa * beta / (kappa + 1.0))
    return amplitude * np.exp(1j * phases)


def los_pair(cfg: ScenarioConfig, stats: LinkStats) -> tuple[np.ndarray, np.ndarray]:
    """LoS steering vectors (h_bar_sr, h_bar_rd) of the scenario."""
    psi_sr, phi_sr = cfg.sr_angles()
    psi_rd, phi_rd = cfg.rd_angles()
    h_sr = los_vector(psi_sr, phi_sr, cfg.m_elements, cfg.n_h, cfg.wavelength,
                      stats.kappa_sr, stats.beta_sr, cfg.spacing_wavelengths)
    h_rd = los_vector(psi_rd, phi_rd, cfg.m_elements, cfg.n_h, cfg.wavelength,
                      stats.kappa_rd, stats.beta_rd, cfg.spacing_wavelengths)
    return h_sr, h_rd


class RandomStream:
    """Deterministic uniform-double stream with documented derived transforms.

    Backed by PCG64.  Complex standard normals use the polar Box-Muller form
    g = sqrt(-ln(1 - u1)) * exp(2j pi u2) consuming exactly one uniform pair
    per draw, in the order the pairs leave the stream; this transform is part
    of the reproducibility contract.  Substream i of a base stream is an
    independent stream seeded with (seed XOR i).
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def substream(self, index: int) -> "RandomStream":
        return RandomStream(self.seed ^ (int(index) & 0xFFFFFFFFFFFFFFFF))

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        return self._gen.random(int(n))

    def complex_normals(self, n: int) -> np.ndarray:
        """n i.i.d. CN(0, 1) draws from n consecutive uniform pairs."""
        u = self.uniforms(2 * n).reshape(int(n), 2)
        radius = np.sqrt(-np.log1p(-u[:, 0]))
        return radius * np.exp(2j * math.pi * u[:, 1])

    def angles(self, n: int) -> np.ndarray:
        """n i.i.d. phases uniform on [-pi, pi)."""
        return -math.pi + 2.0 * math.pi * self.uniforms(n)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: scalar direct channel plus the two RIS-side vectors."""

    h_sd: complex
    h_sr: np.ndarray
    h_rd: np.ndarray
    seed_tag: int

    def __post_init__(self):
        if self.h_sr.shape != self.h_rd.shape or self.h_sr.ndim != 1:
            raise ConfigError("RIS-side vectors must be 1-d with equal length")
        if not (np.all(np.isfinite(self.h_sr)) and np.all(np.isfinite(self.h_rd))
                and np.isfinite(self.h_sd)):
            raise ConfigError("channel entries must be finite")


def sample_channel_block(cfg: ScenarioConfig, stats: LinkStats,
                         stream: RandomStream, n: int
                         ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """n channel draws as arrays (h_sd[n], h_sr[n, M], h_rd[n, M]).

    Per trial, 1 + 2M complex normals are consumed in the fixed order h_sd,
    then the M entries of h_sr, then the M entries of h_rd; trials consume
    the stream back to back, so a block of n trials equals n single draws.
    """
    m = cfg.m_elements
    g = stream.complex_normals(n * (1 + 2 * m)).reshape(n, 1 + 2 * m)
    h_sd = math.sqrt(stats.beta_sd) * g[:, 0]
    los_sr, los_rd = los_pair(cfg, stats)
    sigma_sr = math.sqrt(stats.beta_sr / (stats.kappa_sr + 1.0))
    sigma_rd = math.sqrt(stats.beta_rd / (stats.kappa_rd + 1.0))
    h_sr = los_sr[None, :] + sigma_sr * g[:, 1:1 + m]
    h_rd = los_rd[None, :] + sigma_rd * g[:, 1 + m:]
    return h_sd, h_sr, h_rd


def sample_channels(cfg: ScenarioConfig, stats: LinkStats,
                    stream: RandomStream) -> ChannelRealization:
    """One fading realization of the scenario from the stream."""
    h_sd, h_sr, h_rd = sample_channel_block(cfg, stats, stream, 1)
    return ChannelRealization(h_sd=complex(h_sd[0]), h_sr=h_sr[0], h_rd=h_rd[0],
                              seed_tag=stream.seed)


# ---------------------------------------------------------------------------
# Scenario files: flat key = value text (with # comments) or JSON
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = ("source", "destination", "ris", "m_elements",
                  "tx_power_dbm", "noise_power_dbm",
                  "direct_law", "indirect_law_sr", "indirect_law_rd")

_OPTIONAL_KEYS = ("n_h", "wavelength", "rician_intercept", "rician_slope",
                  "angles_sr", "angles_rd", "spacing_wavelengths")


def _parse_numbers(key: str, value, count: int) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = value.replace(",", " ").split()
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = [value]
    if len(parts) != count:
        raise ConfigError(f"key '{key}' expects {count} numbers, got {value!r}")
    try:
        return tuple(float(p) for p in parts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key '{key}' has a non-numeric entry: {value!r}") from exc


def _law_from(key: str, value) -> PathLossLaw:
    if isinstance(value, dict):
        try:
            return PathLossLaw(float(value["k0_db"]), float(value["exponent"]))
        except KeyError as exc:
            raise ConfigError(f"key '{key}' needs k0_db and exponent") from exc
    k0, exp = _parse_numbers(key, value, 2)
    return PathLossLaw(k0, exp)


def scenario_from_mapping(data: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a flat mapping of scenario keys."""
    unknown = set(data) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    for key in _REQUIRED_KEYS:
        if key not in data:
            raise ConfigError(f"missing required scenario key '{key}'")
    kwargs = {
        "source": Position3(*_parse_numbers("source", data["source"], 3)),
        "destination": Position3(*_parse_numbers("destination", data["destination"], 3)),
        "ris": Position3(*_parse_numbers("ris", data["ris"], 3)),
        "m_elements": int(_parse_numbers("m_elements", data["m_elements"], 1)[0]),
        "tx_power_dbm": _parse_numbers("tx_power_dbm", data["tx_power_dbm"], 1)[0],
        "noise_power_dbm": _parse_numbers("noise_power_dbm", data["noise_power_dbm"], 1)[0],
        "direct_law": _law_from("direct_law", data["direct_law"]),
        "indirect_law_sr": _law_from("indirect_law_sr", data["indirect_law_sr"]),
        "indirect_law_rd": _law_from("indirect_law_rd", data["indirect_law_rd"]),
    }
    if "n_h" in data:
        kwargs["n_h"] = int(_parse_numbers("n_h", data["n_h"], 1)[0])
    for key in ("wavelength", "rician_intercept", "rician_slope", "spacing_wavelengths"):
        if key in data:
            kwargs[key] = _parse_numbers(key, data[key], 1)[0]
    for key in ("angles_sr", "angles_rd"):
        if key in data and data[key] is not None:
            kwargs[key] = tuple(_parse_numbers(key, data[key], 2))
    return ScenarioConfig(**kwargs)


def parse_scenario_text(text: str) -> ScenarioConfig:
    """Parse the flat ``key = value`` scenario format ('#' starts a comment)."""
    data = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in data:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        data[key] = value
    return scenario_from_mapping(data)


def load_scenario(path) -> ScenarioConfig:
    """Load a scenario from a ``key = value`` text file or a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return scenario_from_mapping(data)
    try:
        return parse_scenario_text(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
