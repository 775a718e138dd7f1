"""Geometry, propagation laws, steering vectors, sampling, scenario parsing."""

import math

import numpy as np
import pytest

from rislink import channel as ch
from rislink.errors import ConfigError, DomainError, GeometryError

LAW_DIRECT = ch.PathLossLaw(-33.1, 3.5)
LAW_INDIRECT = ch.PathLossLaw(-25.5, 2.4)


def small_cfg(m=8, n_h=4, **overrides):
    kwargs = dict(
        source=ch.Position3(0, 0, 0),
        destination=ch.Position3(180, 100, 25),
        ris=ch.Position3(27, 25, 25),
        m_elements=m, n_h=n_h,
        tx_power_dbm=20.0, noise_power_dbm=-94.0,
        direct_law=LAW_DIRECT,
        indirect_law_sr=LAW_INDIRECT, indirect_law_rd=LAW_INDIRECT)
    kwargs.update(overrides)
    return ch.ScenarioConfig(**kwargs)


def test_path_loss_reference_distance():
    assert ch.path_loss_linear(LAW_INDIRECT, 1.0) == pytest.approx(
        0.002818382931264455, rel=1e-12)
    assert ch.path_loss_linear(ch.PathLossLaw(-7.7, 2.0), 1.0) == pytest.approx(
        10 ** (-0.77), rel=1e-12)


def test_path_loss_desk_value():
    # one-line independent computation: 10^((-33.1 - 35*log10(100))/10)
    assert ch.path_loss_linear(LAW_DIRECT, 100.0) == pytest.approx(
        4.897788193684476e-11, rel=1e-12)


def test_path_loss_power_law_ratio():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d1, d2 = rng.uniform(1.0, 500.0, size=2)
        ratio = ch.path_loss_linear(LAW_INDIRECT, d1) / ch.path_loss_linear(LAW_INDIRECT, d2)
        assert ratio == pytest.approx((d2 / d1) ** LAW_INDIRECT.exponent, rel=1e-12)


def test_path_loss_domain():
    with pytest.raises(DomainError):
        ch.path_loss_linear(LAW_DIRECT, 0.0)
    with pytest.raises(ConfigError):
        ch.PathLossLaw(-30.0, 0.5)  # exponent outside (1, 8]


def test_rician_factor_values():
    assert ch.rician_factor(1.3, 0.003, 1e-9) == pytest.approx(10 ** 1.3, rel=1e-9)
    assert ch.rician_factor(1.3, 0.003, 100.0) == pytest.approx(10.0, rel=1e-12)
    assert ch.rician_factor(0.7, 0.0, 123.0) == pytest.approx(10 ** 0.7, rel=1e-12)


def test_los_vector_zero_kappa_vanishes():
    v = ch.los_vector(0.3, 0.2, 8, 4, 0.1666, kappa=0.0, beta=1e-3)
    assert np.all(v == 0)


def test_los_vector_first_entry_and_modulus():
    kappa, beta = 4.0, 1e-3
    v = ch.los_vector(0.7, -0.3, 12, 4, 0.1666, kappa, beta)
    amp = math.sqrt(kappa * beta / (kappa + 1.0))
    assert v[0] == pytest.approx(amp)  # u_1 = 0 so the first phase is 0
    assert np.abs(v) == pytest.approx(np.full(12, amp), rel=1e-12)


def test_los_vector_matches_direct_transcription():
    # entry-by-entry against the defining wave-vector/element-offset product
    psi, phi, m, n_h, lam, kappa, beta = 0.3, 0.2, 4, 2, 0.1667, 4.0, 1e-3
    v = ch.los_vector(psi, phi, m, n_h, lam, kappa, beta)
    k_vec = (2 * math.pi / lam) * np.array([
        math.cos(psi) * math.cos(phi),
        math.sin(psi) * math.cos(phi),
        math.sin(psi)])
    amp = math.sqrt(kappa * beta / (kappa + 1.0))
    for m_idx in range(m):
        u = (lam / 2.0) * np.array([0.0, (m_idx % n_h), (m_idx // n_h)])
        expected = amp * np.exp(1j * float(k_vec @ u))
        assert v[m_idx] == pytest.approx(expected, rel=1e-12)


def test_los_vector_divisibility_error():
    with pytest.raises(ConfigError):
        ch.los_vector(0.0, 0.0, 10, 4, 0.1666, 1.0, 1.0)


def test_los_norm_identity():
    cfg = small_cfg(m=24, n_h=4)
    stats = ch.link_stats(cfg)
    h_sr, h_rd = ch.los_pair(cfg, stats)
    assert np.sum(np.abs(h_sr) ** 2) == pytest.approx(
        24 * stats.kappa_sr * stats.beta_sr / (stats.kappa_sr + 1), rel=1e-12)
    assert np.sum(np.abs(h_rd) ** 2) == pytest.approx(
        24 * stats.kappa_rd * stats.beta_rd / (stats.kappa_rd + 1), rel=1e-12)


def test_link_stats_unit_offset():
    cfg = small_cfg(ris=ch.Position3(1, 0, 0))
    assert ch.link_stats(cfg).d_sr == pytest.approx(1.0, rel=1e-15)


def test_link_stats_symmetry():
    cfg = small_cfg(source=ch.Position3(-50, 0, 0),
                    destination=ch.Position3(50, 0, 0),
                    ris=ch.Position3(0, 20, 10))
    stats = ch.link_stats(cfg)
    assert stats.d_sr == stats.d_rd
    assert stats.beta_sr == pytest.approx(stats.beta_rd, rel=1e-15)


def test_link_stats_desk_distances():
    stats = ch.link_stats(small_cfg())
    assert stats.d_sr == pytest.approx(math.sqrt(27 ** 2 + 25 ** 2 + 25 ** 2), rel=1e-14)
    assert stats.d_rd == pytest.approx(math.sqrt(153 ** 2 + 75 ** 2), rel=1e-14)
    assert stats.d_sd == pytest.approx(math.sqrt(180 ** 2 + 100 ** 2 + 25 ** 2), rel=1e-14)
    assert stats.nu == pytest.approx(10 ** 11.4, rel=1e-12)
    assert stats.mu == pytest.approx(
        stats.beta_sr * stats.beta_rd
        / ((stats.kappa_sr + 1) * (stats.kappa_rd + 1)), rel=1e-15)
    assert stats.kappa_tilde == stats.kappa_sr + stats.kappa_rd + 1
    assert stats.kappa_hat == 1 + 2 * stats.kappa_sr + 2 * stats.kappa_rd


def test_link_stats_geometry_errors():
    with pytest.raises(GeometryError):
        small_cfg(ris=ch.Position3(0, 0, 0))
    with pytest.raises(GeometryError):
        small_cfg(ris=ch.Position3(180, 100, 25))


def test_config_validation():
    with pytest.raises(ConfigError):
        small_cfg(m=10, n_h=4)
    with pytest.raises(ConfigError):
        small_cfg(tx_power_dbm=-100.0)  # below the noise floor
    assert small_cfg(m=64, n_h=None).n_h == 8  # largest divisor <= sqrt(m)
    assert ch.default_panel_columns(0) == 1
    assert ch.default_panel_columns(400) == 20


def test_sample_channels_deterministic():
    cfg = small_cfg()
    stats = ch.link_stats(cfg)
    a = ch.sample_channels(cfg, stats, ch.RandomStream(42))
    b = ch.sample_channels(cfg, stats, ch.RandomStream(42))
    assert a.h_sd == b.h_sd
    assert np.array_equal(a.h_sr, b.h_sr)
    assert np.array_equal(a.h_rd, b.h_rd)


def test_sample_block_matches_sequential_draws():
    cfg = small_cfg()
    stats = ch.link_stats(cfg)
    h_sd, h_sr, h_rd = ch.sample_channel_block(cfg, stats, ch.RandomStream(7), 3)
    stream = ch.RandomStream(7)
    for t in range(3):
        single = ch.sample_channels(cfg, stats, stream)
        assert single.h_sd == h_sd[t]
        assert np.array_equal(single.h_sr, h_sr[t])
        assert np.array_equal(single.h_rd, h_rd[t])


def test_sampling_moments():
    cfg = small_cfg(m=16, n_h=4)
    stats = ch.link_stats(cfg)
    h_sd, h_sr, _ = ch.sample_channel_block(cfg, stats, ch.RandomStream(11), 100_000)
    # direct-link power
    assert np.mean(np.abs(h_sd) ** 2) == pytest.approx(stats.beta_sd, rel=0.03)
    # per-entry LoS mean within 4 standard errors
    los_sr, _ = ch.los_pair(cfg, stats)
    sigma2 = stats.beta_sr / (stats.kappa_sr + 1.0)
    se = math.sqrt(sigma2 / 2.0 / 100_000)
    err = np.abs(h_sr.mean(axis=0) - los_sr)
    assert np.all(err < 4 * math.sqrt(2) * se)
    # per-entry scattered variance within 5%
    scatter = h_sr - los_sr[None, :]
    var = np.mean(np.abs(scatter) ** 2, axis=0)
    assert var == pytest.approx(np.full(16, sigma2), rel=0.05)


def test_sampling_pure_los_limit():
    cfg = small_cfg(m=8, n_h=4)
    stats = ch.link_stats(cfg)
    forced = ch.make_link_stats(stats.beta_sd, stats.beta_sr, stats.beta_rd,
                                kappa_sr=1e9, kappa_rd=1e9, nu=stats.nu)
    real = ch.sample_channels(cfg, forced, ch.RandomStream(5))
    los_sr, _ = ch.los_pair(cfg, forced)
    assert np.abs(real.h_sr - los_sr) == pytest.approx(np.zeros(8), abs=1e-3 * np.abs(los_sr).max())


def test_substream_derivation():
    s = ch.RandomStream(1000)
    assert s.substream(3).seed == 1000 ^ 3
    assert s.substream(0).uniforms(4) == pytest.approx(ch.RandomStream(1000).uniforms(4))


def test_scenario_text_round_trip(tmp_path):
    text = """
# comment line
source = 0 0 0
destination = 180 100 25
ris = 27 25 25
m_elements = 64
n_h = 8
tx_power_dbm = 20
noise_power_dbm = -94
direct_law = -33.1 3.5
indirect_law_sr = -25.5 2.4
indirect_law_rd = -25.5 2.4
"""
    path = tmp_path / "scen.cfg"
    path.write_text(text)
    cfg = ch.load_scenario(path)
    assert cfg.m_elements == 64
    assert cfg.direct_law == ch.PathLossLaw(-33.1, 3.5)
    assert cfg.wavelength == pytest.approx(ch.DEFAULT_WAVELENGTH)


def test_scenario_json(tmp_path):
    import json
    data = {
        "source": [0, 0, 0], "destination": [180, 100, 25], "ris": [27, 25, 25],
        "m_elements": 64, "n_h": 8, "tx_power_dbm": 20, "noise_power_dbm": -94,
        "direct_law": {"k0_db": -33.1, "exponent": 3.5},
        "indirect_law_sr": [-25.5, 2.4], "indirect_law_rd": [-25.5, 2.4],
    }
    path = tmp_path / "scen.json"
    path.write_text(json.dumps(data))
    cfg = ch.load_scenario(path)
    assert cfg.direct_law.exponent == 3.5


def test_scenario_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("\n".join([
        "source = 0 0 0", "destination = 180 100 25", "ris = 27 25 25",
        "tx_power_dbm = 20", "noise_power_dbm = -94", "direct_law = -33.1 3.5",
        "indirect_law_sr = -25.5 2.4", "indirect_law_rd = -25.5 2.4"]))
    with pytest.raises(ConfigError, match="m_elements"):
        ch.load_scenario(bad)
    with pytest.raises(ConfigError, match="line 1"):
        ch.parse_scenario_text("not a key value line")
    with pytest.raises(ConfigError, match="unknown"):
        ch.scenario_from_mapping({"sources": [0, 0, 0]})


def test_boresight_angles():
    psi, phi = ch.boresight_angles(ch.Position3(0, 0, 0), ch.Position3(1, 1, 0))
    assert psi == pytest.approx(math.pi / 4)
    assert phi == 0.0
    _, phi_up = ch.boresight_angles(ch.Position3(0, 0, 0), ch.Position3(0, 1, 1))
    assert phi_up == pytest.approx(math.pi / 4)
