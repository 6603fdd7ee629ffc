import numpy as np
import pytest

from ptwalk import SpectrumNotReal, ToyConfig, product_defect, run_toy, toy_hamiltonians
from ptwalk.toy import metric_from_weights


def test_hamiltonians_have_real_spectrum_in_both_variants():
    for variant in ("pt_phase", "real"):
        h_a, h_b = toy_hamiltonians(variant)
        for h in (h_a, h_b, np.kron(h_a, h_b)):
            assert np.abs(np.linalg.eigvals(h).imag).max() < 1e-10


def test_pt_phase_blocks_are_nonhermitian():
    h_a, h_b = toy_hamiltonians("pt_phase")
    assert np.abs(h_a - h_a.conj().T).max() > 0.5
    h_a_real, _ = toy_hamiltonians("real")
    assert np.abs(h_a_real - h_a_real.conj().T).max() < 1e-15


def test_metric_from_weights_is_compatible():
    h_a, _ = toy_hamiltonians("pt_phase")
    g = metric_from_weights(h_a, (0.7, 1.9))
    assert np.abs(g - g.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(g).min() > 0
    assert np.abs(h_a.conj().T @ g - g @ h_a).max() < 1e-12
    with pytest.raises(ValueError):
        metric_from_weights(h_a, (1.0, -0.5))


def test_product_defect_detects_products():
    rng = np.random.default_rng(60)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert product_defect(np.kron(a, b)) < 1e-12
    mixed = np.kron(a, b) + 0.3 * np.kron(b, a)
    assert product_defect(mixed) > 1e-3


def test_run_toy_dichotomy():
    result = run_toy(ToyConfig())
    assert result.product_defects["product1"] < 1e-12
    assert result.product_defects["product2"] < 1e-12
    assert result.product_defects["nonproduct"] > 1e-3
    for name in ("product1", "product2"):
        assert np.abs(result.entropy[name] - 1.0).max() <= 1e-9
    assert np.abs(result.entropy["nonproduct"] - 1.0).max() > 1e-3
    assert result.times[0] == 0.0
    assert result.times[-1] == pytest.approx(10.0)
    assert len(result.times) == 201


def test_run_toy_real_variant_is_metric_blind():
    # Hermitian blocks: every admissible metric commutes with H, so the
    # unitary-frame dynamics is identical for all three choices even though
    # the mixed metric is genuinely non-product. The small mixing strength
    # keeps exp(sH) well conditioned on this variant's wide spectrum.
    result = run_toy(ToyConfig(variant="real", mixing_strength=0.02, t_max=2.0))
    for curve in result.entropy.values():
        assert np.abs(curve - 1.0).max() <= 1e-9
    assert result.product_defects["nonproduct"] > 1e-3


def test_run_toy_rejects_complex_spectrum():
    h_a = np.array([[np.exp(1.2j), 0.5], [0.5, np.exp(-1.2j)]])  # 0.5^2 < sin^2(1.2)
    h_b, _ = toy_hamiltonians("pt_phase")
    with pytest.raises(SpectrumNotReal):
        run_toy(ToyConfig(h_a=h_a, h_b=h_b, t_max=1.0))


def test_toy_config_roundtrip():
    cfg = ToyConfig(mixing_strength=0.4, dt=0.1)
    back = ToyConfig.from_dict(cfg.to_dict())
    assert back == cfg
