import cmath
import math

import numpy as np
import pytest

import mmtc


def small_config():
    c = mmtc.SimConfig()
    c.N, c.M = 8, 8
    c.t_pilot, c.t_data, c.block_length = 20, 20, 40
    c.snr_grid = [10.0, 20.0]
    c.trials = 6
    return c


def test_presets():
    assert mmtc.preset_names() == ["desk", "desk-coded", "paper", "paper-coded"]
    desk = mmtc.preset("desk")
    assert (desk.N, desk.M, desk.trials) == (32, 16, 2000)
    assert "aa-rls-df" in desk.algorithms
    with pytest.raises(ValueError):
        mmtc.preset("nowhere")


def test_validation_errors_map_to_value_error():
    c = small_config()
    c.trials = 0
    with pytest.raises(ValueError):
        c.validate()
    with pytest.raises(ValueError):
        c.algorithms = ["a-sqrd"]


def test_genie_trial_is_error_free():
    r = mmtc.run_trial(small_config(), "genie", 0.0, 3)
    assert r["symbol_errors"] == 0


def test_sweep_records_and_worker_independence():
    c = small_config()
    c.algorithms = ["aa-rls-df", "lmmse"]
    one = mmtc.sweep(c)
    assert len(one) == 4
    for r in one:
        assert r["trials"] == 6
        assert 0.0 <= r["nser"] <= 1.0
        assert r["ber"] is None
    c.workers = 4
    four = mmtc.sweep(c)
    assert [r["symbol_errors"] for r in one] == [r["symbol_errors"] for r in four]
    csv = mmtc.format_csv(c)
    assert csv.splitlines()[0].startswith("algorithm,snr_db,trials")
    assert len(csv.splitlines()) == 5


def test_channel_columns_follow_fading_of_unit_norm_sequences():
    H = mmtc.generate_channel(16, 32, 5)
    assert H.shape == (16, 32)
    assert np.iscomplexobj(H)
    assert np.array_equal(H, mmtc.generate_channel(16, 32, 5))
    assert mmtc.snr_to_noise_variance(0.0, 32) == pytest.approx(32.0)


def test_rls_matches_batch_least_squares():
    rng = np.random.default_rng(0)
    L, lam, p_init = 4, 0.95, 100.0
    f = mmtc.AdaptiveFilter(L, lam, p_init)
    R = np.eye(L) / p_init
    r = np.zeros(L, complex)
    for _ in range(60):
        y = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / math.sqrt(2)
        d = complex(rng.standard_normal(), rng.standard_normal())
        f.step(y, d)
        R = lam * R + np.outer(y, y.conj())
        r = lam * r + y * np.conj(d)
    assert np.max(np.abs(f.w - np.linalg.solve(R, r))) < 1e-8


def test_zero_attract():
    assert mmtc.zero_attract(0.5 + 0j) == 0.5
    assert mmtc.zero_attract(0.001 + 0j) == 0
    w = cmath.rect(0.05, 1.0)
    out = mmtc.zero_attract(w)
    assert abs(out) < abs(w)
    assert cmath.phase(out) == pytest.approx(1.0)


def test_qpsk_llr_closed_form():
    mu, eta2, d = 0.8, 0.5, complex(0.3, -0.4)
    l0, l1 = mmtc.extrinsic_llr(d, mu, eta2, 1.0)
    a = 1 / math.sqrt(2)
    assert l0 == pytest.approx(4 * a * mu * d.real / eta2, abs=1e-9)
    assert l1 == pytest.approx(4 * a * mu * d.imag / eta2, abs=1e-9)


def test_ldpc_roundtrip():
    code = mmtc.LdpcCode.construct(128, 64)
    rng = np.random.default_rng(1)
    info = [int(b) for b in rng.integers(0, 2, 64)]
    word = code.encode(info)
    assert code.satisfies_parity(word)
    llrs = [-20.0 if b else 20.0 for b in word]
    r = mmtc.decode_spa(code, llrs)
    assert r["parity_ok"]
    assert code.extract_info(r["hard_bits"]) == info
