import math

import numpy as np
import pytest

import grfb


def haar_columns(rng, n, k):
    h = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(h)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return grfb.phase_normalize(q[:, :k])


def test_svd_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    u, d, v = grfb.svd(a)
    np.testing.assert_allclose(d, np.linalg.svd(a, compute_uv=False), rtol=1e-12)
    np.testing.assert_allclose(u @ np.diag(d) @ v.conj().T, a, atol=1e-12)


def test_givens_round_trip():
    rng = np.random.default_rng(1)
    for n, k in [(2, 1), (3, 2), (4, 3)]:
        w = haar_columns(rng, n, k)
        angles = grfb.gr_decompose(w)
        assert len(angles) == len(grfb.parameter_names(n, k))
        np.testing.assert_allclose(grfb.gr_reconstruct(angles, n, k), w, atol=1e-12)


def test_grids_and_codes():
    assert np.allclose(np.degrees(grfb.psi_grid(2)), [11.25, 33.75, 56.25, 78.75])
    assert grfb.huffman_lengths([0.14714, 0.35496, 0.35146, 0.14644]) == [3, 1, 2, 3]
    assert grfb.huffman_codewords([0.2722, 0.47748, 0.2299, 0.02042]) == ["10", "0", "110", "111"]


def test_encode_decode():
    w = np.eye(3, 2, dtype=complex)
    enc = grfb.encode(w, "B")
    assert enc["bits"] == 12
    dec = grfb.decode(enc["hex"], "B", "3x2", enc["bits"])
    assert dec["psi_indices"] == enc["psi_indices"]
    np.testing.assert_allclose(dec["matrix"], enc["reconstruction"])
    with pytest.raises(ValueError):
        grfb.decode(enc["hex"], "B", "3x2", enc["bits"] - 1)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        grfb.encode(np.ones((3, 2), dtype=complex), "B")
    with pytest.raises(ValueError):
        grfb.psi_grid(9)


def test_quantizer_stats_and_training():
    st = grfb.evaluate_quantizer("3x1", "traditional", n=10000, seed=2)
    assert 0.09 < st["mse"] < 0.13
    angles = grfb.sample_angles("3x1", 10000, seed=3)
    assert angles.shape == (10000, 4)
    cb = grfb.lloyd_train(angles[:, 2], 2)
    assert cb["levels"][0] < cb["levels"][1]
    assert all(b <= a for a, b in zip(cb["history"], cb["history"][1:]))


def test_campaign_rows():
    rows = grfb.run_campaign(3, 3, ["QPSK"], [0.0], ["traditional", "proposed"], trials=500, seed=4)
    assert {r["scheme"] for r in rows} == {"traditional", "proposed"}
    assert all(r["bits_sent"] == 1000 for r in rows)
