"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import mimodfe


def test_version():
    assert mimodfe.__version__


def test_inverse_waterfill_known_case():
    res = mimodfe.inverse_waterfill(np.array([4.0, 1.0]), 1.0, 2)
    assert res.active_rank == 1
    assert res.loadings == pytest.approx([0.25, 0.0])
    assert res.achieved_info_bits == pytest.approx(1.0)
    with pytest.raises(mimodfe.DomainError):
        mimodfe.inverse_waterfill(np.array([5.0]), 0.0, 1)


def test_qrs_equal_diagonal_properties():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 4)) + 1j * rng.normal(size=(6, 4))
    f = mimodfe.qrs_equal_diagonal(a)
    assert np.allclose(a @ f.s, f.q @ f.r, atol=1e-10)
    gm = math.exp(np.mean(np.log(np.linalg.svd(a, compute_uv=False))))
    assert np.allclose(np.diag(f.r), gm, atol=1e-8)


def test_dmt_matrix_matches_numpy_fft():
    rng = np.random.default_rng(4)
    taps = rng.normal(size=5) + 1j * rng.normal(size=5)
    h = mimodfe.dmt_matrix(taps, 16)
    want = np.fft.fft(np.concatenate([taps, np.zeros(11)]))
    assert np.allclose(np.diag(h), want, atol=1e-12)
    with pytest.raises(mimodfe.ConfigError):
        mimodfe.dmt_matrix(taps, 4)


def test_design_meets_bound_and_verifies():
    chans = mimodfe.sweep_channels(7, 0, 2, 4, 16, mimodfe.Modulation.dmt)
    channels = mimodfe.ChannelSet(chans)
    design = mimodfe.design_transceivers(channels, [4, 4], 24.0)
    assert not design.dead_streams
    assert design.sum_info_bits == 24.0

    report = mimodfe.verify_design(design, channels, 1e-7)
    assert report.ok(), str(report)

    receiver = mimodfe.build_receiver(design, channels)
    bound = design.mse_bound()
    assert receiver.predicted_mse == pytest.approx(bound, rel=1e-7)


def test_noiseless_detection_recovers_symbols():
    chans = mimodfe.sweep_channels(9, 0, 2, 3, 8, mimodfe.Modulation.dmt)
    channels = mimodfe.ChannelSet(chans)
    design = mimodfe.design_transceivers(channels, [2, 2], 14.0)
    receiver = mimodfe.build_receiver(design, channels)
    qpsk = mimodfe.Constellation.qpsk()

    rng = np.random.default_rng(0)
    s = 2 ** -0.5
    tx = [rng.choice([s + s * 1j, s - s * 1j, -s + s * 1j, -s - s * 1j], size=2)
          for _ in range(2)]
    y = np.zeros(8, dtype=complex)
    for k in range(2):
        y += np.asarray(channels.channels[k]) @ np.asarray(design.users[k].precoder) @ tx[k]

    det = mimodfe.detect(receiver, design, channels, y, qpsk)
    for k in range(2):
        assert np.allclose(det.symbols[k], tx[k])

    lin = mimodfe.linear_mmse_detect(mimodfe.build_linear_receiver(design, channels), y, qpsk)
    for k in range(2):
        assert np.allclose(lin.symbols[k], tx[k])


def test_run_sweep_deterministic_and_consistent(tmp_path):
    cfg = mimodfe.SimConfig()
    cfg.users = 2
    cfg.streams = [2, 2]
    cfg.subcarriers = 8
    cfg.channel_length = 3
    cfg.modulation = mimodfe.Modulation.dmt
    cfg.info_start = 12.0
    cfg.info_stop = 16.0
    cfg.info_step = 4.0
    cfg.realizations = 3
    cfg.min_bits = 3000
    cfg.receivers = [mimodfe.ReceiverKind.dfe, mimodfe.ReceiverKind.linear]
    cfg.seed = 21

    first = mimodfe.run_sweep(cfg)
    cfg.threads = 3
    second = mimodfe.run_sweep(cfg)
    assert len(first.records) == 8
    assert all(a == b for a, b in zip(first.records, second.records))
    assert first.verification.flagged == 0

    for rec in first.records:
        if rec.receiver == "dfe":
            assert rec.mse_predicted == pytest.approx(2.0 ** (-rec.info_bits / 4), rel=1e-7)

    path = tmp_path / "sweep.csv"
    mimodfe.emit_csv(first.records, str(path))
    back = mimodfe.read_ber_csv(str(path))
    assert all(a == b for a, b in zip(first.records, back))
