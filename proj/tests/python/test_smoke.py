"""Smoke tests for the pyentlat module against known values."""

import json
import math

import numpy as np
import pytest

import pyentlat as el


def test_target_state_structure():
    psi = el.target_state(6)
    assert psi.shape == (64,)
    assert abs(np.vdot(psi, psi) - 1.0) < 1e-12
    assert el.support_check(psi)


def test_schmidt_bound():
    psi = el.target_state(8)
    lam = el.schmidt_spectrum(psi, [1, 2])
    assert abs(lam[0] - 0.625) < 1e-9
    lam_mid = el.schmidt_spectrum(psi, [1])
    assert abs(lam_mid[0] - 0.5) < 1e-9


def test_homogeneous_values():
    psi = el.target_state(10)
    for subset in ([1, 2], [1, 3], [1, 2, 3, 4], [1, 2, 3, 4, 5, 6]):
        assert abs(el.homogeneous_value(psi, subset) - 1.5) < 1e-9
    assert abs(el.homogeneous_value(psi, list(range(1, 11))) - 3.0) < 1e-9


def test_certification_chain():
    report = json.loads(el.certify_full_entanglement(el.target_state(6), 6))
    assert report["verdict"] == "fully-entangled"
    assert len(report["trace"]) == 6


def test_white_noise_threshold():
    n = 10
    psi = el.target_state(n)
    rho = el.white_noise(psi, 3.0 / (4 * n))
    report = json.loads(el.fidelity_witness_report(psi))
    assert report["derived"]["lms_count"] == 18
    assert abs(report["derived"]["fidelity_bound"] - 1.0) < 1e-9
    assert abs(el.fidelity(rho, psi) - (1 - 0.075 + 0.075 / 2**n)) < 1e-12


def test_lms_settings_count():
    assert len(el.lms_settings(10)) == 18


def test_hubbard_gate():
    T = el.superexchange_period(100.0)
    f, leak = el.hubbard_gate_fidelity(100.0, T / 8)
    assert f > 0.999
    f_fast, leak_fast = el.hubbard_gate_fidelity(4 / math.sqrt(3), math.pi / (4 / math.sqrt(3)))
    assert f_fast > 1 - 1e-9
    assert leak_fast < 1e-10


def test_sampling_determinism():
    psi = el.target_state(4)
    a = el.sample_counts(psi, "ZZZZ", 200, 7)
    b = el.sample_counts(psi, "ZZZZ", 200, 7)
    assert a == b
    assert sum(a.values()) == 200
    # every outcome is half-filled
    for outcome in a:
        assert bin(outcome).count("1") == 2


def test_reverse_round_trip():
    psi = el.target_state(6)
    phi4, phi4p, phi5 = el.reverse_sequence(psi, 6)
    neel = el.neel_state(6)
    assert abs(abs(np.vdot(neel, phi5)) ** 2 - 1.0) < 1e-10


def test_config_error_maps_to_value_error():
    with pytest.raises(ValueError):
        el.target_state(7)


def test_sweep_csv_header():
    csv, sidecar = el.sweep_csv("fig5a", 10)
    assert csv.startswith("param,value,subset,witness_value,stderr\n")
    crossings = json.loads(sidecar)["witness_crossings"]
    assert abs(crossings["1+2+3+4+5+6"] - 0.95) < 0.01
