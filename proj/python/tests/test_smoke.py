import math

import numpy as np
import pytest

import cczsim


def test_second_order_limit_and_exact_agree_far_from_resonance():
    dev = cczsim.Device.reference()
    pert = cczsim.zeta_perturbative(dev, 10.0, 10.0)
    exact = cczsim.zeta_exact(dev, 10.0, 10.0, frame="rwa")
    assert exact.flag == ""
    assert abs(pert.zeta12 - exact.zeta12) / abs(exact.zeta12) < 0.2
    assert abs(pert.zeta23 - exact.zeta23) / abs(exact.zeta23) < 0.2


def test_idle_point_cancels_pair_couplings():
    dev = cczsim.Device.reference()
    c1, c2 = cczsim.find_idle_point(dev)
    r = cczsim.zeta_exact(dev, c1, c2)
    assert abs(r.zeta12) < 1e-3
    assert abs(r.zeta23) < 1e-3


def test_bad_frame_raises():
    with pytest.raises(cczsim._core.InvalidArgument):
        cczsim.zeta_exact(cczsim.Device.reference(), 7.0, 7.0, frame="lab")


def test_config_round_trip():
    dev = cczsim.Device.reference()
    again = cczsim.Device.from_json(dev.to_json())
    assert again.to_json() == dev.to_json()
    assert dev.hilbert_dim == 243
    with pytest.raises(cczsim._core.CczError):
        cczsim.Device.from_json("{}")


def test_conditional_phases_of_ccz():
    u = np.eye(8, dtype=complex)
    u[7, 7] = -1
    p = cczsim.conditional_phases(u)
    assert abs(abs(p.phi_ccz) - math.pi) < 1e-12
    assert abs(p.phi12) < 1e-12
    with pytest.raises(cczsim._core.DimensionMismatch):
        cczsim.conditional_phases(np.eye(4, dtype=complex))


def test_process_fidelity_of_orthogonal_unitaries():
    u = np.eye(8, dtype=complex)
    u[7, 7] = -1
    assert cczsim.process_fidelity_unitary(u, u) == pytest.approx(1.0, abs=1e-12)
    assert cczsim.process_fidelity_unitary(u, np.eye(8)) == pytest.approx(0.5625, abs=1e-12)


def test_grover_and_rb():
    probs = cczsim.grover_ideal("111", 2)
    assert probs[7] == pytest.approx(121 / 128, abs=1e-12)
    assert sum(probs) == pytest.approx(1.0)
    assert cczsim.optimal_grover_iterations(8) == 2
    assert cczsim.rb_fidelity(0.9947, 0.9876, 4) == pytest.approx(0.9946, abs=5e-5)
    m = [1, 5, 10, 20, 40, 80]
    s = [0.5 * 0.98**k + 0.5 for k in m]
    a, p, b = cczsim.fit_rb_decay(m, s)
    assert p == pytest.approx(0.98, abs=1e-6)


def test_operating_point_near_idle_leaks_little():
    op = cczsim.evaluate_operating_point(cczsim.Device.reference(), -1.0, -0.6)
    assert op.leakage < 0.01
    assert op.tau == 150.0
