import numpy as np
import pytest

from ququart.noise import depolarizing, measurement_flip, parse_error_model, pauli_x
from ququart.qcore import QuditRegister, apply_channel, basis_state


def rho_of(label, dim=2):
    return basis_state(QuditRegister((dim,)), (label,)).to_density_matrix()


def test_depolarizing_identities():
    for dim in (2, 4, 16):
        ch = depolarizing(0.3, dim)
        total = sum(k.conj().T @ k for k in ch.operators)
        assert np.linalg.norm(total - np.eye(dim)) < 1e-10

    rho = rho_of(0)
    out = apply_channel(rho, depolarizing(0.5, 2), [0])
    assert np.allclose(out.elements, np.diag([0.75, 0.25]))


def test_depolarizing_composition():
    # composing two depolarizing channels is again depolarizing with
    # 1 - p = (1 - p1)(1 - p2)
    rng = np.random.default_rng(0)
    for dim in (2, 4):
        p1, p2 = rng.uniform(0, 1, 2)
        reg = QuditRegister((dim,))
        from ququart.qcore import random_density_matrix
        rho = random_density_matrix(reg, rng)
        out = apply_channel(apply_channel(rho, depolarizing(p1, dim), [0]),
                            depolarizing(p2, dim), [0])
        p_eff = 1 - (1 - p1) * (1 - p2)
        direct = apply_channel(rho, depolarizing(p_eff, dim), [0])
        assert np.linalg.norm(out.elements - direct.elements) < 1e-10


def test_pauli_x_channel():
    plus = np.array([1, 1]) / np.sqrt(2)
    from ququart.qcore import DensityMatrix, StateVector
    reg = QuditRegister((2,))
    rho_plus = StateVector(reg, plus).to_density_matrix()
    out = apply_channel(rho_plus, pauli_x(0.3), [0])
    assert np.linalg.norm(out.elements - rho_plus.elements) < 1e-12

    out = apply_channel(rho_of(0), pauli_x(0.1), [0])
    assert np.allclose(out.elements, np.diag([0.9, 0.1]))

    out = apply_channel(rho_of(0), pauli_x(0.0), [0])
    assert np.allclose(out.elements, np.diag([1.0, 0.0]))


def test_probability_validation():
    with pytest.raises(ValueError):
        depolarizing(1.5, 2)
    with pytest.raises(ValueError):
        pauli_x(-0.1)


def test_measurement_flip():
    rng = np.random.default_rng(123)
    flips = sum(measurement_flip(0.25, 0, rng) for _ in range(20000))
    assert abs(flips / 20000 - 0.25) < 0.02
    assert measurement_flip(0.0, 1, rng) == 1
    assert measurement_flip(1.0, 1, rng) == 0


def test_parse_error_model():
    assert parse_error_model("depol:0.03") == ("depol", 0.03)
    assert parse_error_model("paulix:0.1") == ("paulix", 0.1)
    assert parse_error_model("measflip:0.01") == ("measflip", 0.01)
    with pytest.raises(ValueError):
        parse_error_model("gamma:0.1")
    with pytest.raises(ValueError):
        parse_error_model("depol:1.2")
