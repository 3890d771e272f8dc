"""Error-channel constructors shared by the distillation and QEC simulations."""

import numpy as np

from .qcore import KrausChannel

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_prob(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")


def _weyl_operators(dim):
    """Generalized Pauli (Weyl) operators X^a Z^b for a d-level system."""
    x = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        x[(k + 1) % dim, k] = 1.0
    omega = np.exp(2j * np.pi / dim)
    z = np.diag(omega ** np.arange(dim))
    ops = []
    for a in range(dim):
        for b in range(dim):
            ops.append(np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b))
    return ops


def depolarizing(p: float, dim: int = 2) -> KrausChannel:
    """rho -> (1 - p) rho + p I/dim.

    For a pair of qudits pass the product dimension, which realizes the
    replace-with-maximally-mixed model on the pair.
    """
    _check_prob(p)
    weyl = _weyl_operators(dim)
    k0 = np.sqrt(1.0 - p + p / dim**2) * np.eye(dim)
    ops = [k0]
    amp = np.sqrt(p) / dim
    for w in weyl[1:]:
        ops.append(amp * w)
    return KrausChannel(tuple(ops))


def pauli_x(p: float) -> KrausChannel:
    """Qubit bit-flip channel rho -> (1 - p) rho + p X rho X."""
    _check_prob(p)
    return KrausChannel((np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * PAULI_X))


def measurement_flip(p: float, outcome: int, rng: np.random.Generator) -> int:
    """Classical readout error: flip a binary outcome with probability p."""
    _check_prob(p)
    if outcome not in (0, 1):
        raise ValueError("outcome must be a bit")
    return outcome ^ int(rng.random() < p)


def parse_error_model(spec: str):
    """Parse CLI error-model strings: "depol:p", "paulix:p", "measflip:p"."""
    name, _, value = spec.partition(":")
    p = float(value)
    _check_prob(p)
    name = name.strip().lower()
    if name not in ("depol", "paulix", "measflip"):
        raise ValueError(f"unknown error model '{name}'")
    return name, p
