"""Entanglement distillation on two ququarts, by exact density-matrix algebra.

The pre-distilled resource is a pair of Bell states, one between the two
o qubits and one between the two n qubits of two atoms.  The circuit is
the standard two-pair purification mapped onto intra-ququart gates:

  1. intra-ququart CNOT (control o, target n) on each atom, which im-
     prints the X-error parity of the kept pair onto the measured pair,
  2. intra-ququart SWAP on each atom, moving the kept pair into the
     n sectors and the parity information into the o sectors,
  3. o-qubit readout of both atoms; success is heralded by both reading
     dark (|1>), leaving the purified pair in the metastable n sectors.

Everything is a 16x16 density-matrix computation with all four readout
branches enumerated exactly, so sweeps carry no sampling noise.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gates
from .noise import depolarizing, pauli_x
from .qcore import (
    DensityMatrix, QuditRegister, StateVector, apply_channel, apply_unitary,
    fidelity, partial_trace,
)

TWO_QUQUARTS = QuditRegister((4, 4))
_QUBIT_PAIR = QuditRegister((2, 2))

BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)


@dataclass
class DistillConfig:
    error_model: str = "depol"       # noise on entanglement generation
    error_rate: float = 0.03         # channel parameter (not pre-infidelity)
    gate_infidelity: float = 0.001   # depolarizing per intra-ququart gate
    measurement_error: float = 0.01  # classical flip per o readout

    def __post_init__(self):
        for name in ("error_rate", "gate_infidelity", "measurement_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")
        if self.error_model not in ("depol", "paulix"):
            raise ValueError(f"unsupported error model '{self.error_model}'")


@dataclass
class DistillResult:
    pre_infidelity: float
    post_infidelity: float
    yield_probability: float


def _ideal_state() -> StateVector:
    """Bell(o1, o2) x Bell(n1, n2) reordered into (atom1, atom2) indices."""
    tensor = np.zeros((2, 2, 2, 2), dtype=complex)  # (o1, o2, n1, n2)
    for o in range(2):
        for n in range(2):
            tensor[o, o, n, n] = 0.5
    # atom layout: (o1, n1, o2, n2)
    amps = tensor.transpose(0, 2, 1, 3).reshape(16)
    return StateVector(TWO_QUQUARTS, amps)


def _pair_channel_on(rho: DensityMatrix, channel, pair: str) -> DensityMatrix:
    """Apply a two-qubit channel to the o pair or the n pair across atoms."""
    # view the register as four qubits (o1, n1, o2, n2)
    four = QuditRegister((2, 2, 2, 2))
    rho4 = DensityMatrix(four, rho.elements, rho.normalized)
    targets = [0, 2] if pair == "o" else [1, 3]
    out = apply_channel(rho4, channel, targets)
    return DensityMatrix(TWO_QUQUARTS, out.elements, rho.normalized)


def prepare_predistilled(error_model: str, error_rate: float) -> DensityMatrix:
    """Ideal Bell x Bell passed through the entanglement-generation noise.

    Depolarizing noise acts on each Bell pair as a two-qubit channel;
    Pauli-X noise flips one member of each pair with the given rate.
    """
    rho = _ideal_state().to_density_matrix()
    if error_model == "depol":
        ch = depolarizing(error_rate, 4)
        rho = _pair_channel_on(rho, ch, "o")
        rho = _pair_channel_on(rho, ch, "n")
    elif error_model == "paulix":
        ch = pauli_x(error_rate)
        four = QuditRegister((2, 2, 2, 2))
        rho4 = DensityMatrix(four, rho.elements)
        rho4 = apply_channel(rho4, ch, [0])   # one member of the o pair
        rho4 = apply_channel(rho4, ch, [1])   # one member of the n pair
        rho = DensityMatrix(TWO_QUQUARTS, rho4.elements)
    else:
        raise ValueError(f"unsupported error model '{error_model}'")
    return rho


def pair_infidelity(rho: DensityMatrix, pair: str = "o") -> float:
    """1 - Bell fidelity of one entangled pair's reduced state."""
    four = QuditRegister((2, 2, 2, 2))
    rho4 = DensityMatrix(four, rho.elements)
    keep = [0, 2] if pair == "o" else [1, 3]
    red = partial_trace(rho4, keep)
    bell = StateVector(_QUBIT_PAIR, BELL_PHI_PLUS)
    return float(1.0 - fidelity(red, bell))


def run_distillation(rho: DensityMatrix, config: DistillConfig) -> DistillResult:
    """Exact four-branch evaluation of the distillation circuit."""
    if rho.register.dims != (4, 4):
        raise ValueError("distillation expects a two-ququart state")
    pre_inf = pair_infidelity(rho, "o")

    p_g = config.gate_infidelity
    gate_noise = depolarizing(p_g, 4) if p_g > 0 else None
    state = rho
    for atom in (0, 1):
        state = apply_unitary(state, gates.intra_cnot(phase_corrected=True), [atom])
        if gate_noise:
            state = apply_channel(state, gate_noise, [atom])
    for atom in (0, 1):
        state = apply_unitary(state, gates.intra_swap(phase_corrected=True), [atom])
        if gate_noise:
            state = apply_channel(state, gate_noise, [atom])

    # o-basis projective branches on both atoms: outcomes (a, b) in {0,1}^2
    four = QuditRegister((2, 2, 2, 2))
    rho4 = DensityMatrix(four, state.elements)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    projs = {0: p0, 1: p1}
    branch_weight = {}
    branch_state = {}
    for a in (0, 1):
        for b in (0, 1):
            # project o1 (qubit axis 0) and o2 (qubit axis 2)
            full = np.kron(np.kron(np.kron(projs[a], np.eye(2)), projs[b]), np.eye(2))
            projected = full @ rho4.elements @ full
            w = float(np.trace(projected).real)
            branch_weight[(a, b)] = w
            branch_state[(a, b)] = projected

    total = sum(branch_weight.values())
    if abs(total - 1.0) > 1e-10:
        raise AssertionError(f"branch weights sum to {total}")

    # classical measurement flips: probability the record reads (1, 1)
    p_m = config.measurement_error
    def record_dark_dark(true_ab):
        pa = 1.0 - p_m if true_ab[0] == 1 else p_m
        pb = 1.0 - p_m if true_ab[1] == 1 else p_m
        return pa * pb

    success_mat = np.zeros((16, 16), dtype=complex)
    success_prob = 0.0
    for ab, w in branch_weight.items():
        fac = record_dark_dark(ab)
        success_prob += fac * w
        success_mat = success_mat + fac * branch_state[ab]

    if success_prob <= 0:
        return DistillResult(pre_inf, 1.0, 0.0)
    success_mat /= success_prob

    # kept pair lives in the n sectors after the swaps
    kept = partial_trace(DensityMatrix(four, success_mat), [1, 3])
    bell = StateVector(_QUBIT_PAIR, BELL_PHI_PLUS)
    post_inf = float(1.0 - fidelity(kept, bell))
    return DistillResult(pre_inf, post_inf, float(success_prob))


def distill_at(config: DistillConfig) -> DistillResult:
    rho = prepare_predistilled(config.error_model, config.error_rate)
    return run_distillation(rho, config)


def sweep_error_rate(config: DistillConfig, rates) -> list[DistillResult]:
    """Deterministic sweep over the entanglement-generation error rate."""
    out = []
    for q in rates:
        cfg = DistillConfig(config.error_model, float(q),
                            config.gate_infidelity, config.measurement_error)
        out.append(distill_at(cfg))
    return out


def sweep_gate_infidelity(config: DistillConfig, gate_rates) -> list[DistillResult]:
    out = []
    for g in gate_rates:
        cfg = DistillConfig(config.error_model, config.error_rate,
                            float(g), config.measurement_error)
        out.append(distill_at(cfg))
    return out


def x_noise_closed_form(q: float) -> float:
    """Independent post-selected infidelity for pure X noise, ideal gates
    and readout: q^2 / ((1-q)^2 + q^2)."""
    return q * q / ((1.0 - q) ** 2 + q * q)
