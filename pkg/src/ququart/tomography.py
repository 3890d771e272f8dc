"""State reconstruction for one ququart viewed as two qubits or as a ladder.

Two routes:

* ``pauli_qst``: the ququart as an effective two-qubit system.  Nine
  measurement settings (pi/2 pre-rotations R_a x R_b with a, b in
  {0, x, y}) determine the 15 Pauli coefficients of rho, solved by linear
  inversion, which is the exact inverse of the forward Born-rule map.

* ``ladder_qst``: the ququart as a four-level ladder driven on the
  (0,1), (1,2), (2,3) transitions.  Populations plus pi/2 pulse sequences
  determine every coherence through closed-form combinations.

All pulse conventions here are R(pi/2) = exp(-i (pi/4) sigma); the
coherence-extraction formulas below are derived for that convention and
verified by the forward round trip (the signs differ from conventions in
which the pulse is exp(+i (pi/4) sigma)).
"""

from dataclasses import dataclass

import numpy as np

from .noise import PAULI_X, PAULI_Y, PAULI_Z
from .qcore import DensityMatrix, QuditRegister, Unitary

PAULIS = {
    "0": np.eye(2, dtype=complex),
    "x": PAULI_X,
    "y": PAULI_Y,
    "z": PAULI_Z,
}

_QUQUART = QuditRegister((4,))


def _rotation(label: str) -> np.ndarray:
    """R_a(pi/2) = exp(-i pi sigma_a / 4); R_0 is the identity."""
    if label == "0":
        return np.eye(2, dtype=complex)
    s = PAULIS[label]
    return np.cos(np.pi / 4) * np.eye(2) - 1j * np.sin(np.pi / 4) * s


def pauli_settings():
    """The nine (a, b) pre-rotation labels of the two-qubit scheme."""
    labels = ("0", "x", "y")
    return [(a, b) for a in labels for b in labels]


def setting_unitary(a: str, b: str) -> Unitary:
    return Unitary(np.kron(_rotation(a), _rotation(b)))


def forward_probabilities(rho: DensityMatrix, settings=None) -> dict:
    """Exact outcome probabilities per setting for the two-qubit scheme."""
    if settings is None:
        settings = pauli_settings()
    probs = {}
    for a, b in settings:
        u = setting_unitary(a, b).matrix
        rotated = u @ rho.elements @ u.conj().T
        probs[(a, b)] = np.real(np.diag(rotated)).copy()
    return probs


def pauli_qst(probabilities: dict) -> DensityMatrix:
    """Linear inversion of the nine-setting two-qubit tomography.

    ``probabilities`` maps (a, b) labels to the four P_{jk} outcome
    probabilities.  The output is the linear-inversion estimate; it is
    Hermitian with unit trace by construction but may have (slightly)
    negative eigenvalues for sampled inputs.
    """
    settings = sorted(probabilities.keys())
    if len(settings) != 9:
        raise ValueError(f"need all 9 settings, got {len(settings)}")
    labels = [(j, k) for j in "0xyz" for k in "0xyz"][1:]  # 15 unknowns
    rows = []
    rhs = []
    for a, b in settings:
        u = setting_unitary(a, b).matrix
        p = np.asarray(probabilities[(a, b)], dtype=float)
        if p.shape != (4,):
            raise ValueError("each setting carries four outcome probabilities")
        for outcome in range(4):
            proj = np.zeros((4, 4), dtype=complex)
            proj[outcome, outcome] = 1.0
            eff = u.conj().T @ proj @ u
            row = [np.real(np.trace(eff @ np.kron(PAULIS[j], PAULIS[k])))
                   for j, k in labels]
            rows.append(row)
            rhs.append(p[outcome] - 0.25 * np.real(np.trace(eff)))
    alpha, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(rhs), rcond=None)
    rho = 0.25 * np.eye(4, dtype=complex)
    for (j, k), coeff in zip(labels, alpha):
        rho = rho + coeff * np.kron(PAULIS[j], PAULIS[k])
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(_QUQUART, rho, normalized=False)


# ladder scheme -------------------------------------------------------------

LADDER_SEQUENCES = (
    "I",
    "X01", "Y01", "X12", "Y12", "X23", "Y23",
    "X12.X01", "Y12.X01", "X23.X12", "Y23.X12",
    "Y23.Y12.Y01", "X23.X12.X01",
)


def _ladder_pulse(token: str) -> np.ndarray:
    kind, pair = token[0], token[1:]
    j, k = int(pair[0]), int(pair[1])
    if kind == "X":
        block = np.array([[0, 1], [1, 0]], dtype=complex)
    elif kind == "Y":
        block = np.array([[0, -1j], [1j, 0]], dtype=complex)
    else:
        raise ValueError(f"unknown pulse kind '{kind}'")
    u = np.eye(4, dtype=complex)
    rot = np.cos(np.pi / 4) * np.eye(2) - 1j * np.sin(np.pi / 4) * block
    u[np.ix_((j, k), (j, k))] = rot
    return u


def ladder_sequence_unitary(name: str) -> Unitary:
    """Composite pulse unitary; tokens act right to left ('A.B' = A after B)."""
    if name == "I":
        return Unitary(np.eye(4))
    u = np.eye(4, dtype=complex)
    for token in reversed(name.split(".")):
        u = _ladder_pulse(token) @ u
    return Unitary(u)


def ladder_forward_probabilities(rho: DensityMatrix) -> dict:
    """Populations after each ladder pulse sequence."""
    probs = {}
    for name in LADDER_SEQUENCES:
        u = ladder_sequence_unitary(name).matrix
        probs[name] = np.real(np.diag(u @ rho.elements @ u.conj().T)).copy()
    return probs


def ladder_qst(probabilities: dict) -> DensityMatrix:
    """Closed-form ladder reconstruction from pulse-sequence populations."""
    missing = [s for s in LADDER_SEQUENCES if s not in probabilities]
    if missing:
        raise ValueError(f"missing sequences: {missing}")
    p = {name: np.asarray(probabilities[name], dtype=float)
         for name in LADDER_SEQUENCES}
    for name, arr in p.items():
        if arr.shape != (4,):
            raise ValueError("each sequence carries four populations")
        if abs(arr.sum() - 1.0) > 1e-6:
            raise ValueError(f"populations of '{name}' sum to {arr.sum()}")

    rho = np.zeros((4, 4), dtype=complex)
    np.fill_diagonal(rho, p["I"])

    def hermitian_set(j, k, value):
        rho[j, k] = value
        rho[k, j] = np.conj(value)

    # nearest-neighbor coherences from single pulses
    re01 = 0.5 * (p["Y01"][1] - p["Y01"][0])
    im01 = 0.5 * (p["X01"][1] - p["X01"][0])
    re12 = 0.5 * (p["Y12"][2] - p["Y12"][1])
    im12 = 0.5 * (p["X12"][2] - p["X12"][1])
    re23 = 0.5 * (p["Y23"][3] - p["Y23"][2])
    im23 = 0.5 * (p["X23"][3] - p["X23"][2])
    hermitian_set(0, 1, re01 + 1j * im01)
    hermitian_set(1, 2, re12 + 1j * im12)
    hermitian_set(2, 3, re23 + 1j * im23)

    # next-nearest coherences from two-pulse sequences
    re02 = (p["X12.X01"][1] - p["X12.X01"][2]) / np.sqrt(2) + im12
    im02 = (p["Y12.X01"][2] - p["Y12.X01"][1]) / np.sqrt(2) - re12
    re13 = (p["X23.X12"][2] - p["X23.X12"][3]) / np.sqrt(2) + im23
    im13 = (p["Y23.X12"][3] - p["Y23.X12"][2]) / np.sqrt(2) - re23
    hermitian_set(0, 2, re02 + 1j * im02)
    hermitian_set(1, 3, re13 + 1j * im13)

    # outermost coherence from the three-pulse sequences
    re03 = (p["Y23.Y12.Y01"][3] - p["Y23.Y12.Y01"][2]) - re13 - np.sqrt(2) * re23
    im03 = (p["X23.X12.X01"][2] - p["X23.X12.X01"][3]) - re13 + np.sqrt(2) * im23
    hermitian_set(0, 3, re03 + 1j * im03)

    return DensityMatrix(_QUQUART, rho, normalized=False)


@dataclass
class ReconstructionReport:
    rho_hat: DensityMatrix
    frobenius_error: float
    fidelity_error: float
    min_eigenvalue: float
    physical: bool


def clip_to_physical(rho: DensityMatrix) -> DensityMatrix:
    """Project onto the PSD cone by clipping negative eigenvalues."""
    w, v = np.linalg.eigh(rho.elements)
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    return DensityMatrix(rho.register, (v * w) @ v.conj().T)


def sample_and_reconstruct(rho: DensityMatrix, shots: int, method: str,
                           rng: np.random.Generator) -> ReconstructionReport:
    """Multinomial sampling per setting followed by reconstruction."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if method == "pauli":
        exact = forward_probabilities(rho)
        sampled = {k: rng.multinomial(shots, v / v.sum()) / shots
                   for k, v in exact.items()}
        rho_hat = pauli_qst(sampled)
    elif method == "ladder":
        exact = ladder_forward_probabilities(rho)
        sampled = {k: rng.multinomial(shots, v / v.sum()) / shots
                   for k, v in exact.items()}
        rho_hat = ladder_qst(sampled)
    else:
        raise ValueError(f"unknown method '{method}'")
    w = np.linalg.eigvalsh(0.5 * (rho_hat.elements + rho_hat.elements.conj().T))
    frob = float(np.linalg.norm(rho_hat.elements - rho.elements))
    from .qcore import fidelity
    fid = fidelity(clip_to_physical(rho_hat), rho)
    return ReconstructionReport(
        rho_hat=rho_hat,
        frobenius_error=frob,
        fidelity_error=float(1.0 - fid),
        min_eigenvalue=float(w[0]),
        physical=bool(w[0] >= -1e-9),
    )
