"""Gate constructors for the ququart architecture.

Level ordering inside one ququart: index j in {0, 1, 2, 3} is read as the
two-qubit label |o n> with o = j >> 1 (optical-clock sector) and n = j & 1
(nuclear-spin sector), i.e. |00>, |01>, |10>, |11>.

Two-level pi pulses carry the physical -i phase on the driven pair of
states.  Every permutation-style constructor therefore takes a
``phase_corrected`` flag; the corrected variant is the textbook gate, which
the hardware reaches by absorbing the pulse phase into a light shift.
"""

from dataclasses import dataclass, field

import numpy as np

from .qcore import Unitary

I2 = np.eye(2, dtype=complex)
SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

#: ququart level index <-> (o, n) bit pair
BASIS_LABELS = ("00", "01", "10", "11")


def level_to_bits(j: int) -> tuple[int, int]:
    return (j >> 1) & 1, j & 1


def bits_to_level(o: int, n: int) -> int:
    return (o << 1) | n


def axis_vector(axis) -> np.ndarray:
    """Accept 'x'/'y'/'z' or a 3-vector; reject non-unit vectors."""
    if isinstance(axis, str):
        if axis not in ("x", "y", "z"):
            raise ValueError(f"unknown axis '{axis}'")
        return {"x": np.array([1.0, 0, 0]),
                "y": np.array([0, 1.0, 0]),
                "z": np.array([0, 0, 1.0])}[axis]
    v = np.asarray(axis, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("rotation axis must be a unit 3-vector")
    return v


def qubit_rotation(theta: float, axis) -> np.ndarray:
    """R_axis(theta) = exp(-i theta axis.sigma / 2) on one qubit."""
    v = axis_vector(axis)
    gen = v[0] * SIGMA["x"] + v[1] * SIGMA["y"] + v[2] * SIGMA["z"]
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * gen


def o_rotation(theta: float, axis) -> Unitary:
    """Rotation of the clock sector: R(theta) acting on the o qubit."""
    return Unitary(np.kron(qubit_rotation(theta, axis), I2))


def n_rotation(theta: float, axis) -> Unitary:
    """Rotation of the nuclear sector: R(theta) acting on the n qubit."""
    return Unitary(np.kron(I2, qubit_rotation(theta, axis)))


def two_level_pi(j: int, k: int, phase_corrected: bool = False) -> Unitary:
    """pi pulse between ququart levels j and k.

    The raw pulse maps |j> -> -i|k>, |k> -> -i|j>; the corrected variant is
    the plain transposition.
    """
    if j == k:
        raise ValueError("pulse needs two distinct levels")
    m = np.eye(4, dtype=complex)
    amp = 1.0 if phase_corrected else -1j
    m[j, j] = m[k, k] = 0.0
    m[k, j] = m[j, k] = amp
    return Unitary(m)


def intra_swap(phase_corrected: bool = False) -> Unitary:
    """Exchange of o- and n-qubit contents: pi pulse between |01> and |10>."""
    return two_level_pi(1, 2, phase_corrected)


def intra_cnot(phase_corrected: bool = False) -> Unitary:
    """CNOT with control o and target n: pi pulse between |10> and |11>."""
    return two_level_pi(2, 3, phase_corrected)


@dataclass(frozen=True)
class GatePhasePair:
    """Entangling-gate phase pair constrained to phi' = 2 phi - pi (mod 2 pi)."""

    phi: float
    phi_prime: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        expected = 2 * self.phi - np.pi
        if self.phi_prime is None:
            object.__setattr__(self, "phi_prime", expected)
        else:
            delta = (self.phi_prime - expected) % (2 * np.pi)
            if min(delta, 2 * np.pi - delta) > 1e-9:
                raise ValueError("phi' must equal 2 phi - pi modulo 2 pi")


def ideal_cccz(phi: float) -> Unitary:
    """Diagonal two-ququart gate: e^{i phi} on states with exactly one atom
    in |11>, e^{i(2 phi - pi)} on |11>|11>, and 1 elsewhere."""
    pair = GatePhasePair(phi)
    diag = np.ones(16, dtype=complex)
    for j1 in range(4):
        for j2 in range(4):
            count = int(j1 == 3) + int(j2 == 3)
            if count == 1:
                diag[4 * j1 + j2] = np.exp(1j * pair.phi)
            elif count == 2:
                diag[4 * j1 + j2] = np.exp(1j * pair.phi_prime)
    return Unitary(np.diag(diag))


def ideal_cz_o(phi: float) -> Unitary:
    """Diagonal CZ between the o sectors only, agnostic to both n sectors."""
    pair = GatePhasePair(phi)
    diag = np.ones(16, dtype=complex)
    for j1 in range(4):
        for j2 in range(4):
            o1, o2 = j1 >> 1, j2 >> 1
            if o1 + o2 == 1:
                diag[4 * j1 + j2] = np.exp(1j * pair.phi)
            elif o1 + o2 == 2:
                diag[4 * j1 + j2] = np.exp(1j * pair.phi_prime)
    return Unitary(np.diag(diag))


def light_shift_compensator(phases) -> Unitary:
    """Diagonal phase gate diag(e^{i phi_j}) used to cancel light shifts."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (4,):
        raise ValueError("need one phase per ququart level")
    return Unitary(np.diag(np.exp(1j * phases)))


@dataclass(frozen=True)
class DriveTone:
    """Resonant tone coupling levels j and k.

    omega0: Rabi angular frequency (rad/s), freq: drive angular frequency
    (rad/s), phase: drive phase (rad).
    """

    j: int
    k: int
    omega0: float
    freq: float
    phase: float = 0.0

    def __post_init__(self):
        if self.j == self.k:
            raise ValueError("tone must couple two distinct levels")
        if self.omega0 < 0:
            raise ValueError("Rabi frequency must be non-negative")


class OffResonantToneError(ValueError):
    """Tone too far from resonance for the static effective Hamiltonian."""


def drive_hamiltonian(tones, bare_frequencies, rotating_frame,
                      rel_tol: float = 1e-6) -> np.ndarray:
    """Static effective Hamiltonian of resonant tones in a rotating frame.

    Returns sum over tones of (Omega0/2)(e^{-i phase}|j><k| + h.c.) plus the
    residual diagonal detunings (bare - frame).  Each tone must satisfy the
    resonance condition freq = nu_k - nu_j within rel_tol * Omega0; an
    off-resonant tone raises OffResonantToneError (such schedules need the
    time-dependent integration path instead).

    The phase sign is fixed so that a tone on (j, k) with phase phi produces
    (Omega0/2)(cos phi sigma_x + sin phi sigma_y) on the (j, k) block, with
    sigma_x = |j><k| + |k><j| and sigma_y = -i|j><k| + i|k><j|.
    """
    nu = np.asarray(rotating_frame, dtype=float)
    bare = np.asarray(bare_frequencies, dtype=float)
    if nu.shape != (4,) or bare.shape != (4,):
        raise ValueError("need four per-level frequencies")
    h = np.diag((bare - nu).astype(complex))
    for tone in tones:
        detuning = tone.freq - (nu[tone.k] - nu[tone.j])
        if abs(detuning) > rel_tol * max(tone.omega0, 1.0):
            raise OffResonantToneError(
                f"tone ({tone.j},{tone.k}) off resonance by {detuning:g} rad/s"
            )
        amp = 0.5 * tone.omega0 * np.exp(-1j * tone.phase)
        h[tone.j, tone.k] += amp
        h[tone.k, tone.j] += np.conj(amp)
    return h


def qubit_gate_on_pair(u2: np.ndarray, pos_a: int, pos_b: int) -> np.ndarray:
    """Embed a 2-qubit gate on qubit positions (pos_a, pos_b) of the
    4-qubit view (o1, n1, o2, n2) of a ququart pair; returns 16x16."""
    if pos_a == pos_b:
        raise ValueError("need two distinct qubit positions")
    u = np.zeros((16, 16), dtype=complex)
    for col in range(16):
        bits_in = [(col >> (3 - b)) & 1 for b in range(4)]
        for a_out in range(2):
            for b_out in range(2):
                amp = u2[2 * a_out + b_out,
                         2 * bits_in[pos_a] + bits_in[pos_b]]
                if amp == 0:
                    continue
                bits = list(bits_in)
                bits[pos_a], bits[pos_b] = a_out, b_out
                row = sum(bit << (3 - b) for b, bit in enumerate(bits))
                u[row, col] += amp
    return u


CNOT_2Q = np.eye(4)[:, [0, 1, 3, 2]].astype(complex)


def inter_cnot_oo() -> Unitary:
    """CNOT between the o qubits of two ququarts (control = first atom)."""
    return Unitary(qubit_gate_on_pair(CNOT_2Q, 0, 2))


# named tone builders for the standard controlled-rotation / flip-flop set
def crot_tone(block: str, omega0: float, freq: float, phase: float = 0.0) -> DriveTone:
    """Tones named by the level pair they couple: '01', '23', '02', '13', '12'."""
    pairs = {"01": (0, 1), "23": (2, 3), "02": (0, 2), "13": (1, 3), "12": (1, 2)}
    if block not in pairs:
        raise ValueError(f"unknown tone block '{block}'")
    j, k = pairs[block]
    return DriveTone(j, k, omega0, freq, phase)
