"""Constant-depth AKLT preparation, verification, fusion/fission, and the
reset-driven adaptive circuit.

Chain layout: site i holds ququart (o_i, n_i).  The prepared resource is a
chain of singlets between o_i and n_{i+1} for i = 0 .. L-2, with dangling
edge qubits n_0 (left) and o_{L-1} (right) set to explicit edge vectors.
Projecting every site onto its two-qubit triplet sector turns the chain
into the spin-1 AKLT state; singlet outcomes disentangle their site
completely and are dropped.

Spin-1 embedding convention (validated by the energy and string-order
oracles): m = +1 -> |11>, m = 0 -> (|01> + |10>)/sqrt(2), m = -1 -> |00>,
with the two-qubit singlet (|01> - |10>)/sqrt(2) as the measured-out
sector.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import gates
from .qcore import (
    Projector, QuditRegister, StateVector, Unitary, apply_unitary,
    basis_state, measure_branches, measure_projective, random_unitary,
)

# two-qubit (o, n) basis vectors of one ququart, as 4-vectors
SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
TRIPLET_P1 = np.array([0.0, 0.0, 0.0, 1.0])            # m = +1 -> |11>
TRIPLET_0 = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2)
TRIPLET_M1 = np.array([1.0, 0.0, 0.0, 0.0])            # m = -1 -> |00>

# isometry C^3 -> C^4, columns ordered (m=+1, m=0, m=-1)
TRIPLET_ISOMETRY = np.stack([TRIPLET_P1, TRIPLET_0, TRIPLET_M1], axis=1)

# spin-1 operators in the (m=+1, m=0, m=-1) basis
SPIN1_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)
SPIN1_P = np.sqrt(2.0) * np.diag([1.0, 1.0], k=1).astype(complex)
SPIN1_X = 0.5 * (SPIN1_P + SPIN1_P.conj().T)
SPIN1_Y = -0.5j * (SPIN1_P - SPIN1_P.conj().T)
SPIN1 = {"x": SPIN1_X, "y": SPIN1_Y, "z": SPIN1_Z}

# rotation of singlet into |00> used by the triplet-projection measurement
_BASIS_CHANGE = np.stack(
    [SINGLET, TRIPLET_0, TRIPLET_M1, TRIPLET_P1], axis=0
).astype(complex)  # rows: image basis; V |singlet> = |00> etc.

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass
class QuquartChain:
    state: StateVector
    left_edge_ops: str = ""    # accumulated symmetry labels, bookkeeping
    right_edge_ops: str = ""

    @property
    def length(self) -> int:
        return self.state.register.n_sites


def prepare_singlet_chain(length: int, edge_left=None, edge_right=None) -> QuquartChain:
    """Chain of (o_i, n_{i+1}) singlets built from the native gate set:
    pattern initialization, intra-ququart SWAPs and inter-ququart CNOTs.

    ``edge_left`` / ``edge_right`` are qubit 2-vectors for the dangling
    n_0 and o_{L-1} qubits (default |0>).
    """
    if length < 2:
        raise ValueError("chain needs at least two sites")
    e_l = np.array([1.0, 0.0], dtype=complex) if edge_left is None \
        else np.asarray(edge_left, dtype=complex)
    e_r = np.array([1.0, 0.0], dtype=complex) if edge_right is None \
        else np.asarray(edge_right, dtype=complex)
    e_l = e_l / np.linalg.norm(e_l)
    e_r = e_r / np.linalg.norm(e_r)

    minus = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)
    one = np.array([0.0, 1.0], dtype=complex)

    site_vectors = []
    for i in range(length):
        o = minus if i < length - 1 else e_r
        n = e_l if i == 0 else one
        site_vectors.append(np.kron(o, n))
    amps = site_vectors[0]
    for v in site_vectors[1:]:
        amps = np.kron(amps, v)
    state = StateVector(QuditRegister((4,) * length), amps)

    swap = gates.intra_swap(phase_corrected=True)
    cnot_oo = gates.inter_cnot_oo()
    for i in range(length - 2, -1, -1):
        state = apply_unitary(state, swap, [i + 1])
        state = apply_unitary(state, cnot_oo, [i, i + 1])
        state = apply_unitary(state, swap, [i + 1])
    return QuquartChain(state)


def singlet_triplet_projectors():
    """{P_singlet, P_triplet} on one ququart, as the conjugated |00>
    measurement: rotate the singlet into |00>, measure, rotate back."""
    v = Unitary(_BASIS_CHANGE)
    p0 = v.matrix.conj().T @ np.diag([1.0, 0, 0, 0]).astype(complex) @ v.matrix
    pbar = np.eye(4) - p0
    return Projector(p0), Projector(pbar)


def triplet_projection(chain: QuquartChain, site: int, rng: np.random.Generator):
    """Singlet/triplet measurement of one site.  Returns (outcome, chain)
    with outcome in {"Singlet", "Triplet"}."""
    ps, pt = singlet_triplet_projectors()
    outcome, _, post = measure_projective(chain.state, [ps, pt], [site], rng)
    label = "Singlet" if outcome == 0 else "Triplet"
    return label, QuquartChain(post, chain.left_edge_ops, chain.right_edge_ops)


def triplet_branches(chain: QuquartChain, site: int):
    ps, pt = singlet_triplet_projectors()
    return measure_branches(chain.state, [ps, pt], [site])


def project_all_sites(chain: QuquartChain, rng: np.random.Generator):
    """Measure every site; returns (record, chain)."""
    record = []
    for site in range(chain.length):
        outcome, chain = triplet_projection(chain, site, rng)
        record.append(outcome)
    return record, chain


def postselect_all_triplet(chain: QuquartChain) -> QuquartChain:
    """Deterministic all-triplet branch (for oracle checks)."""
    _, pt = singlet_triplet_projectors()
    state = chain.state
    amps = state.amplitudes
    for site in range(chain.length):
        amps = _apply_site_matrix(amps, chain.length, pt.matrix, site)
    norm = np.linalg.norm(amps)
    if norm < 1e-12:
        raise ValueError("state has no all-triplet component")
    return QuquartChain(StateVector(state.register, amps / norm),
                        chain.left_edge_ops, chain.right_edge_ops)


def _apply_site_matrix(amps, length, matrix, site):
    tensor = amps.reshape((4,) * length)
    tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [site])),
                         0, site)
    return tensor.reshape(-1)


def rearrange(chain: QuquartChain, record) -> QuquartChain:
    """Drop singlet-projected sites (they are exact product singlets)."""
    if len(record) != chain.length:
        raise ValueError("need one outcome per site")
    keep = [i for i, r in enumerate(record) if r == "Triplet"]
    if len(keep) == chain.length:
        return chain
    tensor = chain.state.amplitudes.reshape((4,) * chain.length)
    removed = [i for i in range(chain.length) if i not in keep]
    for site in sorted(removed, reverse=True):
        tensor = np.tensordot(SINGLET.conj(), tensor, axes=([0], [site]))
    amps = tensor.reshape(-1)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-9:
        raise AssertionError(
            f"singlet site was not disentangled (norm {norm})")
    reg = QuditRegister((4,) * len(keep))
    return QuquartChain(StateVector(reg, amps / norm),
                        chain.left_edge_ops, chain.right_edge_ops)


def to_spin1(chain: QuquartChain) -> np.ndarray:
    """Embed an all-triplet chain into the 3^L spin-1 space."""
    tensor = chain.state.amplitudes.reshape((4,) * chain.length)
    for site in range(chain.length):
        tensor = np.moveaxis(
            np.tensordot(TRIPLET_ISOMETRY.conj().T, tensor, axes=([1], [site])),
            0, site)
    vec = tensor.reshape(-1)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("chain has singlet-sector support; project it first")
    return vec / norm


def _spin1_site_op(vec, length, op, site):
    tensor = vec.reshape((3,) * length)
    tensor = np.moveaxis(np.tensordot(op, tensor, axes=([1], [site])), 0, site)
    return tensor.reshape(-1)


@dataclass(frozen=True)
class StringOrderSpec:
    alpha: str
    i: int
    j: int

    def __post_init__(self):
        if self.alpha not in ("x", "y", "z"):
            raise ValueError("alpha must be one of x, y, z")
        if not self.i < self.j:
            raise ValueError("need i < j")


def string_order(chain: QuquartChain, spec: StringOrderSpec) -> float:
    """<S^a_i exp(i pi sum_{l=i+1}^{j-1} S^a_l) S^a_j> on the spin-1 chain."""
    if spec.j >= chain.length:
        raise ValueError("string endpoint outside the chain")
    vec = to_spin1(chain)
    s = SPIN1[spec.alpha]
    phase = expm(1j * np.pi * s)
    out = _spin1_site_op(vec, chain.length, s, spec.i)
    for l in range(spec.i + 1, spec.j):
        out = _spin1_site_op(out, chain.length, phase, l)
    out = _spin1_site_op(out, chain.length, s, spec.j)
    value = np.vdot(vec, out)
    return float(value.real)


def _bond_hamiltonian() -> np.ndarray:
    ss = sum(np.kron(SPIN1[a], SPIN1[a]) for a in "xyz")
    return ss + (ss @ ss) / 3.0


def aklt_energy(chain: QuquartChain, per_bond: bool = True) -> float:
    """<H> with H = sum_bonds [S.S + (S.S)^2 / 3] on the spin-1 chain."""
    vec = to_spin1(chain)
    length = chain.length
    if length < 2:
        raise ValueError("energy needs at least two sites")
    h = _bond_hamiltonian()
    total = 0.0
    tensor = vec.reshape((3,) * length)
    for bond in range(length - 1):
        t = np.moveaxis(tensor, (bond, bond + 1), (0, 1)).reshape(9, -1)
        total += float(np.real(np.sum(t.conj() * (h @ t))))
    return total / (length - 1) if per_bond else total


def symmetry_string(chain: QuquartChain, axis: str) -> QuquartChain:
    """Apply the global spin-1 pi rotation about ``axis`` as intra-ququart
    (u x u) rotations on every site."""
    u = expm(1j * np.pi * _PAULI[axis] / 2)  # = i sigma_axis
    site_u = Unitary(np.kron(u, u))
    state = chain.state
    for site in range(chain.length):
        state = apply_unitary(state, site_u, [site])
    return QuquartChain(state, chain.left_edge_ops, chain.right_edge_ops)


# ---------------------------------------------------------- fusion/fission

_BELL_LABELS = ("I", "X", "Y", "Z")


def _bell_projectors(pos_a: int, pos_b: int):
    """Projectors onto (O x I)|singlet> of qubits (pos_a, pos_b) in the
    4-qubit view of a ququart pair, identity on the other two qubits."""
    projs = []
    for label in _BELL_LABELS:
        op = np.eye(2, dtype=complex) if label == "I" else _PAULI[label.lower()]
        bell2 = np.zeros(4, dtype=complex)
        bell2[1] = 1 / np.sqrt(2)   # |01>
        bell2[2] = -1 / np.sqrt(2)  # |10>
        bell2 = np.kron(op, np.eye(2)) @ bell2
        p2 = np.outer(bell2, bell2.conj())
        projs.append(Projector(gates.qubit_gate_on_pair(p2, pos_a, pos_b)))
    return projs


def fusion(seg_a: QuquartChain, seg_b: QuquartChain, rng: np.random.Generator):
    """Merge two post-selected AKLT segments.

    Bell measurement on (right edge qubit of A, left edge qubit of B) =
    (o of A's last site, n of B's first site); a non-singlet outcome O is
    undone by the symmetry string over segment A, transforming only A's
    left edge.  Both boundary sites are then re-projected and singlet
    outcomes dropped.  Returns (chain, removed_count, outcome_label).
    """
    la, lb = seg_a.length, seg_b.length
    reg = QuditRegister((4,) * (la + lb))
    amps = np.kron(seg_a.state.amplitudes, seg_b.state.amplitudes)
    state = StateVector(reg, amps)

    projs = _bell_projectors(0, 3)  # o of first atom, n of second atom
    outcome, _, state = measure_projective(state, projs, [la - 1, la], rng)
    label = _BELL_LABELS[outcome]
    chain = QuquartChain(state, seg_a.left_edge_ops, seg_b.right_edge_ops)

    if label != "I":
        u = expm(1j * np.pi * _PAULI[label.lower()] / 2)
        site_u = Unitary(np.kron(u, u))
        st = chain.state
        for site in range(la):
            st = apply_unitary(st, site_u, [site])
        chain = QuquartChain(st, label + chain.left_edge_ops,
                             chain.right_edge_ops)

    record = ["Triplet"] * (la + lb)
    removed = 0
    for site in (la - 1, la):
        out, chain = triplet_projection(chain, site, rng)
        record[site] = out
        if out == "Singlet":
            removed += 1
    chain = rearrange(chain, record)
    return chain, removed, label


def fission(chain: QuquartChain, drop: int, rng: np.random.Generator):
    """Remove the right-most ``drop`` sites by intra-ququart Bell
    measurements.  Returns (shortened chain, outcome labels right-to-left).

    The shortened chain is an AKLT state whose right edge carries the
    product of the outcome Paulis (recorded, right-most site first).
    """
    if drop < 0 or drop >= chain.length:
        raise ValueError("drop must be in [0, length)")
    if drop == 0:
        return chain, []
    labels = []
    state = chain.state
    length = chain.length
    # intra-site Bell projectors: singlet and O.singlet on the (o, n) pair
    projs = []
    for label in _BELL_LABELS:
        op = np.eye(2, dtype=complex) if label == "I" else _PAULI[label.lower()]
        vec = np.kron(op, np.eye(2)) @ SINGLET.astype(complex)
        projs.append(Projector(np.outer(vec, vec.conj())))
    for site in range(length - 1, length - 1 - drop, -1):
        outcome, _, state = measure_projective(state, projs, [site], rng)
        labels.append(_BELL_LABELS[outcome])
    # contract the measured (product) sites away
    tensor = state.amplitudes.reshape((4,) * length)
    for k, site in enumerate(range(length - 1, length - 1 - drop, -1)):
        label = labels[k]
        op = np.eye(2, dtype=complex) if label == "I" else _PAULI[label.lower()]
        vec = np.kron(op, np.eye(2)) @ SINGLET.astype(complex)
        tensor = np.tensordot(vec.conj(), tensor, axes=([0], [site]))
    amps = tensor.reshape(-1)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-9:
        raise AssertionError(f"dropped site not disentangled (norm {norm})")
    reg = QuditRegister((4,) * (length - drop))
    new_right = "".join(labels) + chain.right_edge_ops
    return QuquartChain(StateVector(reg, amps / norm),
                        chain.left_edge_ops, new_right), labels


# ------------------------------------------------------- adaptive dynamics

@dataclass
class MiptResult:
    active_density: np.ndarray   # per cycle, shape (cycles + 1,)
    final_active: np.ndarray     # per site bool


def mipt_run(length: int, p_reset: float, cycles: int,
             rng: np.random.Generator) -> MiptResult:
    """One trajectory of the reset-driven adaptive circuit.

    Per cycle: brickwork Haar-random two-ququart unitaries on pairs with
    at least one active site, a |00> QND measurement of every site
    (bright = inactive), then a reset to |00> with probability ``p_reset``
    per site (realized as a computational-basis measurement followed by a
    repumping permutation).
    """
    if length < 2 or length > 12:
        raise ValueError("length must be in [2, 12] at desk scale")
    if not 0.0 <= p_reset <= 1.0:
        raise ValueError("reset probability outside [0, 1]")
    reg = QuditRegister((4,) * length)
    state = basis_state(reg, (3,) * length)  # all sites dark/active
    active = np.ones(length, dtype=bool)
    density = [active.mean()]

    p_bright = Projector(np.diag([1.0, 0, 0, 0]))
    p_dark = Projector(np.diag([0.0, 1, 1, 1]))
    level_projs = [Projector(np.diag([float(k == l) for k in range(4)]))
                   for l in range(4)]

    for _ in range(cycles):
        for parity in (0, 1):
            for a in range(parity, length - 1, 2):
                if not (active[a] or active[a + 1]):
                    continue
                u = random_unitary(16, rng)
                state = apply_unitary(state, u, [a, a + 1])
        for site in range(length):
            outcome, _, state = measure_projective(
                state, [p_bright, p_dark], [site], rng)
            active[site] = outcome == 1
        for site in range(length):
            if rng.random() >= p_reset:
                continue
            outcome, _, state = measure_projective(
                state, level_projs, [site], rng)
            if outcome != 0:
                order = list(range(4))
                order[0], order[outcome] = order[outcome], order[0]
                state = apply_unitary(state, Unitary(np.eye(4)[order]), [site])
            active[site] = False
        density.append(active.mean())
    return MiptResult(np.array(density), active.copy())


def mipt_steady_state(length: int, p_reset: float, cycles: int,
                      trajectories: int, seed: int,
                      discard_fraction: float = 0.5) -> float:
    """Mean active density over the tail of many trajectories."""
    densities = []
    for t in range(trajectories):
        rng = np.random.default_rng((seed, t))
        res = mipt_run(length, p_reset, cycles, rng)
        tail = res.active_density[int(len(res.active_density) * discard_fraction):]
        densities.append(tail.mean())
    return float(np.mean(densities))
