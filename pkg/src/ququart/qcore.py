"""Dense complex state engine for registers of mixed-dimension qudits.

Site convention: the leftmost site in ``dims`` is the most significant
index of the flattened amplitude array, i.e. for dims (d0, d1) the basis
state |a, b> sits at flat index a * d1 + b.  All operations are pure
functions; randomness enters only through an explicit ``numpy`` Generator.
"""

from dataclasses import dataclass

import numpy as np

# States further than NORM_REJECT from unit norm/trace are rejected;
# anything inside NORM_SNAP is silently renormalized.
NORM_REJECT = 1e-6
NORM_SNAP = 1e-9
UNITARY_ATOL = 1e-9
CPTP_ATOL = 1e-9
PROJECTOR_ATOL = 1e-9


class RegisterMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class QuditRegister:
    """Ordered collection of local dimensions, one per site."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise ValueError("register needs at least one site")
        if any(d < 2 for d in dims):
            raise ValueError(f"local dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def flat_index(self, digits) -> int:
        """Flat amplitude index of the product basis state |digits>."""
        if len(digits) != self.n_sites:
            raise ValueError("one digit per site required")
        idx = 0
        for d, dim in zip(digits, self.dims):
            if not 0 <= d < dim:
                raise ValueError(f"digit {d} out of range for dim {dim}")
            idx = idx * dim + d
        return idx


def ququart_register(n_sites: int) -> QuditRegister:
    return QuditRegister((4,) * n_sites)


@dataclass
class StateVector:
    register: QuditRegister
    amplitudes: np.ndarray
    # post-selection branches may carry their raw weight; skip norm checks then
    normalized: bool = True

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != self.register.total_dim:
            raise RegisterMismatchError(
                f"amplitude length {self.amplitudes.size} != register dim "
                f"{self.register.total_dim}"
            )
        if self.normalized:
            norm = np.linalg.norm(self.amplitudes)
            if abs(norm - 1.0) > NORM_REJECT:
                raise ValueError(f"state norm {norm} too far from 1")
            if abs(norm - 1.0) > NORM_SNAP:
                self.amplitudes = self.amplitudes / norm

    @property
    def dim(self) -> int:
        return self.register.total_dim

    def to_density_matrix(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(self.register, np.outer(a, a.conj()))

    def copy(self) -> "StateVector":
        return StateVector(self.register, self.amplitudes.copy(), self.normalized)


@dataclass
class DensityMatrix:
    register: QuditRegister
    elements: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        d = self.register.total_dim
        self.elements = np.asarray(self.elements, dtype=complex).reshape(d, d)
        if self.normalized:
            if not np.allclose(self.elements, self.elements.conj().T, atol=1e-10):
                raise ValueError("density matrix not Hermitian")
            tr = np.trace(self.elements).real
            if abs(tr - 1.0) > NORM_REJECT:
                raise ValueError(f"trace {tr} too far from 1")
            if abs(tr - 1.0) > NORM_SNAP:
                self.elements = self.elements / tr

    @property
    def dim(self) -> int:
        return self.register.total_dim

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.register, self.elements.copy(), self.normalized)


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("unitary must be square")
        dev = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]))
        if dev > UNITARY_ATOL:
            raise ValueError(f"matrix not unitary (Frobenius deviation {dev:.2e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ValueError("Kraus operators must share a square shape")
        total = sum(k.conj().T @ k for k in ops)
        if np.linalg.norm(total - np.eye(d)) > CPTP_ATOL:
            raise ValueError("Kraus operators are not trace preserving (CPTP)")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=complex)
        if np.linalg.norm(p @ p - p) > PROJECTOR_ATOL:
            raise ValueError("matrix is not idempotent")
        if np.linalg.norm(p - p.conj().T) > PROJECTOR_ATOL:
            raise ValueError("matrix is not Hermitian")
        object.__setattr__(self, "matrix", p)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def basis_state(register: QuditRegister, digits) -> StateVector:
    amp = np.zeros(register.total_dim, dtype=complex)
    amp[register.flat_index(digits)] = 1.0
    return StateVector(register, amp)


def _check_targets(register: QuditRegister, targets, op_dim: int):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target index in {targets}")
    for t in targets:
        if not 0 <= t < register.n_sites:
            raise ValueError(f"target {t} outside register of {register.n_sites} sites")
    sub = int(np.prod([register.dims[t] for t in targets]))
    if sub != op_dim:
        raise RegisterMismatchError(
            f"operator dim {op_dim} != product of target dims {sub}"
        )
    return targets


def _apply_matrix_to_vector(amps, dims, matrix, targets):
    """Apply ``matrix`` to the tensor axes ``targets`` of a flat vector."""
    n = len(dims)
    tensor = amps.reshape(dims)
    rest = [ax for ax in range(n) if ax not in targets]
    perm = list(targets) + rest
    tensor = np.transpose(tensor, perm)
    sub = int(np.prod([dims[t] for t in targets]))
    other = tensor.size // sub
    tensor = tensor.reshape(sub, other)
    tensor = matrix @ tensor
    tensor = tensor.reshape([dims[t] for t in targets] + [dims[a] for a in rest])
    inv = np.argsort(perm)
    return np.transpose(tensor, inv).reshape(-1)


def apply_unitary(state, u: Unitary, targets):
    """U on the target sites, identity elsewhere.  Works for both kinds."""
    targets = _check_targets(state.register, targets, u.dim)
    dims = list(state.register.dims)
    if isinstance(state, StateVector):
        amps = _apply_matrix_to_vector(state.amplitudes, dims, u.matrix, targets)
        return StateVector(state.register, amps, state.normalized)
    if isinstance(state, DensityMatrix):
        d = state.dim
        rho = state.elements
        # rows then columns: rho -> (U x I) rho (U x I)^dagger
        rho = _apply_matrix_to_vector(rho.reshape(-1), dims + dims, u.matrix, targets).reshape(d, d)
        col_targets = [t + len(dims) for t in targets]
        rho = _apply_matrix_to_vector(
            rho.reshape(-1), dims + dims, u.matrix.conj(), col_targets
        ).reshape(d, d)
        return DensityMatrix(state.register, rho, state.normalized)
    raise TypeError(f"unsupported state type {type(state)}")


def apply_channel(rho: DensityMatrix, ch: KrausChannel, targets) -> DensityMatrix:
    """rho -> sum_k K rho K^dagger on the target sites."""
    targets = _check_targets(rho.register, targets, ch.dim)
    dims = list(rho.register.dims)
    d = rho.dim
    out = np.zeros((d, d), dtype=complex)
    col_targets = [t + len(dims) for t in targets]
    for k in ch.operators:
        term = _apply_matrix_to_vector(
            rho.elements.reshape(-1), dims + dims, k, targets
        ).reshape(d, d)
        term = _apply_matrix_to_vector(
            term.reshape(-1), dims + dims, k.conj(), col_targets
        ).reshape(d, d)
        out += term
    return DensityMatrix(rho.register, out, rho.normalized)


def _check_projector_set(projectors, dim):
    total = sum(p.matrix for p in projectors)
    if np.linalg.norm(total - np.eye(dim)) > PROJECTOR_ATOL:
        raise ValueError("projectors do not resolve the identity on the targets")


def measure_branches(state, projectors, targets):
    """Deterministic variant: all (probability, post-state) branches.

    Branch states are renormalized; zero-probability branches are kept with
    a zero-filled state so outcome indices stay aligned.
    """
    dim = int(np.prod([state.register.dims[int(t)] for t in targets]))
    _check_projector_set(projectors, dim)
    branches = []
    for proj in projectors:
        # embed projector as a (non-unitary) operator application
        if isinstance(state, StateVector):
            amps = _apply_matrix_to_vector(
                state.amplitudes, list(state.register.dims), proj.matrix,
                _check_targets(state.register, targets, proj.dim),
            )
            p = float(np.vdot(amps, amps).real)
            post = None
            if p > 1e-300:
                post = StateVector(state.register, amps / np.sqrt(p))
            branches.append((p, post))
        elif isinstance(state, DensityMatrix):
            dims = list(state.register.dims)
            tg = _check_targets(state.register, targets, proj.dim)
            d = state.dim
            rho = _apply_matrix_to_vector(
                state.elements.reshape(-1), dims + dims, proj.matrix, tg
            ).reshape(d, d)
            rho = _apply_matrix_to_vector(
                rho.reshape(-1), dims + dims, proj.matrix.conj(),
                [t + len(dims) for t in tg],
            ).reshape(d, d)
            p = float(np.trace(rho).real)
            post = DensityMatrix(state.register, rho / p) if p > 1e-300 else None
            branches.append((p, post))
        else:
            raise TypeError(f"unsupported state type {type(state)}")
    total = sum(p for p, _ in branches)
    if abs(total - 1.0) > 1e-8 and getattr(state, "normalized", True):
        raise ValueError(f"branch probabilities sum to {total}, not 1")
    return branches


def measure_projective(state, projectors, targets, rng: np.random.Generator):
    """Sample one outcome with Born probability.

    Returns (outcome index, probability, post-measurement state).
    """
    branches = measure_branches(state, projectors, targets)
    probs = np.array([max(p, 0.0) for p, _ in branches])
    probs = probs / probs.sum()
    outcome = int(rng.choice(len(branches), p=probs))
    p, post = branches[outcome]
    return outcome, p, post


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on the kept sites (in their original order)."""
    keep = sorted(int(k) for k in keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    dims = rho.register.dims
    n = len(dims)
    if any(not 0 <= k < n for k in keep):
        raise ValueError("keep indices out of range")
    tensor = rho.elements.reshape(list(dims) * 2)
    traced = [ax for ax in range(n) if ax not in keep]
    for ax in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=ax, axis2=ax + tensor.ndim // 2)
    sub = int(np.prod([dims[k] for k in keep]))
    reg = QuditRegister(tuple(dims[k] for k in keep))
    return DensityMatrix(reg, tensor.reshape(sub, sub), rho.normalized)


def fidelity(a, b) -> float:
    """|<a|b>|^2 for pure states, Uhlmann fidelity for mixed ones."""
    if a.register.dims != b.register.dims:
        raise RegisterMismatchError("states live on different registers")
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
    if isinstance(a, StateVector):
        a, b = b, a
    if isinstance(b, StateVector):
        psi = b.amplitudes
        return float(np.real(psi.conj() @ a.elements @ psi))
    # mixed-mixed: (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via eigenbases
    rho, sigma = a.elements, b.elements
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    sq = (v * np.sqrt(w)) @ v.conj().T
    inner = sq @ sigma @ sq
    ev = np.linalg.eigvalsh(inner)
    ev = np.clip(ev, 0.0, None)
    return float(np.sum(np.sqrt(ev)) ** 2)


def random_unitary(dim: int, rng: np.random.Generator) -> Unitary:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Unitary(q)


def random_pure_state(register: QuditRegister, rng: np.random.Generator) -> StateVector:
    z = rng.standard_normal(register.total_dim) + 1j * rng.standard_normal(register.total_dim)
    return StateVector(register, z / np.linalg.norm(z))


def random_density_matrix(register: QuditRegister, rng: np.random.Generator,
                          rank: int | None = None) -> DensityMatrix:
    d = register.total_dim
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityMatrix(register, m / np.trace(m))
