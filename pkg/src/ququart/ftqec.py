"""Pauli-frame Monte Carlo for flag-based quantum error correction.

Codes are stabilizer codes given by explicit Pauli strings; syndrome
extraction uses one ancilla pair per stabilizer (syndrome qubit prepared
in |+>, controlled-Pauli gates onto the data, and a flag qubit coupled by
two CNOTs placed after the first and before the last data gate).  In the
ququart mode the syndrome and flag qubits are the o and n qubits of one
atom, so the syndrome-flag CNOTs are intra-ququart gates and their fault
rate is set to zero; faults still propagate through them.

Fault model, one noisy error-correction round:
  * each data qubit starts with a uniform random Pauli w.p. p,
  * each ancilla/flag preparation draws a uniform random Pauli w.p. p,
  * after each two-qubit gate, a uniform random two-qubit Pauli w.p. p,
  * each measurement outcome flips w.p. p.

The round is adaptive, in the usual single-flag fashion: a first flagged
pass measures every stabilizer; if every syndrome and flag bit is trivial
the round ends with no correction.  Otherwise a second, bare (flag-less)
pass re-measures all stabilizers, also noisily, and the correction is
looked up from the flag pattern of pass one plus the syndrome of pass
two.  The lookup table comes from exhaustive single-fault enumeration:
any fault raising a flag keys a flag-conditioned entry under the true
syndrome of its residual; everything else decodes through the min-weight
syndrome table.  A perfect round then closes the trial; failure means the
final residual acts as a logical operator.
"""

from dataclasses import dataclass

import numpy as np

# ------------------------------------------------------------ Pauli algebra

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_CHAR = {v: k for k, v in _CHAR_TO_BITS.items()}


@dataclass(frozen=True)
class PauliOperator:
    """Phase-free n-qubit Pauli in symplectic (x, z) bit representation."""

    x: tuple
    z: tuple

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        pairs = [_CHAR_TO_BITS[c] for c in s.upper()]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls((0,) * n, (0,) * n)

    def to_string(self) -> str:
        return "".join(_BITS_TO_CHAR[(a, b)] for a, b in zip(self.x, self.z))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def weight(self) -> int:
        return sum(a | b for a, b in zip(self.x, self.z))

    def commutes(self, other: "PauliOperator") -> bool:
        s = sum(a * d + c * b for a, c, b, d in
                zip(self.x, self.z, other.x, other.z))
        return s % 2 == 0

    def compose(self, other: "PauliOperator") -> "PauliOperator":
        return PauliOperator(
            tuple(a ^ b for a, b in zip(self.x, other.x)),
            tuple(a ^ b for a, b in zip(self.z, other.z)),
        )


def propagate(frame: PauliOperator, gate: tuple) -> PauliOperator:
    """Conjugate a Pauli frame through a Clifford gate.

    Gates: ("cnot", c, t), ("h", q), ("s", q), ("cz", a, b),
    ("prep", q) resets a qubit's frame, ("measure", q) leaves it.
    """
    x, z = list(frame.x), list(frame.z)
    kind = gate[0]
    if kind == "cnot":
        c, t = gate[1], gate[2]
        x[t] ^= x[c]
        z[c] ^= z[t]
    elif kind == "h":
        q = gate[1]
        x[q], z[q] = z[q], x[q]
    elif kind == "s":
        q = gate[1]
        z[q] ^= x[q]
    elif kind == "cz":
        a, b = gate[1], gate[2]
        z[b] ^= x[a]
        z[a] ^= x[b]
    elif kind == "prep":
        q = gate[1]
        x[q] = z[q] = 0
    elif kind == "measure":
        pass
    else:
        raise ValueError(f"unknown gate {gate}")
    return PauliOperator(tuple(x), tuple(z))


# ------------------------------------------------------------------- codes

@dataclass
class StabilizerCode:
    name: str
    n: int
    k: int
    d: int
    stabilizers: list
    logical_x: list
    logical_z: list

    def __post_init__(self):
        for s in self.stabilizers:
            if s.n != self.n:
                raise ValueError("stabilizer length mismatch")
        for i, a in enumerate(self.stabilizers):
            for b in self.stabilizers[i + 1:]:
                if not a.commutes(b):
                    raise ValueError("stabilizers do not mutually commute")
        for logical in (*self.logical_x, *self.logical_z):
            for s in self.stabilizers:
                if not logical.commutes(s):
                    raise ValueError("logical does not commute with stabilizers")
        for lx, lz in zip(self.logical_x, self.logical_z):
            if lx.commutes(lz):
                raise ValueError("X_L must anticommute with its Z_L")

    def syndrome_of(self, error: PauliOperator) -> tuple:
        return tuple(0 if error.commutes(s) else 1 for s in self.stabilizers)

    def is_logical(self, error: PauliOperator) -> bool:
        """True if a trivial-syndrome residual acts on the code space."""
        for logical in (*self.logical_x, *self.logical_z):
            if not error.commutes(logical):
                return True
        return False


def code_513() -> StabilizerCode:
    P = PauliOperator.from_string
    return StabilizerCode(
        "513", 5, 1, 3,
        [P("XZZXI"), P("IXZZX"), P("XIXZZ"), P("ZXIXZ")],
        [P("XXXXX")], [P("ZZZZZ")],
    )


def code_713() -> StabilizerCode:
    P = PauliOperator.from_string
    return StabilizerCode(
        "713", 7, 1, 3,
        [P("XXXXIII"), P("IXXIXXI"), P("IIXXIXX"),
         P("ZZZZIII"), P("IZZIZZI"), P("IIZZIZZ")],
        [P("XXXXXXX")], [P("ZZZZZZZ")],
    )


def get_code(name: str) -> StabilizerCode:
    codes = {"513": code_513, "713": code_713}
    if name not in codes:
        raise ValueError(f"unknown code '{name}'")
    return codes[name]()


# -------------------------------------------------------------- schedules

@dataclass(frozen=True)
class FlagExtractionSchedule:
    """Gate list for one stabilizer: ('cp', data_qubit, px, pz) entries with
    ('fcnot',) markers where the syndrome-flag CNOTs sit."""

    stabilizer_index: int
    ops: tuple

    @classmethod
    def standard(cls, code: StabilizerCode, index: int) -> "FlagExtractionSchedule":
        stab = code.stabilizers[index]
        cps = [("cp", q, stab.x[q], stab.z[q])
               for q in range(code.n) if stab.x[q] or stab.z[q]]
        if len(cps) < 3:
            raise ValueError("flag placement expects weight >= 3 stabilizers")
        ops = [cps[0], ("fcnot",), *cps[1:-1], ("fcnot",), cps[-1]]
        return cls(index, tuple(ops))


def standard_schedules(code: StabilizerCode) -> list:
    return [FlagExtractionSchedule.standard(code, i)
            for i in range(len(code.stabilizers))]


# -------------------------------------------------- single-frame extraction

def run_extraction(code: StabilizerCode, schedules, fault_sample=None):
    """Walk the full extraction round with at most one injected fault.

    ``fault_sample`` maps a location tag to a fault: data locations
    ("data", q) -> (px, pz); prep ("prep_anc"|"prep_flag", i) -> (px, pz);
    gates ("gate", i, g) -> (pa_x, pa_z, pd_x, pd_z) applied after gate g
    of stabilizer i (for fcnot gates the second pair lands on the flag);
    measurements ("meas_anc"|"meas_flag", i) -> 1 to flip.

    Returns (syndrome bits, flag bits, residual data PauliOperator).
    """
    fault_sample = fault_sample or {}
    n = code.n
    xd = [0] * n
    zd = [0] * n
    for q in range(n):
        fx, fz = fault_sample.get(("data", q), (0, 0))
        xd[q] ^= fx
        zd[q] ^= fz
    syndromes = []
    flags = []
    for sched in schedules:
        i = sched.stabilizer_index
        ax, az = fault_sample.get(("prep_anc", i), (0, 0))
        fxq, fzq = fault_sample.get(("prep_flag", i), (0, 0))
        for g, op in enumerate(sched.ops):
            if op[0] == "cp":
                _, q, px, pz = op
                # target error anticommuting with P adds Z on the ancilla;
                # ancilla X applies P to the data (pre-gate values)
                az_new = az ^ (xd[q] & pz) ^ (zd[q] & px)
                xd_new = xd[q] ^ (ax & px)
                zd_new = zd[q] ^ (ax & pz)
                az, xd[q], zd[q] = az_new, xd_new, zd_new
                fault = fault_sample.get(("gate", i, g))
                if fault:
                    ax ^= fault[0]
                    az ^= fault[1]
                    xd[q] ^= fault[2]
                    zd[q] ^= fault[3]
            elif op[0] == "fcnot":
                fxq_new = fxq ^ ax
                az_new = az ^ fzq
                fxq, az = fxq_new, az_new
                fault = fault_sample.get(("gate", i, g))
                if fault:
                    ax ^= fault[0]
                    az ^= fault[1]
                    fxq ^= fault[2]
                    fzq ^= fault[3]
            else:
                raise ValueError(f"unknown schedule op {op}")
        syndromes.append(az ^ fault_sample.get(("meas_anc", i), 0))
        flags.append(fxq ^ fault_sample.get(("meas_flag", i), 0))
    residual = PauliOperator(tuple(xd), tuple(zd))
    return tuple(syndromes), tuple(flags), residual


def enumerate_fault_locations(code: StabilizerCode, schedules,
                              include_flag_gates: bool = True):
    """All single-fault (location, fault) pairs of the extraction round."""
    singles = [(1, 0), (0, 1), (1, 1)]  # X, Z, Y
    doubles = [(a, b, c, d) for a in (0, 1) for b in (0, 1)
               for c in (0, 1) for d in (0, 1)][1:]  # 15 non-identity pairs
    faults = []
    for q in range(code.n):
        faults += [(("data", q), f) for f in singles]
    for sched in schedules:
        i = sched.stabilizer_index
        faults += [(("prep_anc", i), f) for f in singles]
        faults += [(("prep_flag", i), f) for f in singles]
        for g, op in enumerate(sched.ops):
            if op[0] == "fcnot" and not include_flag_gates:
                continue
            faults += [(("gate", i, g), f) for f in doubles]
        faults.append((("meas_anc", i), 1))
        faults.append((("meas_flag", i), 1))
    return faults


# ----------------------------------------------------------------- decoding

@dataclass
class DecoderTable:
    code: StabilizerCode
    flagged: dict          # (flags, true residual syndrome) -> correction
    perfect: dict          # syndrome -> PauliOperator (min weight)

    def lookup(self, syndrome: tuple, flags: tuple) -> PauliOperator:
        """Correction for a pass-two syndrome given pass-one flags."""
        syndrome = tuple(syndrome)
        flags = tuple(flags)
        if any(flags):
            corr = self.flagged.get((flags, syndrome))
            if corr is not None:
                return corr
        return self.perfect.get(syndrome, PauliOperator.identity(self.code.n))


def _perfect_table(code: StabilizerCode) -> dict:
    """Minimum-weight correction per syndrome, filled by increasing weight."""
    from itertools import combinations, product

    n = code.n
    table = {code.syndrome_of(PauliOperator.identity(n)): PauliOperator.identity(n)}
    singles = {"X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
    weight = 1
    n_syndromes = 2 ** len(code.stabilizers)
    while len(table) < n_syndromes and weight <= n:
        for qubits in combinations(range(n), weight):
            for paulis in product(singles.values(), repeat=weight):
                x = [0] * n
                z = [0] * n
                for q, (px, pz) in zip(qubits, paulis):
                    x[q], z[q] = px, pz
                err = PauliOperator(tuple(x), tuple(z))
                key = code.syndrome_of(err)
                if key not in table:
                    table[key] = err
        weight += 1
    return table


def build_decoder_table(code: StabilizerCode, schedules,
                        ququart_mode: bool = False) -> DecoderTable:
    """Exhaustive single-fault enumeration of the flagged pass.

    Flag-raising faults key flag-conditioned entries under the true
    syndrome of their residual (what a clean second pass reports).
    Collisions keep the smaller-weight residual.
    """
    flagged = {}
    for loc, fault in enumerate_fault_locations(
            code, schedules, include_flag_gates=not ququart_mode):
        syn, flags, residual = run_extraction(code, schedules, {loc: fault})
        if not any(flags):
            continue
        key = (flags, code.syndrome_of(residual))
        if key not in flagged or residual.weight < flagged[key].weight:
            flagged[key] = residual
    return DecoderTable(code, flagged, _perfect_table(code))


def decode(code: StabilizerCode, syndrome, flags, lookup: DecoderTable) -> PauliOperator:
    return lookup.lookup(tuple(syndrome), tuple(flags))


# ------------------------------------------------------- vectorized engine

@dataclass
class TrialConfig:
    p: float
    code: str = "513"
    flag_mode: str = "normal"   # "normal" | "ququart"
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p outside [0, 1]")
        if self.flag_mode not in ("normal", "ququart"):
            raise ValueError(f"unknown flag mode '{self.flag_mode}'")


def _vector_round(code, schedules, p, trials, rng, ququart_mode, forced=None,
                  flag_gate_faults=None):
    """Vectorized noisy extraction round over ``trials`` Pauli frames.

    Random draws happen for every location in both modes (the ququart mode
    only masks the syndrome-flag gate faults), so equal seeds give paired
    samples across modes.  ``forced`` overrides all draws with a fixed
    fault dictionary (used by equivalence tests); ``flag_gate_faults``
    overrides the ququart-mode masking of syndrome-flag gate faults.
    """
    if flag_gate_faults is None:
        flag_gate_faults = not ququart_mode
    n = code.n
    T = trials
    xd = np.zeros((T, n), dtype=np.uint8)
    zd = np.zeros((T, n), dtype=np.uint8)

    def draw_single(tag):
        if forced is not None:
            fx, fz = forced.get(tag, (0, 0))
            return (np.full(T, fx, dtype=np.uint8),
                    np.full(T, fz, dtype=np.uint8))
        mask = rng.random(T) < p
        val = rng.integers(0, 4, T)
        return ((mask & (val & 1).astype(bool)).astype(np.uint8),
                (mask & ((val >> 1) & 1).astype(bool)).astype(np.uint8))

    def draw_double(tag, enabled=True):
        if forced is not None:
            fa, fb, fc, fd = forced.get(tag, (0, 0, 0, 0))
            return tuple(np.full(T, v, dtype=np.uint8) for v in (fa, fb, fc, fd))
        mask = rng.random(T) < p
        val = rng.integers(0, 16, T)
        if not enabled:
            mask = np.zeros_like(mask)
        return tuple(
            (mask & ((val >> s) & 1).astype(bool)).astype(np.uint8)
            for s in range(4)
        )

    def draw_flip(tag):
        if forced is not None:
            return np.full(T, forced.get(tag, 0), dtype=np.uint8)
        return (rng.random(T) < p).astype(np.uint8)

    for q in range(n):
        fx, fz = draw_single(("data", q))
        xd[:, q] ^= fx
        zd[:, q] ^= fz

    syndromes = np.zeros((T, len(schedules)), dtype=np.uint8)
    flags = np.zeros((T, len(schedules)), dtype=np.uint8)
    for col, sched in enumerate(schedules):
        i = sched.stabilizer_index
        ax, az = draw_single(("prep_anc", i))
        fxq, fzq = draw_single(("prep_flag", i))
        for g, op in enumerate(sched.ops):
            if op[0] == "cp":
                _, q, px, pz = op
                az_new = az ^ (xd[:, q] & pz) ^ (zd[:, q] & px)
                xd_new = xd[:, q] ^ (ax & px)
                zd_new = zd[:, q] ^ (ax & pz)
                az, xd[:, q], zd[:, q] = az_new, xd_new, zd_new
                fa, fb, fc, fd = draw_double(("gate", i, g))
                ax = ax ^ fa
                az = az ^ fb
                xd[:, q] ^= fc
                zd[:, q] ^= fd
            else:  # fcnot
                fxq_new = fxq ^ ax
                az_new = az ^ fzq
                fxq, az = fxq_new, az_new
                fa, fb, fc, fd = draw_double(("gate", i, g),
                                             enabled=flag_gate_faults)
                ax = ax ^ fa
                az = az ^ fb
                fxq ^= fc
                fzq ^= fd
        syndromes[:, col] = az ^ draw_flip(("meas_anc", i))
        flags[:, col] = fxq ^ draw_flip(("meas_flag", i))
    return xd, zd, syndromes, flags


def _vector_bare_round(code, schedules, p, rng, xd, zd):
    """Vectorized bare (flag-less) re-measurement pass, mutating the frames."""
    T = xd.shape[0]
    syndromes = np.zeros((T, len(schedules)), dtype=np.uint8)

    def draw_single():
        mask = rng.random(T) < p
        val = rng.integers(0, 4, T)
        return ((mask & (val & 1).astype(bool)).astype(np.uint8),
                (mask & ((val >> 1) & 1).astype(bool)).astype(np.uint8))

    def draw_double():
        mask = rng.random(T) < p
        val = rng.integers(0, 16, T)
        return tuple(
            (mask & ((val >> s) & 1).astype(bool)).astype(np.uint8)
            for s in range(4)
        )

    for col, sched in enumerate(schedules):
        ax, az = draw_single()
        for op in sched.ops:
            if op[0] != "cp":
                continue
            _, q, px, pz = op
            az_new = az ^ (xd[:, q] & pz) ^ (zd[:, q] & px)
            xd_new = xd[:, q] ^ (ax & px)
            zd_new = zd[:, q] ^ (ax & pz)
            az, xd[:, q], zd[:, q] = az_new, xd_new, zd_new
            fa, fb, fc, fd = draw_double()
            ax = ax ^ fa
            az = az ^ fb
            xd[:, q] ^= fc
            zd[:, q] ^= fd
        syndromes[:, col] = az ^ (rng.random(T) < p).astype(np.uint8)
    return syndromes


def _table_arrays(code, schedules, table: DecoderTable):
    """Dense correction arrays indexed by packed (flags, syndrome) bits."""
    m = len(code.stabilizers)
    size = 1 << (2 * m)
    corr_x = np.zeros((size, code.n), dtype=np.uint8)
    corr_z = np.zeros((size, code.n), dtype=np.uint8)
    for key in range(size):
        flg = tuple((key >> (2 * m - 1 - b)) & 1 for b in range(m))
        syn = tuple((key >> (m - 1 - b)) & 1 for b in range(m))
        corr = table.lookup(syn, flg)
        corr_x[key] = corr.x
        corr_z[key] = corr.z
    return corr_x, corr_z


def _perfect_arrays(code, table: DecoderTable):
    m = len(code.stabilizers)
    size = 1 << m
    corr_x = np.zeros((size, code.n), dtype=np.uint8)
    corr_z = np.zeros((size, code.n), dtype=np.uint8)
    for key in range(size):
        syn = tuple((key >> (m - 1 - b)) & 1 for b in range(m))
        corr = table.perfect.get(syn, PauliOperator.identity(code.n))
        corr_x[key] = corr.x
        corr_z[key] = corr.z
    return corr_x, corr_z


@dataclass
class ThresholdPoint:
    p: float
    logical_error_rate: float
    stderr: float
    trials: int


def logical_error_rate(config: TrialConfig) -> ThresholdPoint:
    """Monte Carlo logical error rate of one noisy EC round + perfect round."""
    code = get_code(config.code)
    schedules = standard_schedules(code)
    ququart = config.flag_mode == "ququart"
    table = build_decoder_table(code, schedules, ququart_mode=ququart)
    corr_x, corr_z = _table_arrays(code, schedules, table)
    pcorr_x, pcorr_z = _perfect_arrays(code, table)

    rng = np.random.default_rng(config.seed)
    T = config.trials
    xd, zd, syn, flg = _vector_round(code, schedules, config.p, T, rng, ququart)

    # adaptive second pass, physically executed only on triggered trials
    trigger = (syn.any(axis=1) | flg.any(axis=1))
    xd_before = xd.copy()
    zd_before = zd.copy()
    syn2 = _vector_bare_round(code, schedules, config.p, rng, xd, zd)
    keep = trigger[:, None]
    xd = np.where(keep, xd, xd_before)
    zd = np.where(keep, zd, zd_before)

    m = len(code.stabilizers)
    weights_f = (1 << np.arange(2 * m - 1, m - 1, -1)).astype(np.int64)
    weights_s = (1 << np.arange(m - 1, -1, -1)).astype(np.int64)
    keys = flg.astype(np.int64) @ weights_f + syn2.astype(np.int64) @ weights_s
    keep_u = keep.astype(np.uint8)
    xd ^= corr_x[keys] & keep_u
    zd ^= corr_z[keys] & keep_u

    # perfect round: true syndrome of the residual, min-weight decode
    sx = np.array([s.x for s in code.stabilizers], dtype=np.uint8)
    sz = np.array([s.z for s in code.stabilizers], dtype=np.uint8)
    true_syn = ((xd @ sz.T) + (zd @ sx.T)) % 2
    pkeys = true_syn.astype(np.int64) @ weights_s
    xd ^= pcorr_x[pkeys]
    zd ^= pcorr_z[pkeys]

    # residual now has trivial syndrome; logical failure = anticommutation
    failures = np.zeros(T, dtype=bool)
    for logical in (*code.logical_x, *code.logical_z):
        lx = np.array(logical.x, dtype=np.uint8)
        lz = np.array(logical.z, dtype=np.uint8)
        anti = ((xd @ lz) + (zd @ lx)) % 2
        failures |= anti.astype(bool)
    p_l = float(np.mean(failures))
    stderr = float(np.sqrt(max(p_l * (1 - p_l), 1.0 / T) / T))
    return ThresholdPoint(config.p, p_l, stderr, T)


def threshold_curve(code: str, flag_mode: str, p_grid, trials: int, seed: int):
    return [logical_error_rate(TrialConfig(float(p), code, flag_mode, trials, seed))
            for p in p_grid]


def pseudo_threshold(points) -> float | None:
    """Crossing of p_L(p) with the p_L = p line, linearly interpolated."""
    for a, b in zip(points, points[1:]):
        fa = a.logical_error_rate - a.p
        fb = b.logical_error_rate - b.p
        if fa <= 0 <= fb or fb <= 0 <= fa:
            if fa == fb:
                return a.p
            t = fa / (fa - fb)
            return float(a.p + t * (b.p - a.p))
    return None


# ------------------------------------------------- four-qubit code (2 atoms)



CODE_422_STABILIZERS = (PauliOperator.from_string("XXXX"),
                        PauliOperator.from_string("ZZZZ"))
CODE_422_LOGICALS = {
    "X_L1": PauliOperator.from_string("XIXI"),
    "Z_L1": PauliOperator.from_string("ZZII"),
    "X_L2": PauliOperator.from_string("XXII"),
    "Z_L2": PauliOperator.from_string("ZIZI"),
}

_422_LOGICAL_KETS = {
    "00": ((0, 0, 0, 0), (1, 1, 1, 1)),
    "01": ((0, 0, 1, 1), (1, 1, 0, 0)),
    "10": ((0, 1, 0, 1), (1, 0, 1, 0)),
    "11": ((0, 1, 1, 0), (1, 0, 0, 1)),
}


def encode_422(label: str):
    """Logical state on two data ququarts; data qubits (1..4) are the
    (o1, n1, o2, n2) qubits.  Labels: 00, 01, 10, 11, 0+, 0-."""
    from .qcore import QuditRegister, StateVector

    reg = QuditRegister((4, 4))
    amps = np.zeros(16, dtype=complex)
    if label in _422_LOGICAL_KETS:
        for bits in _422_LOGICAL_KETS[label]:
            idx = (bits[0] << 3) | (bits[1] << 2) | (bits[2] << 1) | bits[3]
            amps[idx] = 1 / np.sqrt(2)
        return StateVector(reg, amps)
    if label in ("0+", "0-"):
        sign = 1.0 if label == "0+" else -1.0
        # clock pi/2 rotation between |00> and |11> on each ququart
        single = np.zeros(4, dtype=complex)
        single[0] = 1 / np.sqrt(2)
        single[3] = sign / np.sqrt(2)
        return StateVector(reg, np.kron(single, single))
    raise ValueError(f"unknown logical label '{label}'")


def prepare_0pm_by_rotation(sign: str):
    """|0+-> via the two-level clock rotation between |00> and |11>."""
    from .qcore import QuditRegister, StateVector, Unitary, apply_unitary, basis_state

    theta = np.pi / 2 if sign == "+" else -np.pi / 2
    rot = np.eye(4, dtype=complex)
    block = np.array([[np.cos(theta / 2), -np.sin(theta / 2)],
                      [np.sin(theta / 2), np.cos(theta / 2)]], dtype=complex)
    rot[np.ix_((0, 3), (0, 3))] = block
    u = Unitary(rot)
    state = basis_state(QuditRegister((4, 4)), (0, 0))
    state = apply_unitary(state, u, [0])
    state = apply_unitary(state, u, [1])
    return state


@dataclass
class Detection422Result:
    accepted: bool
    syndrome: tuple
    flags: tuple
    logical_fidelity: float


def code422_prepare_and_detect(label: str, error: PauliOperator | None = None,
                               rng: np.random.Generator | None = None) -> Detection422Result:
    """Encode, optionally inject a data Pauli, then measure both stabilizers
    through an ancilla ququart with a flag; post-select on trivial syndrome.

    The three-site register is (ancilla, data atom 1, data atom 2); data
    qubit q lives at 4-qubit position q of the data pair.
    """
    from .qcore import (QuditRegister, StateVector, Unitary, apply_unitary,
                        basis_state, fidelity, measure_branches)
    from . import gates

    rng = rng or np.random.default_rng(0)
    data = encode_422(label)
    reg = QuditRegister((4, 4, 4))
    amps = np.kron(np.array([1, 0, 0, 0], dtype=complex), data.amplitudes)
    state = StateVector(reg, amps)

    if error is not None:
        if error.n != 4:
            raise ValueError("error must act on the 4 data qubits")
        mats = {(0, 0): np.eye(2), (1, 0): np.array([[0, 1], [1, 0]]),
                (0, 1): np.diag([1, -1]), (1, 1): np.array([[0, -1j], [1j, 0]])}
        for q in range(4):
            key = (error.x[q], error.z[q])
            if key == (0, 0):
                continue
            site = 1 + q // 2
            pos = q % 2  # o or n of that atom
            m4 = np.kron(mats[key], np.eye(2)) if pos == 0 else np.kron(np.eye(2), mats[key])
            state = apply_unitary(state, Unitary(m4), [site])

    cnot = np.eye(4)[:, [0, 1, 3, 2]].astype(complex)
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

    syndrome = []
    flag_bits = []
    for stab, gate2 in (("X", cnot), ("Z", cz)):
        # ancilla o in |+>, n in |0>
        state = apply_unitary(state, gates.o_rotation(np.pi / 2, "y"), [0])
        ops = []
        for q in range(4):
            site = 1 + q // 2
            # ancilla-o is position 0 of the (ancilla, data-atom) 4-qubit
            # view; data qubit q sits at position 2 (o) or 3 (n)
            u16 = gates.qubit_gate_on_pair(gate2, 0, 2 + (q % 2))
            ops.append((site, u16))
        state = apply_unitary(state, Unitary(ops[0][1]), [0, ops[0][0]])
        state = apply_unitary(state, gates.intra_cnot(phase_corrected=True), [0])
        state = apply_unitary(state, Unitary(ops[1][1]), [0, ops[1][0]])
        state = apply_unitary(state, Unitary(ops[2][1]), [0, ops[2][0]])
        state = apply_unitary(state, gates.intra_cnot(phase_corrected=True), [0])
        state = apply_unitary(state, Unitary(ops[3][1]), [0, ops[3][0]])
        # read ancilla o in the X basis, flag n in Z
        state = apply_unitary(state, gates.o_rotation(-np.pi / 2, "y"), [0])
        from .qcore import Projector
        po = [Projector(np.kron(np.diag([1.0 - b, float(b)]), np.eye(2)))
              for b in (0, 1)]
        branches = measure_branches(state, po, [0])
        probs = np.array([max(p, 0.0) for p, _ in branches])
        outcome = int(rng.choice(2, p=probs / probs.sum()))
        syndrome.append(outcome)
        state = branches[outcome][1]
        pn = [Projector(np.kron(np.eye(2), np.diag([1.0 - b, float(b)])))
              for b in (0, 1)]
        branches = measure_branches(state, pn, [0])
        probs = np.array([max(p, 0.0) for p, _ in branches])
        fbit = int(rng.choice(2, p=probs / probs.sum()))
        flag_bits.append(fbit)
        state = branches[fbit][1]
        # reset the ancilla for the next stabilizer (swap collapsed level
        # with |00>)
        if outcome or fbit:
            lvl = 2 * outcome + fbit
            order = list(range(4))
            order[0], order[lvl] = order[lvl], order[0]
            state = apply_unitary(state, Unitary(np.eye(4)[order]), [0])

    accepted = not any(syndrome) and not any(flag_bits)
    from .qcore import partial_trace
    rho = partial_trace(state.to_density_matrix(), [1, 2])
    ref = encode_422(label)
    fid = float(np.real(ref.amplitudes.conj() @ rho.elements @ ref.amplitudes))
    return Detection422Result(accepted, tuple(syndrome), tuple(flag_bits), fid)
