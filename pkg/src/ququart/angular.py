"""Angular-momentum algebra and the pair-state interaction weighting factors.

Wigner 3j/6j symbols and Clebsch-Gordan coefficients are evaluated from the
Racah sum formulas.  Spins are handled as doubled integers internally so
half-integer arguments stay exact; factorials go through a precomputed
log-factorial table with explicit sign tracking to avoid overflow.

The physics target is the angular weighting of van der Waals interactions
between Rydberg pair states: a dipole-dipole matrix element reduced to its
angular factor (``dtilde``), summed over intermediate pair states to give a
weighting matrix whose diagonal projections yield the relative interaction
strength for every Zeeman pair in the targeted manifold.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, lpmv

_MAX_FACT = 400
_LOG_FACT = gammaln(np.arange(_MAX_FACT + 1) + 1.0)


def _to_doubled(x, name="spin") -> int:
    """Convert a (half-)integer to its doubled-integer representation."""
    d = 2.0 * float(x)
    r = round(d)
    if abs(d - r) > 1e-9:
        raise ValueError(f"{name} value {x} is not a half-integer")
    return int(r)


def _log_fact(n: int) -> float:
    if n < 0:
        raise ValueError("negative factorial argument")
    return _LOG_FACT[n]


def _triangle_ok(dj1, dj2, dj3) -> bool:
    return (abs(dj1 - dj2) <= dj3 <= dj1 + dj2) and (dj1 + dj2 + dj3) % 2 == 0


def _delta_log(dj1, dj2, dj3) -> float:
    """log of the triangle coefficient Delta(j1 j2 j3)."""
    return 0.5 * (
        _log_fact((dj1 + dj2 - dj3) // 2)
        + _log_fact((dj1 - dj2 + dj3) // 2)
        + _log_fact((-dj1 + dj2 + dj3) // 2)
        - _log_fact((dj1 + dj2 + dj3) // 2 + 1)
    )


@lru_cache(maxsize=None)
def _wigner3j_doubled(dj1, dj2, dj3, dm1, dm2, dm3) -> float:
    if dm1 + dm2 + dm3 != 0:
        return 0.0
    if not _triangle_ok(dj1, dj2, dj3):
        return 0.0
    for dj, dm in ((dj1, dm1), (dj2, dm2), (dj3, dm3)):
        if abs(dm) > dj or (dj - dm) % 2 != 0:
            return 0.0
    # Racah sum over t with factorial arguments kept non-negative
    t_min = max(0, (dj2 - dj3 - dm1) // 2, (dj1 - dj3 + dm2) // 2)
    t_max = min(
        (dj1 + dj2 - dj3) // 2,
        (dj1 - dm1) // 2,
        (dj2 + dm2) // 2,
    )
    if t_max < t_min:
        return 0.0
    prefactor_log = _delta_log(dj1, dj2, dj3) + 0.5 * (
        _log_fact((dj1 + dm1) // 2) + _log_fact((dj1 - dm1) // 2)
        + _log_fact((dj2 + dm2) // 2) + _log_fact((dj2 - dm2) // 2)
        + _log_fact((dj3 + dm3) // 2) + _log_fact((dj3 - dm3) // 2)
    )
    total = 0.0
    for t in range(t_min, t_max + 1):
        denom_log = (
            _log_fact(t)
            + _log_fact((dj1 + dj2 - dj3) // 2 - t)
            + _log_fact((dj1 - dm1) // 2 - t)
            + _log_fact((dj2 + dm2) // 2 - t)
            + _log_fact(t - (dj2 - dj3 - dm1) // 2)
            + _log_fact(t - (dj1 - dj3 + dm2) // 2)
        )
        total += (-1.0) ** t * np.exp(prefactor_log - denom_log)
    sign = (-1.0) ** ((dj1 - dj2 - dm3) // 2)
    return sign * total


@lru_cache(maxsize=None)
def _wigner6j_doubled(dj1, dj2, dj3, dj4, dj5, dj6) -> float:
    triads = (
        (dj1, dj2, dj3), (dj1, dj5, dj6), (dj4, dj2, dj6), (dj4, dj5, dj3),
    )
    for tri in triads:
        if not _triangle_ok(*tri):
            return 0.0
    pref_log = sum(_delta_log(*tri) for tri in triads)
    f1 = (dj1 + dj2 + dj3) // 2
    f2 = (dj1 + dj5 + dj6) // 2
    f3 = (dj4 + dj2 + dj6) // 2
    f4 = (dj4 + dj5 + dj3) // 2
    g1 = (dj1 + dj2 + dj4 + dj5) // 2
    g2 = (dj2 + dj3 + dj5 + dj6) // 2
    g3 = (dj3 + dj1 + dj6 + dj4) // 2
    t_min = max(f1, f2, f3, f4)
    t_max = min(g1, g2, g3)
    total = 0.0
    for t in range(t_min, t_max + 1):
        num_log = _log_fact(t + 1)
        den_log = (
            _log_fact(t - f1) + _log_fact(t - f2) + _log_fact(t - f3)
            + _log_fact(t - f4) + _log_fact(g1 - t) + _log_fact(g2 - t)
            + _log_fact(g3 - t)
        )
        total += (-1.0) ** t * np.exp(pref_log + num_log - den_log)
    return total


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol; selection-rule violations return exactly 0."""
    return _wigner3j_doubled(
        _to_doubled(j1), _to_doubled(j2), _to_doubled(j3),
        _to_doubled(m1), _to_doubled(m2), _to_doubled(m3),
    )


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _wigner6j_doubled(*(_to_doubled(j) for j in (j1, j2, j3, j4, j5, j6)))


def clebsch_gordan(j1, m1, j2, m2, j3, m3) -> float:
    """<j1 m1; j2 m2 | j3 m3>."""
    dj1, dj2, dj3 = _to_doubled(j1), _to_doubled(j2), _to_doubled(j3)
    dm1, dm2, dm3 = _to_doubled(m1), _to_doubled(m2), _to_doubled(m3)
    w = _wigner3j_doubled(dj1, dj2, dj3, dm1, dm2, -dm3)
    sign = (-1.0) ** ((dj1 - dj2 + dm3) // 2)
    return sign * np.sqrt(dj3 + 1.0) * w


def spherical_harmonic(l: int, m: int, theta: float, phi: float) -> complex:
    """Y_l^m(theta, phi) with the Condon-Shortley convention."""
    if abs(m) > l:
        return 0.0
    norm = np.sqrt(
        (2 * l + 1) / (4 * np.pi)
        * np.exp(_log_fact(l - m) - _log_fact(l + m))
    )
    return norm * lpmv(m, l, np.cos(theta)) * np.exp(1j * m * phi)


@dataclass(frozen=True)
class AngularMomentumState:
    """Hyperfine state |n, L, S, J, I, F, mF>, spins as doubled integers."""

    n: int
    dL: int
    dS: int
    dJ: int
    dI: int
    dF: int
    dmF: int

    def __post_init__(self):
        if not _triangle_ok(self.dL, self.dS, self.dJ):
            raise ValueError("J violates |L-S| <= J <= L+S")
        if not _triangle_ok(self.dJ, self.dI, self.dF):
            raise ValueError("F violates |J-I| <= F <= J+I")
        if abs(self.dmF) > self.dF or (self.dF - self.dmF) % 2 != 0:
            raise ValueError("mF out of range for F")

    @classmethod
    def make(cls, n, L, S, J, I, F, mF):
        return cls(n, _to_doubled(L), _to_doubled(S), _to_doubled(J),
                   _to_doubled(I), _to_doubled(F), _to_doubled(mF))

    @property
    def mF(self) -> float:
        return self.dmF / 2.0


@dataclass(frozen=True)
class PairState:
    atom1: AngularMomentumState
    atom2: AngularMomentumState


def triplet_manifold(L, J, F, n=59) -> list[AngularMomentumState]:
    """All hyperfine Zeeman states of one S=1, I=1/2 fine-structure level."""
    dF = _to_doubled(F)
    return [
        AngularMomentumState.make(n, L, 1, J, 0.5, F, dm / 2.0)
        for dm in range(-dF, dF + 1, 2)
    ]


def default_basis() -> list[AngularMomentumState]:
    """The 20-state S=1, F=I+J basis: 3S1 F=3/2, 3P0 F=1/2, 3P1 F=3/2,
    3P2 F=5/2, 3D1 F=3/2."""
    basis = []
    basis += triplet_manifold(0, 1, 1.5)   # 3S1
    basis += triplet_manifold(1, 0, 0.5)   # 3P0
    basis += triplet_manifold(1, 1, 1.5)   # 3P1
    basis += triplet_manifold(1, 2, 2.5)   # 3P2
    basis += triplet_manifold(2, 1, 1.5)   # 3D1
    return basis


def target_manifold() -> list[AngularMomentumState]:
    """The targeted Rydberg manifold 3S1 F=3/2 (four Zeeman states)."""
    return triplet_manifold(0, 1, 1.5)


def _half(d: int) -> float:
    return d / 2.0


def dtilde(k1: int, k2: int, s_prime: PairState, s: PairState,
           rho_hat=(0.0, 0.0)) -> float:
    """Angular factor of the pair dipole-dipole matrix element.

    ``s_prime`` carries the primed (bra) quantum numbers.  Selection rules
    evaluate to exact zeros rather than errors.  The inter-atomic direction
    ``rho_hat`` enters through the rank-(k1+k2) spherical harmonic; the sum
    over its projection collapses because each atom's 3j fixes q_i.
    """
    a1p, a2p = s_prime.atom1, s_prime.atom2
    a1, a2 = s.atom1, s.atom2
    theta, phi = rho_hat

    dq1 = a1p.dmF - a1.dmF
    dq2 = a2p.dmF - a2.dmF
    if abs(dq1) > 2 * k1 or abs(dq2) > 2 * k2 or dq1 % 2 or dq2 % 2:
        return 0.0

    # parity-changing dipole: vanishes unless the L 3j is allowed
    orbital = (
        _wigner3j_doubled(a1p.dL, 2 * k1, a1.dL, 0, 0, 0)
        * _wigner3j_doubled(a2p.dL, 2 * k2, a2.dL, 0, 0, 0)
    )
    if orbital == 0.0:
        return 0.0

    phase_exp = (
        -a1.dF // 2 + k1 - a1p.dmF // 2
        - a2.dF // 2 + k2 - a2p.dmF // 2
        + a1p.dJ // 2 + a2p.dJ // 2
        - a1.dL // 2 - a2.dL // 2
        + a1.dI + a1.dS
        + k1 + k2
    )
    # half-integer F and mF appear in pairs, so the doubled sums stay even
    dphase = (
        -a1.dF + 2 * k1 - a1p.dmF
        - a2.dF + 2 * k2 - a2p.dmF
        + a1p.dJ + a2p.dJ
        - a1.dL - a2.dL
        + 2 * a1.dI + 2 * a1.dS
        + 2 * (k1 + k2)
    )
    if dphase % 2 != 0:
        raise ValueError("phase exponent is not an integer")
    sign = (-1.0) ** ((dphase // 2) % 2) * (-1.0) ** k2

    ktot = k1 + k2
    scale = np.sqrt(
        4.0 * np.pi / (2 * ktot + 1)
        * np.exp(_log_fact(2 * ktot) - _log_fact(2 * k1) - _log_fact(2 * k2))
    )
    dims = np.sqrt(float(
        (a1p.dF + 1) * (a2p.dF + 1) * (a1p.dJ + 1) * (a2p.dJ + 1)
        * (a1p.dL + 1) * (a2p.dL + 1)
        * (a1.dF + 1) * (a2.dF + 1) * (a1.dJ + 1) * (a2.dJ + 1)
        * (a1.dL + 1) * (a2.dL + 1)
    ))
    sixj = (
        _wigner6j_doubled(a1p.dJ, a1p.dF, a1.dI, a1.dF, a1.dJ, 2 * k1)
        * _wigner6j_doubled(a2p.dJ, a2p.dF, a2.dI, a2.dF, a2.dJ, 2 * k2)
        * _wigner6j_doubled(a1p.dL, a1p.dJ, a1.dS, a1.dJ, a1.dL, 2 * k1)
        * _wigner6j_doubled(a2p.dL, a2p.dJ, a2.dS, a2.dJ, a2.dL, 2 * k2)
    )
    if sixj == 0.0:
        return 0.0

    mf3j = (
        _wigner3j_doubled(a1p.dF, 2 * k1, a1.dF, -a1p.dmF, dq1, a1.dmF)
        * _wigner3j_doubled(a2p.dF, 2 * k2, a2.dF, -a2p.dmF, dq2, a2.dmF)
    )
    if mf3j == 0.0:
        return 0.0

    q1 = dq1 // 2
    q2 = dq2 // 2
    q = q1 + q2
    cg = clebsch_gordan(k1, q1, k2, q2, ktot, q)
    y = spherical_harmonic(ktot, q, theta, phi)
    value = sign * scale * dims * sixj * orbital * mf3j * cg * y
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        # the collapsed q sum leaves a single harmonic; complex phases only
        # appear for phi != 0 geometries, where callers want the real part
        # of the symmetrized combination.
        return complex(value)
    return float(value.real)


@dataclass
class C6Matrix:
    """Interaction weighting matrix over the targeted pair-state basis."""

    basis: list
    matrix: np.ndarray
    rho_hat: tuple


def build_c6_matrix(basis=None, rho_hat=(0.0, 0.0),
                    target=None) -> C6Matrix:
    """Weighting matrix (C6)_{ij} = -sum_p D(s_i, s_p) D(s_p, s_j).

    The intermediate sum runs over every pair state of the 20-state basis;
    dipole selection rules remove the non-contributing ones.  ``target``
    defaults to all pair states of the 3S1 F=3/2 manifold, whose block is
    closed under the double dipole transition.
    """
    if basis is None:
        basis = default_basis()
    if len(basis) != 20:
        raise ValueError(f"expected the 20-state basis, got {len(basis)} states")
    if target is None:
        target = target_manifold()
    pairs = [PairState(a, b) for a in target for b in target]
    inter = [PairState(a, b) for a in basis for b in basis]

    d_left = np.zeros((len(pairs), len(inter)))
    d_right = np.zeros((len(inter), len(pairs)))
    for ip, p in enumerate(inter):
        # skip intermediates that the dipole cannot reach from the target
        if abs(p.atom1.dL - target[0].dL) != 2 or abs(p.atom2.dL - target[0].dL) != 2:
            continue
        for it, t in enumerate(pairs):
            d_left[it, ip] = dtilde(1, 1, t, p, rho_hat)
            d_right[ip, it] = dtilde(1, 1, p, t, rho_hat)
    matrix = -(d_left @ d_right)
    asym = np.max(np.abs(matrix - matrix.T))
    if asym > 1e-10 * max(1.0, np.max(np.abs(matrix))):
        raise AssertionError(f"weighting matrix asymmetry {asym:g}")
    matrix = 0.5 * (matrix + matrix.T)
    return C6Matrix(pairs, matrix, tuple(rho_hat))


@dataclass
class C6Weights:
    basis: list
    dimensionless: np.ndarray   # per-pair weights before normalization
    normalized: np.ndarray      # scaled so the largest magnitude is 1
    physical: np.ndarray        # in units of C6' (THz um^6 if C6' is)
    c6_prime: float


def c6_weights(c6m: C6Matrix, c6_prime: float = 1.0) -> C6Weights:
    """Per-pair weights via eigenvector projection, normalized to C6'.

    w_k = sum_j <k|j><j|C6|j><j|k> over eigenvectors |j>; stable under
    eigenvalue degeneracy because only <j|C6|j> enters.
    """
    evals, evecs = np.linalg.eigh(c6m.matrix)
    overlaps = np.abs(evecs) ** 2  # overlaps[k, j] = |<k|j>|^2
    weights = overlaps @ evals
    top = np.max(np.abs(weights))
    if top == 0.0:
        raise ValueError("all weights vanish; check the basis")
    normalized = weights / top
    return C6Weights(c6m.basis, weights, normalized,
                     c6_prime * normalized, c6_prime)


def weight_table(rho_hat=(0.0, 0.0), c6_prime: float = 1.0) -> np.ndarray:
    """4x4 table of normalized weights over (mF1, mF2), both -3/2..+3/2."""
    c6m = build_c6_matrix(rho_hat=rho_hat)
    w = c6_weights(c6m, c6_prime)
    table = np.zeros((4, 4))
    for pair, value in zip(w.basis, w.normalized):
        i = (pair.atom1.dmF + 3) // 2
        j = (pair.atom2.dmF + 3) // 2
        table[i, j] = value
    return table
