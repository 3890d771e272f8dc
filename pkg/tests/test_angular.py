"""Angular-momentum algebra checks.

The Racah-formula implementation is cross-checked against sympy's exact
symbolic Wigner functions, which serve as the independent summation oracle.
"""

import numpy as np
import pytest
from sympy import S
from sympy.physics.wigner import clebsch_gordan as sy_cg
from sympy.physics.wigner import wigner_3j as sy_3j
from sympy.physics.wigner import wigner_6j as sy_6j

from ququart.angular import (
    AngularMomentumState, PairState, build_c6_matrix, c6_weights,
    clebsch_gordan, default_basis, dtilde, spherical_harmonic,
    target_manifold, weight_table, wigner3j, wigner6j,
)

TABLE_EXPECTED = np.array([
    [-0.989, -0.980, -0.984, -1.000],
    [-0.980, -0.969, -0.970, -0.984],
    [-0.984, -0.970, -0.969, -0.980],
    [-1.000, -0.984, -0.980, -0.989],
])


def half(n):
    return S(n) / 2


def test_wigner3j_selection_rules():
    assert wigner3j(1, 1, 2, 1, 1, -1) == 0.0     # m sum != 0
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0      # triangle violated
    assert wigner3j(0.5, 0.5, 1, 0.5, 0.5, -1) != 0.0


def test_wigner3j_against_sympy_oracle():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 60:
        dj1, dj2 = rng.integers(0, 9, 2)
        dj3 = rng.integers(abs(dj1 - dj2), dj1 + dj2 + 1)
        if (dj1 + dj2 + dj3) % 2:
            continue
        dm1 = rng.integers(-dj1, dj1 + 1)
        if (dj1 - dm1) % 2:
            continue
        dm2 = rng.integers(-dj2, dj2 + 1)
        if (dj2 - dm2) % 2:
            continue
        dm3 = -dm1 - dm2
        if abs(dm3) > dj3 or (dj3 - dm3) % 2:
            continue
        mine = wigner3j(dj1 / 2, dj2 / 2, dj3 / 2, dm1 / 2, dm2 / 2, dm3 / 2)
        oracle = float(sy_3j(half(dj1), half(dj2), half(dj3),
                             half(dm1), half(dm2), half(dm3)))
        assert abs(mine - oracle) < 1e-12, (dj1, dj2, dj3, dm1, dm2, dm3)
        checked += 1
    # the specific value called out as an oracle case
    assert abs(wigner3j(1, 1, 2, 1, 1, -2)
               - float(sy_3j(1, 1, 2, 1, 1, -2))) < 1e-14


def test_wigner6j_against_sympy_oracle():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 40:
        djs = rng.integers(0, 7, 6)
        try:
            oracle = float(sy_6j(*[half(int(d)) for d in djs]))
        except ValueError:
            continue  # sympy rejects violated triads; ours returns 0
        mine = wigner6j(*[d / 2 for d in djs])
        assert abs(mine - oracle) < 1e-12, djs
        checked += 1


def test_wigner6j_zero_for_bad_triads():
    assert wigner6j(1, 1, 3, 1, 1, 1) == 0.0


def test_clebsch_gordan():
    for j in (0.5, 1, 1.5, 2):
        for dm in range(-int(2 * j), int(2 * j) + 1, 2):
            m = dm / 2
            assert abs(clebsch_gordan(j, m, 0, 0, j, m) - 1.0) < 1e-12
    rng = np.random.default_rng(2)
    for _ in range(30):
        dj1, dj2 = rng.integers(0, 7, 2)
        dj3 = rng.integers(abs(dj1 - dj2), dj1 + dj2 + 1)
        if (dj1 + dj2 + dj3) % 2:
            continue
        dm1 = rng.integers(-dj1, dj1 + 1)
        dm2 = rng.integers(-dj2, dj2 + 1)
        if (dj1 - dm1) % 2 or (dj2 - dm2) % 2:
            continue
        dm3 = dm1 + dm2
        if abs(dm3) > dj3:
            continue
        mine = clebsch_gordan(dj1 / 2, dm1 / 2, dj2 / 2, dm2 / 2, dj3 / 2, dm3 / 2)
        oracle = float(sy_cg(half(dj1), half(dj2), half(dj3),
                             half(dm1), half(dm2), half(dm3)))
        assert abs(mine - oracle) < 1e-12


def test_orthogonality_sums():
    # 3j orthogonality at fixed m3:
    # sum_{m1} (2j3+1) [3j(j3)][3j(j3')] = delta_{j3 j3'}
    for dj1, dj2 in ((2, 2), (3, 2), (4, 3), (8, 6)):
        for dj3 in range(abs(dj1 - dj2), dj1 + dj2 + 1, 2):
            for dj3p in range(abs(dj1 - dj2), dj1 + dj2 + 1, 2):
                for dm3 in range(-min(dj3, dj3p), min(dj3, dj3p) + 1, 2):
                    total = 0.0
                    for dm1 in range(-dj1, dj1 + 1, 2):
                        dm2 = -dm1 - dm3
                        if abs(dm2) > dj2:
                            continue
                        total += (dj3 + 1) * \
                            wigner3j(dj1 / 2, dj2 / 2, dj3 / 2, dm1 / 2, dm2 / 2, dm3 / 2) * \
                            wigner3j(dj1 / 2, dj2 / 2, dj3p / 2, dm1 / 2, dm2 / 2, dm3 / 2)
                    expected = float(dj3 == dj3p)
                    assert abs(total - expected) < 1e-10


def test_cg_completeness():
    # sum over (m1, m2) of |<j1 m1; j2 m2 | j3 m3>|^2 = 1
    for j1, j2, j3 in ((1, 1, 2), (1.5, 0.5, 2), (2, 2, 3), (4, 3, 2)):
        dj3 = int(2 * j3)
        for dm3 in range(-dj3, dj3 + 1, 2):
            m3 = dm3 / 2
            total = 0.0
            dj1, dj2 = int(2 * j1), int(2 * j2)
            for dm1 in range(-dj1, dj1 + 1, 2):
                dm2 = dm3 - dm1
                if abs(dm2) > dj2:
                    continue
                total += clebsch_gordan(j1, dm1 / 2, j2, dm2 / 2, j3, m3) ** 2
            assert abs(total - 1.0) < 1e-10


def test_spherical_harmonics():
    from scipy.special import sph_harm_y
    rng = np.random.default_rng(3)
    for _ in range(20):
        l = int(rng.integers(0, 5))
        m = int(rng.integers(-l, l + 1))
        th, ph = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        mine = spherical_harmonic(l, m, th, ph)
        oracle = complex(sph_harm_y(l, m, th, ph))
        assert abs(mine - oracle) < 1e-12


def test_state_invariants():
    with pytest.raises(ValueError):
        AngularMomentumState.make(59, 0, 1, 2.5, 0.5, 3, 0)  # J > L+S
    with pytest.raises(ValueError):
        AngularMomentumState.make(59, 0, 1, 1, 0.5, 3.5, 0)  # F > J+I
    with pytest.raises(ValueError):
        AngularMomentumState.make(59, 0, 1, 1, 0.5, 1.5, 2.5)  # |mF| > F


def test_basis_size():
    assert len(default_basis()) == 20
    with pytest.raises(ValueError):
        build_c6_matrix(basis=default_basis()[:12])


def test_dtilde_selection_and_symmetry():
    target = target_manifold()
    basis = default_basis()
    p_states = [s for s in basis if s.dL == 2]  # 3P manifolds
    sp = PairState(p_states[0], p_states[1])
    # mF-changing beyond the dipole rank contributes zero
    t_hi = PairState(target[3], target[3])
    t_lo = PairState(target[0], target[0])
    assert dtilde(1, 1, t_hi, PairState(p_states[0], p_states[0])) == 0.0

    # ordering symmetry: D(s', s) and D(s, s') agree up to a phase factor
    rng = np.random.default_rng(1)
    found = 0
    for _ in range(200):
        a = PairState(target[rng.integers(4)], target[rng.integers(4)])
        b = PairState(p_states[rng.integers(len(p_states))],
                      p_states[rng.integers(len(p_states))])
        f = dtilde(1, 1, a, b)
        g = dtilde(1, 1, b, a)
        if f == 0.0 and g == 0.0:
            continue
        found += 1
        assert abs(abs(f) - abs(g)) < 1e-10
    assert found > 10


def test_weight_table_matches_reference():
    table = weight_table((0.0, 0.0))
    assert np.max(np.abs(table - TABLE_EXPECTED)) <= 1e-3
    # symmetric under interchange of the two atoms
    assert np.linalg.norm(table - table.T) < 1e-10
    # +-mF reflection: entry (a, b) = entry (-a, -b)
    assert np.linalg.norm(table - table[::-1, ::-1]) < 1e-10
    # largest magnitude normalized to exactly 1
    assert abs(np.min(table) + 1.0) < 1e-12


def test_c6_matrix_properties():
    c6m = build_c6_matrix()
    assert np.linalg.norm(c6m.matrix - c6m.matrix.T) < 1e-12
    w = c6_weights(c6m, c6_prime=5.0)
    w2 = c6_weights(c6m, c6_prime=10.0)
    assert np.allclose(w2.physical, 2.0 * w.physical)
    assert np.allclose(w2.normalized, w.normalized)
    # relabeling the two atoms leaves the table unchanged
    idx = [(i, j) for i in range(4) for j in range(4)]
    swap_perm = [idx.index((j, i)) for (i, j) in idx]
    m = c6m.matrix
    assert np.linalg.norm(m[np.ix_(swap_perm, swap_perm)] - m) < 1e-10
