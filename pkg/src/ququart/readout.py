"""Two-round ququart readout model and single-state QND measurement.

The two-round scheme reads the o qubit by fluorescence (bright = ground,
o = 0), swaps the o and n contents, then reads again, so the outcome pair
(round 1, round 2) resolves the full ququart state: BB = |00>, BD = |01>,
DB = |10>, DD = |11>.

The imperfection tree below is evaluated analytically (exact branch
enumeration, no sampling).  Branch semantics, fixed so that the tree
reproduces all four reference conditional probabilities at
F_m = F_pi = 0.999, P_f = 0.001, P_l = 0.01 simultaneously:

  1. round-1 detection: bright iff o = 0; reported correctly w.p. F_m
     (detector-side error; the atomic state is unaffected),
  2. scattering flip: only atoms that fluoresced in round 1 (o = 0) flip
     their nuclear spin w.p. P_f,
  3. loss: every surviving atom is lost between the rounds w.p. P_l; a
     lost atom reads dark in round 2 and skips the swap,
  4. swap: with probability 1 - F_pi the swap fails to exchange |01> and
     |10> (identity failure on the driven pair); |00> and |11> are fixed
     points either way,
  5. round-2 detection: bright iff the post-swap o = 0; correct w.p. F_m.
"""

from dataclasses import dataclass

import numpy as np

from .qcore import Projector, StateVector, measure_branches, measure_projective

OUTCOME_LABELS = ("BB", "BD", "DB", "DD")
STATE_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class ReadoutImperfections:
    """Parameters of the two-round readout tree (all probabilities)."""

    f_m: float = 0.999    # single-shot readout fidelity
    p_l: float = 0.01     # atom loss between the two rounds
    p_f: float = 0.001    # nuclear flip while scattering
    f_pi: float = 0.999   # intra-ququart swap fidelity

    def __post_init__(self):
        for name in ("f_m", "p_l", "p_f", "f_pi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")


def _swap_distribution(level: int, f_pi: float):
    """Post-swap level distribution; swap failure leaves |01>/|10> in place."""
    if level in (0, 3):
        return {level: 1.0}
    other = 3 - level  # 1 <-> 2
    return {other: f_pi, level: 1.0 - f_pi}


def two_round_confusion(imp: ReadoutImperfections) -> np.ndarray:
    """4x4 row-stochastic matrix P(outcome | input), rows = input states
    |00>, |01>, |10>, |11>, columns = outcome pairs BB, BD, DB, DD."""
    conf = np.zeros((4, 4))
    for level in range(4):
        o1, n1 = level >> 1, level & 1
        bright1 = o1 == 0
        # round-1 report: (reported_bright, probability)
        for rep1, p_rep1 in ((bright1, imp.f_m), (not bright1, 1.0 - imp.f_m)):
            # scattering flip only on bright-manifold atoms
            flip_branches = [(n1, 1.0)] if not bright1 else \
                [(n1, 1.0 - imp.p_f), (1 - n1, imp.p_f)]
            for n_mid, p_flip in flip_branches:
                mid_level = (o1 << 1) | n_mid
                # loss branch: dark in round 2, no swap
                for lost, p_loss in ((True, imp.p_l), (False, 1.0 - imp.p_l)):
                    base = p_rep1 * p_flip * p_loss
                    if base == 0.0:
                        continue
                    if lost:
                        second = {None: 1.0}
                    else:
                        second = _swap_distribution(mid_level, imp.f_pi)
                    for lvl2, p_swap in second.items():
                        if lvl2 is None:
                            rep2_branches = [(False, 1.0)]  # lost: dark
                        else:
                            bright2 = (lvl2 >> 1) == 0
                            rep2_branches = [(bright2, imp.f_m),
                                             (not bright2, 1.0 - imp.f_m)]
                        for rep2, p_rep2 in rep2_branches:
                            out = (0 if rep1 else 2) + (0 if rep2 else 1)
                            conf[level, out] += base * p_swap * p_rep2
    row_sums = conf.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 1e-12:
        raise AssertionError("confusion rows do not sum to 1")
    return conf


# projectors of the |00>-state QND measurement channel on one ququart
P_BRIGHT = Projector(np.diag([1.0, 0.0, 0.0, 0.0]))
P_DARK = Projector(np.diag([0.0, 1.0, 1.0, 1.0]))


def single_state_qnd(state: StateVector, site: int, rng: np.random.Generator):
    """QND measurement of |00> on one ququart site.

    Bright collapses the site to |00>; Dark renormalizes the support on
    {|01>, |10>, |11>}.  Returns ("Bright"|"Dark", post state).
    """
    outcome, _, post = measure_projective(state, [P_BRIGHT, P_DARK], [site], rng)
    return ("Bright" if outcome == 0 else "Dark"), post


def single_state_qnd_branches(state, site: int):
    """Deterministic branch enumeration of the |00> QND measurement."""
    return measure_branches(state, [P_BRIGHT, P_DARK], [site])


def probe_phase(shift_hz: float, tau_s: float):
    """Phase accumulated on |01> by the probe light shift, and its compensator.

    Returns (phi, compensator) with phi = 2 pi * shift * tau and the
    diagonal unitary diag(1, e^{-i phi}, 1, 1) that undoes the accrual.
    """
    if tau_s < 0:
        raise ValueError("probe duration must be non-negative")
    phi = 2.0 * np.pi * shift_hz * tau_s
    from .qcore import Unitary
    comp = Unitary(np.diag([1.0, np.exp(-1j * phi), 1.0, 1.0]))
    return phi, comp
