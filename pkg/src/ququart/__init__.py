"""Simulation toolkit for the two-qubit-in-one-atom (ququart) architecture.

A ququart encodes an optical-clock ("o") qubit and a nuclear-spin ("n")
qubit in the four-level manifold of a single atom.  The subpackages cover
the dense qudit state engine, intra- and inter-ququart gate constructors,
Rydberg-interaction weighting factors, time-domain gate simulation, the
two-round readout model, and the application-level protocols (distillation,
flag-based QEC, AKLT preparation, adaptive reset circuits).
"""

__version__ = "0.1.0"
