"""Kicked-Ising Floquet simulation and symmetry-resolved entanglement toolkit.

Two independent engines (a polynomial-scaling free-fermion engine and an
exact statevector engine) drive the same kicked Ising chain, with
analysis protocols for adiabatic sweeps, parity-beating fits and
phase-transition location, and finite-Abelian-group machinery for the
degeneracy structure of symmetry-resolved probabilities.
"""

__version__ = "0.1.0"

from . import analysis, cohomology, fermion, model, statevector

__all__ = ["analysis", "cohomology", "fermion", "model", "statevector", "__version__"]
