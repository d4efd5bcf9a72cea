"""susyfp: spectral toolkit for SUSY quantum mechanics and 1-d Fokker-Planck.

The package builds pairs of partner Schroedinger operators from a
superpotential, constructs two conditionally solvable model families on
the real line and the half line, turns their spectra into Fokker-Planck
transition densities, and checks everything against brute-force grid
oracles (tridiagonal eigensolver, Crank-Nicolson evolution, direct SDE
sampling).  A CLI writes the results as CSV reports with optional
matplotlib figures.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    BoundViolation,
    BrokenSusyError,
    ConvergenceError,
    DomainError,
    GridMismatchError,
    InconclusiveWindowError,
    MassLossError,
    NotStationaryError,
    OverflowRangeError,
    PositivityLoss,
    SusyFpError,
    TruncationFailure,
)

__all__ = [
    "__version__",
    "BlowUpError",
    "BoundViolation",
    "BrokenSusyError",
    "ConvergenceError",
    "DomainError",
    "GridMismatchError",
    "InconclusiveWindowError",
    "MassLossError",
    "NotStationaryError",
    "OverflowRangeError",
    "PositivityLoss",
    "SusyFpError",
    "TruncationFailure",
]
