"""Quantum tensor automaton simulator and analysis toolkit."""
from .qlin import NumericalContractError, RngSeed, StateVector
from .qca import (
    AnnihilatedState,
    GlobalOperator,
    LocalRule,
    Trajectory,
    build_global_operator,
    evolve,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AnnihilatedState",
    "GlobalOperator",
    "LocalRule",
    "NumericalContractError",
    "RngSeed",
    "StateVector",
    "Trajectory",
    "build_global_operator",
    "evolve",
    "step",
]
