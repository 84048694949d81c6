"""Parity (LHZ) compilation, Pegasus embeddings and annealing analysis for Ising problems."""

from .ising import (
    IsingHamiltonian,
    add_last_spin_bias,
    brute_force_ground_states,
    energy,
    gauge_transform,
)
from .parity import (
    ParityCompilation,
    ParityQubit,
    Plaquette,
    compile_lhz,
    decode,
    encode,
    plaquette_parity_check,
    quadratize,
    solve_flip_mask,
    to_multibody,
    tune_penalty,
)

__version__ = "0.1.0"

__all__ = [
    "IsingHamiltonian",
    "ParityCompilation",
    "ParityQubit",
    "Plaquette",
    "add_last_spin_bias",
    "brute_force_ground_states",
    "compile_lhz",
    "decode",
    "encode",
    "energy",
    "gauge_transform",
    "plaquette_parity_check",
    "quadratize",
    "solve_flip_mask",
    "to_multibody",
    "tune_penalty",
]
