"""Simulation and verification of the cat-state bosonic qubit code under amplitude damping."""
from .hilbert import (
    QUBIT,
    CatParity,
    CompositeSpace,
    FockSpace,
    Operator,
    StateVector,
    annihilation,
    basis,
    cat_state,
    coherent_state,
    default_dim,
    evolve_static,
    fidelity,
    parity_expectation,
    tensor,
)
from .channel import (
    DampingChannel,
    DensityMatrix,
    apply_channel,
    jump_conditional,
    kraus_operator,
    lindblad_evolve,
)
from .codecheck import (
    kl_condition_matrix,
    kl_ratio_exact,
    kl_ratio_jump,
    kl_ratio_no_jump,
    reset_budget,
)

__version__ = "0.1.0"
