"""Box-ball system laboratory.

Pitman's transformation on lattice paths, soliton invariants, invariant
measures and their samplers, exact finite-volume laws, continuum (zigzag)
dynamics and the ultra-discrete Toda lattice.
"""

__version__ = "0.1.0"

from .lattice import (
    BinaryConfiguration,
    ConfigurationError,
    DensityError,
    LatticePath,
    UndefinedDynamicsError,
    decode_path,
    encode_path,
    evolve,
    inverse_transform,
    periodic_transform,
    pitman_transform,
    running_max,
    step,
)
from .solitons import SolitonProfile, contract, soliton_counts, verify_conservation
from .toda import TodaState, toda_step, toda_step_periodic, toda_step_via_path

__all__ = [
    "BinaryConfiguration", "ConfigurationError", "DensityError", "LatticePath",
    "UndefinedDynamicsError", "decode_path", "encode_path", "evolve", "inverse_transform",
    "periodic_transform", "pitman_transform", "running_max", "step",
    "SolitonProfile", "contract", "soliton_counts", "verify_conservation",
    "TodaState", "toda_step", "toda_step_periodic", "toda_step_via_path",
]
