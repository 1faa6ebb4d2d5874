"""
Entanglement dynamics of finite-depth brickwork circuits on infinite
chains, computed through the quantum channel acting on the matrix-product
bond space.

The building blocks: `gates` supplies the two-site unitaries, `kraus`
assembles each diagonal slice of the circuit into the Kraus family of a
CPTP map, and three engines propagate the bond density matrix: `exact`
(dense, middle-out contraction), `lowrank` (rank-K truncation), and
`trajectory` (stochastic unraveling). `oracle` checks all of it against
brute-force statevectors on finite chains, `analysis` turns spectra into
entropies and their statistics, `cli` is the batch front end.
"""

__version__ = "0.1.0"

from .analysis import (
    EntropySeries,
    SpectrumRecord,
    dos_histogram,
    gaussian_fit,
    min_entropy,
    power_spectrum,
    renyi,
)
from .exact import AncillaState, apply_channel, corner_bond_state, init_ancilla, run_exact, run_purity
from .gates import (
    Gate,
    KickedIsingParams,
    ProductState,
    XXZParams,
    gate_conserving,
    gate_haar,
    gate_kicked_ising,
    gate_xxz,
    make_gate_sampler,
    make_product_state,
)
from .kraus import (
    KrausSlice,
    SliceSource,
    build_slice,
    check_bistochastic,
    check_dual_unitarity,
    check_left_canonical,
    check_right_canonical,
)
from .lowrank import LowRankAncilla, apply_channel_lowrank, calibrate_rank, run_lowrank, truncate
from .oracle import StateVector, evolve_brickwork, reduced_spectrum, slice_grid
from .trajectory import Trajectory, estimate_ancilla_ergodic, estimate_purity_pairs, step_trajectory

__all__ = [
    "__version__",
    "AncillaState",
    "EntropySeries",
    "Gate",
    "KickedIsingParams",
    "KrausSlice",
    "LowRankAncilla",
    "ProductState",
    "SliceSource",
    "SpectrumRecord",
    "StateVector",
    "Trajectory",
    "XXZParams",
    "apply_channel",
    "apply_channel_lowrank",
    "build_slice",
    "calibrate_rank",
    "check_bistochastic",
    "corner_bond_state",
    "check_dual_unitarity",
    "check_left_canonical",
    "check_right_canonical",
    "dos_histogram",
    "estimate_ancilla_ergodic",
    "estimate_purity_pairs",
    "evolve_brickwork",
    "gate_conserving",
    "gate_haar",
    "gate_kicked_ising",
    "gate_xxz",
    "gaussian_fit",
    "init_ancilla",
    "make_gate_sampler",
    "make_product_state",
    "min_entropy",
    "power_spectrum",
    "reduced_spectrum",
    "renyi",
    "run_exact",
    "run_lowrank",
    "run_purity",
    "slice_grid",
    "step_trajectory",
    "truncate",
]
