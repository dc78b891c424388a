"""Non-Markovian qubit decoherence from bath Green's-function memory kernels."""

__version__ = "0.1.0"

from .estimator import MasterEquationSimulator
from .exceptions import (
    BosePoleError,
    ConfigError,
    DimensionMismatchError,
    GridMismatchError,
    NonFiniteInputError,
    NonFiniteStateError,
)
from .kernels import (
    BandParams,
    KernelTable,
    RtnParams,
    Statistics,
    band_kernel,
    multiband_kernel,
    occupation,
    rtn_kernel,
)
from .oracle import OracleConfig, build_sector_hamiltonian, compare, exact_evolve
from .states import (
    PhysicalParams,
    SojournBlipState,
    Trajectory,
    decompose,
    entropy,
    reconstruct,
    unitary_generator,
)
from .volterra import (
    ChainConfig,
    VolterraSystem,
    assemble_chain,
    assemble_single_qubit,
    convergence_order,
    evolve,
)

__all__ = [
    "BandParams", "BosePoleError", "ChainConfig", "ConfigError", "DimensionMismatchError",
    "GridMismatchError", "KernelTable", "MasterEquationSimulator", "NonFiniteInputError",
    "NonFiniteStateError", "OracleConfig", "PhysicalParams", "RtnParams", "SojournBlipState",
    "Statistics", "Trajectory", "VolterraSystem", "assemble_chain", "assemble_single_qubit",
    "band_kernel", "build_sector_hamiltonian", "compare", "convergence_order", "decompose",
    "entropy", "evolve", "exact_evolve", "multiband_kernel", "occupation", "reconstruct",
    "rtn_kernel", "unitary_generator",
]
