"""Exact dynamics of one qubit plus a free chain in the one-excitation sector.

The flip-flop coupling ``c (I+ c_0 + I- c_0^dag)`` conserves the number of
excitations, so a qubit starting in ``|up, vacuum>`` only explores the
``N + 1`` states ``|up, vac>`` and ``|down, site i>``.  Diagonalizing that
block gives the exact, trace-preserving reduced qubit dynamics, which is
what the master-equation trajectories are checked against.

Only the zero-temperature empty band is covered; a thermal bath would mix
excitation sectors.
"""

import enum
from dataclasses import dataclass

import numpy as np

from ._validation import check_int
from .exceptions import ConfigError, GridMismatchError
from .kernels import BAND_BOTTOM, Statistics


class InitialQubit(str, enum.Enum):
    UP = "up"
    DOWN = "down"
    PLUS = "plus"


@dataclass(frozen=True)
class OracleConfig:
    """Qubit + bath parameters for the exact solver.

    ``coupling`` is the linear coupling constant, so ``g = coupling**2``.
    """

    n_sites: int = 8
    coupling: float = 0.05
    delta: float = 0.0
    mu: float = -3.0
    temperature: float = 0.0
    statistics: Statistics = Statistics.FERMION
    initial_qubit: InitialQubit = InitialQubit.UP

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        object.__setattr__(self, "initial_qubit", InitialQubit(self.initial_qubit))
        check_int(self.n_sites, "n_sites", 1)
        if not np.isfinite(self.coupling) or not np.isfinite(self.delta):
            raise ValueError("coupling and delta must be finite real numbers")

    def check_regime(self):
        """The oracle needs an empty band: T = 0 and mu below the band bottom."""
        if self.temperature != 0:
            raise ConfigError("exact oracle only supports temperature = 0")
        if self.mu >= BAND_BOTTOM:
            raise ConfigError(
                f"exact oracle needs an empty band, mu < {BAND_BOTTOM} (got {self.mu})")


@dataclass
class OracleTrajectory:
    times: np.ndarray
    rho: np.ndarray  # (n_times, 2, 2)

    @property
    def p_up(self):
        return self.rho[:, 0, 0].real

    @property
    def p_down(self):
        return self.rho[:, 1, 1].real

    @property
    def coherence(self):
        return np.abs(self.rho[:, 0, 1])


def hopping_matrix(n_sites):
    """Periodic nearest-neighbour hopping with amplitude -1.

    A single site has no neighbour and no hopping.  Two sites are connected
    by both bonds of the ring, which matches the momentum-space band.
    """
    h = np.zeros((n_sites, n_sites))
    if n_sites == 1:
        return h
    for i in range(n_sites):
        j = (i + 1) % n_sites
        h[i, j] -= 1.0
        h[j, i] -= 1.0
    return h


def build_sector_hamiltonian(config):
    """Hamiltonian on ``{|up, vac>, |down, site 0>, ..., |down, site N-1>}``."""
    n = config.n_sites
    H = np.zeros((n + 1, n + 1))
    H[0, 0] = config.delta / 2
    H[1:, 1:] = hopping_matrix(n) - config.delta / 2 * np.eye(n)
    H[0, 1] = H[1, 0] = config.coupling
    return H


def _initial_state(config):
    n = config.n_sites
    # amplitudes on the sector basis plus a separate |down, vac> amplitude;
    # |down, vac> has zero excitations and only picks up a phase
    psi = np.zeros(n + 1, dtype=complex)
    if config.initial_qubit is InitialQubit.UP:
        psi[0] = 1.0
        vac = 0.0
    elif config.initial_qubit is InitialQubit.DOWN:
        vac = 1.0
    else:
        psi[0] = 1 / np.sqrt(2)
        vac = 1 / np.sqrt(2)
    return psi, vac


def exact_evolve(config, times):
    """Evolve by spectral decomposition and trace out the bath."""
    times = np.asarray(times, dtype=float)
    H = build_sector_hamiltonian(config)
    w, V = np.linalg.eigh(H)
    psi0, vac0 = _initial_state(config)
    coeff = V.conj().T @ psi0
    psi_t = (np.exp(-1j * np.outer(times, w)) * coeff) @ V.T  # (n_times, N+1)
    vac_t = vac0 * np.exp(1j * config.delta / 2 * times)
    up = psi_t[:, 0]
    bath = psi_t[:, 1:]
    rho = np.empty((len(times), 2, 2), dtype=complex)
    rho[:, 0, 0] = np.abs(up) ** 2
    rho[:, 1, 1] = np.sum(np.abs(bath) ** 2, axis=1) + np.abs(vac_t) ** 2
    # only |up, vac> and |down, vac> share a bath state
    rho[:, 0, 1] = up * np.conj(vac_t)
    rho[:, 1, 0] = np.conj(rho[:, 0, 1])
    return OracleTrajectory(times, rho)


def sector_state(config, times):
    """Full sector wavefunction at each time, for conservation checks."""
    H = build_sector_hamiltonian(config)
    w, V = np.linalg.eigh(H)
    psi0, _ = _initial_state(config)
    coeff = V.conj().T @ psi0
    return (np.exp(-1j * np.outer(np.asarray(times, dtype=float), w)) * coeff) @ V.T, H


@dataclass
class CompareReport:
    times: np.ndarray
    oracle_p_up: np.ndarray
    master_p_up: np.ndarray
    oracle_coherence: np.ndarray
    master_coherence: np.ndarray
    max_abs: dict
    rms: dict
    max_rel_p_up: float
    tolerance: float

    @property
    def passed(self):
        return self.max_rel_p_up <= self.tolerance


def compare(oracle, master, tolerance=0.05):
    """Deviation of a master-equation trajectory from the exact one.

    Absolute max and RMS deviations are reported for the populations and the
    coherence magnitude; the pass/fail verdict uses the largest relative
    deviation of ``p_up``.
    """
    if len(oracle.times) != len(master.times) or not np.allclose(
            oracle.times, master.times, rtol=0, atol=1e-9):
        raise GridMismatchError("oracle and master trajectories use different time grids")
    obs = master.observables
    # Hermitian-part coherence of the master state
    master_coh = 0.5 * np.abs(master.states[:, 1] + np.conj(master.states[:, 2]))
    pairs = {
        "p_up": (oracle.p_up, obs.p_up),
        "p_down": (oracle.p_down, obs.p_down),
        "coherence": (oracle.coherence, master_coh),
    }
    max_abs, rms = {}, {}
    for name, (a, b) in pairs.items():
        d = np.abs(a - b)
        max_abs[name] = float(d.max())
        rms[name] = float(np.sqrt(np.mean(d ** 2)))
    denom = np.maximum(np.abs(oracle.p_up), 1e-300)
    max_rel = float(np.max(np.abs(oracle.p_up - obs.p_up) / denom))
    return CompareReport(oracle.times, oracle.p_up, obs.p_up, oracle.coherence, master_coh,
                         max_abs, rms, max_rel, tolerance)
