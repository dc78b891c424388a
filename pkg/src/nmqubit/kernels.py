r"""Time-domain memory kernels of the baths.

Three bath models are supported:

* random telegraph noise (RTN), a classical fluctuator with Keldysh
  correlation :math:`K^K(t) = i J_C e^{-|t|/\tau_0}` and no response function;
* a free fermion or boson tight-binding chain with dispersion
  :math:`\omega(k) = -2\cos k` on ``n_sites`` periodic sites;
* the spin-full two-band version of the chain, which only needs the
  band-diagonal propagators.

All kernels are sampled at ``tau = n*dt`` for ``n = 0..n_steps`` and depend
on the time difference only.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_int, check_nonnegative, check_positive
from .exceptions import BosePoleError, DimensionMismatchError

# maximum group velocity of omega(k) = -2 cos k
BAND_VELOCITY = 2.0
BAND_BOTTOM = -2.0


class Statistics(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"


@dataclass(frozen=True)
class RtnParams:
    j_c: float = 1.0
    tau0: float = 1.0

    def __post_init__(self):
        check_nonnegative(self.j_c, "j_c")
        check_positive(self.tau0, "tau0")


@dataclass(frozen=True)
class BandParams:
    """Free tight-binding bath.

    ``site_separation`` is the distance ``i - j`` between the two sites the
    propagator connects; 0 gives the on-site kernel.  Band 1 is shifted down
    by ``delta_b`` and band 2 up by the same amount.
    """

    statistics: Statistics = Statistics.FERMION
    n_sites: int = 32
    mu: float = 0.0
    temperature: float = 0.0
    delta_b: float = 0.0
    n_bands: int = 1
    n_spins: int = 1
    site_separation: int = 0

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        check_int(self.n_sites, "n_sites", 2)
        check_nonnegative(self.temperature, "temperature")
        if self.n_bands not in (1, 2):
            raise ValueError(f"n_bands must be 1 or 2, got {self.n_bands!r}")
        if self.n_spins not in (1, 2):
            raise ValueError(f"n_spins must be 1 or 2, got {self.n_spins!r}")
        if not np.isfinite(self.mu) or not np.isfinite(self.delta_b):
            raise ValueError("mu and delta_b must be finite")
        check_int(abs(self.site_separation), "site_separation", 0)

    @property
    def horizon(self):
        """Latest time before excitations wrap around the periodic chain."""
        return self.n_sites / (2 * BAND_VELOCITY)


@dataclass(frozen=True)
class KernelTable:
    """Retarded, advanced and Keldysh kernels on ``tau = n*dt``.

    The advanced kernel has no support at positive time difference, so only
    ``k_a[0]`` can be nonzero; it enters the memory integral through the
    endpoint quadrature weight.
    """

    dt: float
    k_r: np.ndarray
    k_a: np.ndarray
    k_k: np.ndarray

    def __post_init__(self):
        check_positive(self.dt, "dt")
        n = len(self.k_r)
        if len(self.k_a) != n or len(self.k_k) != n or n < 1:
            raise DimensionMismatchError("kernel arrays must have equal, non-zero length")
        for name in ("k_r", "k_a", "k_k"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (np.all(np.isfinite(self.k_r)) and np.all(np.isfinite(self.k_a))
                and np.all(np.isfinite(self.k_k))):
            raise ValueError("kernel samples must be finite")
        if np.any(self.k_a[1:] != 0):
            raise ValueError("advanced kernel must vanish for positive time difference")

    @property
    def n_steps(self):
        return len(self.k_r) - 1

    @property
    def times(self):
        return self.dt * np.arange(len(self.k_r))

    def __add__(self, other):
        if not isinstance(other, KernelTable):
            return NotImplemented
        if other.dt != self.dt or len(other.k_r) != len(self.k_r):
            raise DimensionMismatchError("cannot add kernel tables on different grids")
        return KernelTable(self.dt, self.k_r + other.k_r, self.k_a + other.k_a,
                           self.k_k + other.k_k)

    def scaled(self, factor):
        return KernelTable(self.dt, factor * self.k_r, factor * self.k_a, factor * self.k_k)


def occupation(omega, params):
    """Fermi or Bose occupation of a mode at energy ``omega``.

    At ``temperature == 0`` the step-function limit is returned; a fermion
    mode exactly at the chemical potential gets 1/2.

    Raises
    ------
    BosePoleError
        For bosons with ``omega <= mu``.
    """
    omega = np.asarray(omega, dtype=float)
    x = omega - params.mu
    T = params.temperature
    if params.statistics is Statistics.BOSON:
        if np.any(x <= 0):
            raise BosePoleError(
                f"boson mode at omega={np.min(omega)!r} is not above mu={params.mu!r}")
        if T == 0:
            n = np.zeros_like(x)
        else:
            n = 1.0 / np.expm1(x / T)
    else:
        if T == 0:
            n = np.where(x < 0, 1.0, np.where(x == 0, 0.5, 0.0))
        else:
            # 1/(e^y + 1) written to avoid overflow for large |y|
            n = 0.5 * (1.0 - np.tanh(x / (2 * T)))
    return float(n) if n.ndim == 0 else n


def rtn_kernel(params, dt, n_steps):
    """Random telegraph noise: Keldysh part only, ``i J_C exp(-tau/tau0)``."""
    dt = check_positive(dt, "dt")
    n_steps = check_int(n_steps, "n_steps", 1)
    tau = dt * np.arange(n_steps + 1)
    k_k = 1j * params.j_c * np.exp(-tau / params.tau0)
    zero = np.zeros(n_steps + 1, dtype=complex)
    return KernelTable(dt, zero, zero.copy(), k_k)


def momenta(n_sites):
    return 2 * np.pi * np.arange(n_sites) / n_sites


def dispersion(k):
    return -2.0 * np.cos(k)


def _mode_sum(weights, energies, phases, tau):
    # -i/N * sum_j w_j e^{i k_j d} e^{-i E_j tau}, vectorized over tau
    amp = weights * phases
    return -1j * (np.exp(-1j * np.outer(tau, energies)) @ amp) / len(energies)


def _band_kernel_shifted(params, dt, n_steps, shift):
    k = momenta(params.n_sites)
    omega = dispersion(k) + shift
    stat_sign = -1.0 if params.statistics is Statistics.FERMION else 1.0
    keldysh_weight = 1.0 + stat_sign * 2.0 * occupation(omega, params)
    phases = np.exp(1j * k * params.site_separation)
    tau = dt * np.arange(n_steps + 1)
    energies = omega - params.mu
    k_r = _mode_sum(np.ones_like(omega), energies, phases, tau)
    k_k = _mode_sum(keldysh_weight, energies, phases, tau)
    k_a = np.zeros(n_steps + 1, dtype=complex)
    k_a[0] = 1j * np.mean(phases)
    return KernelTable(dt, k_r, k_a, k_k)


def band_kernel(params, dt, n_steps):
    """Single-band free chain kernels by discrete inverse Fourier transform.

    ``k_r[n] = -i/N sum_j e^{i k_j d} e^{-i(omega_j - mu) n dt}`` and ``k_k``
    carries the extra weight ``1 - 2 n_k`` (fermions) or ``1 + 2 n_k``
    (bosons).  ``k_a`` keeps only its equal-time value.
    """
    dt = check_positive(dt, "dt")
    n_steps = check_int(n_steps, "n_steps", 1)
    return _band_kernel_shifted(params, dt, n_steps, 0.0)


def multiband_kernel(params, dt, n_steps):
    """Sum of band-diagonal kernels over spins and bands.

    With two bands, band 1 sits at ``omega(k) - delta_b`` and band 2 at
    ``omega(k) + delta_b``.  Spin copies are identical.
    """
    dt = check_positive(dt, "dt")
    n_steps = check_int(n_steps, "n_steps", 1)
    shifts = [0.0] if params.n_bands == 1 else [-params.delta_b, params.delta_b]
    table = None
    for shift in shifts:
        part = _band_kernel_shifted(params, dt, n_steps, shift)
        table = part if table is None else table + part
    return table.scaled(params.n_spins) if params.n_spins != 1 else table


def kernel_for(bath, dt, n_steps, kind=None):
    """Dispatch on the bath parameter type.

    ``kind`` selects ``"band"`` or ``"multiband"`` for :class:`BandParams`;
    it defaults to multiband when more than one band or spin is present.
    """
    if isinstance(bath, RtnParams):
        return rtn_kernel(bath, dt, n_steps)
    if isinstance(bath, BandParams):
        if kind is None:
            kind = "multiband" if bath.n_bands * bath.n_spins > 1 else "band"
        if kind == "band":
            return band_kernel(bath, dt, n_steps)
        if kind == "multiband":
            return multiband_kernel(bath, dt, n_steps)
        raise ValueError(f"unknown band kernel kind {kind!r}")
    raise TypeError(f"unsupported bath parameters {type(bath).__name__}")


def with_separation(params, separation):
    return replace(params, site_separation=separation)
