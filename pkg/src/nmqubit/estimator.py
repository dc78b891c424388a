"""scikit-learn style front end for the master-equation simulator.

:class:`MasterEquationSimulator` follows the estimator conventions
(constructor stores hyper-parameters only, ``fit`` builds the kernel table
and the Volterra system, trailing-underscore attributes hold fitted state),
so ``get_params``/``set_params``/``clone`` and parameter grids work as
usual::

    sim = MasterEquationSimulator(bath=RtnParams(1.0, 2.0), g=0.01, t_max=20)
    traj = sim.fit().simulate([1, 0, 0, 0])
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_state_batch
from .kernels import BandParams, RtnParams, kernel_for
from .states import PhysicalParams
from .volterra import ASSEMBLIES, SPIN_DIAGONAL, assemble_single_qubit, evolve


def n_steps_for(dt, t_max):
    """Number of steps of size ``dt`` reaching ``t_max`` (rounded to nearest)."""
    n = int(round(t_max / dt))
    if n < 1:
        raise ValueError(f"t_max={t_max} must exceed dt={dt}")
    return n


class MasterEquationSimulator(TransformerMixin, BaseEstimator):
    """Single-qubit memory-kernel master equation.

    Parameters
    ----------
    bath : RtnParams or BandParams
        Bath description.
    g : float
        Squared coupling.
    delta : float
        Qubit splitting.
    dt, t_max : float
        Uniform time grid ``0, dt, ..., t_max``.
    assembly : {"spin_diagonal", "sojourn_blip_2x2"}
        How the kernels act on the state.
    kernel_kind : {None, "band", "multiband"}
        Forwarded to :func:`~nmqubit.kernels.kernel_for`.

    Attributes
    ----------
    kernel_ : KernelTable
    system_ : VolterraSystem
    times_ : ndarray
    """

    def __init__(self, bath=None, g=0.01, delta=0.0, dt=0.01, t_max=1.0,
                 assembly=SPIN_DIAGONAL, kernel_kind=None):
        self.bath = bath
        self.g = g
        self.delta = delta
        self.dt = dt
        self.t_max = t_max
        self.assembly = assembly
        self.kernel_kind = kernel_kind

    def fit(self, X=None, y=None):
        bath = RtnParams() if self.bath is None else self.bath
        if not isinstance(bath, (RtnParams, BandParams)):
            raise TypeError(f"bath must be RtnParams or BandParams, got {type(bath).__name__}")
        if self.assembly not in ASSEMBLIES:
            raise ValueError(f"assembly must be one of {ASSEMBLIES}, got {self.assembly!r}")
        dt = check_positive(self.dt, "dt")
        self.n_steps_ = n_steps_for(dt, self.t_max)
        self.params_ = PhysicalParams(g=self.g, delta=self.delta)
        self.kernel_ = kernel_for(bath, dt, self.n_steps_, self.kernel_kind)
        self.system_ = assemble_single_qubit(self.params_, self.kernel_, self.assembly)
        self.times_ = dt * np.arange(self.n_steps_ + 1)
        return self

    def simulate(self, x0):
        """Trajectory for one initial 4-vector."""
        check_is_fitted(self, "system_")
        x0 = check_state_batch(x0)
        if x0.shape[0] != 1:
            raise ValueError("simulate takes a single initial state")
        return evolve(self.system_, x0[0], self.n_steps_)

    def predict(self, X):
        """Full state histories, shape ``(n_samples, n_times, 4)``."""
        check_is_fitted(self, "system_")
        X = check_state_batch(X)
        return np.stack([evolve(self.system_, x, self.n_steps_).states for x in X])

    def transform(self, X):
        """Final states at ``t_max``, shape ``(n_samples, 4)``."""
        return self.predict(X)[:, -1, :]
