r"""Qubit states in sojourn/blip coordinates and their observables.

The spin-diagonal representation stores a qubit density matrix as the
4-vector

.. math::

    s = (s_{tr}, s_{+-}, s_{-+}, s_z)

holding the amplitudes of :math:`|\uparrow\rangle\langle\uparrow| +
|\downarrow\rangle\langle\downarrow|`, :math:`|\uparrow\rangle\langle\downarrow|`,
:math:`|\downarrow\rangle\langle\uparrow|` and :math:`|\uparrow\rangle\langle\uparrow|
- |\downarrow\rangle\langle\downarrow|`.  Units are :math:`\hbar = 1` with the
bath hopping set to one.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_finite

# index of each channel in the 4-vector
TRACE, PM, MP, Z = 0, 1, 2, 3
CHANNELS = ("s_tr", "s_pm", "s_mp", "s_z")

# s = _DECOMPOSE @ (rho00, rho01, rho10, rho11)
_DECOMPOSE = np.array(
    [[1, 0, 0, 1],
     [0, 1, 0, 0],
     [0, 0, 1, 0],
     [1, 0, 0, -1]],
    dtype=complex,
)
_RECONSTRUCT = np.linalg.inv(_DECOMPOSE)


@dataclass(frozen=True)
class PhysicalParams:
    """Coupling and qubit splitting.

    Parameters
    ----------
    g : float
        Squared coupling :math:`(\\gamma_N \\hbar A_\\perp)^2`, dimensionless.
    delta : float
        Qubit level splitting in units of the bath hopping.
    """

    g: float = 0.01
    delta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g < 0:
            raise ValueError(f"g must be finite and >= 0, got {self.g!r}")
        if not np.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")

    @property
    def hbar(self):
        return 1.0


@dataclass(frozen=True)
class SojournBlipState:
    s_tr: complex
    s_pm: complex
    s_mp: complex
    s_z: complex

    def __post_init__(self):
        check_finite(self.as_array(), "state")

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=complex).reshape(4)
        return cls(*(complex(v) for v in x))

    def as_array(self):
        return np.array([self.s_tr, self.s_pm, self.s_mp, self.s_z], dtype=complex)


def reconstruct(state):
    """Map a sojourn/blip 4-vector (or a stack of them) to 2x2 matrices.

    Accepts a :class:`SojournBlipState` or an array whose last axis has
    length 4; returns an array of shape ``(..., 2, 2)``.
    """
    if isinstance(state, SojournBlipState):
        state = state.as_array()
    s = np.asarray(state, dtype=complex)
    flat = s @ _RECONSTRUCT.T
    return flat.reshape(s.shape[:-1] + (2, 2))


def decompose(rho):
    """Inverse of :func:`reconstruct`; returns the stacked 4-vectors."""
    rho = np.asarray(rho, dtype=complex)
    flat = rho.reshape(rho.shape[:-2] + (4,))
    return flat @ _DECOMPOSE.T


def entropy(m, eps=1e-12, normalize=False):
    """Von Neumann entropy :math:`-\\mathrm{Tr}\\,\\rho \\ln \\rho` (natural log).

    The matrix need not be Hermitian or trace one; its Hermitian part is
    diagonalized, negative eigenvalues are clamped to zero and eigenvalues
    below ``eps`` contribute nothing.  With ``normalize=True`` the clamped
    spectrum is rescaled to unit sum first, which keeps the result inside
    ``[0, ln 2]`` for a qubit.

    Works on a single ``(2, 2)`` matrix or a stack ``(..., 2, 2)``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    m = check_finite(np.asarray(m, dtype=complex), "matrix")
    herm = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
    lam = np.clip(np.linalg.eigvalsh(herm), 0.0, None)
    if normalize:
        total = lam.sum(axis=-1, keepdims=True)
        lam = np.divide(lam, total, out=np.zeros_like(lam), where=total > 0)
    safe = np.where(lam > eps, lam, 1.0)
    s = -np.sum(np.where(lam > eps, lam * np.log(safe), 0.0), axis=-1) + 0.0
    return float(s) if np.ndim(s) == 0 else s


def unitary_generator(params):
    """Local generator of the free qubit acting on the 4-vector.

    Only the coherences rotate: ``s_pm`` at ``-i*delta`` and ``s_mp`` at
    ``+i*delta``.
    """
    return np.diag([0.0, -1j * params.delta, 1j * params.delta, 0.0]).astype(complex)


@dataclass
class Observables:
    """Per-time-point quantities derived from the state history.

    ``trace`` and the populations are real parts of the Hermitian part of
    the reconstructed matrix; the model does not conserve trace.
    """

    trace: np.ndarray
    p_up: np.ndarray
    p_down: np.ndarray
    coherence_pm: np.ndarray
    coherence_mp: np.ndarray
    entropy: np.ndarray
    entropy_raw: np.ndarray

    @classmethod
    def from_states(cls, states, eps=1e-12):
        states = np.asarray(states, dtype=complex)
        rho = reconstruct(states)
        return cls(
            trace=states[:, TRACE].real,
            p_up=rho[:, 0, 0].real,
            p_down=rho[:, 1, 1].real,
            coherence_pm=np.abs(states[:, PM]),
            coherence_mp=np.abs(states[:, MP]),
            entropy=entropy(rho, eps=eps, normalize=True),
            entropy_raw=entropy(rho, eps=eps, normalize=False),
        )


@dataclass
class Trajectory:
    """State history on a uniform time grid.

    ``states`` has shape ``(n_times, dim)``.  For ``dim == 4`` the columns are
    the sojourn/blip channels and :attr:`observables` is filled in.
    """

    times: np.ndarray
    states: np.ndarray
    observables: Observables = field(default=None, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("states and times differ in length")
        if self.times.size > 1:
            steps = np.diff(self.times)
            if np.any(steps <= 0):
                raise ValueError("times must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
                raise ValueError("times must be uniformly spaced")
        if self.observables is None and self.states.ndim == 2 and self.states.shape[1] == 4:
            self.observables = Observables.from_states(self.states)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    def __len__(self):
        return self.times.shape[0]

    def state(self, n):
        return SojournBlipState.from_array(self.states[n])

    def channel(self, name):
        return self.states[:, CHANNELS.index(name)]
