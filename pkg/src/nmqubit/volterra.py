r"""Fixed-step integration of linear Volterra integro-differential systems.

Solves

.. math::

    \dot x(t) = A x(t) + \int_0^t M(t - t_1)\, x(t_1)\, dt_1

on a uniform grid.  The memory integral uses trapezoidal weights and the
time step is a Heun predictor-corrector applied in the interaction frame of
``A`` (integrating factor ``exp(A dt)``), so the scheme is globally second
order for smooth kernels and exact when the memory vanishes.  The physics lives entirely in how ``A`` and ``M``
are assembled; see :func:`assemble_single_qubit` and :func:`assemble_chain`.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ._validation import check_finite, check_int, check_positive
from .exceptions import DimensionMismatchError, NonFiniteStateError
from .states import Trajectory, unitary_generator

OVERFLOW_GUARD = 1e12

SPIN_DIAGONAL = "spin_diagonal"
SOJOURN_BLIP_2X2 = "sojourn_blip_2x2"
ASSEMBLIES = (SPIN_DIAGONAL, SOJOURN_BLIP_2X2)

# s = _B_TO_S @ (rho_uu, rho_dd, rho_ud, rho_du)
_B_TO_S = np.array(
    [[1, 1, 0, 0],
     [0, 0, 1, 0],
     [0, 0, 0, 1],
     [1, -1, 0, 0]],
    dtype=complex,
)
_S_TO_B = np.linalg.inv(_B_TO_S)


@dataclass(frozen=True)
class VolterraSystem:
    """``dx/dt = a_local x + int_0^t M(t-t1) x(t1) dt1`` sampled at spacing ``dt``.

    ``m_kernel[n]`` is the ``dim x dim`` memory matrix at time difference
    ``n*dt``.
    """

    a_local: np.ndarray
    m_kernel: np.ndarray
    dt: float

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_local, dtype=complex))
        m = np.asarray(self.m_kernel, dtype=complex)
        if m.ndim == 1:
            m = m[:, None, None]
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"a_local must be square, got {a.shape}")
        if m.ndim != 3 or m.shape[1:] != a.shape or m.shape[0] < 1:
            raise DimensionMismatchError(
                f"m_kernel shape {m.shape} incompatible with a_local {a.shape}")
        check_finite(a, "a_local")
        check_finite(m, "m_kernel")
        check_positive(self.dt, "dt")
        a.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "a_local", a)
        object.__setattr__(self, "m_kernel", m)

    @property
    def dim(self):
        return self.a_local.shape[0]

    @property
    def max_steps(self):
        return self.m_kernel.shape[0] - 1


@dataclass(frozen=True)
class ChainConfig:
    """A chain of qubits sharing one bath.

    ``tables[d]`` is the kernel between qubits ``d`` sites apart.
    """

    deltas: tuple
    tables: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        object.__setattr__(self, "tables", tuple(self.tables))
        if len(self.deltas) < 1:
            raise ValueError("a chain needs at least one qubit")
        if len(self.tables) != len(self.deltas):
            raise DimensionMismatchError(
                f"need one kernel table per separation 0..{len(self.deltas) - 1}, "
                f"got {len(self.tables)}")

    @property
    def n_qubits(self):
        return len(self.deltas)


def _channel_kernels(g, table, assembly):
    """Memory matrices for one kernel table, shape ``(n_steps + 1, 4, 4)``."""
    k_r, k_a, k_k = table.k_r, table.k_a, table.k_k
    pref = -0.25j * g
    n = len(k_r)
    if assembly == SPIN_DIAGONAL:
        m = np.zeros((n, 4, 4), dtype=complex)
        m[:, 0, 0] = -k_k
        m[:, 1, 1] = k_r + k_a
        m[:, 2, 2] = -1j * (k_a - k_r)
        m[:, 3, 3] = k_k
        return pref * m
    if assembly == SOJOURN_BLIP_2X2:
        # populations (sojourn row) couple to coherences (blip row)
        mb = np.zeros((n, 4, 4), dtype=complex)
        for p, c in ((0, 2), (1, 3)):
            mb[:, p, c] = 2 * k_r
            mb[:, c, p] = 2 * k_a
            mb[:, c, c] = -2 * k_k
        return pref * (_B_TO_S @ mb @ _S_TO_B)
    raise ValueError(f"unknown assembly {assembly!r}; expected one of {ASSEMBLIES}")


def assemble_single_qubit(params, table, assembly=SPIN_DIAGONAL):
    """Four-channel system for one qubit coupled to one bath.

    In the spin-diagonal reading each channel is convolved with its own
    kernel: trace with ``-K^K``, ``s_pm`` with ``K^R + K^A``, ``s_mp`` with
    ``-i(K^A - K^R)`` and ``s_z`` with ``K^K``, all times ``-(i/4) g``.
    """
    return VolterraSystem(unitary_generator(params),
                          _channel_kernels(params.g, table, assembly), table.dt)


def chain_index(i, j, channel, n_qubits):
    return (i * n_qubits + j) * 4 + channel


def assemble_chain(params, config, assembly=SPIN_DIAGONAL):
    """System for ``rho_s(i, j)`` over all site pairs of an L-qubit chain.

    The state has ``4 L^2`` entries ordered by :func:`chain_index`.  The
    memory term couples ``rho_s(i, j)`` to ``rho_s(k, j)`` through the kernel
    for separation ``|i - k|``; the free rotation of ``rho_s(i, j)`` uses the
    splitting of site ``i``.
    """
    tables = config.tables
    first = tables[0]
    for t in tables[1:]:
        if t.dt != first.dt or len(t.k_r) != len(first.k_r):
            raise DimensionMismatchError("chain kernel tables must share dt and length")
    L = config.n_qubits
    dim = 4 * L * L
    blocks = [_channel_kernels(params.g, t, assembly) for t in tables]
    m = np.zeros((len(first.k_r), dim, dim), dtype=complex)
    a = np.zeros((dim, dim), dtype=complex)
    for i in range(L):
        site = type(params)(g=params.g, delta=config.deltas[i])
        gen = unitary_generator(site)
        for j in range(L):
            r = chain_index(i, j, 0, L)
            a[r:r + 4, r:r + 4] = gen
            for k in range(L):
                c = chain_index(k, j, 0, L)
                m[:, r:r + 4, c:c + 4] = blocks[abs(i - k)]
    return VolterraSystem(a, m, first.dt)


def evolve(system, x0, n_steps):
    """Integrate ``system`` from ``x0`` for ``n_steps`` steps.

    Returns a :class:`~nmqubit.states.Trajectory` holding the state at all
    ``n_steps + 1`` grid points.

    Raises
    ------
    NonFiniteStateError
        If any component exceeds the overflow guard.
    """
    n_steps = check_int(n_steps, "n_steps", 1)
    d = system.dim
    x0 = check_finite(np.asarray(x0, dtype=complex).reshape(-1), "x0")
    if x0.shape[0] != d:
        raise DimensionMismatchError(f"x0 has length {x0.shape[0]}, system dim is {d}")
    if n_steps > system.max_steps:
        raise DimensionMismatchError(
            f"n_steps={n_steps} exceeds kernel length {system.max_steps}")

    dt = system.dt
    E = expm(system.a_local * dt)
    M = system.m_kernel[: n_steps + 1]
    K = M.shape[0]
    # rows of flipped[:, K-1-n:K, :] pair M[n-m] with x_m for m = 0..n
    flipped = np.ascontiguousarray(M[::-1].transpose(1, 0, 2))
    half_m0 = 0.5 * dt * M[0]

    x = np.empty((n_steps + 1, d), dtype=complex)
    x[0] = x0
    mem = np.zeros(d, dtype=complex)  # memory integral vanishes at t = 0
    for n in range(n_steps):
        lo = K - 2 - n
        block = flipped[:, lo:K - 1, :].reshape(d, (n + 1) * d)
        hist = dt * (block @ x[: n + 1].reshape(-1) - 0.5 * (M[n + 1] @ x[0]))
        carried = E @ (x[n] + 0.5 * dt * mem)
        pred = E @ (x[n] + dt * mem)
        new = carried + 0.5 * dt * (hist + half_m0 @ pred)
        if not np.all(np.abs(new) < OVERFLOW_GUARD):
            raise NonFiniteStateError(
                f"state left the overflow guard at step {n + 1} (t={(n + 1) * dt:g}); "
                "try a smaller dt")
        x[n + 1] = new
        mem = hist + half_m0 @ new

    times = dt * np.arange(n_steps + 1)
    return Trajectory(times, x)


def _max_deviation(coarse, fine):
    # fine has twice the resolution; compare on the coarse grid
    return float(np.max(np.abs(coarse.states - fine.states[::2])))


def convergence_order(make_system, x0, t_end, dt):
    """Observed order of accuracy from runs at ``dt``, ``dt/2`` and ``dt/4``.

    ``make_system(dt)`` must build the system on the requested grid.  The
    estimate is ``log2(|x_dt - x_dt/2| / |x_dt/2 - x_dt/4|)`` in the max norm
    over the common coarse grid, which tends to 2 for this scheme.
    """
    dt = check_positive(dt, "dt")
    n = int(round(t_end / dt))
    if n < 1 or not np.isclose(n * dt, t_end):
        raise ValueError("t_end must be a positive multiple of dt")
    runs = [evolve(make_system(dt / 2**k), x0, n * 2**k) for k in range(3)]
    e1 = _max_deviation(runs[0], runs[1])
    e2 = _max_deviation(runs[1], runs[2])
    # differences at round-off level mean the scheme is exact for this system
    floor = 1e3 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(runs[2].states))))
    if e2 <= floor:
        return np.inf
    return float(np.log2(e1 / e2))
