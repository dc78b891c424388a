import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from nmqubit import (BandParams, ChainConfig, PhysicalParams, RtnParams, VolterraSystem,
                     assemble_chain, assemble_single_qubit, band_kernel, convergence_order,
                     evolve, rtn_kernel)
from nmqubit.exceptions import DimensionMismatchError, NonFiniteStateError
from nmqubit.kernels import KernelTable, with_separation
from nmqubit.volterra import SOJOURN_BLIP_2X2, chain_index


def cos_system(dt, t_end=5.0):
    n = int(round(t_end / dt))
    return VolterraSystem([[0.0]], -np.ones(n + 1), dt)


def rtn_trace_closed_form(t, c, tau0):
    # s'' + s'/tau0 + c s = 0, s(0) = 1, s'(0) = 0
    disc = complex(1 / tau0**2 - 4 * c) ** 0.5
    r1, r2 = (-1 / tau0 + disc) / 2, (-1 / tau0 - disc) / 2
    return ((r2 * np.exp(r1 * t) - r1 * np.exp(r2 * t)) / (r2 - r1)).real


def test_cos_benchmark():
    traj = evolve(cos_system(1e-3), [1.0], 5000)
    assert np.max(np.abs(traj.states[:, 0] - np.cos(traj.times))) < 1e-4


def test_cos_benchmark_order():
    assert 1.8 <= convergence_order(cos_system, [1.0], 5.0, 0.02) <= 2.2


def test_cos_exact_error_order():
    errs = []
    for dt in (0.02, 0.01, 0.005):
        tr = evolve(cos_system(dt), [1.0], int(round(5 / dt)))
        errs.append(np.max(np.abs(tr.states[:, 0] - np.cos(tr.times))))
    assert 1.8 <= math.log2(errs[0] / errs[1]) <= 2.2
    assert 1.8 <= math.log2(errs[1] / errs[2]) <= 2.2


def test_memoryless_rotation():
    p = PhysicalParams(g=0.0, delta=1.0)
    n = 1000
    system = assemble_single_qubit(p, rtn_kernel(RtnParams(), math.pi / n, n))
    traj = evolve(system, [1, 1, 1, 1], n)
    assert_allclose(np.abs(traj.channel("s_pm")), 1, atol=1e-6)
    assert traj.channel("s_pm")[-1] == pytest.approx(-1, abs=1e-5)


def test_memoryless_order_at_least_two():
    A = np.array([[0, 1], [-1, -0.1]], dtype=complex)

    def make(dt):
        return VolterraSystem(A, np.zeros((int(round(2 / dt)) + 1, 2, 2)), dt)

    assert convergence_order(make, [1, 0], 2.0, 0.01) >= 1.9


@pytest.mark.parametrize("tau0", [0.5, 2.0, 8.0])
def test_rtn_trace_matches_closed_form(tau0):
    g, j_c, dt, n = 0.01, 1.0, 0.01, 2000
    system = assemble_single_qubit(PhysicalParams(g=g), rtn_kernel(RtnParams(j_c, tau0), dt, n))
    traj = evolve(system, [1, 0, 0, 0], n)
    expected = rtn_trace_closed_form(traj.times, g * j_c / 4, tau0)
    assert_allclose(traj.channel("s_tr").real, expected, atol=1e-6)
    # s_z has the opposite kernel sign, so c -> -c
    traj_z = evolve(system, [0, 0, 0, 1], n)
    assert_allclose(traj_z.channel("s_z").real,
                    rtn_trace_closed_form(traj.times, -g * j_c / 4, tau0), atol=1e-6)


def test_rtn_self_convergence_order():
    def make(dt):
        n = int(round(10 / dt))
        return assemble_single_qubit(PhysicalParams(g=0.01), rtn_kernel(RtnParams(1, 2), dt, n))

    assert 1.8 <= convergence_order(make, [1, 0, 0, 0], 10.0, 0.05) <= 2.2


def test_halving_dt_quarters_deviation():
    def run(dt):
        n = int(round(10 / dt))
        sys_ = assemble_single_qubit(PhysicalParams(g=0.05, delta=0.5),
                                     rtn_kernel(RtnParams(1, 1), dt, n))
        return evolve(sys_, [1, 0.5, 0.5, 0], n)

    a, b, c = run(0.04), run(0.02), run(0.01)
    d1 = np.max(np.abs(a.states - b.states[::2]))
    d2 = np.max(np.abs(b.states - c.states[::2]))
    assert 3.5 <= d1 / d2 <= 4.5


def test_rtn_kernel_signs():
    g, j_c, tau0, dt = 0.01, 1.0, 2.0, 0.1
    system = assemble_single_qubit(PhysicalParams(g=g), rtn_kernel(RtnParams(j_c, tau0), dt, 10))
    decay = g * j_c / 4 * np.exp(-dt * np.arange(11) / tau0)
    assert_allclose(system.m_kernel[:, 0, 0], -decay, atol=1e-16)
    assert_allclose(system.m_kernel[:, 3, 3], decay, atol=1e-16)


def test_zero_coupling_is_memoryless():
    system = assemble_single_qubit(PhysicalParams(g=0.0, delta=0.7),
                                   band_kernel(BandParams(n_sites=8), 0.05, 400))
    assert np.all(system.m_kernel == 0)
    traj = evolve(system, [1, 0.3, 0.3, 0.2], 400)
    assert_allclose(traj.channel("s_tr"), 1, atol=1e-10)
    assert_allclose(traj.channel("s_z"), 0.2, atol=1e-10)
    assert_allclose(np.abs(traj.channel("s_pm")), 0.3, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=16, max_size=16),
       st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_linearity(parts, alpha, beta):
    x0 = np.array(parts[0:4]) + 1j * np.array(parts[4:8])
    y0 = np.array(parts[8:12]) + 1j * np.array(parts[12:16])
    system = assemble_single_qubit(PhysicalParams(g=0.2, delta=0.5),
                                   band_kernel(BandParams(n_sites=6, mu=0.3), 0.05, 100))
    lhs = evolve(system, alpha * x0 + beta * y0, 100).states
    rhs = alpha * evolve(system, x0, 100).states + beta * evolve(system, y0, 100).states
    assert_allclose(lhs, rhs, atol=1e-10)


def test_rtn_trace_monotone_in_tau():
    ends = []
    for tau0 in (0.5, 1, 2, 4, 8):
        system = assemble_single_qubit(PhysicalParams(g=0.01),
                                       rtn_kernel(RtnParams(1.0, tau0), 0.02, 500))
        ends.append(evolve(system, [1, 0, 0, 0], 500).channel("s_tr")[-1].real)
    assert all(a >= b for a, b in zip(ends, ends[1:]))


def test_instability_guard():
    system = VolterraSystem([[0.0]], np.full(101, 1e4), 0.5)
    with pytest.raises(NonFiniteStateError):
        evolve(system, [1.0], 100)


def test_evolve_checks():
    system = cos_system(0.1, 1.0)
    with pytest.raises(DimensionMismatchError):
        evolve(system, [1.0, 0.0], 5)
    with pytest.raises(DimensionMismatchError):
        evolve(system, [1.0], 11)
    with pytest.raises(DimensionMismatchError):
        VolterraSystem(np.eye(2), np.zeros((3, 3, 3)), 0.1)


def test_sojourn_blip_assembly_structure():
    tab = band_kernel(BandParams(n_sites=8, mu=0.2), 0.1, 5)
    system = assemble_single_qubit(PhysicalParams(g=1.0), tab, SOJOURN_BLIP_2X2)
    pref = -0.25j
    # populations (rho_uu, rho_dd) are driven by the coherences through 2 K^R
    m = system.m_kernel[3]
    b_to_s = np.array([[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, -1, 0, 0]])
    mb = np.linalg.inv(b_to_s) @ m @ b_to_s
    assert mb[0, 2] == pytest.approx(pref * 2 * tab.k_r[3])
    assert mb[2, 0] == 0  # advanced part only at zero lag
    assert mb[2, 2] == pytest.approx(-pref * 2 * tab.k_k[3])
    assert mb[0, 0] == 0 and mb[0, 1] == 0
    with pytest.raises(ValueError):
        assemble_single_qubit(PhysicalParams(), tab, "bogus")


def _chain_tables(params, n_qubits, dt, n):
    return tuple(band_kernel(with_separation(params, d), dt, n) for d in range(n_qubits))


def test_chain_of_one_equals_single_qubit():
    p = PhysicalParams(g=0.05, delta=0.4)
    tab = band_kernel(BandParams(n_sites=12, mu=0.2), 0.02, 300)
    single = evolve(assemble_single_qubit(p, tab), [1, 0.5, 0.5, 0], 300)
    chain = evolve(assemble_chain(p, ChainConfig((0.4,), (tab,))), [1, 0.5, 0.5, 0], 300)
    assert_allclose(chain.states, single.states, atol=1e-12, rtol=0)


def test_chain_two_decoupled_blocks():
    p = PhysicalParams(g=0.05)
    on_site = band_kernel(BandParams(n_sites=12, mu=0.2), 0.02, 200)
    zero = KernelTable(0.02, np.zeros(201), np.zeros(201), np.zeros(201))
    system = assemble_chain(p, ChainConfig((0.3, 0.6), (on_site, zero)))
    x0 = np.zeros(16, dtype=complex)
    x0[chain_index(0, 0, 0, 2):chain_index(0, 0, 0, 2) + 4] = [1, 0.5, 0.5, 0]
    x0[chain_index(1, 1, 0, 2):chain_index(1, 1, 0, 2) + 4] = [1, 0, 0, 1]
    traj = evolve(system, x0, 200)
    for site, delta, s0 in ((0, 0.3, [1, 0.5, 0.5, 0]), (1, 0.6, [1, 0, 0, 1])):
        ref = evolve(assemble_single_qubit(PhysicalParams(g=0.05, delta=delta), on_site), s0, 200)
        r = chain_index(site, site, 0, 2)
        assert_allclose(traj.states[:, r:r + 4], ref.states, atol=1e-12)
    # untouched pairs stay zero
    r = chain_index(0, 1, 0, 2)
    assert np.all(traj.states[:, r:r + 4] == 0)


def test_chain_three_block_structure():
    p = PhysicalParams(g=0.1)
    tables = _chain_tables(BandParams(n_sites=16, mu=0.1), 3, 0.1, 10)
    system = assemble_chain(p, ChainConfig((0, 0, 0), tables))
    L, n = 3, 4
    for i in range(L):
        for k in range(L):
            for j in range(L):
                r, c = chain_index(i, j, 0, L), chain_index(k, j, 0, L)
                block = system.m_kernel[n, r:r + 4, c:c + 4]
                expected = assemble_single_qubit(p, tables[abs(i - k)]).m_kernel[n]
                assert_allclose(block, expected, atol=0)
                assert np.any(block != 0)
                # no coupling between different column indices j
                other = chain_index(k, (j + 1) % L, 0, L)
                assert np.all(system.m_kernel[n, r:r + 4, other:other + 4] == 0)


def test_chain_table_mismatch():
    a = band_kernel(BandParams(n_sites=8), 0.1, 10)
    b = band_kernel(BandParams(n_sites=8, site_separation=1), 0.2, 10)
    with pytest.raises(DimensionMismatchError):
        assemble_chain(PhysicalParams(), ChainConfig((0, 0), (a, b)))
    with pytest.raises(DimensionMismatchError):
        ChainConfig((0, 0), (a,))
