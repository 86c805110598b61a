"""The two engines are independent implementations of the same dynamics;
each serves as the oracle for the other."""

import numpy as np
import pytest

from floquet_sre import fermion as fm
from floquet_sre import statevector as sv
from floquet_sre.model import AdiabaticPath, FloquetParams, ProductState
from floquet_sre.analysis import run_adiabatic


def random_params(rng, sites):
    return FloquetParams(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi), sites)


def test_single_period_x_expectations():
    L = 6
    p = FloquetParams(0.7, 2.1, L)
    m = fm.evolve(fm.initial_covariance(ProductState.all_plus(L)), fm.step_map(p))
    s = sv.apply_floquet(sv.prepare(ProductState.all_plus(L)), p)
    np.testing.assert_allclose(fm.x_expectations(m),
                               sv.StatevectorEngine(L).x_expectations(s), atol=1e-10)


def test_single_period_edge_minus_state():
    L = 6
    p = FloquetParams(0.7, 2.1, L)
    init = ProductState.edges_minus(L)
    m = fm.evolve(fm.initial_covariance(init), fm.step_map(p))
    s = sv.apply_floquet(sv.prepare(init), p)
    np.testing.assert_allclose(fm.x_expectations(m),
                               sv.StatevectorEngine(L).x_expectations(s), atol=1e-10)


@pytest.mark.parametrize("sites", range(2, 11))
def test_random_drive_sequences_agree(sites, rng):
    signs = tuple(rng.choice([-1, 1], size=sites))
    init = ProductState(signs)
    feng, seng = fm.FermionEngine(sites), sv.StatevectorEngine(sites)
    mstate, sstate = feng.initial_state(init), seng.initial_state(init)
    for _ in range(25):
        p = random_params(rng, sites)
        feng.apply_period(mstate, p)
        sstate = seng.apply_period(sstate, p)
        np.testing.assert_allclose(feng.x_expectations(mstate),
                                   seng.x_expectations(sstate), atol=1e-10)
        for l_a in range(1, sites + 1):
            assert fm.subsystem_parity(mstate, l_a) == pytest.approx(
                sv.parity_expectation(sstate, l_a), abs=1e-10)


def test_parity_matches_symmetry_resolved_probability(rng):
    L = 8
    feng, seng = fm.FermionEngine(L), sv.StatevectorEngine(L)
    mstate = feng.initial_state(ProductState.all_plus(L))
    sstate = seng.initial_state(ProductState.all_plus(L))
    for _ in range(10):
        p = random_params(rng, L)
        feng.apply_period(mstate, p)
        sstate = seng.apply_period(sstate, p)
    s1_fermion = feng.s1_even(mstate, 4)
    spec = sv.sym_resolved(sstate, 4, 1)
    assert s1_fermion == pytest.approx(spec.entries["even"], abs=1e-10)


def test_adiabatic_sweep_engine_independence():
    L = 8
    path = AdiabaticPath(sites=L, n_steps=40)
    init = ProductState.all_plus(L)
    a = run_adiabatic(fm.FermionEngine(L), path, L, L // 2, init)
    b = run_adiabatic(sv.StatevectorEngine(L), path, L, L // 2, init)
    assert np.max(np.abs(a.s1_even - b.s1_even)) < 1e-9
    assert np.max(np.abs(a.x_site - b.x_site)) < 1e-9


def test_many_body_quasienergies_from_single_particle_modes():
    # the exact spectrum is {offset + sum_i s_i omega_i / 2, s_i = +/-1}
    L = 4
    p = FloquetParams(0.7, 2.1, L)
    single = fm.quasienergy_spectrum(fm.step_map(p))
    pos = single[single > 1e-12]
    assert pos.size == L
    many = np.sort(sv.many_body_spectrum(p).quasienergies)

    combos = []
    for bits in range(2 ** L):
        signs = np.array([1 if bits >> i & 1 else -1 for i in range(L)])
        combos.append(0.5 * signs @ pos)
    combos = np.asarray(combos)

    def fold(x):
        return np.angle(np.exp(1j * x))

    best = np.inf
    for anchor in combos:
        cand = np.sort(fold(combos - anchor + many[0]))
        best = min(best, np.max(np.abs(np.sort(fold(many)) - cand)))
    assert best < 1e-8


def test_corrupted_sign_convention_is_caught():
    # flipping the covariance sign convention must produce a loud
    # cross-engine mismatch (regression guard for the JW sign choice)
    L = 4
    p = FloquetParams(0.7, 2.1, L)
    init = ProductState.all_plus(L)
    m_bad = -fm.initial_covariance(init)
    m_bad = fm.evolve(m_bad, fm.step_map(p))
    s = sv.apply_floquet(sv.prepare(init), p)
    diff = np.max(np.abs(fm.x_expectations(m_bad)
                         - sv.StatevectorEngine(L).x_expectations(s)))
    assert diff > 0.1
