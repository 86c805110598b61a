import math

import numpy as np
import pytest
import scipy.linalg

from floquet_sre import statevector as sv
from floquet_sre.cohomology import AbelianGroup
from floquet_sre.model import FloquetParams, ProductState, sweet_spot


def random_qubit(rng):
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return z / np.linalg.norm(z)


def zz_chain_hamiltonian(L):
    Z = np.diag([1.0, -1.0])
    terms = []
    for l in range(L - 1):
        ops = [np.eye(2)] * L
        ops[l] = Z
        ops[l + 1] = Z
        term = ops[0]
        for op in ops[1:]:
            term = np.kron(term, op)
        terms.append(term)
    return sum(terms)


# ----------------------------------------------------------------- prepare

def test_prepare_all_plus_two_sites():
    s = sv.prepare(ProductState.all_plus(2))
    np.testing.assert_allclose(s.amplitudes, 0.5)


def test_prepare_minus_plus_ordering():
    # site 0 is the most significant bit
    s = sv.prepare(ProductState.from_string("-+"))
    np.testing.assert_allclose(s.amplitudes, [0.5, 0.5, -0.5, -0.5])


def test_prepare_x_expectations_match_signs(rng):
    signs = tuple(rng.choice([-1, 1], size=6))
    s = sv.prepare(ProductState(signs))
    eng = sv.StatevectorEngine(6)
    np.testing.assert_allclose(eng.x_expectations(s), signs, atol=1e-14)


def test_prepare_cap():
    with pytest.raises(ValueError):
        sv.prepare(ProductState.all_plus(15))


# ------------------------------------------------------------ apply_floquet

def test_apply_floquet_identity_drive():
    s = sv.prepare(ProductState.edges_minus(4))
    s2 = sv.apply_floquet(s, FloquetParams(0.0, 0.0, 4))
    np.testing.assert_allclose(s2.amplitudes, s.amplitudes, atol=1e-15)


@pytest.mark.parametrize("L", [3, 4])
def test_sweet_spot_period_is_edge_zz_flip(L):
    # U_ZZ(pi) against an independent matrix-exponential oracle, and its
    # closed form: i^(L-1) Z_1 Z_L (amplitudes compared exactly, no
    # global-phase freedom)
    base = sv.prepare(ProductState.all_plus(L))
    out = sv.apply_floquet(base, sweet_spot(L))
    u = scipy.linalg.expm(0.5j * np.pi * zz_chain_hamiltonian(L))
    np.testing.assert_allclose(out.amplitudes, u @ base.amplitudes, atol=1e-12)

    z1zl = np.kron(np.kron(np.diag([1.0, -1.0]), np.eye(2 ** (L - 2))),
                   np.diag([1.0, -1.0]))
    target = (1j) ** (L - 1) * (z1zl @ base.amplitudes)
    np.testing.assert_allclose(out.amplitudes, target, atol=1e-12)


def test_floquet_operator_matches_gate_application(rng):
    p = FloquetParams(0.8, 1.9, 4)
    f = sv.floquet_operator(p)
    z = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    z /= np.linalg.norm(z)
    via_gates = sv.apply_floquet(sv.PureState(z.copy(), 4), p).amplitudes
    np.testing.assert_allclose(f @ z, via_gates, atol=1e-13)


def test_norm_preserved_over_many_steps():
    s = sv.prepare(ProductState.all_plus(4))
    p = FloquetParams(0.77, 2.31, 4)
    for _ in range(10_000):
        s = sv.apply_floquet(s, p)
    assert abs(s.norm() - 1.0) < 1e-9


# ---------------------------------------------------------- reduced density

def test_reduced_density_product_state_is_pure():
    rho = sv.reduced_density(sv.prepare(ProductState.all_plus(4)), 2).rho
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
    assert np.trace(rho @ rho) == pytest.approx(1.0, abs=1e-12)


def test_reduced_density_bell_pair():
    bell = sv.PureState(np.array([1, 0, 0, 1]) / math.sqrt(2), 2)
    rho = sv.reduced_density(bell, 1).rho
    np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-14)


def test_reduced_density_matches_schmidt_oracle(rng):
    z = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    s = sv.PureState(z / np.linalg.norm(z), 6)
    rho = sv.reduced_density(s, 2).rho
    evals = np.sort(np.linalg.eigvalsh(rho))[::-1]
    svals = np.linalg.svd(s.amplitudes.reshape(4, 16), compute_uv=False)
    schmidt = np.zeros_like(evals)
    schmidt[: svals.size] = svals ** 2
    np.testing.assert_allclose(evals, schmidt, atol=1e-10)
    assert evals.min() > -1e-10


def test_reduced_density_range():
    s = sv.prepare(ProductState.all_plus(3))
    with pytest.raises(ValueError):
        sv.reduced_density(s, 3)


# -------------------------------------------------------------- projectors

def test_z2_projector_single_site():
    proj = sv.charge_projector(AbelianGroup((2,)), 0, 1)
    plus = np.array([1, 1]) / math.sqrt(2)
    np.testing.assert_allclose(proj, np.outer(plus, plus), atol=1e-14)
    np.testing.assert_allclose(proj, (np.eye(2) + np.array([[0, 1], [1, 0]])) / 2,
                               atol=1e-14)


def test_z2_projectors_complete():
    even = sv.charge_projector(AbelianGroup((2,)), 0, 3)
    odd = sv.charge_projector(AbelianGroup((2,)), 1, 3)
    np.testing.assert_allclose(even + odd, np.eye(8), atol=1e-14)


def test_z4_qudit_projector_algebra():
    group = AbelianGroup((4,))
    projs = [sv.charge_projector(group, q, 2) for q in range(4)]
    total = sum(projs)
    np.testing.assert_allclose(total, np.eye(16), atol=1e-10)
    for i, pi in enumerate(projs):
        np.testing.assert_allclose(pi @ pi, pi, atol=1e-10)
        for pj in projs[i + 1:]:
            np.testing.assert_allclose(pi @ pj, 0.0, atol=1e-10)


def test_edge_flip_conjugation_swaps_parity_projectors():
    # at the sweet spot v_L = Z_1; conjugating Pi_even gives Pi_odd exactly
    group = AbelianGroup((2,))
    even = sv.charge_projector(group, 0, 2)
    odd = sv.charge_projector(group, 1, 2)
    z1 = np.kron(np.diag([1.0, -1.0]), np.eye(2))
    np.testing.assert_allclose(z1 @ even @ z1, odd, atol=1e-15)


# ------------------------------------------------------------ sym_resolved

def test_sym_resolved_all_plus():
    s = sv.prepare(ProductState.all_plus(4))
    spec = sv.sym_resolved(s, 2, 1)
    assert spec.entries["even"] == pytest.approx(1.0, abs=1e-12)
    assert spec.entries["odd"] == pytest.approx(0.0, abs=1e-12)


def test_sym_resolved_after_sweet_spot_period():
    s = sv.apply_floquet(sv.prepare(ProductState.all_plus(6)), sweet_spot(6))
    spec = sv.sym_resolved(s, 3, 1)
    assert spec.entries["even"] == pytest.approx(0.0, abs=1e-12)
    assert spec.entries["odd"] == pytest.approx(1.0, abs=1e-12)


def test_sym_resolved_equals_parity_shortcut(rng):
    s = sv.prepare(ProductState.all_plus(6))
    for _ in range(7):
        s = sv.apply_floquet(s, FloquetParams(rng.uniform(0, np.pi), rng.uniform(0, np.pi), 6))
    spec = sv.sym_resolved(s, 3, 1)
    expected = 0.5 * (1 + sv.parity_expectation(s, 3))
    assert spec.entries["even"] == pytest.approx(expected, abs=1e-12)
    assert spec.entries["even"] + spec.entries["odd"] == pytest.approx(1.0, abs=1e-10)


def test_sym_resolved_second_moment_is_purity_split(rng):
    s = sv.prepare(ProductState.all_plus(4))
    s = sv.apply_floquet(s, FloquetParams(0.9, 2.2, 4))
    spec = sv.sym_resolved(s, 2, 2)
    rho = sv.reduced_density(s, 2).rho
    total = spec.entries["even"] + spec.entries["odd"]
    assert total == pytest.approx(float(np.trace(rho @ rho).real), abs=1e-10)


# ----------------------------------------------------------------- spectra

def test_many_body_spectrum_identity_drive():
    spec = sv.many_body_spectrum(FloquetParams(0.0, 0.0, 3))
    np.testing.assert_allclose(spec.quasienergies, 0.0, atol=1e-12)


def circular_gap(omegas, target):
    return np.min(np.abs(np.angle(np.exp(1j * (omegas - target)))))


def test_many_body_spectrum_ferromagnetic_endpoint():
    beta = math.pi - 1.0
    spec = sv.many_body_spectrum(FloquetParams(0.0, beta, 4))
    # maximally excited state at 3 beta / 2, one domain wall less at beta / 2
    assert circular_gap(spec.quasienergies, 1.5 * beta) < 1e-8
    assert circular_gap(spec.quasienergies, 0.5 * beta) < 1e-8


def test_many_body_spectrum_eigenvector_residuals():
    p = FloquetParams(0.7, 2.1, 4)
    spec = sv.many_body_spectrum(p)
    f = sv.floquet_operator(p)
    for k in range(16):
        v = spec.eigenvectors[:, k]
        lam = np.exp(-1j * spec.quasienergies[k])
        assert np.linalg.norm(f @ v - lam * v) < 1e-9


def test_plus_state_splits_into_pi_separated_pair():
    spec = sv.many_body_spectrum(FloquetParams(1.0, math.pi, 4))
    plus = sv.prepare(ProductState.all_plus(4)).amplitudes
    weights = np.abs(spec.eigenvectors.conj().T @ plus) ** 2
    acc: dict[float, float] = {}
    for om, w in zip(spec.quasienergies, weights):
        key = round(om, 9)
        acc[key] = acc.get(key, 0.0) + w
    heavy = sorted(om for om, w in acc.items() if w > 0.25)
    assert len(heavy) == 2
    assert abs(abs(heavy[1] - heavy[0]) - math.pi) < 1e-8


# --------------------------------------------------------------- edge flips

def test_edge_flips_at_zero_kick_are_pauli_z():
    vl, vr = sv.edge_flip_operators(FloquetParams(0.0, math.pi, 3))
    np.testing.assert_allclose(vl, np.kron(np.diag([1.0, -1.0]), np.eye(4)), atol=1e-15)
    np.testing.assert_allclose(vr, np.kron(np.eye(4), np.diag([1.0, -1.0])), atol=1e-15)


def test_edge_flips_are_unitary():
    vl, vr = sv.edge_flip_operators(FloquetParams(1.0, math.pi, 4))
    np.testing.assert_allclose(vl @ vl.conj().T, np.eye(16), atol=1e-14)
    np.testing.assert_allclose(vr @ vr.conj().T, np.eye(16), atol=1e-14)


def test_edge_flip_combinations_are_floquet_eigenstates():
    p = FloquetParams(1.0, math.pi, 4)
    vl, vr = sv.edge_flip_operators(p)
    f = sv.floquet_operator(p)
    base = sv.prepare(ProductState.all_plus(4)).amplitudes
    flipped = vl @ (vr @ base)
    lams = []
    for sign in (1.0, -1.0):
        v = base + sign * flipped
        v /= np.linalg.norm(v)
        lam = v.conj() @ (f @ v)
        assert np.linalg.norm(f @ v - lam * v) < 1e-8
        lams.append(complex(lam))
    # the pair sits pi apart in quasienergy
    assert lams[0] == pytest.approx(-lams[1], abs=1e-10)


# ----------------------------------------------------------------- teleport

def test_teleport_topological_point_is_perfect(rng):
    for L in (4, 6):
        psi = random_qubit(rng)
        branches = sv.teleport(psi, L)
        assert branches[(0, "+")].fidelity >= 1 - 1e-10
        total = sum(b.probability for b in branches.values())
        assert total == pytest.approx(1.0, abs=1e-10)


def test_teleport_plus_state_needs_no_correction():
    branches = sv.teleport(np.array([1.0, 0.0]), 4)
    # the +-measurement branches return |+> on the last site exactly; the
    # minus branches herald an edge flip and carry |-> instead
    assert branches[(0, "+")].fidelity == pytest.approx(1.0, abs=1e-10)
    assert branches[(1, "+")].fidelity == pytest.approx(1.0, abs=1e-10)
    assert branches[(0, "-")].fidelity == pytest.approx(0.0, abs=1e-10)
    assert sum(b.probability for b in branches.values()) == pytest.approx(1.0, abs=1e-10)


def test_teleport_trivial_drive_fails(rng):
    psi = np.array([0.6, 0.8], dtype=complex)
    branches = sv.teleport(psi, 4, drive=FloquetParams(0.0, 0.0, 4))
    assert branches[(0, "+")].fidelity == pytest.approx(abs(psi[0]) ** 2, abs=1e-10)
    assert branches[(0, "+")].fidelity < 0.99


def test_teleport_outside_phase_rejected():
    with pytest.raises(ValueError, match="topological"):
        sv.teleport(np.array([1.0, 0.0]), 4, theta1=math.pi / 4, n_ramp=10)


def test_teleport_adiabatic_short_ramp(rng):
    psi = random_qubit(rng)
    branches = sv.teleport(psi, 4, theta1=0.05 * math.pi, n_ramp=200)
    assert branches[(0, "+")].fidelity > 0.99


# -------------------------------------------------------------- SRE cycling

def test_sre_cycling_sweet_spot_exact():
    L = 6
    s = sv.prepare(ProductState.all_plus(L))
    for n in (1, 2):
        assert sv.sre_cycling_check(sweet_spot(L), s, L // 2, n,
                                    pumped_charge=1, tol=1e-12)


def test_sre_cycling_trivial_drive():
    L = 4
    s = sv.prepare(ProductState.all_plus(L))
    assert sv.sre_cycling_check(FloquetParams(0.0, 0.0, L), s, 2, 1,
                                pumped_charge=0, tol=1e-12)


def test_sre_cycling_wrong_charge_detected():
    L = 4
    s = sv.prepare(ProductState.all_plus(L))
    assert not sv.sre_cycling_check(sweet_spot(L), s, 2, 1, pumped_charge=0)


def test_sre_cycling_on_exact_eigenstates():
    # at L = 6 three quarters of the exact eigenstates satisfy the swap at
    # machine precision; the rest carry the exponentially small edge
    # hybridization (up to ~9e-8 here), which drops below 1e-8 at L = 8
    L = 6
    theta = 0.1 * math.pi / 4
    p = FloquetParams(math.cos(theta), math.pi - math.sin(theta), L)
    spec = sv.many_body_spectrum(p)
    for n in (1, 2):
        passed = sum(
            sv.sre_cycling_check(p, sv.PureState(spec.eigenvectors[:, k].copy(), L),
                                 L // 2, n, pumped_charge=1, tol=1e-8)
            for k in range(2 ** L))
        assert passed >= 48


def test_edge_hybridized_eigenstates_finite_size_splitting():
    theta = 0.1 * math.pi / 4
    for L, bound in ((6, 1e-7), (8, 1e-8)):
        p = FloquetParams(math.cos(theta), math.pi - math.sin(theta), L)
        spec = sv.many_body_spectrum(p)
        worst = 0.0
        for k in range(2 ** L):
            state = sv.PureState(spec.eigenvectors[:, k].copy(), L)
            entries = sv.sym_resolved(state, L // 2, 1).entries
            worst = max(worst, abs(entries["even"] - entries["odd"]))
        assert worst < bound
