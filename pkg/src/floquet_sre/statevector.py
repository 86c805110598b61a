"""Exact statevector engine for small chains.

Holds the full 2^L amplitude vector in the Z product basis with site 0 as
the most significant bit (the leftmost site).  This ordering is the single
convention shared with the free-fermion engine's oracles.  Supplies gate
application, reduced density matrices, symmetry-resolved moments, the
many-body Floquet spectrum, and the teleportation-through-the-edge-modes
protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .cohomology import AbelianGroup, SymResolvedSpectrum, character
from .model import GATE_ORDER, AdiabaticPath, FloquetParams, ProductState, params_at

DEFAULT_SITE_CAP = 14

_PLUS = np.array([1.0, 1.0]) / math.sqrt(2.0)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2.0)
_Z2 = AbelianGroup((2,))
_Z2_LABELS = {0: "even", 1: "odd"}


@dataclass
class PureState:
    """2^L complex amplitudes, site 0 = most significant basis-index bit."""

    amplitudes: np.ndarray
    site_count: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.site_count,):
            raise ValueError("amplitude vector has wrong length")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class ReducedDensity:
    """Reduced density matrix of the leftmost ``subsystem_size`` sites."""

    rho: np.ndarray
    subsystem_size: int


@dataclass
class ManyBodySpectrum:
    """Quasienergies (in (-pi, pi]) and a unitary eigenbasis of F."""

    quasienergies: np.ndarray
    eigenvectors: np.ndarray


@dataclass
class TeleportBranch:
    probability: float
    fidelity: float


def prepare(state: ProductState, cap: int = DEFAULT_SITE_CAP) -> PureState:
    """X-basis product state as a statevector."""
    if state.sites > cap:
        raise ValueError(f"L = {state.sites} exceeds the statevector cap {cap}")
    vecs = [_PLUS if s > 0 else _MINUS for s in state.signs]
    amps = reduce(np.kron, vecs).astype(complex)
    return PureState(amps, state.sites)


_BOND_SUM_CACHE: dict[int, np.ndarray] = {}


def _bond_sum(sites: int) -> np.ndarray:
    """sum_l s_l s_{l+1} over nearest-neighbour Z pairs, per basis index."""
    if sites not in _BOND_SUM_CACHE:
        idx = np.arange(2 ** sites)
        shifts = sites - 1 - np.arange(sites)
        s = 1 - 2 * ((idx[:, None] >> shifts[None, :]) & 1)
        _BOND_SUM_CACHE[sites] = (s[:, :-1] * s[:, 1:]).sum(axis=1).astype(float)
    return _BOND_SUM_CACHE[sites]


def _apply_single_qubit(amps: np.ndarray, u: np.ndarray, site: int, sites: int) -> np.ndarray:
    t = amps.reshape((2,) * sites)
    t = np.tensordot(u, t, axes=([1], [site]))
    return np.moveaxis(t, 0, site).reshape(-1)


def _x_rotation(alpha: float) -> np.ndarray:
    """exp(i alpha/2 X) as a 2x2 matrix."""
    c, s = math.cos(alpha / 2.0), math.sin(alpha / 2.0)
    return np.array([[c, 1j * s], [1j * s, c]])


def apply_floquet(s: PureState, p: FloquetParams) -> PureState:
    """One Floquet period F = U_ZZ(beta) U_X(alpha); the X kick acts first."""
    if p.sites != s.site_count:
        raise ValueError("params.sites does not match the state")
    assert GATE_ORDER == ("x", "zz")
    amps = s.amplitudes
    u = _x_rotation(p.alpha)
    for site in range(s.site_count):
        amps = _apply_single_qubit(amps, u, site, s.site_count)
    amps = amps * np.exp(0.5j * p.beta * _bond_sum(s.site_count))
    return PureState(amps, s.site_count)


def floquet_operator(p: FloquetParams) -> np.ndarray:
    """Dense 2^L x 2^L matrix of one period (small L only)."""
    ux = reduce(np.kron, [_x_rotation(p.alpha)] * p.sites)
    return np.exp(0.5j * p.beta * _bond_sum(p.sites))[:, None] * ux


def reduced_density(s: PureState, l_a: int) -> ReducedDensity:
    """Partial trace over the rightmost L - l_a sites."""
    if not 1 <= l_a < s.site_count:
        raise ValueError(f"l_a must be in 1..{s.site_count - 1}, got {l_a}")
    m = s.amplitudes.reshape(2 ** l_a, -1)
    return ReducedDensity(m @ m.conj().T, l_a)


def _last_site_density(amps: np.ndarray) -> np.ndarray:
    m = amps.reshape(-1, 2)
    return m.T @ m.conj()


def parity_expectation(s: PureState, l_a: int) -> float:
    """<X_1 ... X_{l_a}> on the leftmost l_a sites."""
    if not 1 <= l_a <= s.site_count:
        raise ValueError(f"l_a must be in 1..{s.site_count}, got {l_a}")
    mask = 0
    for l in range(l_a):
        mask |= 1 << (s.site_count - 1 - l)
    flipped = s.amplitudes[np.arange(s.amplitudes.size) ^ mask]
    val = complex(np.vdot(s.amplitudes, flipped))
    if abs(val.imag) > 1e-10:
        raise FloatingPointError(f"parity has imaginary part {val.imag:.3e}")
    return val.real


def charge_projector(group: AbelianGroup, q, l_a: int) -> np.ndarray:
    """Projector onto subsystem charge q, from the group characters.

    Pi_q = (1/|G|) sum_g chi_q(g) U_A(g), with U_A(g) acting on each of
    the l_a sites as the cyclic shift of the on-site group register.  For
    G = Z_2 the register is a qubit and the shift is X, so Pi_even is the
    familiar (I + X...X)/2.
    """
    q = group.as_element(q)
    shift_cache = {}

    def site_op(g):
        if g not in shift_cache:
            mats = [np.roll(np.eye(e), gi, axis=0) for e, gi in zip(group.orders, g)]
            shift_cache[g] = reduce(np.kron, mats)
        return shift_cache[g]

    dim = group.size ** l_a
    proj = np.zeros((dim, dim), dtype=complex)
    for g in group.elements():
        proj += character(group, q, g) * reduce(np.kron, [site_op(g)] * l_a)
    return proj / group.size


def sym_resolved(s: PureState, l_a: int, n: int = 1) -> SymResolvedSpectrum:
    """Symmetry-resolved moments S_n(Q) = Tr[Pi_Q rho_A^n] of the Z_2 parity.

    For n = 1 this is the subsystem parity probability, equal to
    (1 +/- <P_A>)/2 for the even/odd sector.
    """
    if n < 1:
        raise ValueError("moment order n must be >= 1")
    rho = reduced_density(s, l_a).rho
    if n == 1:
        rho_n = rho
    else:
        w, v = np.linalg.eigh(rho)
        rho_n = (v * np.clip(w, 0.0, None) ** n) @ v.conj().T
    entries = {}
    for q in (0, 1):
        proj = charge_projector(_Z2, (q,), l_a)
        val = complex(np.trace(proj @ rho_n))
        if abs(val.imag) > 1e-10:
            raise FloatingPointError("S_n(Q) has an imaginary part")
        entries[_Z2_LABELS[q]] = val.real
    return SymResolvedSpectrum(entries=entries, moment_order=n)


def many_body_spectrum(p: FloquetParams, cap: int = DEFAULT_SITE_CAP) -> ManyBodySpectrum:
    """Full eigendecomposition of the one-period unitary.

    Quasienergies omega are defined by F v = exp(-i omega) v, folded to
    (-pi, pi] and sorted ascending together with their eigenvectors.  The
    Schur form of the (normal) unitary gives an orthonormal eigenbasis
    even across degeneracies.
    """
    if p.sites > cap:
        raise ValueError(f"L = {p.sites} exceeds the statevector cap {cap}")
    f = floquet_operator(p)
    t, z = scipy.linalg.schur(f, output="complex")
    omega = -np.angle(np.diagonal(t))
    omega[omega <= -np.pi + 1e-15] += 2 * np.pi
    order = np.argsort(omega)
    return ManyBodySpectrum(omega[order], z[:, order])


def edge_flip_operators(p: FloquetParams) -> tuple[np.ndarray, np.ndarray]:
    """Dressed edge flips v_L, v_R = exp(-i a/4 X) Z exp(i a/4 X) at sites 1, L."""
    c, s = math.cos(p.alpha / 4.0), math.sin(p.alpha / 4.0)
    u_m = np.array([[c, -1j * s], [-1j * s, c]])
    u_p = u_m.conj()
    z = np.array([[1.0, 0.0], [0.0, -1.0]])
    v1 = u_m @ z @ u_p
    eye_rest = np.eye(2 ** (p.sites - 1))
    return np.kron(v1, eye_rest), np.kron(eye_rest, v1)


def _bulk_reference(p: FloquetParams) -> PureState:
    """Normalized |+...+> + v_L v_R |+...+>, the even dressed bulk state."""
    base = prepare(ProductState.all_plus(p.sites))
    vl, vr = edge_flip_operators(p)
    amps = base.amplitudes + vl @ (vr @ base.amplitudes)
    return PureState(amps / np.linalg.norm(amps), p.sites)


def teleport(psi, L: int, theta1: float = 0.0, n_ramp: int = 0,
             drive: FloquetParams | None = None,
             cap: int = DEFAULT_SITE_CAP) -> dict[tuple[int, str], TeleportBranch]:
    """Teleport an edge qubit through the Floquet drive.

    The pair ``psi`` = (a_+, a_-) is encoded on site 1 in the X basis with
    |+>^{L-1} on the rest.  Optionally the chain is ramped adiabatically
    from theta = 0 to ``theta1`` in ``n_ramp`` steps (n_ramp = 0 stays at
    theta = 0).  An ancilla then implements I + exp(i chi) F through
    Hadamard, a Z rotation by chi, controlled-F and Hadamard; chi is the
    accumulated eigenphase of the instantaneous bulk Floquet eigenstate,
    read off the many-body spectrum.  After ramping back, site 1 is
    measured in the X basis and each (ancilla, site-1) outcome branch is
    reported with its probability and the fidelity of the last site's
    reduced state against psi.

    ``drive`` substitutes the unitary used in the controlled step (e.g. a
    trivial drive as a negative control); the ramp is unaffected.
    """
    if L > cap:
        raise ValueError(f"L = {L} exceeds the statevector cap {cap}")
    if theta1 >= math.pi / 4:
        raise ValueError("theta1 is outside the topological phase (needs theta1 < pi/4)")
    if n_ramp < 0:
        raise ValueError("n_ramp must be non-negative")
    psi = np.asarray(psi, dtype=complex).reshape(2)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("psi must be normalized")

    path = AdiabaticPath(sites=L, n_steps=max(n_ramp, 1), endpoint_theta=theta1)
    ramp_up = [params_at(path, k) for k in range(1, n_ramp + 1)]
    ramp_down = [params_at(path, k) for k in range(n_ramp - 1, -1, -1)]
    p1 = drive if drive is not None else params_at(path, n_ramp if n_ramp > 0 else 0)

    # chi: quasienergy of the instantaneous eigenstate that the ramped
    # even bulk reference follows.
    ref = _bulk_reference(params_at(path, 0))
    for p in ramp_up:
        ref = apply_floquet(ref, p)
    spec = many_body_spectrum(p1, cap=cap)
    weights = np.abs(spec.eigenvectors.conj().T @ ref.amplitudes) ** 2
    chi = float(spec.quasienergies[int(np.argmax(weights))])

    # site-1 qubit in the Z basis carrying psi, rest |+>
    site1 = psi[0] * _PLUS + psi[1] * _MINUS
    rest = reduce(np.kron, [_PLUS] * (L - 1)).astype(complex)
    sys_state = PureState(np.kron(site1, rest), L)
    for p in ramp_up:
        sys_state = apply_floquet(sys_state, p)

    # ancilla circuit: H, Rz(chi), controlled-F, H.  The ancilla is kept
    # as a second amplitude column, never materializing a (L+1)-qubit gate.
    col0 = sys_state.amplitudes / math.sqrt(2.0)
    col1 = sys_state.amplitudes / math.sqrt(2.0)
    col0 = col0 * np.exp(-0.5j * chi)
    col1 = col1 * np.exp(0.5j * chi)
    col1 = apply_floquet(PureState(col1, L), p1).amplitudes
    col0, col1 = (col0 + col1) / math.sqrt(2.0), (col0 - col1) / math.sqrt(2.0)

    for p in ramp_down:
        col0 = apply_floquet(PureState(col0, L), p).amplitudes
        col1 = apply_floquet(PureState(col1, L), p).amplitudes

    psi_z = np.array([(psi[0] + psi[1]), (psi[0] - psi[1])]) / math.sqrt(2.0)
    branches = {}
    for anc, col in ((0, col0), (1, col1)):
        half = col.reshape(2, -1)
        for outcome, vec in (("+", (half[0] + half[1]) / math.sqrt(2.0)),
                             ("-", (half[0] - half[1]) / math.sqrt(2.0))):
            prob = float(np.linalg.norm(vec) ** 2)
            if prob < 1e-14:
                branches[(anc, outcome)] = TeleportBranch(prob, float("nan"))
                continue
            rho_last = _last_site_density(vec / math.sqrt(prob))
            fid = float(np.real(psi_z.conj() @ rho_last @ psi_z))
            branches[(anc, outcome)] = TeleportBranch(prob, fid)
    return branches


def sre_cycling_check(p: FloquetParams, s: PureState, l_a: int, n: int,
                      pumped_charge: int = 1, tol: float = 1e-8) -> bool:
    """Check S_n(Q) -> S_n(Q + c) under one Floquet period.

    ``s`` should be a bulk Floquet eigenstate or the sweet-spot product
    state; c is the pumped Z_2 charge of the phase (1 in the topological
    phase, 0 in the trivial one).
    """
    before = sym_resolved(s, l_a, n).entries
    after = sym_resolved(apply_floquet(s, p), l_a, n).entries
    c = pumped_charge % 2
    for q in (0, 1):
        lhs = after[_Z2_LABELS[q]]
        rhs = before[_Z2_LABELS[(q + c) % 2]]
        if abs(lhs - rhs) > tol:
            return False
    return True


class StatevectorEngine:
    """Sweep-engine facade mirroring FermionEngine's interface."""

    name = "statevector"

    def __init__(self, sites: int, cap: int = DEFAULT_SITE_CAP):
        if sites > cap:
            raise ValueError(f"L = {sites} exceeds the statevector cap {cap}")
        self.sites = sites
        self.cap = cap

    def initial_state(self, init: ProductState) -> PureState:
        if init.sites != self.sites:
            raise ValueError("initial state size does not match engine")
        return prepare(init, cap=self.cap)

    def apply_period(self, s: PureState, params: FloquetParams) -> PureState:
        return apply_floquet(s, params)

    def s1_even(self, s: PureState, l_a: int) -> float:
        return 0.5 * (1.0 + parity_expectation(s, l_a))

    def x_expectations(self, s: PureState) -> np.ndarray:
        vals = np.empty(self.sites)
        for l in range(self.sites):
            mask = 1 << (self.sites - 1 - l)
            flipped = s.amplitudes[np.arange(s.amplitudes.size) ^ mask]
            vals[l] = np.vdot(s.amplitudes, flipped).real
        return vals
