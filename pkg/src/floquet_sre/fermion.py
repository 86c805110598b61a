"""Free-fermion engine for the kicked Ising chain.

The open chain maps to 2L Majorana operators gamma_0 .. gamma_{2L-1} via
the Jordan-Wigner transformation, with

    X_l          -> -i gamma_{2l}   gamma_{2l+1}
    Z_l Z_{l+1}  -> -i gamma_{2l+1} gamma_{2l+2}

Each gate layer is exp(X) with a quadratic exponent X = sum_ij A_ij
gamma_i gamma_j, A real antisymmetric, and acts on linear Majorana
combinations as the real orthogonal matrix exp(4A).  A Gaussian state is
held as the complex antisymmetric covariance matrix

    M_ij = <gamma_i gamma_j> - delta_ij      (zero diagonal)

which evolves by congruence M -> O M O^T.  M is Hermitian as well as
antisymmetric (M = i K with K real antisymmetric); purity means M^2 = I.
Subsystem observables reduce to Pfaffians of top-left blocks: the parity
of the leftmost l_a sites is (-i)^{l_a} Pf(M[:2 l_a, :2 l_a]).

Sign conventions are pinned by the exact-statevector oracle:
site_x_expectation returns +1 on |+> sites of a fresh product state.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .model import GATE_ORDER, FloquetParams, ProductState

__all__ = [
    "jw_generators",
    "exponentiate",
    "compose_step",
    "step_map",
    "initial_covariance",
    "evolve",
    "pfaffian",
    "subsystem_parity",
    "site_x_expectation",
    "x_expectations",
    "quasienergy_spectrum",
    "pi_mode_gap",
    "OrthogonalAccumulator",
    "FermionEngine",
]


def jw_generators(params: FloquetParams) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic generators (A_x, A_zz) of the two gate layers.

    exp of each (through :func:`exponentiate`) reproduces U_X(alpha) and
    U_ZZ(beta) on Gaussian states.  The X generator couples the pairs
    (2l, 2l+1) with weight alpha/4, the ZZ generator couples (2l+1, 2l+2)
    with weight beta/4; exp(4A) then rotates each pair plane by the full
    gate angle.
    """
    n = 2 * params.sites
    ax = np.zeros((n, n))
    azz = np.zeros((n, n))
    t = params.alpha / 4.0
    for l in range(params.sites):
        ax[2 * l, 2 * l + 1] = t
        ax[2 * l + 1, 2 * l] = -t
    t = params.beta / 4.0
    for l in range(params.sites - 1):
        azz[2 * l + 1, 2 * l + 2] = t
        azz[2 * l + 2, 2 * l + 1] = -t
    return ax, azz


def exponentiate(g: np.ndarray) -> np.ndarray:
    """exp(4A) for a real antisymmetric generator A.

    Diagonalizes the Hermitian matrix i(4A), maps eigenvalues through
    exp(-i lambda) and reassembles, so the result is orthogonal up to
    round-off with no series truncation.
    """
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("generator has non-finite entries")
    if g.shape[0] != g.shape[1]:
        raise ValueError("generator must be square")
    if np.max(np.abs(g + g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
        raise ValueError("generator is not antisymmetric")
    h = 1j * 4.0 * g
    w, v = np.linalg.eigh(h)
    o = (v * np.exp(-1j * w)) @ v.conj().T
    return o.real


def compose_step(o_zz: np.ndarray, o_x: np.ndarray) -> np.ndarray:
    """One full Floquet period as an orthogonal map, X layer acting first."""
    if o_zz.shape != o_x.shape:
        raise ValueError(f"dimension mismatch: {o_zz.shape} vs {o_x.shape}")
    assert GATE_ORDER == ("x", "zz")
    return o_zz @ o_x


def step_map(params: FloquetParams) -> np.ndarray:
    """Orthogonal one-period map exp(4 A_zz) exp(4 A_x)."""
    ax, azz = jw_generators(params)
    return compose_step(exponentiate(azz), exponentiate(ax))


def initial_covariance(state: ProductState) -> np.ndarray:
    """Covariance matrix of an X-basis product state.

    Each site carries a 2x2 block on (2l, 2l+1) with entries (+i, -i) for
    |+> and the opposite sign for |->, so that site_x_expectation equals
    the requested sign.
    """
    n = 2 * state.sites
    m = np.zeros((n, n), dtype=complex)
    for l, s in enumerate(state.signs):
        m[2 * l, 2 * l + 1] = 1j * s
        m[2 * l + 1, 2 * l] = -1j * s
    return m


def evolve(m: np.ndarray, o: np.ndarray) -> np.ndarray:
    """Heisenberg update of the covariance, M -> O M O^T."""
    if m.shape != o.shape:
        raise ValueError(f"dimension mismatch: {m.shape} vs {o.shape}")
    return o @ m @ o.T


def pfaffian(m: np.ndarray) -> complex:
    """Pfaffian of an even-dimensional antisymmetric matrix.

    Parlett-Reid style skew-symmetric tridiagonalization with partial
    pivoting: at each even column the largest subdiagonal entry is
    permuted into place (each swap flips the sign) and the trailing block
    is updated with a rank-two correction.  The Pfaffian is the product
    of the resulting superdiagonal pivots.  Works for real and complex
    input; satisfies Pf(m)^2 = det(m).
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("pfaffian needs a square matrix")
    n = m.shape[0]
    if n % 2 != 0:
        raise ValueError("pfaffian needs an even-dimensional matrix")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if np.max(np.abs(m + m.T)) > 1e-12 * scale:
        raise ValueError("matrix is not antisymmetric to within 1e-12")
    if n == 0:
        return 1.0

    a = np.array(m, dtype=complex if np.iscomplexobj(m) else float)
    pf = 1.0 + 0.0j if np.iscomplexobj(m) else 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            pf = -pf
        pivot = a[k, k + 1]
        if pivot == 0.0:
            return 0.0 * pf
        pf *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col)
            a[k + 2:, k + 2:] -= np.outer(col, tau)
    return complex(pf) if np.iscomplexobj(m) else float(pf)


def subsystem_parity(m: np.ndarray, l_a: int) -> float:
    """<P_A> = <X_1 ... X_{l_a}> for the leftmost l_a sites.

    Only left-anchored contiguous subsystems are meaningful here: the JW
    string makes the spin parity local in Majorana variables exactly for
    that geometry, giving (-i)^{l_a} Pf of the top-left block.
    """
    sites = m.shape[0] // 2
    if not 1 <= l_a <= sites:
        raise ValueError(f"l_a must be in 1..{sites}, got {l_a}")
    block = m[: 2 * l_a, : 2 * l_a]
    val = (-1j) ** l_a * pfaffian(block)
    val = complex(val)
    if abs(val.imag) > 1e-10:
        raise FloatingPointError(f"parity has imaginary part {val.imag:.3e}")
    p = val.real
    if not -1.0 - 1e-8 <= p <= 1.0 + 1e-8:
        raise FloatingPointError(f"parity {p} outside [-1, 1]")
    return p


def site_x_expectation(m: np.ndarray, l: int) -> float:
    """<X_l> = -i M_{2l, 2l+1} (sites indexed from 0)."""
    sites = m.shape[0] // 2
    if not 0 <= l < sites:
        raise ValueError(f"site index {l} outside 0..{sites - 1}")
    val = -1j * m[2 * l, 2 * l + 1]
    if abs(val.imag) > 1e-10:
        raise FloatingPointError(f"<X_{l}> has imaginary part {val.imag:.3e}")
    return float(val.real)


def x_expectations(m: np.ndarray) -> np.ndarray:
    """All single-site <X_l> at once."""
    sites = m.shape[0] // 2
    even = np.arange(0, 2 * sites, 2)
    vals = -1j * m[even, even + 1]
    if np.max(np.abs(vals.imag)) > 1e-10:
        raise FloatingPointError("<X_l> vector has an imaginary part")
    return vals.real.copy()


def quasienergy_spectrum(o: np.ndarray) -> np.ndarray:
    """Single-particle eigenphases of an orthogonal one-period map.

    Extracted from the real Schur form: each standardized 2x2 block
    contributes a +/- pair of phases, each 1x1 block contributes 0 or pi.
    Phases are folded to (-pi, pi] with ties at +/-pi resolved to +pi (the
    pi-mode must report +pi) and returned sorted ascending.
    """
    o = np.asarray(o, dtype=float)
    n = o.shape[0]
    if np.max(np.abs(o.T @ o - np.eye(n))) > 1e-8:
        raise ValueError("map is not orthogonal to within 1e-8")
    t, _ = scipy.linalg.schur(o, output="real")
    phases = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-12:
            # complex-conjugate pair exp(+/- i phi), phi in (0, pi)
            re = 0.5 * (t[i, i] + t[i + 1, i + 1])
            im = np.sqrt(max(-t[i, i + 1] * t[i + 1, i], 0.0))
            phi = np.arctan2(im, re)
            phases.extend((phi, -phi))
            i += 2
        else:
            phases.append(0.0 if t[i, i] > 0.0 else np.pi)
            i += 1
    phases = np.sort(np.asarray(phases))
    # particle-hole symmetry: the folded mirror image is the same multiset
    mirror = -phases
    mirror[mirror <= -np.pi + 1e-12] += 2 * np.pi
    if np.max(np.abs(np.sort(mirror) - phases)) > 1e-10:
        raise FloatingPointError("eigenphases are not +/- paired")
    return phases


def pi_mode_gap(phases: np.ndarray) -> float:
    """Maximal eigenphase; equals pi while the pi-mode survives."""
    return float(np.max(phases))


class OrthogonalAccumulator:
    """Running product of orthogonal step maps with drift control.

    After every ``reorthogonalize_every`` compositions the accumulated
    matrix is projected back onto the orthogonal group through its polar
    decomposition, which bounds round-off drift over very long runs.
    """

    def __init__(self, dim: int, reorthogonalize_every: int = 100):
        self.map = np.eye(dim)
        self.every = int(reorthogonalize_every)
        self._count = 0

    def push(self, o: np.ndarray) -> None:
        self.map = o @ self.map
        self._count += 1
        if self.every > 0 and self._count % self.every == 0:
            u, _, vt = np.linalg.svd(self.map)
            self.map = u @ vt


def _rotate_pairs(m: np.ndarray, idx_a: np.ndarray, idx_b: np.ndarray, angle: float) -> None:
    """In-place congruence m -> R m R^T for disjoint-plane rotations.

    R rotates every plane (idx_a[j], idx_b[j]) by the same angle with the
    convention rows(R) = [[c, s], [-s, c]].  Equivalent to a dense
    evolve() but O(L^2) instead of O(L^3).
    """
    c, s = np.cos(angle), np.sin(angle)
    ra, rb = m[idx_a, :].copy(), m[idx_b, :]
    m[idx_a, :] = c * ra + s * rb
    m[idx_b, :] = -s * ra + c * rb
    ca, cb = m[:, idx_a].copy(), m[:, idx_b]
    m[:, idx_a] = c * ca + s * cb
    m[:, idx_b] = -s * ca + c * cb


class FermionEngine:
    """Sweep-engine facade over the covariance-matrix representation.

    One engine instance serves one chain length; a run is a sequential
    state machine over one covariance matrix.  Distinct runs are
    independent and may execute concurrently.
    """

    name = "fermion"

    def __init__(self, sites: int):
        if sites < 2:
            raise ValueError("sites must be >= 2")
        self.sites = sites
        l = np.arange(sites)
        self._x_a, self._x_b = 2 * l, 2 * l + 1
        b = np.arange(sites - 1)
        self._zz_a, self._zz_b = 2 * b + 1, 2 * b + 2

    def initial_state(self, init: ProductState) -> np.ndarray:
        if init.sites != self.sites:
            raise ValueError("initial state size does not match engine")
        return initial_covariance(init)

    def apply_period(self, m: np.ndarray, params: FloquetParams) -> np.ndarray:
        """Apply one Floquet period in place (also returns m).

        Uses the pair-plane structure of the gate layers; agrees with
        evolve(m, step_map(params)) to round-off.
        """
        if params.sites != self.sites:
            raise ValueError("params.sites does not match engine")
        _rotate_pairs(m, self._x_a, self._x_b, params.alpha)
        _rotate_pairs(m, self._zz_a, self._zz_b, params.beta)
        return m

    def s1_even(self, m: np.ndarray, l_a: int) -> float:
        return 0.5 * (1.0 + subsystem_parity(m, l_a))

    def x_expectations(self, m: np.ndarray) -> np.ndarray:
        return x_expectations(m)
