"""Sweep protocols and post-processing.

Drives either engine along the adiabatic path, runs stop-and-repeat
experiments, fits the parity beating to a single cosine, locates the
phase transition from the envelope crossing, and extracts the amplitude
scaling in L and the domain-wall profile in L_A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .model import AdiabaticPath, ProductState, params_at

__all__ = [
    "SweepMeta",
    "SweepSeries",
    "FitResult",
    "CrossingReport",
    "ScalingFit",
    "ProfileFit",
    "run_adiabatic",
    "run_stop_and_repeat",
    "run_adiabatic_profile",
    "cosine_fit",
    "fm_tail_fit",
    "envelope_crossing",
    "amplitude_scaling",
    "domain_wall_profile",
    "pi_mode_trace",
]


@dataclass(frozen=True)
class SweepMeta:
    sites: int
    l_a: int
    n_steps: int
    r0: float
    engine: str
    initial_state: str
    epsilon: int | None = None
    repeats: int | None = None


@dataclass
class SweepSeries:
    """Per-step record of S_1(even) and all <X_l> (step 0 included)."""

    s1_even: np.ndarray
    x_site: np.ndarray
    meta: SweepMeta


@dataclass
class FitResult:
    """Canonical parameters of A cos(omega n + phi) + 1/2.

    A >= 0 and omega in [0, pi]; the sign of omega is not identifiable
    from a real cosine, (A, omega, phi) ~ (A, -omega, -phi), and the
    non-negative representative is reported.  ``degenerate`` flags a
    constant input series, for which omega is meaningless.
    """

    amplitude: float
    frequency: float
    phase: float
    residual: float
    degenerate: bool = False


@dataclass
class CrossingReport:
    """First step where the upper parity envelope crosses 1/2."""

    n_c: int | None
    ratio: float | None

    @property
    def crossed(self) -> bool:
        return self.n_c is not None


@dataclass
class ScalingFit:
    slope: float
    stderr: float
    intercept: float


@dataclass
class ProfileFit:
    kappa: float
    residual: float


def _check_run_args(engine, path: AdiabaticPath, sites: int, l_a: int, init: ProductState):
    if engine.sites != sites or path.sites != sites or init.sites != sites:
        raise ValueError("engine, path and initial state must share the chain length")
    if not 1 <= l_a <= sites:
        raise ValueError(f"l_a must be in 1..{sites}")


def run_adiabatic(engine, path: AdiabaticPath, sites: int, l_a: int,
                  init: ProductState) -> SweepSeries:
    """Sweep theta 0 -> endpoint, recording after every period.

    Step k applies F(theta(k)); the returned series has length
    n_steps + 1 including the initial state at step 0.
    """
    _check_run_args(engine, path, sites, l_a, init)
    n = path.n_steps
    s1 = np.empty(n + 1)
    xs = np.empty((n + 1, sites))
    state = engine.initial_state(init)
    s1[0] = engine.s1_even(state, l_a)
    xs[0] = engine.x_expectations(state)
    for k in range(1, n + 1):
        state = engine.apply_period(state, params_at(path, k))
        s1[k] = engine.s1_even(state, l_a)
        xs[k] = engine.x_expectations(state)
    meta = SweepMeta(sites, l_a, n, path.r0, engine.name, init.label())
    return SweepSeries(s1, xs, meta)


def run_stop_and_repeat(engine, path: AdiabaticPath, sites: int, l_a: int,
                        epsilon: int, r: int,
                        init: ProductState | None = None) -> SweepSeries:
    """Ramp to step n_steps/2 + epsilon, then repeat the frozen period r times.

    The returned series covers the r repetitions (length r + 1, starting
    from the state at the stopping point).
    """
    init = init or ProductState.all_plus(sites)
    _check_run_args(engine, path, sites, l_a, init)
    if abs(epsilon) > path.n_steps // 2:
        raise ValueError("|epsilon| must not exceed n_steps/2")
    stop = path.n_steps // 2 + epsilon
    state = engine.initial_state(init)
    for k in range(1, stop + 1):
        state = engine.apply_period(state, params_at(path, k))
    frozen = params_at(path, stop)
    s1 = np.empty(r + 1)
    xs = np.empty((r + 1, sites))
    s1[0] = engine.s1_even(state, l_a)
    xs[0] = engine.x_expectations(state)
    for k in range(1, r + 1):
        state = engine.apply_period(state, frozen)
        s1[k] = engine.s1_even(state, l_a)
        xs[k] = engine.x_expectations(state)
    meta = SweepMeta(sites, l_a, path.n_steps, path.r0, engine.name, init.label(),
                     epsilon=epsilon, repeats=r)
    return SweepSeries(s1, xs, meta)


def run_adiabatic_profile(engine, path: AdiabaticPath, sites: int,
                          l_a_values, init: ProductState,
                          record_from: int = 0) -> dict[int, np.ndarray]:
    """One sweep recording S_1(even) for several subsystem sizes at once.

    Returns {l_a: series over steps record_from..n_steps}.  Used for the
    domain-wall profile, where only the tail of the sweep is fitted and
    recording every cut at every step would dominate the cost.
    """
    l_a_values = [int(v) for v in l_a_values]
    for v in l_a_values:
        if not 1 <= v <= sites:
            raise ValueError(f"l_a = {v} outside 1..{sites}")
    _check_run_args(engine, path, sites, l_a_values[0], init)
    n = path.n_steps
    out = {v: [] for v in l_a_values}
    state = engine.initial_state(init)
    if record_from <= 0:
        for v in l_a_values:
            out[v].append(engine.s1_even(state, v))
    for k in range(1, n + 1):
        state = engine.apply_period(state, params_at(path, k))
        if k >= record_from:
            for v in l_a_values:
                out[v].append(engine.s1_even(state, v))
    return {v: np.asarray(series) for v, series in out.items()}


def _cos_design_solve(y: np.ndarray, omega: float) -> tuple[float, float, float]:
    """Least squares a cos(wn) + b sin(wn) for y - 1/2; returns (a, b, sse)."""
    n = np.arange(y.size)
    c = np.cos(omega * n)
    s = np.sin(omega * n)
    rhs = y - 0.5
    cc, cs, ss = c @ c, c @ s, s @ s
    cy, sy = c @ rhs, s @ rhs
    det = cc * ss - cs * cs
    if det > 1e-12 * max(cc * ss, 1.0):
        a = (ss * cy - cs * sy) / det
        b = (cc * sy - cs * cy) / det
    else:
        # sin column degenerates (omega = 0 or pi on an integer grid)
        a = cy / cc if cc > 0 else 0.0
        b = 0.0
    resid = rhs - a * c - b * s
    return a, b, float(resid @ resid)


def cosine_fit(series) -> FitResult:
    """Least-squares fit of A cos(omega n + phi) + 1/2 to a real series.

    omega is located on a dense 2000-point grid over (-pi, pi] (each grid
    point costs one 2x2 linear solve for the quadrature amplitudes) and
    then polished by bounded local minimization.  The canonical
    representative has A >= 0, omega in [0, pi].
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < 8:
        raise ValueError("cosine_fit needs a 1-d series of at least 8 points")
    if np.ptp(y) < 1e-12:
        resid = y - 0.5
        return FitResult(0.0, 0.0, 0.0, float(np.sqrt(np.mean(resid ** 2))),
                         degenerate=True)

    grid = -np.pi + 2 * np.pi * np.arange(1, 2001) / 2000.0
    best_w, best_sse = 0.0, np.inf
    for w in grid:
        _, _, sse = _cos_design_solve(y, w)
        if sse < best_sse:
            best_w, best_sse = w, sse
    dw = np.pi / 1000.0
    res = scipy.optimize.minimize_scalar(
        lambda w: _cos_design_solve(y, w)[2],
        bounds=(best_w - dw, best_w + dw), method="bounded",
        options={"xatol": 1e-12})
    w = float(res.x)
    a, b, sse = _cos_design_solve(y, w)
    amp = math.hypot(a, b)
    phi = math.atan2(-b, a)
    if w < 0:
        w, phi = -w, -phi
    phi = math.remainder(phi, 2 * math.pi)
    if phi <= -math.pi:
        phi += 2 * math.pi
    return FitResult(amp, w, phi, float(np.sqrt(sse / y.size)))


def fm_window(n_points: int) -> int:
    """Tail window for ferromagnetic-phase fits: last hundredth of the sweep.

    The instantaneous beating frequency still drifts near the endpoint; a
    longer window (e.g. a tenth) accumulates several radians of chirp,
    leaving the single-cosine fit with residuals larger than the
    amplitude and a biased frequency.  The last 1% stays phase-coherent.
    """
    return max(n_points // 100, 8)


def fm_tail_fit(series) -> FitResult:
    """Cosine fit over the ferromagnetic tail of a full sweep."""
    y = series.s1_even if isinstance(series, SweepSeries) else np.asarray(series)
    return cosine_fit(y[-fm_window(y.size):])


def envelope_crossing(series) -> CrossingReport:
    """Locate the phase transition from the parity envelopes.

    The signal alternates each period by construction, so the even- and
    odd-index subsequences are noise-free envelopes; whichever starts
    higher is the upper one.  Both are linearly interpolated onto every
    step and n_c is the first step at which upper - 1/2 changes sign.
    If the switching persists to the end, the no-crossing sentinel
    (n_c = ratio = None) is returned.
    """
    y = series.s1_even if isinstance(series, SweepSeries) else np.asarray(series, dtype=float)
    n_steps = y.size - 1
    if n_steps < 10:
        raise ValueError("envelope_crossing needs at least 10 steps")
    even_idx = np.arange(0, y.size, 2)
    odd_idx = np.arange(1, y.size, 2)
    upper_idx = even_idx if y[0] >= y[1] else odd_idx
    steps = np.arange(y.size)
    upper = np.interp(steps, upper_idx, y[upper_idx])
    sign0 = 1.0 if upper[0] >= 0.5 else -1.0
    below = np.nonzero(sign0 * (upper - 0.5) <= 0.0)[0]
    if below.size == 0:
        return CrossingReport(None, None)
    n_c = int(below[0])
    return CrossingReport(n_c, n_c / n_steps)


def amplitude_scaling(l_values, fits) -> ScalingFit:
    """Ordinary least-squares slope of log A against log L."""
    l_values = np.asarray(l_values, dtype=float)
    amps = np.array([f.amplitude if isinstance(f, FitResult) else float(f) for f in fits])
    if l_values.size < 4 or l_values.size != amps.size:
        raise ValueError("amplitude_scaling needs at least 4 (L, fit) pairs")
    if np.any(amps <= 0):
        raise ValueError("amplitudes must be positive for a log-log fit")
    coeffs, cov = np.polyfit(np.log(l_values), np.log(amps), 1, cov=True)
    return ScalingFit(float(coeffs[0]), float(np.sqrt(cov[0, 0])), float(coeffs[1]))


def domain_wall_profile(sites: int, fits) -> ProfileFit:
    """Fit beating amplitudes across cuts to kappa sin(pi l_a / L).

    ``fits`` maps l_a to a FitResult (or a bare amplitude).  Returns the
    scale kappa and the RMS residual normalized by the RMS amplitude.
    """
    items = sorted(fits.items())
    if len(items) < 4:
        raise ValueError("domain_wall_profile needs at least 4 cuts")
    l_a = np.array([k for k, _ in items], dtype=float)
    amps = np.array([v.amplitude if isinstance(v, FitResult) else float(v)
                     for _, v in items])
    shape = np.sin(np.pi * l_a / sites)
    kappa = float((amps @ shape) / (shape @ shape))
    resid = amps - kappa * shape
    scale = np.sqrt(np.mean(amps ** 2))
    return ProfileFit(kappa, float(np.sqrt(np.mean(resid ** 2)) / scale))


def pi_mode_trace(path: AdiabaticPath, sites: int) -> np.ndarray:
    """Largest single-particle eigenphase of the instantaneous period map."""
    from . import fermion

    if path.sites != sites:
        raise ValueError("path.sites does not match the requested chain length")
    out = np.empty(path.n_steps + 1)
    for k in range(path.n_steps + 1):
        out[k] = fermion.pi_mode_gap(
            fermion.quasienergy_spectrum(fermion.step_map(params_at(path, k))))
    return out
