"""Kicked Ising Floquet drive: parameters, adiabatic path, initial states.

One Floquet period is F(alpha, beta) = U_ZZ(beta) U_X(alpha) with

    U_X(alpha) = exp(i alpha/2 sum_l X_l)
    U_ZZ(beta) = exp(i beta/2 sum_{l<L} Z_l Z_{l+1})

on an open chain of L qubits.  The transverse kick acts first; the gate
order is shared by every engine through GATE_ORDER.  One application of F
is one unit of stroboscopic time.

The adiabatic protocol follows the arc

    alpha = r0 cos(theta),  beta = pi - r0 sin(theta)

with theta swept linearly from 0 to ``endpoint_theta`` in ``n_steps``
applications of F, so the topological transition at theta = pi/4 sits at
the midpoint of the default sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Layers of one Floquet period, applied left to right.  Both engines
# consume this constant instead of hard-coding the order.
GATE_ORDER = ("x", "zz")

_TWO_PI = 2.0 * math.pi


def _fold_angle(a: float) -> float:
    """Fold an angle into the canonical range (-2pi, 2pi].

    Drive angles enter the gates as a/2, so the physical period is 4pi.
    """
    r = math.fmod(a, 2.0 * _TWO_PI)
    if r <= -_TWO_PI:
        r += 2.0 * _TWO_PI
    elif r > _TWO_PI:
        r -= 2.0 * _TWO_PI
    return r


@dataclass(frozen=True)
class FloquetParams:
    """Drive angles (alpha, beta) for a chain of ``sites`` qubits."""

    alpha: float
    beta: float
    sites: int

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("drive angles must be finite")
        if int(self.sites) < 2 or int(self.sites) != self.sites:
            raise ValueError(f"sites must be an integer >= 2, got {self.sites}")
        object.__setattr__(self, "alpha", _fold_angle(float(self.alpha)))
        object.__setattr__(self, "beta", _fold_angle(float(self.beta)))
        object.__setattr__(self, "sites", int(self.sites))


@dataclass(frozen=True)
class AdiabaticPath:
    """Linear-in-theta sweep along the (alpha, beta) arc.

    theta(k) = endpoint_theta * k / n_steps for k = 0 .. n_steps.  The
    state after step k has experienced F(theta(1)) ... F(theta(k)); with
    the default endpoint pi/2 the transition is crossed at step n_steps/2.
    """

    sites: int
    n_steps: int
    r0: float = 1.0
    endpoint_theta: float = math.pi / 2

    def __post_init__(self):
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if self.sites < 2:
            raise ValueError("sites must be >= 2")

    def theta(self, step: int) -> float:
        if self.n_steps == 0:
            return 0.0
        return self.endpoint_theta * step / self.n_steps


@dataclass(frozen=True)
class ProductState:
    """X-basis product state, one sign +1 (|+>) or -1 (|->) per site."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if not self.signs:
            raise ValueError("need at least one site")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))

    @classmethod
    def all_plus(cls, sites: int) -> "ProductState":
        return cls((1,) * sites)

    @classmethod
    def edges_minus(cls, sites: int) -> "ProductState":
        """|-++...++-> : both edge spins flipped."""
        if sites < 2:
            raise ValueError("edges_minus needs at least two sites")
        return cls((-1,) + (1,) * (sites - 2) + (-1,))

    @classmethod
    def from_string(cls, pattern: str) -> "ProductState":
        """Parse '+-' patterns, e.g. '-++-' for L = 4."""
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[ch] for ch in pattern))
        except KeyError as exc:
            raise ValueError(f"invalid sign character {exc} in {pattern!r}") from exc

    @property
    def sites(self) -> int:
        return len(self.signs)

    def label(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


def params_at(path: AdiabaticPath, step: int) -> FloquetParams:
    """Drive angles at a given step of the sweep.

    step 0 is the start of the path (theta = 0, i.e. (alpha, beta) =
    (r0, pi)); step n_steps is the endpoint.
    """
    if not 0 <= step <= path.n_steps:
        raise ValueError(f"step {step} outside 0..{path.n_steps}")
    th = path.theta(step)
    return FloquetParams(path.r0 * math.cos(th), math.pi - path.r0 * math.sin(th), path.sites)


def sweet_spot(sites: int = 2) -> FloquetParams:
    """The exactly solvable point (alpha, beta) = (0, pi).

    There the period reduces to a pure edge flip: F acts as a phase times
    Z_1 Z_L and the subsystem parity alternates exactly.
    """
    return FloquetParams(0.0, math.pi, sites)
