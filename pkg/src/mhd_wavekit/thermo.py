"""States, equation of state and the entropy structure of isentropic MHD.

Lagrangian planar MHD with pressure law p(v) = v**(-gamma). Two state
representations are used:

* :class:`FluidState` ``W = (v, B2, B3, u1, u2, u3)`` for spectral work,
* :class:`ConservedState` ``U = (v, q2, q3, u1, u2, u3)`` with ``q_i = v B_i``,
  the variables in which the entropy is convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidRequestError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "GasLaw",
    "FluidState",
    "ConservedState",
    "DiscontinuityWave",
    "PiecewiseConstantProfile",
    "CONTACT_FAMILIES",
    "SHOCK_FAMILIES",
    "pressure",
    "sound_speed_sq",
    "entropy",
    "entropy_gradient",
    "entropy_hessian",
    "relative_entropy",
    "entropy_flux",
    "flux",
    "pseudo_distance_integral",
    "as_conserved",
    "as_fluid",
]

SHOCK_FAMILIES = (1, 3, 4, 6)
CONTACT_FAMILIES = (2, 5)


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used for every scalar comparison."""

    abs: float = 1e-10
    rel: float = 1e-10

    def close(self, a: float, b: float) -> bool:
        return math.isclose(a, b, rel_tol=self.rel, abs_tol=self.abs)

    def is_zero(self, a: float, scale: float = 1.0) -> bool:
        return abs(a) <= self.abs + self.rel * abs(scale)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class GasLaw:
    """Adiabatic exponent ``gamma`` and longitudinal field ``beta``."""

    gamma: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 1.0):
            raise DomainError(f"gamma must be > 1, got {self.gamma!r}")
        if not math.isfinite(self.beta) or self.beta == 0.0:
            raise DomainError(f"beta must be finite and nonzero, got {self.beta!r}")
        if self.beta < 0.0:
            raise DomainError(
                f"beta must be > 0, got {self.beta!r}; for negative beta apply the "
                "reflection (beta, u2, u3) -> (-beta, -u2, -u3) and pass the mirrored data"
            )


def _check_volume(v: float) -> None:
    if not v > 0.0:
        raise DomainError(f"specific volume must be positive, got {v!r}")


@dataclass(frozen=True)
class FluidState:
    v: float
    B2: float
    B3: float
    u1: float
    u2: float
    u3: float

    def __post_init__(self):
        _check_volume(self.v)

    @classmethod
    def from_array(cls, w: Sequence[float]) -> "FluidState":
        return cls(*(float(x) for x in w))

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.B2, self.B3, self.u1, self.u2, self.u3])

    def to_conserved(self) -> "ConservedState":
        return ConservedState(self.v, self.v * self.B2, self.v * self.B3,
                              self.u1, self.u2, self.u3)

    def to_dict(self) -> dict:
        return {"v": self.v, "B2": self.B2, "B3": self.B3,
                "u1": self.u1, "u2": self.u2, "u3": self.u3}

    @property
    def B_sq(self) -> float:
        return self.B2 * self.B2 + self.B3 * self.B3


@dataclass(frozen=True)
class ConservedState:
    v: float
    q2: float
    q3: float
    u1: float
    u2: float
    u3: float

    def __post_init__(self):
        _check_volume(self.v)

    @classmethod
    def from_array(cls, u: Sequence[float]) -> "ConservedState":
        return cls(*(float(x) for x in u))

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.q2, self.q3, self.u1, self.u2, self.u3])

    def to_fluid(self) -> FluidState:
        return FluidState(self.v, self.q2 / self.v, self.q3 / self.v,
                          self.u1, self.u2, self.u3)

    def to_dict(self) -> dict:
        return {"v": self.v, "q2": self.q2, "q3": self.q3,
                "u1": self.u1, "u2": self.u2, "u3": self.u3}

    @property
    def B2(self) -> float:
        return self.q2 / self.v

    @property
    def B3(self) -> float:
        return self.q3 / self.v


def as_conserved(state) -> ConservedState:
    if isinstance(state, ConservedState):
        return state
    if isinstance(state, FluidState):
        return state.to_conserved()
    raise TypeError(f"expected a state, got {type(state).__name__}")


def as_fluid(state) -> FluidState:
    if isinstance(state, FluidState):
        return state
    if isinstance(state, ConservedState):
        return state.to_fluid()
    raise TypeError(f"expected a state, got {type(state).__name__}")


@dataclass(frozen=True)
class DiscontinuityWave:
    """A candidate discontinuity ``(U_l, U_r, sigma)`` of a given family.

    Families 2 and 5 are the linearly degenerate (contact) families.
    """

    left: ConservedState
    right: ConservedState
    sigma: float
    family: int

    def __post_init__(self):
        if self.family not in (1, 2, 3, 4, 5, 6):
            raise InvalidRequestError(f"family must be in 1..6, got {self.family!r}")
        object.__setattr__(self, "left", as_conserved(self.left))
        object.__setattr__(self, "right", as_conserved(self.right))

    @property
    def is_contact(self) -> bool:
        return self.family in CONTACT_FAMILIES

    @property
    def kind(self) -> str:
        return f"CONTACT{self.family}" if self.is_contact else "shock"

    def reversed(self) -> "DiscontinuityWave":
        """Time-reversed wave: sides swapped and speed negated."""
        return DiscontinuityWave(self.right, self.left, -self.sigma, self.family)


@dataclass(frozen=True)
class PiecewiseConstantProfile:
    """Values on ``(-inf, x0), (x0, x1), ..., (x_{n-1}, inf)``."""

    breakpoints: tuple
    values: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        bps = tuple(float(x) for x in self.breakpoints)
        vals = tuple(as_conserved(s) for s in self.values)
        if len(vals) != len(bps) + 1:
            raise InvalidRequestError("profile needs exactly one more value than breakpoints")
        if any(b >= a for a, b in zip(bps[1:], bps)):
            raise InvalidRequestError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)


def pressure(v: float, law: GasLaw) -> float:
    _check_volume(v)
    return v ** (-law.gamma)


def sound_speed_sq(v: float, law: GasLaw) -> float:
    """c^2 = -p'(v) = gamma v^(-gamma-1)."""
    _check_volume(v)
    return law.gamma * v ** (-law.gamma - 1.0)


def _internal(v: float, law: GasLaw) -> float:
    # closed form of the integral of p from v to infinity
    return v ** (1.0 - law.gamma) / (law.gamma - 1.0)


def entropy(U: ConservedState, law: GasLaw) -> float:
    U = as_conserved(U)
    _check_volume(U.v)
    return (_internal(U.v, law)
            + 0.5 * (U.u1 * U.u1 + U.u2 * U.u2 + U.u3 * U.u3)
            + (U.q2 * U.q2 + U.q3 * U.q3) / (2.0 * U.v))


def entropy_gradient(U: ConservedState, law: GasLaw) -> np.ndarray:
    U = as_conserved(U)
    v = U.v
    _check_volume(v)
    return np.array([
        -pressure(v, law) - (U.q2 * U.q2 + U.q3 * U.q3) / (2.0 * v * v),
        U.q2 / v,
        U.q3 / v,
        U.u1,
        U.u2,
        U.u3,
    ])


def entropy_hessian(U: ConservedState, law: GasLaw) -> np.ndarray:
    U = as_conserved(U)
    v, q2, q3 = U.v, U.q2, U.q3
    _check_volume(v)
    H = np.eye(6)
    H[0, 0] = sound_speed_sq(v, law) + (q2 * q2 + q3 * q3) / v**3
    H[0, 1] = H[1, 0] = -q2 / (v * v)
    H[0, 2] = H[2, 0] = -q3 / (v * v)
    H[1, 1] = H[2, 2] = 1.0 / v
    return H


def relative_entropy(U: ConservedState, Ubar: ConservedState, law: GasLaw) -> float:
    """eta(U | Ubar) = eta(U) - eta(Ubar) - grad eta(Ubar) . (U - Ubar)."""
    U = as_conserved(U)
    Ubar = as_conserved(Ubar)
    if U == Ubar:
        return 0.0
    diff = U.as_array() - Ubar.as_array()
    return (entropy(U, law) - entropy(Ubar, law)
            - float(entropy_gradient(Ubar, law) @ diff))


def entropy_flux(U: ConservedState, law: GasLaw) -> float:
    U = as_conserved(U)
    v = U.v
    _check_volume(v)
    total_p = pressure(v, law) + (U.q2 * U.q2 + U.q3 * U.q3) / (2.0 * v * v)
    return total_p * U.u1 - (law.beta / v) * (U.q2 * U.u2 + U.q3 * U.u3)


def flux(U: ConservedState, law: GasLaw) -> np.ndarray:
    """Conservative flux F(U) of ``U_t + F(U)_x = 0``."""
    U = as_conserved(U)
    v = U.v
    _check_volume(v)
    b = law.beta
    return np.array([
        -U.u1,
        -b * U.u2,
        -b * U.u3,
        pressure(v, law) + (U.q2 * U.q2 + U.q3 * U.q3) / (2.0 * v * v),
        -b * U.q2 / v,
        -b * U.q3 / v,
    ])


def pseudo_distance_integral(profile: PiecewiseConstantProfile, wave: DiscontinuityWave,
                             a: float, law: GasLaw, t: float = 0.0,
                             tol: Tolerance = DEFAULT_TOL) -> float:
    """Exact integral of d_a(profile(x), S(t, x)) over the real line.

    The reference shock S jumps from ``wave.left`` to ``wave.right`` at
    ``x = sigma t``; left of the jump the weight is 1, right of it ``a``.
    """
    if not a > 0.0:
        raise InvalidRequestError(f"weight a must be positive, got {a!r}")
    vals = profile.values
    for name, got, want in (("left", vals[0], wave.left), ("right", vals[-1], wave.right)):
        g, w = got.as_array(), want.as_array()
        if not np.allclose(g, w, rtol=tol.rel, atol=tol.abs):
            raise InvalidRequestError(
                f"{name} far field of the profile differs from the wave's {name} state; "
                "the pseudo-distance integral diverges")

    x_jump = wave.sigma * t
    edges = (-math.inf,) + profile.breakpoints + (math.inf,)
    total = 0.0
    for value, lo, hi in zip(vals, edges[:-1], edges[1:]):
        left_len = min(hi, x_jump) - lo
        right_len = hi - max(lo, x_jump)
        # infinite pieces carry a vanishing integrand once far fields match
        if 0.0 < left_len < math.inf:
            total += left_len * relative_entropy(value, wave.left, law)
        if 0.0 < right_len < math.inf:
            total += a * right_len * relative_entropy(value, wave.right, law)
    return total
