"""Spectral structure of the 6x6 quasilinear system ``W_t + A(W) W_x = 0``.

Squared fast/slow speeds alpha_+/- are the roots of

    f(L) = L^2 - ((|B|^2 + beta^2)/v + c^2) L + beta^2 c^2 / v
         = (L - beta^2/v)(L - c^2) - (|B|^2/v) L,

and the six speeds are (-sqrt(a+), -beta/sqrt(v), -sqrt(a-), sqrt(a-),
beta/sqrt(v), sqrt(a+)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InvalidRequestError
from .thermo import FluidState, GasLaw, as_fluid, sound_speed_sq

__all__ = [
    "DEGENERACY_THRESHOLD",
    "AlphaRoots",
    "EigenPair",
    "DegeneracyReport",
    "char_matrix",
    "alpha_roots",
    "eigenvalues",
    "eigenvalue",
    "eigenvector",
    "eigenpair",
    "gnl_derivative",
    "gnl_derivative_fd",
    "degeneracy_check",
]

DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class AlphaRoots:
    alpha_minus: float
    alpha_plus: float
    # alpha_+ - beta^2/v and beta^2/v - alpha_-, both computed without cancellation
    gap_plus: float
    gap_minus: float


@dataclass(frozen=True)
class EigenPair:
    family: int
    lam: float
    r: np.ndarray


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate: bool
    field_vanishes: bool
    coincidence: str | None
    coinciding_families: tuple
    message: str


def _check_family(family: int) -> None:
    if family not in (1, 2, 3, 4, 5, 6):
        raise InvalidRequestError(f"family must be in 1..6, got {family!r}")


def char_matrix(W: FluidState, law: GasLaw) -> np.ndarray:
    W = as_fluid(W)
    v, B2, B3, b = W.v, W.B2, W.B3, law.beta
    c2 = sound_speed_sq(v, law)
    return np.array([
        [0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, B2 / v, -b / v, 0.0],
        [0.0, 0.0, 0.0, B3 / v, 0.0, -b / v],
        [-c2, B2, B3, 0.0, 0.0, 0.0],
        [0.0, -b, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -b, 0.0, 0.0, 0.0],
    ])


def alpha_roots(W: FluidState, law: GasLaw) -> AlphaRoots:
    """Roots of f, larger one by formula and smaller one from the product."""
    W = as_fluid(W)
    v = W.v
    c2 = sound_speed_sq(v, law)
    alf = law.beta ** 2 / v
    k = W.B_sq / v
    # discriminant written as a sum of nonnegative terms
    disc = math.sqrt((k + alf - c2) ** 2 + 4.0 * k * c2)
    a_plus = 0.5 * (k + alf + c2 + disc)
    a_minus = alf * c2 / a_plus

    # (a+ - alf)(a+ - c2) = k a+ and (alf - a-)(c2 - a-) = k a-: the larger
    # factor is accurate, the smaller one follows from the product
    if alf >= c2:
        gap_plus = k * a_plus / (a_plus - c2) if a_plus > c2 else 0.0
        gap_minus = alf - a_minus
    else:
        gap_plus = a_plus - alf
        gap_minus = k * a_minus / (c2 - a_minus) if c2 > a_minus else 0.0
    return AlphaRoots(a_minus, a_plus, gap_plus, gap_minus)


def eigenvalues(W: FluidState, law: GasLaw) -> np.ndarray:
    W = as_fluid(W)
    roots = alpha_roots(W, law)
    sp, sm = math.sqrt(roots.alpha_plus), math.sqrt(roots.alpha_minus)
    alfven = law.beta / math.sqrt(W.v)
    return np.array([-sp, -alfven, -sm, sm, alfven, sp])


def eigenvalue(W: FluidState, law: GasLaw, family: int) -> float:
    _check_family(family)
    return float(eigenvalues(W, law)[family - 1])


def degeneracy_check(W: FluidState, law: GasLaw) -> DegeneracyReport:
    """Locate umbilic configurations where alpha_+/- meets beta^2/v."""
    W = as_fluid(W)
    roots = alpha_roots(W, law)
    thr = DEGENERACY_THRESHOLD * roots.alpha_plus
    plus_hit = roots.gap_plus <= thr
    minus_hit = roots.gap_minus <= thr
    vanishes = W.B2 == 0.0 and W.B3 == 0.0
    if plus_hit and minus_hit:
        return DegeneracyReport(True, vanishes, "both", (1, 2, 3, 4, 5, 6),
                                "alpha-=alpha+=beta^2/v; triple umbilic, families 1,2,3 and 4,5,6 coincide")
    if plus_hit:
        return DegeneracyReport(True, vanishes, "alpha_plus", (1, 2, 5, 6),
                                "alpha+=beta^2/v; families 1,2 coincide (and 5,6)")
    if minus_hit:
        return DegeneracyReport(True, vanishes, "alpha_minus", (2, 3, 4, 5),
                                "alpha-=beta^2/v; families 2,3 coincide (and 4,5)")
    return DegeneracyReport(False, vanishes, None, (), "non-degenerate")


def eigenvector(W: FluidState, law: GasLaw, family: int) -> np.ndarray:
    W = as_fluid(W)
    _check_family(family)
    v, B2, B3, b = W.v, W.B2, W.B3, law.beta
    roots = alpha_roots(W, law)
    thr = DEGENERACY_THRESHOLD * roots.alpha_plus

    if family in (2, 5):
        if B2 == 0.0 and B3 == 0.0:
            raise DegeneracyError(
                f"r_{family} vanishes when B2 = B3 = 0", coincidence="field_vanishes")
        sv = math.sqrt(v)
        sign = 1.0 if family == 2 else -1.0
        return np.array([0.0, b * B3, -b * B2, 0.0, sign * b * sv * B3, -sign * b * sv * B2])

    if family in (1, 6):
        if roots.gap_plus <= thr:
            raise DegeneracyError(
                f"alpha+ coincides with beta^2/v; r_{family} loses rank",
                coincidence="alpha_plus")
        ap, gap = roots.alpha_plus, roots.gap_plus
        sa = math.sqrt(ap)
        s = 1.0 if family == 1 else -1.0
        return np.array([s * v * gap / ap, -s * B2, -s * B3,
                         v * gap / sa, -b * B2 / sa, -b * B3 / sa])

    if roots.gap_minus <= thr:
        raise DegeneracyError(
            f"alpha- coincides with beta^2/v; r_{family} loses rank",
            coincidence="alpha_minus")
    am, gap = roots.alpha_minus, roots.gap_minus
    sa = math.sqrt(am)
    s = 1.0 if family == 3 else -1.0
    return np.array([s * v * gap / am, s * B2, s * B3,
                     v * gap / sa, b * B2 / sa, b * B3 / sa])


def eigenpair(W: FluidState, law: GasLaw, family: int) -> EigenPair:
    return EigenPair(family, eigenvalue(W, law, family), eigenvector(W, law, family))


def _alpha_partials(W: FluidState, law: GasLaw, alpha: float, fprime: float):
    # implicit differentiation of f(alpha; v, B) = 0
    v, B2, B3 = W.v, W.B2, W.B3
    b2 = law.beta ** 2
    K = W.B_sq + b2
    c2 = sound_speed_sq(v, law)
    dc2 = -law.gamma * (law.gamma + 1.0) * v ** (-law.gamma - 2.0)
    df_dv = -(-K / v**2 + dc2) * alpha + b2 * (dc2 / v - c2 / v**2)
    df_dB2 = -2.0 * B2 / v * alpha
    df_dB3 = -2.0 * B3 / v * alpha
    return -df_dv / fprime, -df_dB2 / fprime, -df_dB3 / fprime


def gnl_derivative(W: FluidState, law: GasLaw, family: int) -> float:
    """grad(lambda_k) . r_k; identically zero for the Alfven families 2, 5."""
    W = as_fluid(W)
    _check_family(family)
    r = eigenvector(W, law, family)
    if family in (2, 5):
        # lambda = -+beta/sqrt(v) depends on v only and r has no v-component
        return 0.0
    roots = alpha_roots(W, law)
    disc = roots.alpha_plus - roots.alpha_minus
    if family in (1, 6):
        alpha, fprime = roots.alpha_plus, disc
    else:
        alpha, fprime = roots.alpha_minus, -disc
    dv, dB2, dB3 = _alpha_partials(W, law, alpha, fprime)
    sign = -1.0 if family in (1, 3) else 1.0
    return sign * (dv * r[0] + dB2 * r[1] + dB3 * r[2]) / (2.0 * math.sqrt(alpha))


def gnl_derivative_fd(W: FluidState, law: GasLaw, family: int, rel_step: float = 1e-5) -> float:
    """Central finite difference of lambda_k along r_k (test oracle)."""
    W = as_fluid(W)
    r = eigenvector(W, law, family)
    w = W.as_array()
    h = rel_step * np.linalg.norm(w) / np.linalg.norm(r)
    if r[0] != 0.0:
        h = min(h, 1e-3 * W.v / abs(r[0]))
    lp = eigenvalue(FluidState.from_array(w + h * r), law, family)
    lm = eigenvalue(FluidState.from_array(w - h * r), law, family)
    return (lp - lm) / (2.0 * h)
