"""Non-contraction certificates in the weighted relative-entropy pseudo-distance.

For a discontinuity (U_l, U_r) and weight a > 0 let

    F_a(U) = eta(U | U_l) - a eta(U | U_r),      Sigma_a = {F_a = 0}.

A rarefaction curve that starts on one side of Sigma_a and reaches the other
(family 1 backward from U_l when a <= 1, family 6 forward from U_r when
a >= 1) yields a witness state on Sigma_a that rules out contraction with
weight a.  This module locates such crossings and packages them as
:class:`Certificate` objects.  It never claims that contraction holds.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .charfields import alpha_roots, eigenvector
from .errors import (
    DegenerateFunctionalError,
    InadmissibleWaveError,
    InconclusiveError,
    InvalidRequestError,
    NoCrossingError,
)
from .thermo import (
    DEFAULT_TOL,
    ConservedState,
    DiscontinuityWave,
    GasLaw,
    PiecewiseConstantProfile,
    Tolerance,
    as_conserved,
    entropy,
    entropy_gradient,
    relative_entropy,
)
from .wavecurves import (
    RarefactionCurve,
    condition_2B,
    condition_3B,
    condition_contact_AB,
    lax_check,
    rarefaction_integrate,
    rh_check,
)

log = logging.getLogger(__name__)

__all__ = [
    "R1_BACKWARD",
    "R6_FORWARD",
    "WITNESS_RTOL",
    "WeightedFunctional",
    "CoercivityBound",
    "Certificate",
    "TailScanReport",
    "SweepEntry",
    "evaluate_F",
    "functional_scale",
    "coercivity_bound",
    "find_sigma_crossing",
    "validate_wave",
    "wave_conditions",
    "select_branch",
    "certify_noncontraction",
    "f1_derivative_terms",
    "f1_tail_scan",
    "default_a_grid",
    "sweep_a",
]

R1_BACKWARD = "R1-backward"
R6_FORWARD = "R6-forward"
WITNESS_RTOL = 1e-9


@dataclass(frozen=True)
class WeightedFunctional:
    left_ref: ConservedState
    right_ref: ConservedState
    a: float

    def __post_init__(self):
        object.__setattr__(self, "left_ref", as_conserved(self.left_ref))
        object.__setattr__(self, "right_ref", as_conserved(self.right_ref))
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise InvalidRequestError(f"weight a must be positive and finite, got {self.a!r}")

    @classmethod
    def for_wave(cls, wave: DiscontinuityWave, a: float) -> "WeightedFunctional":
        return cls(wave.left, wave.right, a)


def evaluate_F(fun: WeightedFunctional, U, law: GasLaw) -> float:
    U = as_conserved(U)
    return (relative_entropy(U, fun.left_ref, law)
            - fun.a * relative_entropy(U, fun.right_ref, law))


def functional_scale(fun: WeightedFunctional, law: GasLaw) -> float:
    """Normalization for |F_a| tolerances: max of the two cross relative entropies."""
    return max(relative_entropy(fun.left_ref, fun.right_ref, law),
               relative_entropy(fun.right_ref, fun.left_ref, law))


# ---------------------------------------------------------------------- coercivity

@dataclass(frozen=True)
class CoercivityBound:
    """Affine majorant of eta on the sublevel set {F_a <= 0}, for a < 1.

    On that set eta(U) <= c1 + k.U <= c1 + c2 (|v| + |q2| + ... + |u3|).
    ``v_star`` is a volume below which F_a > 0 for every (q, u).
    """

    a: float
    c1: float
    c2: float
    coefficients: np.ndarray = field(repr=False)
    v_star: float

    def lower_envelope(self, v: float, law: GasLaw) -> float:
        """min over (q, u) of eta(U) - c1 - k.U at fixed v."""
        k = self.coefficients
        return (v ** (1.0 - law.gamma) / (law.gamma - 1.0) - k[0] * v
                - 0.5 * float(k[3:] @ k[3:]) - 0.5 * v * float(k[1:3] @ k[1:3]) - self.c1)


def coercivity_bound(fun: WeightedFunctional, law: GasLaw) -> CoercivityBound:
    a = fun.a
    if not a < 1.0:
        raise InvalidRequestError(f"coercivity bound needs 0 < a < 1, got a={a!r}")
    Ul, Ur = fun.left_ref, fun.right_ref
    gl, gr = entropy_gradient(Ul, law), entropy_gradient(Ur, law)
    c1 = (entropy(Ul, law) - a * entropy(Ur, law)
          - float(gl @ Ul.as_array()) + a * float(gr @ Ur.as_array())) / (1.0 - a)
    k = (gl - a * gr) / (1.0 - a)
    c2 = float(np.max(np.abs(k)))
    partial = CoercivityBound(a, c1, c2, k, math.nan)

    # the envelope is convex in v, +inf at 0+ and negative at v_l
    h = lambda v: partial.lower_envelope(v, law)
    hi = Ul.v
    if h(hi) > 0.0:
        raise InvalidRequestError("U_l does not lie in {F_a < 0}; inconsistent reference states")
    lo = hi
    while h(lo) <= 0.0:
        lo *= 0.5
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return CoercivityBound(a, c1, c2, k, lo)


# ---------------------------------------------------------------------- certificates

@dataclass(frozen=True)
class Certificate:
    """Witness of non-contraction for one weight ``a``."""

    wave: DiscontinuityWave
    a: float
    branch: str
    witness: ConservedState
    crossing_v: float
    F_at_witness: float
    scale: float
    conditions: dict
    trace: RarefactionCurve = field(repr=False)
    f_trace: tuple = field(repr=False)
    witness_profile: PiecewiseConstantProfile = field(repr=False)
    mechanism: str = "sign-change"
    coercivity: CoercivityBound | None = None

    @property
    def relative_residual(self) -> float:
        return abs(self.F_at_witness) / self.scale


def _branch_origin(wave, branch):
    if branch == R1_BACKWARD:
        return wave.left, 1
    if branch == R6_FORWARD:
        return wave.right, 6
    raise InvalidRequestError(f"unknown branch {branch!r}")


def witness_profile(wave: DiscontinuityWave, witness: ConservedState,
                    half_width: float = 1.0) -> PiecewiseConstantProfile:
    R = float(half_width)
    return PiecewiseConstantProfile(
        (-R, R), (wave.left, witness, wave.right),
        metadata={"half_width": R, "mollification_layers": [[-2 * R, -R], [R, 2 * R]]})


def find_sigma_crossing(wave: DiscontinuityWave, a: float, branch: str, law: GasLaw,
                        v_floor: float | None = None, half_width: float = 1.0,
                        conditions: dict | None = None) -> Certificate:
    """Follow the branch's rarefaction curve until F_a changes sign.

    For a < 1 on the family-1 branch the volume floor is lowered below the
    coercivity volume ``v_star`` when needed, which guarantees a crossing.
    """
    fun = WeightedFunctional.for_wave(wave, a)
    scale = functional_scale(fun, law)
    origin, family = _branch_origin(wave, branch)
    F0 = evaluate_F(fun, origin, law)
    if scale == 0.0 or abs(F0) <= WITNESS_RTOL * scale:
        raise DegenerateFunctionalError(
            f"F_a vanishes at the {branch} origin (F={F0!r}, scale={scale!r})")

    v0 = origin.v
    if v_floor is None:
        v_floor = 1e-4 * v0
    requested_floor = v_floor
    bound = None
    if a < 1.0 and branch == R1_BACKWARD:
        bound = coercivity_bound(fun, law)
        if v_floor >= bound.v_star:
            v_floor = 0.5 * bound.v_star

    sign0 = F0 > 0.0
    f_values = []

    def observer(v, W):
        F = evaluate_F(fun, W, law)
        f_values.append((v, F))
        return (F > 0.0) != sign0

    curve = rarefaction_integrate(origin.to_fluid(), family, law, v_floor=v_floor, observer=observer)
    if not curve.stopped_early:
        raise NoCrossingError(
            f"F_a keeps its sign along {branch} down to v={curve.samples[-1][0]!r} (a={a!r})",
            trace=curve, f_values=f_values)

    v_hi, F_hi = f_values[-2]
    v_lo, _ = f_values[-1]
    Fv = lambda v: evaluate_F(fun, curve.interpolate(v), law)
    for _ in range(200):
        mid = 0.5 * (v_lo + v_hi)
        if mid <= v_lo or mid >= v_hi:
            break
        Fm = Fv(mid)
        if Fm == 0.0:
            v_lo = v_hi = mid
            break
        if (Fm > 0.0) == (F_hi > 0.0):
            v_hi, F_hi = mid, Fm
        else:
            v_lo = mid
    v_star = v_hi if abs(Fv(v_hi)) <= abs(Fv(v_lo)) else v_lo
    witness = curve.interpolate(v_star).to_conserved()
    F_w = evaluate_F(fun, witness, law)
    # "coercivity": the crossing lies below the requested floor and was only
    # reached because the floor was pushed under v_star
    mechanism = "coercivity" if v_star < requested_floor else "sign-change"
    f_trace = tuple((v, F) for v, F in f_values[:-1]) + ((v_star, F_w),)
    log.info("a=%g %s: crossing at v=%.17g, |F|/scale=%.2e", a, branch, v_star, abs(F_w) / scale)
    return Certificate(
        wave=wave, a=a, branch=branch, witness=witness, crossing_v=v_star, F_at_witness=F_w,
        scale=scale, conditions=conditions or {}, trace=curve, f_trace=f_trace,
        witness_profile=witness_profile(wave, witness, half_width),
        mechanism=mechanism, coercivity=bound)


def validate_wave(wave: DiscontinuityWave, law: GasLaw, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise :class:`InadmissibleWaveError` unless the wave is an admissible 3/4-shock or 2/5-contact."""
    res, ok = rh_check(wave, law, rel=tol.rel)
    if not ok and res > tol.abs:
        raise InadmissibleWaveError(f"Rankine-Hugoniot residual {res:.3e} exceeds tolerance",
                                    violations=["rh"])
    if wave.family in (3, 4):
        rep = lax_check(wave, law)
        if not rep.passed:
            bad = [i.name for i in rep.inequalities if not i.holds]
            raise InadmissibleWaveError("Lax condition fails: " + ", ".join(bad), violations=bad)
    elif wave.family in (2, 5):
        Ul, Ur = wave.left, wave.right
        bad = []
        if not tol.close(Ul.v, Ur.v):
            bad.append("[v] = 0")
        if not tol.close(Ul.u1, Ur.u1):
            bad.append("[u1] = 0")
        expected = (-1.0 if wave.family == 2 else 1.0) * law.beta / math.sqrt(Ul.v)
        if not tol.close(wave.sigma, expected):
            bad.append("sigma = -+beta/sqrt(v)")
        if bad:
            raise InadmissibleWaveError("not a contact: " + ", ".join(bad), violations=bad)
    else:
        raise InadmissibleWaveError(
            f"family {wave.family} is extremal; only intermediate shocks and contacts are certified",
            violations=["family"])


def wave_conditions(wave: DiscontinuityWave, tol: Tolerance = DEFAULT_TOL) -> dict:
    if wave.family == 3:
        rep = condition_2B(wave)
        return {"2B": {"holds": rep.holds, "components": rep.components}}
    if wave.family == 4:
        rep = condition_3B(wave)
        return {"3B": {"holds": rep.holds, "components": rep.components}}
    cls = condition_contact_AB(wave, tol)
    return {"contact_AB": {"label": cls.label, "components": cls.components, "tension": cls.tension}}


def select_branch(wave: DiscontinuityWave, a: float, conditions: dict | None = None) -> str:
    """Curve choice for weight ``a``; raises :class:`InconclusiveError` at a = 1 without a condition."""
    if a < 1.0:
        return R1_BACKWARD
    if a > 1.0:
        return R6_FORWARD
    conditions = conditions if conditions is not None else wave_conditions(wave)
    if wave.family == 3 and conditions["2B"]["holds"]:
        return R6_FORWARD
    if wave.family == 4 and conditions["3B"]["holds"]:
        return R1_BACKWARD
    if wave.is_contact:
        label = conditions["contact_AB"]["label"]
        if label == "A":
            return R1_BACKWARD
        if label == "B":
            return R6_FORWARD
    raise InconclusiveError(
        f"a = 1 and no applicable condition holds for the family-{wave.family} wave "
        f"({conditions}); this is not a contraction claim")


def certify_noncontraction(wave: DiscontinuityWave, a: float, law: GasLaw,
                           v_floor: float | None = None, half_width: float = 1.0,
                           tol: Tolerance = DEFAULT_TOL) -> Certificate:
    validate_wave(wave, law, tol)
    conditions = wave_conditions(wave, tol)
    branch = select_branch(wave, a, conditions)
    return find_sigma_crossing(wave, a, branch, law, v_floor=v_floor,
                               half_width=half_width, conditions=conditions)


# ---------------------------------------------------------------------- tail scan

@dataclass(frozen=True)
class TailScanReport:
    branch: str
    expected_sign: int
    volumes: np.ndarray
    derivative: np.ndarray
    derivative_analytic: np.ndarray
    terms: dict
    v_sqrt_alpha: np.ndarray

    @property
    def sign_ok(self) -> bool:
        return bool(np.all(np.sign(self.derivative) == self.expected_sign))

    @property
    def growth_ok(self) -> bool:
        return bool(np.all(np.diff(np.abs(self.derivative)) > 0.0))

    @property
    def trend_ok(self) -> bool:
        """v sqrt(alpha_+) strictly increases as v decreases."""
        return bool(np.all(np.diff(self.v_sqrt_alpha) > 0.0))

    @property
    def passed(self) -> bool:
        return self.sign_ok and self.growth_ok and self.trend_ok


def _travel_tangent(W, law, branch):
    # R6 forward follows r_6, R1 backward follows -r_1; both decrease v
    if branch == R6_FORWARD:
        return eigenvector(W, law, 6)
    return -eigenvector(W, law, 1)


def f1_derivative_terms(wave: DiscontinuityWave, W, branch: str, law: GasLaw) -> dict:
    """Split grad F_1 . dU/ds at ``W`` into volume, u1 and transverse contributions.

    s is the curve parameter whose tangent is r_6 (R6 forward) or -r_1
    (R1 backward), i.e. the direction in which v decreases.
    """
    W = W.to_fluid() if isinstance(W, ConservedState) else W
    t = _travel_tangent(W, law, branch)
    dU = np.array([t[0], W.B2 * t[0] + W.v * t[1], W.B3 * t[0] + W.v * t[2], t[3], t[4], t[5]])
    grad = entropy_gradient(wave.right, law) - entropy_gradient(wave.left, law)
    prod = grad * dU
    return {
        "volume": float(prod[0]),
        "u1": float(prod[3]),
        "transverse": float(prod[1] + prod[2] + prod[4] + prod[5]),
        "total": float(prod.sum()),
        "dv_ds": float(t[0]),
    }


def f1_tail_scan(wave: DiscontinuityWave, branch: str, law: GasLaw,
                 v_floor: float | None = None, points: int = 16,
                 tail_start: float = 0.1) -> TailScanReport:
    """Sample dF_1/ds along the tail of the branch's rarefaction curve.

    The derivative is taken by centered differences in v along the
    integrated curve and converted to the travel parameter s.  The expected
    sign is negative on R6 forward and positive on R1 backward, the
    directions in which F_1 must move to cross Sigma_1.
    """
    origin, family = _branch_origin(wave, branch)
    v0 = origin.v
    if v_floor is None:
        v_floor = 1e-4 * v0
    fun = WeightedFunctional.for_wave(wave, 1.0)
    curve = rarefaction_integrate(origin.to_fluid(), family, law, v_floor=v_floor)
    grid = np.geomspace(tail_start * v0, v_floor * 1.01, points)
    fd, an = [], []
    terms = {"volume": [], "u1": [], "transverse": []}
    vsa = []
    for v in grid:
        h = 1e-4 * v
        dF_dv = (evaluate_F(fun, curve.interpolate(v + h), law)
                 - evaluate_F(fun, curve.interpolate(v - h), law)) / (2.0 * h)
        W = curve.interpolate(v)
        split = f1_derivative_terms(wave, W, branch, law)
        fd.append(dF_dv * split["dv_ds"])
        an.append(split["total"])
        for key in terms:
            terms[key].append(split[key])
        vsa.append(v * math.sqrt(alpha_roots(W, law).alpha_plus))
    expected = -1 if branch == R6_FORWARD else 1
    return TailScanReport(branch, expected, grid, np.array(fd), np.array(an),
                          {k: np.array(x) for k, x in terms.items()}, np.array(vsa))


# ---------------------------------------------------------------------- sweeps

def default_a_grid(lo: float = 1e-2, hi: float = 1e2, n: int = 17) -> list:
    """Log-spaced weights that always contain a = 1 exactly."""
    if not (0.0 < lo < hi) or n < 1:
        raise InvalidRequestError(f"bad a-grid ({lo!r}, {hi!r}, {n!r})")
    grid = [float(x) for x in np.geomspace(lo, hi, n)]
    grid = [1.0 if math.isclose(x, 1.0, rel_tol=1e-12) else x for x in grid]
    if 1.0 not in grid and lo <= 1.0 <= hi:
        grid.append(1.0)
    return sorted(grid)


@dataclass(frozen=True)
class SweepEntry:
    a: float
    certificate: Certificate | None
    outcome: str
    message: str = ""


def _sweep_task(wave, a, law, v_floor, tol):
    try:
        cert = certify_noncontraction(wave, a, law, v_floor=v_floor, tol=tol)
        return SweepEntry(a, cert, "certificate")
    except InconclusiveError as exc:
        return SweepEntry(a, None, "inconclusive", str(exc))
    except NoCrossingError as exc:
        return SweepEntry(a, None, "not-found", str(exc))


def sweep_a(wave: DiscontinuityWave, law: GasLaw, grid=None, jobs: int | None = None,
            v_floor: float | None = None, tol: Tolerance = DEFAULT_TOL) -> list:
    """Certify every weight of ``grid``; tasks are independent and may run concurrently."""
    grid = default_a_grid() if grid is None else [float(a) for a in grid]
    validate_wave(wave, law, tol)
    if jobs is None or jobs <= 1:
        entries = [_sweep_task(wave, a, law, v_floor, tol) for a in grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(lambda a: _sweep_task(wave, a, law, v_floor, tol), grid))
    return sorted(entries, key=lambda e: e.a)
