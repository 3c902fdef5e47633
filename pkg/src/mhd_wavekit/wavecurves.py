"""Admissible waves: intermediate shocks, Alfven contacts and rarefaction curves.

Hugoniot loci for the intermediate families 3 and 4 are parametrized by the
squared speed ``m = sigma^2``.  Eliminating u1 between the first and fourth
jump relations and B_r through ``beta^2 [B_i] = m [q_i]`` leaves one scalar
closure in m,

    g(m) = p(v_r) - p(v_l) + 1/2 sum_i (B_{i,r}(m)^2 - B_{i,l}^2) + m (v_r - v_l),

whose roots are located by a dense log scan followed by bisection.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .charfields import alpha_roots, eigenvalues, eigenvector
from .errors import (
    AmbiguousShockError,
    DegeneracyError,
    InadmissibleWaveError,
    InvalidRequestError,
    NoShockError,
    ResonanceError,
    RHResidualError,
    StiffnessError,
)
from .thermo import (
    DEFAULT_TOL,
    ConservedState,
    DiscontinuityWave,
    FluidState,
    GasLaw,
    Tolerance,
    _check_volume,
    as_conserved,
    as_fluid,
    entropy,
    entropy_flux,
    flux,
    pressure,
)

log = logging.getLogger(__name__)

__all__ = [
    "ShockSolveRequest",
    "ContactSpec",
    "LaxInequality",
    "LaxReport",
    "ConditionReport",
    "ContactClassification",
    "RarefactionCurve",
    "rh_residual",
    "rh_scale",
    "rh_check",
    "transverse_field_jump",
    "hugoniot_closure",
    "solve_shock",
    "lax_check",
    "sign_checks",
    "dissipation_direct",
    "dissipation_factored",
    "dissipation_scale",
    "gibbs_term",
    "contact_construct",
    "rarefaction_integrate",
    "condition_2B",
    "condition_3B",
    "condition_contact_AB",
]

BRACKET_EPS = 1e-12
SCAN_POINTS = 512


@dataclass(frozen=True)
class ShockSolveRequest:
    left: ConservedState
    family: int
    v_right: float
    law: GasLaw

    def __post_init__(self):
        object.__setattr__(self, "left", as_conserved(self.left))
        if self.family not in (3, 4):
            raise InvalidRequestError(f"shock family must be 3 or 4, got {self.family!r}")
        _check_volume(self.v_right)
        v_l = self.left.v
        if self.family == 3 and not self.v_right < v_l:
            raise InvalidRequestError(
                f"a 3-shock compresses: need v_right < v_left, got {self.v_right!r} >= {v_l!r}")
        if self.family == 4 and not self.v_right > v_l:
            raise InvalidRequestError(
                f"a 4-shock expands: need v_right > v_left, got {self.v_right!r} <= {v_l!r}")


@dataclass(frozen=True)
class ContactSpec:
    left: FluidState
    family: int
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "left", as_fluid(self.left))
        if self.family not in (2, 5):
            raise InvalidRequestError(f"contact family must be 2 or 5, got {self.family!r}")
        if not math.isfinite(self.angle):
            raise InvalidRequestError("contact angle must be finite")


# ---------------------------------------------------------------- jump relations

def rh_residual(wave: DiscontinuityWave, law: GasLaw) -> np.ndarray:
    """[F(U)] - sigma [U]; zero on the Hugoniot set."""
    jump_f = flux(wave.right, law) - flux(wave.left, law)
    jump_u = wave.right.as_array() - wave.left.as_array()
    return jump_f - wave.sigma * jump_u


def rh_scale(wave: DiscontinuityWave, law: GasLaw) -> float:
    """Magnitude of the terms entering the jump relations."""
    terms = [np.abs(flux(wave.left, law)), np.abs(flux(wave.right, law)),
             abs(wave.sigma) * np.abs(wave.left.as_array()),
             abs(wave.sigma) * np.abs(wave.right.as_array())]
    return float(max(np.max(t) for t in terms))


def rh_check(wave: DiscontinuityWave, law: GasLaw, rel: float = 1e-10) -> tuple[float, bool]:
    """Return the max-norm residual and whether it is below ``rel`` * scale."""
    res = float(np.max(np.abs(rh_residual(wave, law))))
    return res, res <= rel * max(rh_scale(wave, law), np.finfo(float).tiny)


def transverse_field_jump(B_left: float, v_left: float, v_right: float, sigma: float,
                          law: GasLaw, tol: Tolerance = DEFAULT_TOL) -> float:
    """B_r = (v_l - beta^2/sigma^2) / (v_r - beta^2/sigma^2) * B_l."""
    m = sigma * sigma
    return _field_ratio(m, v_left, v_right, law, tol) * B_left


def _field_ratio(m, v_left, v_right, law, tol=DEFAULT_TOL):
    b2 = law.beta ** 2
    den = m * v_right - b2
    if abs(den) <= tol.abs + tol.rel * b2:
        raise ResonanceError(
            f"v_right = {v_right!r} is resonant with beta^2/sigma^2 = {b2 / m if m else math.inf!r}")
    return (m * v_left - b2) / den


def hugoniot_closure(m: float, left: ConservedState, v_right: float, law: GasLaw) -> float:
    """Scalar closure g(m) whose roots are the squared shock speeds."""
    left = as_conserved(left)
    ratio = _field_ratio(m, left.v, v_right, law, Tolerance(0.0, 0.0))
    B_sq = left.B2 ** 2 + left.B3 ** 2
    return (pressure(v_right, law) - pressure(left.v, law)
            + 0.5 * B_sq * (ratio * ratio - 1.0) + m * (v_right - left.v))


def _closure_scale(m, left, v_right, law):
    ratio = abs(_field_ratio(m, left.v, v_right, law, Tolerance(0.0, 0.0)))
    B_sq = left.B2 ** 2 + left.B3 ** 2
    return (pressure(v_right, law) + pressure(left.v, law)
            + 0.5 * B_sq * (ratio * ratio + 1.0) + m * (v_right + left.v))


def _shock_from_speed_sq(m: float, req: ShockSolveRequest) -> DiscontinuityWave:
    U_l, law = req.left, req.law
    v_l, v_r = U_l.v, req.v_right
    sigma = -math.sqrt(m) if req.family == 3 else math.sqrt(m)
    ratio = _field_ratio(m, v_l, v_r, law)
    B2r, B3r = ratio * U_l.B2, ratio * U_l.B3
    q2r, q3r = v_r * B2r, v_r * B3r
    u1r = U_l.u1 - sigma * (v_r - v_l)
    u2r = U_l.u2 - sigma * (q2r - U_l.q2) / law.beta
    u3r = U_l.u3 - sigma * (q3r - U_l.q3) / law.beta
    right = ConservedState(v_r, q2r, q3r, u1r, u2r, u3r)
    return DiscontinuityWave(U_l, right, sigma, req.family)


def _bisect_root(g, a, b, ga):
    """Bisect a sign change of g on [a, b] down to adjacent floats."""
    gb = g(b)
    for _ in range(2000):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    return a if abs(ga) <= abs(gb) else b


def _scan_roots(g, lo, hi, points):
    grid = np.geomspace(lo, hi, points)
    vals = [g(m) for m in grid]
    roots = []
    for (m0, g0), (m1, g1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if not (math.isfinite(g0) and math.isfinite(g1)):
            continue
        if g0 == 0.0:
            roots.append(float(m0))
        elif (g0 > 0.0) != (g1 > 0.0):
            roots.append(_bisect_root(g, float(m0), float(m1), g0))
    if vals and vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def solve_shock(req: ShockSolveRequest, tol: Tolerance = DEFAULT_TOL,
                scan_points: int = SCAN_POINTS) -> DiscontinuityWave:
    """Solve the jump relations for a family-3 or family-4 shock ending at ``v_right``."""
    U_l, law = req.left, req.law
    W_l = U_l.to_fluid()
    v_r = req.v_right
    b2 = law.beta ** 2
    am_l = alpha_roots(W_l, law).alpha_minus
    ap_l = alpha_roots(W_l, law).alpha_plus

    if req.family == 3:
        lo, hi = am_l * (1.0 + BRACKET_EPS), b2 / v_r * (1.0 - BRACKET_EPS)
    else:
        hi = min(am_l, b2 / v_r) * (1.0 - BRACKET_EPS)
        lo = hi * 1e-12

    def g(m):
        try:
            return hugoniot_closure(m, U_l, v_r, law)
        except ResonanceError:
            return math.nan

    def candidates(lo, hi):
        found = []
        for m in _scan_roots(g, lo, hi, scan_points):
            # sign changes across a pole leave a large closure value behind
            if abs(g(m)) > 1e-8 * _closure_scale(m, U_l, v_r, law):
                continue
            found.append((m, _shock_from_speed_sq(m, req)))
        return found

    cands = candidates(lo, hi)
    if not cands and hi < ap_l:
        log.debug("no root in primary bracket; widening to alpha+(U_l)")
        cands = candidates(hi * (1.0 + 1e-9), ap_l)
    if not cands:
        raise NoShockError(
            f"no root of the family-{req.family} Hugoniot closure for v_right={v_r!r}")

    reports = [(m, w, lax_check(w, law)) for m, w in cands]
    admissible = [(m, w) for m, w, rep in reports if rep.passed]
    if not admissible:
        m, w, rep = min(reports, key=lambda t: -min(i.margin for i in t[2].inequalities))
        violated = [i for i in rep.inequalities if i.margin <= 0.0]
        raise InadmissibleWaveError(
            "Lax condition fails for every Hugoniot root: "
            + "; ".join(f"{i.name} (margin {i.margin:.3e})" for i in violated),
            violations=violated)
    if len(admissible) > 1:
        raise AmbiguousShockError(
            f"{len(admissible)} admissible family-{req.family} roots: "
            + ", ".join(f"sigma^2={m:.12g}" for m, _ in admissible),
            roots=[m for m, _ in admissible])

    wave = admissible[0][1]
    failures = [name for name, ok in sign_checks(wave, law, tol).items() if not ok]
    if failures:
        raise InadmissibleWaveError("shock fails admissibility checks: " + ", ".join(failures),
                                    violations=failures)
    return wave


# ------------------------------------------------------------------- admissibility

@dataclass(frozen=True)
class LaxInequality:
    name: str
    lower: float
    upper: float

    @property
    def margin(self) -> float:
        return self.upper - self.lower

    @property
    def holds(self) -> bool:
        return self.lower < self.upper


@dataclass(frozen=True)
class LaxReport:
    family: int
    inequalities: tuple

    @property
    def passed(self) -> bool:
        return all(i.holds for i in self.inequalities)

    @property
    def min_margin(self) -> float:
        return min(i.margin for i in self.inequalities)


def lax_check(wave: DiscontinuityWave, law: GasLaw) -> LaxReport:
    """Evaluate lam_k(U_r) < sigma < lam_k(U_l) and lam_{k-1}(U_l) < sigma < lam_{k+1}(U_r)."""
    k = wave.family
    if k not in (3, 4):
        raise InvalidRequestError(f"Lax check applies to families 3 and 4, got {k!r}")
    lam_l = eigenvalues(wave.left.to_fluid(), law)
    lam_r = eigenvalues(wave.right.to_fluid(), law)
    s = wave.sigma
    ineqs = (
        LaxInequality(f"lambda{k}(U_r) < sigma", float(lam_r[k - 1]), s),
        LaxInequality(f"sigma < lambda{k}(U_l)", s, float(lam_l[k - 1])),
        LaxInequality(f"lambda{k - 1}(U_l) < sigma", float(lam_l[k - 2]), s),
        LaxInequality(f"sigma < lambda{k + 1}(U_r)", s, float(lam_r[k])),
    )
    return LaxReport(k, ineqs)


def sign_checks(wave: DiscontinuityWave, law: GasLaw, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Jump signs expected of an admissible intermediate shock.

    Family 3: [v] < 0, [u1] < 0 and B_{i,r} - B_{i,l} opposite to B_{i,l}.
    Family 4: [v] > 0, [u1] < 0 and B_{i,l} - B_{i,r} opposite to B_{i,r}.
    Both: sigma^2 < beta^2 / v_r and nonpositive dissipation.
    """
    U_l, U_r = wave.left, wave.right
    dv, du1 = U_r.v - U_l.v, U_r.u1 - U_l.u1
    out = {
        "jump_v": dv < 0.0 if wave.family == 3 else dv > 0.0,
        "jump_u1": du1 < 0.0,
        "sigma_sq_below_alfven_right": wave.sigma ** 2 < law.beta ** 2 / U_r.v,
    }
    for i, (bl, br) in ((2, (U_l.B2, U_r.B2)), (3, (U_l.B3, U_r.B3))):
        if wave.family == 3:
            ref, diff = bl, br - bl
        else:
            ref, diff = br, bl - br
        if ref == 0.0:
            ok = diff == 0.0
        else:
            ok = (diff < 0.0) if ref > 0.0 else (diff > 0.0)
        out[f"transverse_B{i}"] = ok
    out["dissipation"] = dissipation_direct(wave, law) <= tol.abs + 1e-12 * dissipation_scale(wave, law)
    return out


def dissipation_direct(wave: DiscontinuityWave, law: GasLaw) -> float:
    """[G] - sigma [eta]."""
    dG = entropy_flux(wave.right, law) - entropy_flux(wave.left, law)
    deta = entropy(wave.right, law) - entropy(wave.left, law)
    return dG - wave.sigma * deta


def dissipation_scale(wave: DiscontinuityWave, law: GasLaw) -> float:
    return max(abs(entropy_flux(wave.left, law)), abs(entropy_flux(wave.right, law)),
               abs(wave.sigma) * entropy(wave.left, law),
               abs(wave.sigma) * entropy(wave.right, law))


def gibbs_term(v_left: float, v_right: float, law: GasLaw) -> float:
    """Chord-minus-curve integral of p over the segment [v_l, v_r] (nonnegative)."""
    p_l, p_r = pressure(v_left, law), pressure(v_right, law)

    def integrand(s):
        return s * p_r + (1.0 - s) * p_l - pressure(s * v_right + (1.0 - s) * v_left, law)

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def dissipation_factored(wave: DiscontinuityWave, law: GasLaw,
                         tol: Tolerance = DEFAULT_TOL) -> float:
    """-sigma [v] (Gibbs term + 1/4 sum_i [B_i]^2); valid on the Hugoniot set only."""
    res, ok = rh_check(wave, law, rel=tol.rel)
    if not ok and res > tol.abs:
        raise RHResidualError(
            f"Rankine-Hugoniot residual {res:.3e} too large for the factored dissipation")
    U_l, U_r = wave.left, wave.right
    dv = U_r.v - U_l.v
    if dv == 0.0:
        gibbs = 0.0
    else:
        gibbs = gibbs_term(U_l.v, U_r.v, law)
    mag = 0.25 * ((U_r.B2 - U_l.B2) ** 2 + (U_r.B3 - U_l.B3) ** 2)
    return -wave.sigma * dv * (gibbs + mag)


# ------------------------------------------------------------------------- contacts

def contact_construct(spec: ContactSpec, law: GasLaw,
                      tol: Tolerance = DEFAULT_TOL) -> DiscontinuityWave:
    """Closed-form Alfven contact: the flow of r_2 / r_5 rotates (B2, B3)."""
    W = spec.left
    if W.B2 == 0.0 and W.B3 == 0.0:
        raise DegeneracyError("B_l = 0 is a fixed point of the contact field; no nontrivial contact",
                              coincidence="field_vanishes")
    cphi, sphi = math.cos(spec.angle), math.sin(spec.angle)
    B2 = W.B2 * cphi + W.B3 * sphi
    B3 = -W.B2 * sphi + W.B3 * cphi
    chi = 1.0 if spec.family == 2 else -1.0
    sv = math.sqrt(W.v)
    u2 = W.u2 + chi * sv * (B2 - W.B2)
    u3 = W.u3 + chi * sv * (B3 - W.B3)
    right = FluidState(W.v, B2, B3, W.u1, u2, u3)
    sigma = -chi * law.beta / sv
    wave = DiscontinuityWave(W.to_conserved(), right.to_conserved(), sigma, spec.family)
    res, ok = rh_check(wave, law, rel=1e-12)
    if not ok and res > tol.abs:
        raise RHResidualError(f"contact construction left RH residual {res:.3e}")
    return wave


# ----------------------------------------------------------------------- rarefaction

Observer = Callable[[float, FluidState], Optional[bool]]


@dataclass(frozen=True)
class RarefactionCurve:
    """Integral curve of r_1 (backward) or r_6 (forward), parametrized by v.

    ``samples`` holds the accepted integration points in order of strictly
    decreasing v; :meth:`interpolate` evaluates the dense output in between.
    """

    origin: FluidState
    family: int
    law: GasLaw
    samples: tuple
    stopped_early: bool = False
    v_floor: float = 0.0
    _segments: tuple = field(default=(), repr=False, compare=False)

    @property
    def direction(self) -> str:
        return "backward" if self.family == 1 else "forward"

    @property
    def volumes(self) -> np.ndarray:
        return np.array([v for v, _ in self.samples])

    @property
    def states(self) -> list:
        return [w for _, w in self.samples]

    def speeds(self) -> np.ndarray:
        return np.array([eigenvalues(w, self.law)[self.family - 1] for w in self.states])

    def interpolate(self, v: float) -> FluidState:
        v0 = self.origin.v
        v_end = self.samples[-1][0]
        if not (v_end <= v <= v0):
            raise InvalidRequestError(f"v={v!r} outside the integrated range [{v_end!r}, {v0!r}]")
        if v == v0 or not self._segments:
            return self.origin if v == v0 else self.samples[-1][1]
        s = math.log(v / v0)
        # segments run in decreasing s; search on negated upper ends
        ends = [-seg[1] for seg in self._segments]
        idx = min(bisect.bisect_left(ends, -s), len(self._segments) - 1)
        y = self._segments[idx][2](s)
        return FluidState(v, *(float(x) for x in y))


def _curve_rhs(v0: float, law: GasLaw, family: int):
    def rhs(s, y):
        v = v0 * math.exp(s)
        r = eigenvector(FluidState(v, *y), law, family)
        # dW/d(ln v) = v r / (dv . r)
        return v * r[1:] / r[0]
    return rhs


def rarefaction_integrate(origin: FluidState, family: int, law: GasLaw,
                          v_floor: float | None = None, observer: Observer | None = None,
                          rtol: float = 1e-12, atol: float = 1e-12) -> RarefactionCurve:
    """Integrate the family-1 backward or family-6 forward rarefaction curve.

    Both curves run toward v -> 0+.  The integration variable is ln v, which
    keeps steps uniform across the decades the curve spans.  ``observer`` is
    called on every accepted sample and may return True to stop early.
    """
    W0 = as_fluid(origin)
    if family not in (1, 6):
        raise InvalidRequestError(f"rarefaction family must be 1 or 6, got {family!r}")
    v0 = W0.v
    if v_floor is None:
        v_floor = 1e-4 * v0
    if not 0.0 < v_floor <= v0:
        raise InvalidRequestError(f"need 0 < v_floor <= v_origin, got v_floor={v_floor!r}")

    # fails loudly on a degenerate origin
    eigenvector(W0, law, family)
    samples = [(v0, W0)]
    if observer is not None and observer(v0, W0):
        return RarefactionCurve(W0, family, law, tuple(samples), True, v_floor)
    if v_floor == v0:
        return RarefactionCurve(W0, family, law, tuple(samples), False, v_floor)

    rhs = _curve_rhs(v0, law, family)
    s_end = math.log(v_floor / v0)
    solver = integrate.DOP853(rhs, 0.0, W0.as_array()[1:], s_end, rtol=rtol, atol=atol)
    segments = []
    stopped = False
    while solver.status == "running":
        s_prev = solver.t
        try:
            msg = solver.step()
        except DegeneracyError as exc:
            raise DegeneracyError(
                f"degenerate eigenstructure along the family-{family} curve below v={samples[-1][0]!r}: {exc}",
                coincidence=exc.coincidence, last_sample=samples[-1]) from exc
        if solver.status == "failed":
            raise StiffnessError(f"rarefaction integration failed near v={samples[-1][0]!r}: {msg}")
        segments.append((s_prev, solver.t, solver.dense_output()))
        v = v0 * math.exp(solver.t) if solver.t != s_end else v_floor
        W = FluidState(v, *(float(x) for x in solver.y))
        samples.append((v, W))
        if observer is not None and observer(v, W):
            stopped = True
            break
    log.debug("family-%d curve: %d samples down to v=%g", family, len(samples), samples[-1][0])
    return RarefactionCurve(W0, family, law, tuple(samples), stopped, v_floor, tuple(segments))


# ---------------------------------------------------------------------- conditions

@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    components: dict


def _component_branch_2B(bl, br):
    if bl > br >= 0.0:
        return "B_l > B_r >= 0"
    if bl < br <= 0.0:
        return "B_l < B_r <= 0"
    if bl == 0.0 and br == 0.0:
        return "B_l = B_r = 0"
    return None


def condition_2B(wave: DiscontinuityWave) -> ConditionReport:
    """Per-component disjunction for 3-shocks: |B_i| shrinks without a sign change."""
    comps = {
        "B2": _component_branch_2B(wave.left.B2, wave.right.B2),
        "B3": _component_branch_2B(wave.left.B3, wave.right.B3),
    }
    return ConditionReport(all(b is not None for b in comps.values()), comps)


def condition_3B(wave: DiscontinuityWave) -> ConditionReport:
    """Mirror of :func:`condition_2B` for 4-shocks (roles of the sides swapped)."""
    comps = {}
    for name, bl, br in (("B2", wave.left.B2, wave.right.B2), ("B3", wave.left.B3, wave.right.B3)):
        if br > bl >= 0.0:
            comps[name] = "B_r > B_l >= 0"
        elif br < bl <= 0.0:
            comps[name] = "B_r < B_l <= 0"
        elif bl == 0.0 and br == 0.0:
            comps[name] = "B_l = B_r = 0"
        else:
            comps[name] = None
    return ConditionReport(all(b is not None for b in comps.values()), comps)


@dataclass(frozen=True)
class ContactClassification:
    label: str
    components: dict
    tension: str | None = None


def condition_contact_AB(wave: DiscontinuityWave, tol: Tolerance = DEFAULT_TOL) -> ContactClassification:
    """Classify a contact against the strict growth (A) / decay (B) conditions.

    Both conditions require every transverse component to change strictly in
    magnitude in the same sense, while the jump relations of a contact keep
    |B| fixed.  When the two sides carry equal |B| the verdict is necessarily
    "neither" and the tension is reported in ``tension``.
    """
    comps = {}
    for name, bl, br in (("B2", wave.left.B2, wave.right.B2), ("B3", wave.left.B3, wave.right.B3)):
        if br > bl > 0.0 or br < bl < 0.0:
            comps[name] = "A"
        elif bl > br > 0.0 or bl < br < 0.0:
            comps[name] = "B"
        else:
            comps[name] = None
    labels = set(comps.values())
    label = labels.pop() if len(labels) == 1 and None not in labels else "neither"

    Bl_sq = wave.left.B2 ** 2 + wave.left.B3 ** 2
    Br_sq = wave.right.B2 ** 2 + wave.right.B3 ** 2
    tension = None
    if tol.close(Bl_sq, Br_sq) and Bl_sq > 0.0:
        tension = ("|B| is equal on both sides (as the jump relations of a contact force), "
                   "so strict componentwise growth (A) or decay (B) of |B_i| cannot hold for "
                   "both components; the verbatim classification is 'neither'")
    return ContactClassification(label, comps, tension)
