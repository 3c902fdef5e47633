"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion is run exactly as stated, including those that fail.  Tests marked
"supplementary" exercise the same machinery on a neighbouring configuration
and do not replace the stated criterion.
"""

import json
import math

import numpy as np

from conftest import GAMMAS, random_law, random_state
from mhd_wavekit import (
    R1_BACKWARD,
    R6_FORWARD,
    ConservedState,
    ContactSpec,
    DiscontinuityWave,
    FluidState,
    GasLaw,
    InadmissibleWaveError,
    NoShockError,
    ShockSolveRequest,
    WaveKitError,
    WeightedFunctional,
    alpha_roots,
    certify_noncontraction,
    condition_contact_AB,
    contact_construct,
    default_a_grid,
    dissipation_direct,
    dissipation_factored,
    eigenvalues,
    eigenvector,
    evaluate_F,
    f1_tail_scan,
    gnl_derivative,
    lax_check,
    solve_shock,
    sweep_a,
)
from mhd_wavekit.charfields import char_matrix, gnl_derivative_fd
from mhd_wavekit.cli import main
from mhd_wavekit.contraction import WITNESS_RTOL, functional_scale
from mhd_wavekit.wavecurves import dissipation_scale, rh_residual, rh_scale
from oracles import contact_ode

RESULTS = []

REF_LAW = GasLaw(5.0 / 3.0, 1.0)
REF_LEFT = FluidState(1.0, 0.5, 0.0, 0.0, 0.0, 0.0)


def record(label, ok, detail):
    line = f"[acceptance {label}] {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


# ---------------------------------------------------------------------------- 1

def test_criterion_1_spectral_suite():
    rng = np.random.default_rng(1)
    worst_res = worst_gnl = 0.0
    bad = []
    for i in range(1000):
        law = GasLaw(float(rng.choice(GAMMAS)), rng.uniform(0.1, 3.0))
        v = rng.uniform(0.1, 10.0)
        mag, th = rng.uniform(0.01, 5.0), rng.uniform(0, 2 * math.pi)
        W = FluidState(v, mag * math.cos(th), mag * math.sin(th), *rng.uniform(-1, 1, 3))
        A = char_matrix(W, law)
        lam = eigenvalues(W, law)
        nA = np.linalg.norm(A, 2)
        for k in range(1, 7):
            r = eigenvector(W, law, k)
            res = np.linalg.norm(A @ r - lam[k - 1] * r) / (nA * np.linalg.norm(r))
            worst_res = max(worst_res, res)
        roots = alpha_roots(W, law)
        c2 = law.gamma * v ** (-law.gamma - 1)
        if not (np.all(np.diff(lam) > 0)
                and roots.alpha_minus < law.beta**2 / v < roots.alpha_plus
                and roots.alpha_minus < c2 < roots.alpha_plus):
            bad.append((i, "ordering"))
        for k in (1, 3, 4, 6):
            an = gnl_derivative(W, law, k)
            fd = gnl_derivative_fd(W, law, k)
            if not an > 0:
                bad.append((i, f"gnl{k}<=0"))
            worst_gnl = max(worst_gnl, abs(an - fd) / abs(an))
        if gnl_derivative(W, law, 2) != 0.0 or gnl_derivative(W, law, 5) != 0.0:
            bad.append((i, "alfven gnl"))
    ok = not bad and worst_res <= 1e-10 and worst_gnl <= 1e-6
    record(1, ok, f"1000 states, max eigen-residual {worst_res:.2e} (tol 1e-10), "
                  f"max GNL rel. diff {worst_gnl:.2e} (tol 1e-6), {len(bad)} ordering/sign failures")
    assert ok, bad[:5]


# ------------------------------------------------------------------------- 2, 3

def _shock_population(n_per_family=100, seed=2):
    rng = np.random.default_rng(seed)
    shocks, failures, rejected = [], [], 0
    for fam in (3, 4):
        got = 0
        while got < n_per_family:
            law = random_law(rng)
            W = random_state(rng, u_scale=0.5)
            ratio = rng.uniform(0.5, 0.99) if fam == 3 else rng.uniform(1.01, 2.0)
            try:
                w = solve_shock(ShockSolveRequest(W, fam, W.v * ratio, law))
            except NoShockError:
                rejected += 1
                continue
            except InadmissibleWaveError as exc:
                # roots that all violate Lax mean no admissible shock exists;
                # string violations come from the jump-sign checks and count
                if all(isinstance(x, str) for x in exc.violations) and exc.violations:
                    failures.append(("signs", exc.violations))
                    got += 1
                else:
                    rejected += 1
                continue
            shocks.append((w, law))
            got += 1
    return shocks, failures, rejected


_POP = None


def shock_population():
    global _POP
    if _POP is None:
        _POP = _shock_population()
    return _POP


def test_criterion_2_hugoniot_suite():
    shocks, failures, rejected = shock_population()
    failures = list(failures)
    worst_rh, min_margin = 0.0, math.inf
    for w, law in shocks:
        res = np.abs(rh_residual(w, law)).max() / rh_scale(w, law)
        worst_rh = max(worst_rh, res)
        rep = lax_check(w, law)
        min_margin = min(min_margin, rep.min_margin)
        Ul, Ur = w.left, w.right
        if w.family == 3:
            if not (Ur.v - Ul.v < 0 and Ur.u1 - Ul.u1 < 0):
                failures.append(("jumps", w))
        for bl, br in ((Ul.B2, Ur.B2), (Ul.B3, Ur.B3)):
            ref, d = (bl, br - bl) if w.family == 3 else (br, bl - br)
            if ref != 0 and not (np.sign(d) == -np.sign(ref)):
                failures.append(("transverse", w))
        if not law.beta**2 / Ur.v - w.sigma**2 > 0:
            failures.append(("alfven", w))
    ok = (len(shocks) == 200 and not failures and worst_rh <= 1e-10 and min_margin > 0)
    record(2, ok, f"{len(shocks)} shocks ({rejected} unsolvable requests resampled), "
                  f"max RH residual {worst_rh:.2e}, min Lax margin {min_margin:.2e}, "
                  f"{len(failures)} sign failures")
    assert ok, failures[:3]


def test_criterion_3_dissipation_identity():
    shocks, _, _ = shock_population()
    worst, positive, over = 0.0, 0, []
    for w, law in shocks:
        d, f = dissipation_direct(w, law), dissipation_factored(w, law)
        rel = abs(d - f) / max(abs(d), abs(f))
        worst = max(worst, rel)
        positive += (d > 0) or (f > 0)
        if rel > 1e-10:
            over.append(abs(f) / dissipation_scale(w, law))
    ok = worst <= 1e-10 and positive == 0 and len(shocks) == 200
    detail = (f"{len(shocks)} shocks, max rel. difference direct vs factored {worst:.2e} "
              f"(tol 1e-10), {positive} positive values")
    if over:
        detail += (f"; {len(over)} weak shocks exceed the tolerance, their dissipation is only "
                   f"{max(over):.1e} of the entropy-flux terms it is computed from")
    record(3, ok, detail)
    assert ok


def test_criterion_3_supplementary_term_scaled():
    # same identity with the error measured against the size of [G] and sigma [eta]
    shocks, _, _ = shock_population()
    worst = max(abs(dissipation_direct(w, law) - dissipation_factored(w, law))
                / dissipation_scale(w, law) for w, law in shocks)
    ok = worst <= 1e-13
    record("3-supplementary", ok, f"max |direct - factored| / term scale {worst:.2e} (tol 1e-13)")
    assert ok


# ---------------------------------------------------------------------------- 4

def test_criterion_4_contact_suite():
    rng = np.random.default_rng(4)
    worst_rh = worst_ode = worst_B = worst_sigma = 0.0
    for _ in range(1000):
        law = random_law(rng)
        W = random_state(rng)
        fam = int(rng.choice([2, 5]))
        phi = rng.uniform(-math.pi, math.pi)
        w = contact_construct(ContactSpec(W, fam, phi), law)
        worst_rh = max(worst_rh, np.abs(rh_residual(w, law)).max() / rh_scale(w, law))
        want = (-1 if fam == 2 else 1) * law.beta / math.sqrt(W.v)
        worst_sigma = max(worst_sigma, abs(w.sigma - want) / abs(want))
        Wr = w.right.to_fluid()
        worst_B = max(worst_B, abs(Wr.B_sq - W.B_sq) / W.B_sq)
        ref = contact_ode(W.as_array(), fam, law.beta, phi)
        worst_ode = max(worst_ode, np.abs(Wr.as_array() - ref).max() / np.abs(ref).max())
    ok = worst_rh <= 1e-12 and worst_sigma <= 1e-12 and worst_B <= 1e-12 and worst_ode <= 1e-8
    record(4, ok, f"1000 contacts, max RH {worst_rh:.2e}, sigma {worst_sigma:.2e}, "
                  f"|B| drift {worst_B:.2e} (tol 1e-12), ODE oracle {worst_ode:.2e} (tol 1e-8)")
    assert ok


# ---------------------------------------------------------------------------- 5

def _sweep_report(w, label, detail_prefix):
    entries = sweep_a(w, REF_LAW, default_a_grid(1e-2, 1e2, 17), jobs=4)
    good = [e for e in entries if e.certificate is not None
            and e.certificate.relative_residual <= WITNESS_RTOL
            and e.certificate.branch == (R1_BACKWARD if e.a < 1 else R6_FORWARD)]
    worst = max((e.certificate.relative_residual for e in good), default=math.nan)
    ok = len(entries) == 17 and len(good) == 17
    record(label, ok, f"{detail_prefix}: {len(good)}/17 certificates with correct branch, "
                      f"max |F_a|/scale {worst:.2e}")
    return ok


def test_criterion_5_shock_certificates():
    try:
        w = solve_shock(ShockSolveRequest(REF_LEFT, 3, 0.8, REF_LAW))
    except WaveKitError as exc:
        record(5, False, f"v_r=0.8: {type(exc).__name__}: {exc}; no admissible family-3 "
                         "shock exists for this left state (slow shocks need v_r > ~0.8745)")
        raise AssertionError(str(exc)) from exc
    assert _sweep_report(w, 5, "v_r=0.8")


def test_criterion_5_supplementary_v09():
    w = solve_shock(ShockSolveRequest(REF_LEFT, 3, 0.9, REF_LAW))
    assert _sweep_report(w, "5-supplementary", "v_r=0.9 (not a substitute for 5)")


# ---------------------------------------------------------------------------- 6

def _tail_ok(w, branch, label, prefix):
    rep = f1_tail_scan(w, branch, REF_LAW if w.family in (3, 4) else GasLaw(5 / 3, 1.0))
    ok = rep.passed and np.allclose(rep.derivative, rep.derivative_analytic, rtol=1e-6)
    record(label, ok, f"{prefix}: sign_ok={rep.sign_ok} growth_ok={rep.growth_ok} "
                      f"v*sqrt(alpha+) increasing={rep.trend_ok}")
    return ok


def _find_contact(label, family=None, tries=4000, seed=6):
    rng = np.random.default_rng(seed)
    law = GasLaw(5 / 3, 1.0)
    for _ in range(tries):
        W = random_state(rng)
        fam = family or int(rng.choice([2, 5]))
        w = contact_construct(ContactSpec(W, fam, rng.uniform(-math.pi, math.pi)), law)
        if condition_contact_AB(w).label == label:
            return w, law
    return None, law


def test_criterion_6_tail_asymptotics():
    parts = []
    try:
        w = solve_shock(ShockSolveRequest(REF_LEFT, 3, 0.8, REF_LAW))
        parts.append(_tail_ok(w, R6_FORWARD, "6a", "R6-forward on the v_r=0.8 shock"))
    except WaveKitError as exc:
        record("6a", False, f"R6-forward tail needs the v_r=0.8 shock: {type(exc).__name__}")
        parts.append(False)
    c, _ = _find_contact("A")
    if c is None:
        record("6b", False, "no contact classified (A) among 4000 random admissible contacts; "
                            "contacts keep |B| fixed, so strict componentwise growth cannot occur")
        parts.append(False)
    else:
        parts.append(_tail_ok(c, R1_BACKWARD, "6b", "R1-backward on an (A) contact"))
    record(6, all(parts), "tail asymptotics (6a shock, 6b contact)")
    assert all(parts)


def test_criterion_6_supplementary_v09():
    w = solve_shock(ShockSolveRequest(REF_LEFT, 3, 0.9, REF_LAW))
    assert _tail_ok(w, R6_FORWARD, "6-supplementary", "R6-forward on the v_r=0.9 shock")


# ---------------------------------------------------------------------------- 7

def test_criterion_7_contact_certificates():
    # the tension must be reported on any contact with nonzero field
    probe = contact_construct(ContactSpec(FluidState(1, 1, -1, 0, 0, 0), 2, 0.4), GasLaw(5 / 3, 1))
    tension = condition_contact_AB(probe).tension
    w, law = _find_contact("B", family=2)
    if w is None:
        record(7, False, "no family-2 contact classified (B) among 4000 random admissible "
                         f"contacts; tension reported: {tension is not None}")
        assert False, "no (B)-classified contact exists"
    certs = {}
    for a in (0.5, 1.0, 2.0):
        try:
            certs[a] = certify_noncontraction(w, a, law)
        except WaveKitError as exc:
            certs[a] = exc
    ok = all(not isinstance(c, Exception) and c.relative_residual <= WITNESS_RTOL
             for c in certs.values()) and tension is not None
    record(7, ok, f"(B) contact certificates: { {a: type(c).__name__ for a, c in certs.items()} }")
    assert ok


# ---------------------------------------------------------------------------- 8

def test_criterion_8_F1_affinity():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        law = random_law(rng)
        Ul, Ur = random_state(rng).to_conserved(), random_state(rng).to_conserved()
        fun = WeightedFunctional.for_wave(DiscontinuityWave(Ul, Ur, 0.0, 3), 1.0)
        x, y = random_state(rng).to_conserved(), random_state(rng).to_conserved()
        m = ConservedState.from_array(0.5 * (x.as_array() + y.as_array()))
        fx, fy, fm = (evaluate_F(fun, s, law) for s in (x, y, m))
        scale = max(abs(fx), abs(fy), functional_scale(fun, law))
        worst = max(worst, abs(fm - 0.5 * (fx + fy)) / scale)
    ok = worst <= 1e-12
    record(8, ok, f"1000 pairs, max midpoint defect {worst:.2e} (tol 1e-12)")
    assert ok


# ---------------------------------------------------------------------------- 9

def test_criterion_9_determinism(tmp_path):
    left = {"v": 1.0, "B2": 0.5, "B3": 0.0, "u1": 0.0, "u2": 0.0, "u3": 0.0}
    law = {"gamma": 5.0 / 3.0, "beta": 1.0}
    shock = {"shock": {"family": 3, "v_right": 0.9}}
    analyses = [
        ("fields", None, {"fields": {"check": True}}),
        ("hugoniot", shock, {"hugoniot": {}}),
        ("contact", {"contact": {"family": 2, "angle": 0.7}}, {"contact": {}}),
        ("rarefaction", shock, {"rarefaction": {"family": 6, "origin": "right"}}),
        ("dissipation", shock, {"dissipation": {}}),
        ("certify", shock, {"certify": {"a": 0.3}}),
        ("sweep-a", shock, {"sweep-a": {}}),
    ]
    runs = []
    for k in range(2):
        files = {}
        for name, req, analysis in analyses:
            out = tmp_path / f"run{k}" / name
            doc = {"law": law, "left": left, "analysis": analysis, "output": {"dir": str(out)}}
            if req:
                doc["wave_request"] = req
            p = tmp_path / f"{name}_{k}.json"
            p.write_text(json.dumps(doc))
            code = main([name, "--scenario", str(p), "--jobs", "3"])
            assert code == 0, name
            for f in sorted(out.iterdir()):
                files[f"{name}/{f.name}"] = f.read_bytes()
        runs.append(files)
    ok = runs[0] == runs[1] and len(runs[0]) > 0
    record(9, ok, f"{len(runs[0])} output files byte-identical across two runs: {ok}")
    assert ok
