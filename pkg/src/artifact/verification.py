"""Acceptance checks shared by ``artifact verify`` and the test suite.

Each check returns a :class:`CriterionResult`; tolerances are the literal
acceptance thresholds.  Suites group checks by model.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import appendix_teo, weak_anisotropy_teo
from .background import Background, Mode, named_background
from .diagnostics import fit_power_law, frobenius_error, group_law_residual, relative_error, structure_residual
from .exact_models import (
    kasner_matching,
    rw_exact_teo,
    stiff_fluid_solutions,
    stiff_initial_data,
    stiff_teo_asymptotic,
)
from .oracle import evolve_oracle, evolve_state, omega_matrix
from .teo_core import closed_form_teo, conformal_exact_teo, short_time_teo

__all__ = ["CriterionResult", "SUITES", "run_suite", "CRITERIA"]


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.key} {self.title}: {self.detail} ({self.elapsed:.2f} s)"


def _timed(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    res = fn()
    res.elapsed = time.perf_counter() - t0
    return res


def _mode_for_eta(eta: float, k3: float, delta: float) -> Mode:
    kap = math.sqrt(2.0 * eta * abs(k3) ** (2.0 * delta))
    return Mode(0.6 * kap, 0.8 * kap, k3)


def _t_for_tau(tau: float, k3: float, mu: float) -> float:
    return (tau * mu / (2.0 * abs(k3))) ** (1.0 / mu)


# ---------------------------------------------------------------- C1


def check_rw(n: int = 100, seed: int = 20240501, tol: float = 1e-10) -> CriterionResult:
    rng = np.random.default_rng(seed)
    bg = named_background("rw")
    worst_err = 0.0
    worst_def = 0.0
    t0 = time.perf_counter()
    for _ in range(n):
        k1, k2 = rng.uniform(-10, 10, 2)
        k3 = 0.0
        while abs(k3) < 1e-3:
            k3 = rng.uniform(-10, 10)
        t = rng.uniform(0.0, 4.0)
        while t <= 0:
            t = rng.uniform(0.0, 4.0)
        m = Mode(k1, k2, k3)
        ex = rw_exact_teo(m, t)
        orc = evolve_oracle(m, bg, t_from=0.0, t_to=t, tol=tol)
        worst_err = max(worst_err, frobenius_error(ex, orc))
        worst_def = max(worst_def, abs(ex.unitarity_defect))
    dt = time.perf_counter() - t0
    ok = worst_err <= 1e-7 and worst_def <= 1e-14 and dt <= 30.0
    return CriterionResult(
        "C1",
        "RW exactness",
        ok,
        f"max Frobenius {worst_err:.3g} (<= 1e-7), max defect {worst_def:.3g} (<= 1e-14), {n} samples",
        values={"err": worst_err, "defect": worst_def, "runtime": dt},
    )


# ---------------------------------------------------------------- C2


def check_kasner_quotients() -> CriterionResult:
    t0 = time.perf_counter()
    km = kasner_matching(Mode(0.3, 0.4, 2.0))
    q1 = abs(km.discrepancy)
    q2 = abs(km.discrepancy_2)
    dt = time.perf_counter() - t0
    ok = abs(q1 - 1.042817) <= 1e-5 and abs(q2 - 0.958940) <= 1e-5 and dt <= 1.0
    return CriterionResult(
        "C2",
        "Kasner matching quotients",
        ok,
        f"quotients {q1:.9f} (1.042817) and {q2:.9f} (0.958940)",
        values={"q1": q1, "q2": q2, "runtime": dt},
    )


# ---------------------------------------------------------------- C3


def _ode_residual(state_fn, mode: Mode, bg: Background, t: float) -> float:
    """Relative residual of ``phi' = Omega phi`` using a 5-point stencil."""
    h = 1e-3 * t
    vals = [state_fn(t + j * h).as_array() for j in (-2, -1, 1, 2)]
    deriv = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    phi = state_fn(t).as_array()
    rhs = omega_matrix(mode, bg, t) @ phi
    scale = max(np.linalg.norm(rhs), np.linalg.norm(phi) / t, 1e-300)
    return float(np.linalg.norm(deriv - rhs) / scale)


def check_stiff(etas=(0.1, 0.5, 1.0), k3: float = 2.0) -> CriterionResult:
    bg = named_background("stiff")
    worst_res = 0.0
    worst_match = 0.0
    for eta in etas:
        m = _mode_for_eta(eta, k3, 0.5)
        pair = stiff_fluid_solutions(m)
        for fn in (pair.phi_1, pair.phi_2):
            for t in np.geomspace(0.01, 5.0, 12) / abs(k3):
                worst_res = max(worst_res, _ode_residual(fn, m, bg, float(t)))
        t3 = 3.0 / abs(k3)
        for which, fn in ((1, pair.phi_1), (2, pair.phi_2)):
            phi0 = stiff_initial_data(m, which).as_array()
            num = evolve_state(m, bg, phi0, 0.0, [t3], tol=1e-12)[0]
            ref = fn(t3).as_array()
            worst_match = max(worst_match, float(np.linalg.norm(num - ref) / np.linalg.norm(ref)))
    ok = worst_res <= 1e-7 and worst_match <= 1e-4
    return CriterionResult(
        "C3",
        "stiff fluid",
        ok,
        f"ODE residual {worst_res:.3g} (<= 1e-7), oracle match at |k3|t=3 {worst_match:.3g} (<= 1e-4)",
        values={"residual": worst_res, "match": worst_match},
    )


# ---------------------------------------------------------------- C4


def check_short_time(deltas=(0.25, 0.5, 0.75)) -> CriterionResult:
    m = Mode(0.3, 0.4, 1.0)
    slopes = {}
    for d in deltas:
        bg = Background(1.0, 1.0 - d)
        samples = []
        for s in np.geomspace(1e-4, 1e-2, 9):
            t = float(s)
            k_s = short_time_teo(m, bg, 0.0, t)
            k_o = evolve_oracle(m, bg, t_from=0.0, t_to=t, tol=1e-13)
            samples.append((s, frobenius_error(k_s, k_o)))
        slopes[d] = fit_power_law(samples)[0]
    ok = all(abs(p - 2 * d) <= 0.2 for d, p in slopes.items())
    txt = ", ".join(f"delta={d:g}: {p:.3f} (2delta={2 * d:g})" for d, p in slopes.items())
    return CriterionResult("C4", "short-time order", ok, txt, values={"slopes": slopes})


# ---------------------------------------------------------------- C5


def check_closed_delta_half(etas=(0.1, 0.03), taus=(20.0, 50.0, 100.0), k3: float = 10.0) -> CriterionResult:
    bg = named_background("stiff")
    worst_oracle = 0.0
    worst_asym = 0.0
    for eta in etas:
        m = _mode_for_eta(eta, k3, 0.5)
        for tau in taus:
            t = _t_for_tau(tau, k3, bg.mu)
            c = closed_form_teo(m, bg, t_A=0.0, t=t)
            o = evolve_oracle(m, bg, t_from=0.0, t_to=t, tol=1e-11)
            a = stiff_teo_asymptotic(m, t)
            r_o = max(relative_error(c.k11, o.k11), relative_error(c.k12, o.k12)) / eta
            # large-time form drops a slowly varying phase: compare moduli
            r_a = max(relative_error(abs(c.k11), abs(a.k11)), relative_error(abs(c.k12), abs(a.k12))) / eta
            worst_oracle = max(worst_oracle, r_o)
            worst_asym = max(worst_asym, r_a)
    ok = worst_oracle <= 0.5 and worst_asym <= 0.5
    return CriterionResult(
        "C5",
        "closed form vs oracle at delta=1/2",
        ok,
        f"max rel err / eta: vs oracle {worst_oracle:.3f}, vs large-time form (moduli) {worst_asym:.3f} (<= 0.5)",
        values={"oracle": worst_oracle, "asymptotic": worst_asym},
    )


# ---------------------------------------------------------------- C6


def check_appendix(etas=(0.1, 0.03), taus=(20.0, 40.0, 80.0), k3: float = 8.0) -> CriterionResult:
    bg = named_background("kasner")
    ladders = {}
    for eta in etas:
        m = _mode_for_eta(eta, k3, bg.delta)
        devs = []
        for tau in taus:
            t = _t_for_tau(tau, k3, bg.mu)
            a = appendix_teo(m, bg, 0.0, t)
            c = closed_form_teo(m, bg, t_A=0.0, t=t)
            devs.append(max(relative_error(a.k11, c.k11), relative_error(a.k12, c.k12)))
        ladders[eta] = devs
    ok = all(all(d1 > d2 for d1, d2 in zip(v, v[1:])) for v in ladders.values())
    txt = "; ".join(f"eta={e:g}: " + " > ".join(f"{d:.3g}" for d in v) for e, v in ladders.items())
    return CriterionResult("C6", "appendix ladder", ok, txt, values={"ladders": ladders})


# ---------------------------------------------------------------- C7


def check_conformal_limit(eps0: float = 1e-3, mu: float = 0.5, t_a: float = 1e-8, t: float = 2.0) -> CriterionResult:
    modes = [Mode(1.0, 2.0, 3.0), Mode(0.5, 0.5, -1.0), Mode(3.0, 1.0, 2.0)]
    bound = 5.0 * abs(eps0 * math.log(eps0))
    worst = 0.0
    ratios = []
    for m in modes:
        errs = []
        for eps in (eps0, eps0 / 2):
            bg = Background(mu, 1.0 - mu * (1.0 - eps))
            k = weak_anisotropy_teo(m, bg, t_a, t)
            c = conformal_exact_teo(m, Background(mu, 1.0 - mu), t_a, t)
            errs.append(max(abs(k.k11 - c.k11), abs(k.k12 - c.k12)))
        worst = max(worst, errs[0])
        ratios.append(errs[0] / errs[1])
    ok = worst <= bound and all(1.6 <= r <= 2.4 for r in ratios)
    return CriterionResult(
        "C7",
        "conformal limit",
        ok,
        f"max error {worst:.3g} (<= {bound:.3g}), halving ratios " + ", ".join(f"{r:.3f}" for r in ratios),
        values={"err": worst, "ratios": ratios},
    )


# ---------------------------------------------------------------- C8


def check_kasner_decay(eta: float = 1e-4, k3: float = 4.0) -> CriterionResult:
    bg = named_background("kasner")
    m = _mode_for_eta(eta, k3, bg.delta)
    km = kasner_matching(m)
    taus = np.geomspace(30.0, 300.0, 40)
    ts = _t_for_tau(taus, k3, bg.mu)
    states = evolve_state(m, bg, np.array([km.ratio_teo, 1.0]), 0.0, ts, tol=1e-11)
    p, r2 = fit_power_law(zip(taus, np.abs(states[:, 0])))
    ok = abs(p + 0.75) <= 0.05
    return CriterionResult(
        "C8", "Kasner decay", ok, f"exponent {p:.4f} (-0.75 +- 0.05), r^2 {r2:.4f}", values={"exponent": p}
    )


# ---------------------------------------------------------------- C9 (numeric part)


def check_properties(tol: float = 1e-10) -> CriterionResult:
    """Group law, structural symmetry, chirality flip and partner closure."""
    m = Mode(0.7, -0.4, 1.3)
    bg = Background(1.0, 0.4)
    g_or = group_law_residual(lambda a, b: evolve_oracle(m, bg, t_from=a, t_to=b, tol=tol), 0.1, 0.7, 1.9)
    cbg = Background(0.5, 0.5)
    g_cf = group_law_residual(lambda a, b: conformal_exact_teo(m, cbg, a, b), 0.1, 0.7, 1.9)
    cols = evolve_state(m, bg, np.array([1.0, 0.0]), 0.1, [1.9], tol=tol)[0], evolve_state(
        m, bg, np.array([0.0, 1.0]), 0.1, [1.9], tol=tol
    )[0]
    struct = structure_residual(np.column_stack(cols))
    plus = evolve_oracle(m, bg, "plus", t_from=0.1, t_to=1.9, tol=tol)
    flip = evolve_oracle(m.flipped(), bg, "minus", t_from=0.1, t_to=1.9, tol=tol)
    chir = frobenius_error(plus, flip)
    phi = evolve_state(m, bg, np.array([0.3 + 0.1j, -0.2j]), 0.1, [1.9], tol=tol)[0]
    part0 = np.array([np.conj(-0.2j), -np.conj(0.3 + 0.1j)])
    part = evolve_state(m, bg, part0, 0.1, [1.9], tol=tol)[0]
    closure = float(np.linalg.norm(part - np.array([np.conj(phi[1]), -np.conj(phi[0])])))
    ok = g_or <= 10 * tol and g_cf <= 1e-12 and struct <= 1e-8 and chir <= 1e-12 and closure <= 1e-8
    return CriterionResult(
        "C9",
        "property suite (numeric part)",
        ok,
        f"group law oracle {g_or:.2g}, conformal {g_cf:.2g}; structure {struct:.2g}; "
        f"chirality {chir:.2g}; partner {closure:.2g}",
        values={"group_oracle": g_or, "group_conformal": g_cf, "structure": struct, "chirality": chir, "partner": closure},
    )


# ---------------------------------------------------------------- unitarity


def check_unitarity() -> CriterionResult:
    """Oracle defect, large-time defect at delta=1/2 and the weak-anisotropy defect."""
    m = Mode(0.7, -0.4, 1.3)
    o = evolve_oracle(m, Background(1.0, 0.4), t_from=0.0, t_to=3.0, tol=1e-10)
    d_or = abs(o.unitarity_defect)
    bg = named_background("stiff")
    eta = 0.01
    mm = _mode_for_eta(eta, 10.0, 0.5)
    c = closed_form_teo(mm, bg, t_A=0.0, t=_t_for_tau(80.0, 10.0, 1.0))
    lead = math.gamma(0.5) ** 2 * (bg.mu / 2.0) ** -1.0 * eta / 2.0
    rel_lead = abs(c.unitarity_defect / lead - 1.0)
    weak = []
    mw = Mode(0.3, 0.4, 2.0)
    for eps in (0.01, 0.02, 0.04):
        k = weak_anisotropy_teo(mw, Background(1.0, eps), 1e-8, 2.0)
        weak.append(abs(k.unitarity_defect) / (2 * eps * abs(math.log(eps) + 1) + mw.eta(1.0) / 2))
    ok = d_or <= 1e-8 and rel_lead <= 0.25 and all(w <= 1.0 for w in weak)
    return CriterionResult(
        "U",
        "unitarity",
        ok,
        f"oracle defect {d_or:.2g}; delta=1/2 defect / leading value - 1 = {rel_lead:.3f}; "
        "weak defect / bound " + ", ".join(f"{w:.3f}" for w in weak),
        values={"oracle": d_or, "lead": rel_lead, "weak": weak},
    )


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "C1": check_rw,
    "C2": check_kasner_quotients,
    "C3": check_stiff,
    "C4": check_short_time,
    "C5": check_closed_delta_half,
    "C6": check_appendix,
    "C7": check_conformal_limit,
    "C8": check_kasner_decay,
    "C9": check_properties,
    "U": check_unitarity,
}

SUITES: dict[str, tuple[str, ...]] = {
    "rw": ("C1",),
    "stiff": ("C3", "C5"),
    "kasner": ("C2", "C8"),
    "conformal-limit": ("C7", "C4"),
    "unitarity": ("U", "C9"),
    "appendix": ("C6",),
}


def run_suite(name: str) -> list[CriterionResult]:
    """Run every check of suite ``name``."""
    if name not in SUITES:
        raise KeyError(name)
    return [_timed(CRITERIA[key]) for key in SUITES[name]]
