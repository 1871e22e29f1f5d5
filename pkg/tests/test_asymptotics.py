import math

import numpy as np
import pytest
from scipy.optimize import brentq

from artifact.asymptotics import (
    appendix_teo,
    appendix_terms,
    asymptotic_kasner_spinors,
    kasner_amplitude,
    weak_anisotropy_scalars,
    weak_anisotropy_teo,
    weak_integrals,
)
from artifact.background import Background, Mode, approx_constants, named_background
from artifact.diagnostics import fit_power_law, relative_error
from artifact.errors import DomainError
from artifact.teo_core import closed_form_teo, conformal_exact_teo

KASNER = named_background("kasner")


def t_for_tau(tau, k3, mu=KASNER.mu):
    return (tau * mu / (2 * abs(k3))) ** (1 / mu)


# ---------------------------------------------------------------- appendix


@pytest.mark.parametrize("mu,nu", [(4 / 3, 2 / 3), (1.0, 0.8), (2.0, 0.5)])
def test_appendix_terms_ratio(mu, nu):
    bg = Background(mu, nu)
    c = 1 - bg.delta
    terms = appendix_terms(Mode(0.3, 0.4, 5.0), bg, 3.0)
    assert terms.e1 / terms.e2 == pytest.approx(math.expm1(2 * c) / (2 * c * math.exp(2 * c)), rel=1e-14)
    assert terms.g == pytest.approx(terms.e1 * 2 * 5.0 * 3.0**mu / mu / math.expm1(2 * c), rel=1e-14)


def test_appendix_k12_vanishes_at_start():
    m = Mode(1, 1, 8)
    vals = [abs(appendix_teo(m, KASNER, 1.0, 1.0 + h).k12) for h in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b < 0.2 * a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_appendix_vs_closed_example_mode():
    m = Mode(1, 1, 8)
    t = t_for_tau(60.0, 8.0)
    a = appendix_teo(m, KASNER, 0.0, t)
    c = closed_form_teo(m, KASNER, t_A=0.0, t=t)
    assert not a.meta["tau_warning"]
    assert relative_error(a.k12, c.k12) <= 60.0 ** (KASNER.delta - 1)


@pytest.mark.parametrize("kap", [1.0, 0.3])
def test_appendix_k11_ladder(kap):
    m = Mode(kap, kap, 8)
    errs = []
    for tau in (20.0, 60.0, 180.0, 540.0):
        t = t_for_tau(tau, 8.0)
        errs.append(abs(appendix_teo(m, KASNER, 0.0, t).k11 - closed_form_teo(m, KASNER, t_A=0.0, t=t).k11))
    assert all(b < 0.5 * a for a, b in zip(errs, errs[1:]))


def test_appendix_k12_leading_value():
    m = Mode(0.018, 0.024, 8.0)
    d = KASNER.delta
    lead = math.gamma(d) ** 2 * (KASNER.mu / 2) ** (2 * d - 2) * m.eta(d) / 2
    for tau in (80.0, 160.0, 320.0):
        k = appendix_teo(m, KASNER, 0.0, t_for_tau(tau, 8.0))
        assert abs(k.k12) ** 2 == pytest.approx(lead, rel=0.03)


def test_appendix_domain_and_flags():
    m = Mode(1, 1, 8)
    assert appendix_teo(m, KASNER, 0.0, 0.3).meta["tau_warning"]
    with pytest.raises(DomainError):
        appendix_teo(m, Background(1.0, 0.5), 0.0, 2.0)
    with pytest.raises(DomainError):
        appendix_teo(Mode(1, 1, 0), KASNER, 0.0, 2.0)
    with pytest.raises(DomainError):
        appendix_teo(m, KASNER, 1.0, 1.0)
    k = appendix_teo(m, KASNER, 0.0, 3.0)
    mm = k.matrix
    assert mm[1, 0] == -np.conj(mm[0, 1]) and mm[1, 1] == np.conj(mm[0, 0])


def test_appendix_chirality_flip():
    m = Mode(0.3, -0.2, 8)
    a = appendix_teo(m, KASNER, 0.0, 3.0, chirality="plus")
    b = appendix_teo(m.flipped(), KASNER, 0.0, 3.0)
    assert a.k11 == b.k11 and a.k12 == b.k12


# ---------------------------------------------------------------- weak anisotropy


@pytest.mark.parametrize("k", [(0.3, 0.4, 2.0), (3.0, 1.0, -0.5)])
def test_weak_scalar_invariants(k):
    sc = weak_anisotropy_scalars(Mode(*k), Background(1.0, 0.05, t_A=0.5), 2.0)
    assert sc.q_plus + sc.q_minus == pytest.approx(2.0, rel=1e-15)
    da2 = (sc.d * sc.a_k) ** 2
    assert sc.q_plus * sc.q_minus == pytest.approx(da2 / (1 + da2), rel=1e-14)
    assert sc.script_e == pytest.approx(math.exp(2 * sc.eps * (1 - sc.sigma_A)) - 1, rel=1e-13)
    assert sc.script_s == pytest.approx(1 - sc.script_e / (2 * sc.eps), rel=1e-13)
    assert sc.d == approx_constants(0.95).d


def test_weak_domain_errors():
    m = Mode(0.3, 0.4, 2.0)
    with pytest.raises(DomainError):
        weak_anisotropy_scalars(m, Background(1.0, 0.5), 2.0)
    with pytest.raises(DomainError):
        weak_anisotropy_scalars(Mode(0.3, 0.4, 0.0), Background(1.0, 0.05), 2.0)
    with pytest.raises(DomainError):
        weak_integrals(m, Background(1.0, 0.05), 2.0, method="series")
    with pytest.raises(DomainError):
        weak_anisotropy_teo(m, Background(1.0, 0.05), 2.0, 2.0)


def test_weak_series_vs_quadrature_second_order():
    m = Mode(0.3, 0.4, 2.0)
    errs = []
    for eps in (0.1, 0.05, 0.025):
        bg = Background(1.0, eps, t_A=1.2)
        assert weak_anisotropy_scalars(m, bg, 2.0).script_s > 0.2
        q = weak_integrals(m, bg, 2.0)
        s = weak_integrals(m, bg, 2.0, method="series")
        assert not s[2]["fallback"]
        errs.append(relative_error(s[0], q[0]))
        assert errs[-1] <= eps**2
        assert relative_error(s[1], q[1]) <= eps
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.2)


def test_weak_series_fallback_at_branch_point():
    m, eps = Mode(0.3, 0.4, 2.0), 0.05
    t = 2.0
    ta = brentq(lambda a: weak_anisotropy_scalars(m, Background(1.0, eps, t_A=a), t).script_s, 0.01, 1.9)
    bg = Background(1.0, eps, t_A=ta)
    s = weak_integrals(m, bg, t, method="series")
    q = weak_integrals(m, bg, t)
    assert s[2]["fallback"] and s[0] == q[0] and s[1] == q[1]


def test_weak_series_past_branch_point():
    """Past ``S = 0`` the continued form keeps second order in ``eps``, with a larger constant."""
    m = Mode(0.3, 0.4, 2.0)
    errs = []
    for eps in (0.1, 0.05, 0.025, 0.0125):
        bg = Background(1.0, eps, t_A=0.01)
        s = weak_integrals(m, bg, 2.0, method="series")
        assert s[2]["branch"] == "past"
        errs.append(relative_error(s[0], weak_integrals(m, bg, 2.0)[0]))
        # S -> 0 as eps shrinks at fixed t_A, so the constant drifts up slowly (3.0 .. 4.3)
        assert errs[-1] <= 5 * eps**2
    assert all(a / b >= 3.0 for a, b in zip(errs, errs[1:]))


def test_weak_i1_asymptotic_form_at_large_argument():
    m = Mode(6.0, 8.0, 5.0)
    bg = Background(1.0, 0.05, t_A=1.2)
    a = weak_integrals(m, bg, 2.0, method="series", i1_form="asymptotic")[0]
    c = weak_integrals(m, bg, 2.0, method="series", i1_form="continuation")[0]
    assert relative_error(a, c) <= 1e-4


def test_weak_converges_to_conformal():
    m = Mode(0.3, 0.4, 2.0)
    c = conformal_exact_teo(m, Background(1.0, 0.0), 0.5, 2.0)
    errs = []
    for eps in (0.04, 0.02, 0.01, 0.005):
        k = weak_anisotropy_teo(m, Background(1.0, eps), 0.5, 2.0)
        errs.append(max(abs(k.k11 - c.k11), abs(k.k12 - c.k12)))
    assert all(1.6 <= a / b <= 2.4 for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 5 * 0.005 * abs(math.log(0.005))


def test_weak_defect_scaling():
    """The defect stays within ``2 eps |ln eps + 1| + eta_1 / 2`` and vanishes with ``eps``."""
    m = Mode(0.3, 0.4, 2.0)
    samples = []
    for eps in (0.01, 0.02, 0.04):
        k = weak_anisotropy_teo(m, Background(1.0, eps), 1e-8, 2.0)
        assert abs(k.unitarity_defect) <= 2 * eps * abs(math.log(eps) + 1) + m.eta(1.0) / 2
        samples.append((eps, abs(k.unitarity_defect)))
    slope = np.polyfit(np.log([s[0] for s in samples]), np.log([s[1] for s in samples]), 1)[0]
    assert 0.7 <= slope <= 1.3


def test_weak_structure_and_metadata():
    k = weak_anisotropy_teo(Mode(0.3, 0.4, 2.0), Background(1.0, 0.05), 0.5, 2.0, method="series")
    mm = k.matrix
    assert mm[1, 0] == -np.conj(mm[0, 1]) and mm[1, 1] == np.conj(mm[0, 0])
    assert k.meta["first_dropped"] == "O(eps^2)"


# ---------------------------------------------------------------- Kasner spinors


def test_kasner_amplitudes_mirror():
    m = Mode(0.3, 0.4, 2.0)
    t = t_for_tau(50.0, 2.0)
    s1, s2 = asymptotic_kasner_spinors(m, t, init=(1.0, 1.0))
    a1 = kasner_amplitude(m, KASNER)
    tau = 50.0
    assert s1.phi1 == pytest.approx(a1 * np.exp(-1j * tau) * tau ** (-0.75), rel=1e-10)
    assert s2.phi2 == pytest.approx(-np.conj(a1) * np.exp(1j * tau) * tau ** (-0.75), rel=1e-10)


def test_kasner_spinor_envelope_and_limit():
    m = Mode(0.3, 0.4, 2.0)
    taus = np.geomspace(30, 3000, 12)
    st = [asymptotic_kasner_spinors(m, t_for_tau(tau, 2.0))[0] for tau in taus]
    slope, r2 = fit_power_law(zip(taus, [abs(s.phi1) for s in st]))
    assert slope == pytest.approx(-0.75, abs=1e-10) and r2 == pytest.approx(1.0)
    dev = [abs(s.phi2 - 1) for s in st]
    assert all(b < a for a, b in zip(dev, dev[1:]))
    with pytest.raises(DomainError):
        asymptotic_kasner_spinors(m, 2.0, bg=Background(1.0, 0.5))
