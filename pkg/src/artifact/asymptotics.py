"""Large-``|tau|`` expansions of the TEO (``0 < delta < 1/3``) and the
weak-anisotropy TEO (``delta = 1 - eps``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .background import Background, Mode, approx_constants, derived_scalars
from .errors import DomainError, SpecfunError
from .oracle import Chirality, TeoMatrix, WeylModeState, _effective_mode
from .specfun import kummer_1f1, f_delta, principal_log_cut, sine_cosine_integrals
from .teo_core import _gauss_legendre_panels

__all__ = [
    "AsymptoticTerms",
    "appendix_terms",
    "appendix_teo",
    "WeakAnisotropyScalars",
    "weak_anisotropy_scalars",
    "weak_integrals",
    "weak_anisotropy_teo",
    "kasner_amplitude",
    "asymptotic_kasner_spinors",
    "DEFAULT_TAU_MIN",
]

DEFAULT_TAU_MIN = 20.0


# ---------------------------------------------------------------- appendix


@dataclass(frozen=True)
class AsymptoticTerms:
    """``E1``, ``E2`` and ``G`` of the large-``|tau|`` expansion.

    ``e1 / e2 = (e^{2c} - 1) / (2 c e^{2c})`` with ``c = 1 - delta``.
    """

    e1: complex
    e2: complex
    g: complex
    truncation_order: int
    validity: dict


def appendix_terms(mode: Mode, bg: Background, t: float, tau_min: float = DEFAULT_TAU_MIN) -> AsymptoticTerms:
    """``E1(tau)``, ``E2(tau)`` and ``G(tau) = tau E1 / (e^{2(1-delta)} - 1)``."""
    ds = derived_scalars(mode, bg, t)
    d = ds.delta
    c = 1.0 - d
    tau = ds.tau
    if tau == 0:
        raise DomainError("expansion needs tau != 0")
    common = ds.eta * (bg.mu / 2.0) ** (2.0 * d - 2.0) * abs(tau) ** (2.0 * d - 2.0) / (1.0 - 1j * c / tau)
    e2c = math.exp(2.0 * c)
    e1 = (e2c - 1.0) / (4.0 * c) * common
    e2 = e2c / 2.0 * common
    g = tau * e1 / (e2c - 1.0)
    validity = {"tau_large": abs(tau) >= tau_min, "delta_in_range": 0 < d < 1.0 / 3.0}
    return AsymptoticTerms(complex(e1), complex(e2), complex(g), 1, validity)


def appendix_teo(
    mode: Mode,
    bg: Background,
    t_A: float | None = None,
    t: float = 1.0,
    chirality: Chirality = "minus",
    tau_min: float = DEFAULT_TAU_MIN,
) -> TeoMatrix:
    """Large-``|tau|`` TEO for ``0 < delta < 1/3``.

    All terms written explicitly in the expansion are kept; the first
    dropped orders are ``O(eta D^2 |tau|^{2 delta - 1})`` relative in K12 and
    ``O(D^4 G^2)`` in K11.  ``meta["tau_warning"]`` is set when
    ``|tau| < tau_min``.
    """
    m = _effective_mode(mode, chirality)
    if t_A is None:
        t_A = bg.t_A
    bgA = bg.with_times(t_A, min(bg.t_tilde_A, t_A))
    d = bg.delta
    if not 0.0 < d < 1.0 / 3.0:
        raise DomainError(f"appendix expansion needs 0 < delta < 1/3, got {d!r}")
    if m.k3 == 0 or m.kappa == 0:
        raise DomainError("appendix expansion needs k3 != 0 and kappa > 0")
    if not t > t_A:
        raise DomainError("need t > t_A")
    ds = derived_scalars(m, bgA, t)
    terms = appendix_terms(m, bgA, t, tau_min)
    dd = approx_constants(d).d
    dd2 = dd * dd
    c = 1.0 - d
    tau, tau_a, eta, mu = ds.tau, ds.tau_A, ds.eta, bg.mu
    e1, e2, g = terms.e1, terms.e2, terms.g
    r = (tau_a / tau) ** d
    ratio = tau_a / tau

    def fd(z):
        return complex(f_delta(d, z))

    def diff(z_full, z_a):
        return fd(z_full) - r * fd(z_a)

    b = eta * (mu / 2.0) ** (2.0 * d - 2.0) * dd2 * abs(tau) ** (2.0 * d - 2.0) / (2.0 * d)
    pre = (m.k_plus(bgA) / m.kappa) * math.sqrt(2.0 * eta) / mu * (mu / 2.0) ** d * abs(tau) ** d * cmath.exp(-1j * tau)
    big = 1.0 + dd2 * e2
    k12 = pre * (
        cmath.exp(1j * tau * (1.0 + dd2 * e1)) / d * diff(-1j * tau * big, -1j * tau_a * big)
        + math.exp(c) * b * diff(d - 1.0, (d - 1.0) * ratio)
        + math.exp(2.0 * c) * b * cmath.exp(1j * tau) * diff(2.0 * (d - 1.0) - 1j * tau, 2.0 * (d - 1.0) - 1j * tau_a)
    )
    k11 = 1.0 + 2j * c * dd * g * (
        math.exp(c) / d * (1.0 - 1j * dd2 * g) * diff(d - 1.0, (d - 1.0) * ratio)
        + 1j * math.exp(3.0 * c) / d * dd2 * g * diff(3.0 * (d - 1.0), 3.0 * (d - 1.0) * ratio)
        - cmath.exp(-1j * tau * (1.0 + dd2 * e1)) / d * diff(1j * tau * big, 1j * tau_a * big)
    )
    meta = {
        "terms": terms,
        "tau": tau,
        "eta": eta,
        "tau_warning": not terms.validity["tau_large"],
        "first_dropped_k12": "O(eta D^2 |tau|^(2 delta - 1))",
        "first_dropped_k11": "O(D^4 G^2)",
    }
    return TeoMatrix(complex(k11), complex(k12), t_A, t, "appendix", meta)


# ---------------------------------------------------------------- weak anisotropy


@dataclass(frozen=True)
class WeakAnisotropyScalars:
    """Scalars of the ``delta = 1 - eps`` expansion."""

    eps: float
    d: float
    a_k: float
    y_k: float
    big_a: float
    q_plus: float
    q_minus: float
    script_e: float
    script_s: float
    tau: float
    tau_A: float
    s: float
    sigma_A: float


def weak_anisotropy_scalars(mode: Mode, bg: Background, t: float) -> WeakAnisotropyScalars:
    """``A_k = (kappa/|k3|) s^{-eps}``, ``y_k``, ``Q_+-``, ``E`` and ``S = 1 - E/(2 eps)``."""
    eps = 1.0 - bg.delta
    if not 0.0 < eps <= 0.1:
        raise DomainError(f"weak anisotropy needs 0 < eps <= 0.1, got {eps!r}")
    if mode.k3 == 0:
        raise DomainError("weak anisotropy needs k3 != 0")
    ds = derived_scalars(mode, bg, t)
    dd = approx_constants(bg.delta).d
    a = mode.kappa / abs(mode.k3) * ds.s ** (-eps)
    r = math.sqrt(1.0 + (dd * a) ** 2)
    y = 0.5 * ds.tau * (dd * a) ** 2 / (r + 1.0)
    e = math.expm1(2.0 * eps * (1.0 - ds.sigma_A))
    return WeakAnisotropyScalars(
        eps=eps,
        d=dd,
        a_k=a,
        y_k=y,
        big_a=ds.tau + y,
        q_plus=(r + 1.0) / r,
        q_minus=(r - 1.0) / r,
        script_e=e,
        script_s=1.0 - e / (2.0 * eps),
        tau=ds.tau,
        tau_A=ds.tau_A,
        s=ds.s,
        sigma_A=ds.sigma_A,
    )


def _weak_quadrature(sc: WeakAnisotropyScalars, tol: float) -> tuple[complex, complex, float]:
    eps = sc.eps
    d = 1.0 - eps
    w_lo = sc.sigma_A ** d

    def f(w):
        z = 1.0 - w ** (1.0 / d)
        big_y = np.expm1(2.0 * eps * z) / (2.0 * eps) * sc.y_k
        return np.exp(eps * z + 1j * big_y), np.exp(-1j * sc.tau * z - 1j * big_y)

    (i1, i2), err, _ = _gauss_legendre_panels(f, w_lo, 1.0, tol)
    return complex(i1 / d), complex(i2 / d), float(err)


def _cis(x: float) -> complex:
    """``Ci~(x) - i Si(x)``, entire in ``x``."""
    si, _, cin = sine_cosine_integrals(x)
    return complex(cin, -si)


def _e1_asymptotic(x: float) -> complex:
    """``(i e^{-ix} / x) sum_n n! (-i x)^{-n}`` truncated at its smallest term."""
    total = 0j
    term = 1.0 + 0j
    for n in range(200):
        total += term
        nxt = term * (n + 1) / (-1j * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17:
            break
        term = nxt
    return 1j * cmath.exp(-1j * x) / x * total


def _i1_series(sc: WeakAnisotropyScalars, form: str) -> complex:
    eps, y, s_ = sc.eps, sc.y_k, sc.script_s
    log_s = principal_log_cut(s_)
    x = s_ * y
    lead = (cmath.exp(1j * (1.0 - s_) * y) - 1.0) / (1j * y)
    common = -(1.0 - s_ + log_s) * cmath.exp(-1j * x) + (cmath.exp(-1j * x) - cmath.exp(-1j * y)) / (1j * y)
    if form == "asymptotic":
        br = common + _e1_asymptotic(x) - _e1_asymptotic(y)
    else:
        br = common + log_s + _cis(x) - _cis(y)
    return lead + eps * cmath.exp(1j * y) / (1j * y) * br


def _i2_series(sc: WeakAnisotropyScalars) -> complex:
    d = 1.0 - sc.eps
    big_a = sc.big_a
    ratio = sc.tau_A / sc.tau
    fa = complex(kummer_1f1(d, d + 1.0, 1j * big_a))
    fb = complex(kummer_1f1(d, d + 1.0, 1j * ratio * big_a)) if ratio > 0 else 1.0
    return cmath.exp(-1j * big_a) / d * (fa - ratio ** d * fb)


def weak_integrals(
    mode: Mode,
    bg: Background,
    t: float,
    method: Literal["quadrature", "series"] = "quadrature",
    i1_form: Literal["auto", "continuation", "asymptotic"] = "auto",
    tol: float = 1e-11,
) -> tuple[complex, complex, dict]:
    """The two integrals ``I1``, ``I2`` of the weak-anisotropy TEO.

    ``quadrature`` integrates them directly.  ``series`` uses the
    Si/Ci closed form for ``I1`` (continued past ``S = 0`` with the
    cut logarithm, or the smallest-term-truncated asymptotic form when
    ``i1_form="asymptotic"``) and the 1F1 form for ``I2``.  Within
    ``eps/10`` of the branch point ``S = 0`` it falls back to quadrature.
    """
    sc = weak_anisotropy_scalars(mode, bg, t)
    info = {"scalars": sc, "method": method}
    if method == "quadrature":
        i1, i2, err = _weak_quadrature(sc, tol)
        info["quad_err"] = err
        return i1, i2, info
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    if not sc.sigma_A > 0:
        raise DomainError("series mode needs sigma_A > 0 (t_A > 0)")
    rho = sc.eps / 10.0
    if abs(sc.script_s) < rho or abs(sc.y_k) < 1e-8:
        i1, i2, err = _weak_quadrature(sc, tol)
        info.update(fallback=True, quad_err=err)
        return i1, i2, info
    form = i1_form
    if form == "auto":
        form = "continuation"
    try:
        i1 = _i1_series(sc, form)
        i2 = _i2_series(sc)
    except SpecfunError:
        i1, i2, err = _weak_quadrature(sc, tol)
        info.update(fallback=True, quad_err=err)
        return i1, i2, info
    info.update(fallback=False, i1_form=form, branch=("past" if sc.script_s < 0 else "before"))
    return i1, i2, info


def weak_anisotropy_teo(
    mode: Mode,
    bg: Background,
    t_A: float | None = None,
    t: float = 1.0,
    chirality: Chirality = "minus",
    method: Literal["quadrature", "series"] = "quadrature",
    i1_form: Literal["auto", "continuation", "asymptotic"] = "auto",
    tol: float = 1e-11,
) -> TeoMatrix:
    """TEO for ``delta = 1 - eps`` with ``0 < eps <= 0.1``.

    ``K11 = 1 + Q_+ (i y / 2D) (I1 - I2)`` and
    ``K12 = (k_plus / 2 mu) s^{1-eps} e^{-i tau} (Q_- conj(I1) + Q_+ conj(I2))``.
    """
    m = _effective_mode(mode, chirality)
    if t_A is None:
        t_A = bg.t_A
    if not t > t_A >= 0:
        raise DomainError("need t > t_A >= 0")
    bgA = bg.with_times(t_A, min(bg.t_tilde_A, t_A))
    i1, i2, info = weak_integrals(m, bgA, t, method, i1_form, tol)
    sc: WeakAnisotropyScalars = info["scalars"]
    k11 = 1.0 + sc.q_plus * 1j * sc.y_k / (2.0 * sc.d) * (i1 - i2)
    k12 = (m.k_plus(bgA) / (2.0 * bg.mu)) * sc.s ** (1.0 - sc.eps) * cmath.exp(-1j * sc.tau) * (
        sc.q_minus * i1.conjugate() + sc.q_plus * i2.conjugate()
    )
    info["first_dropped"] = "O(exp(-pi |tau| / eps))" if method == "quadrature" else "O(eps^2)"
    return TeoMatrix(complex(k11), complex(k12), t_A, t, "weak", info)


# ---------------------------------------------------------------- Kasner


def kasner_amplitude(mode: Mode, bg: Background) -> complex:
    """``A1 = i sgn(k3) (mu/2)^{delta-1} k_plus / (2 |k3|^delta)``."""
    if mode.k3 == 0:
        raise DomainError("needs k3 != 0")
    d = bg.delta
    return 1j * mode.sign_k3 * (bg.mu / 2.0) ** (d - 1.0) * mode.k_plus(bg) / (2.0 * abs(mode.k3) ** d)


def asymptotic_kasner_spinors(
    mode: Mode,
    t: float,
    init: tuple[complex, complex] = (1.0, 1.0),
    bg: Background | None = None,
) -> tuple[WeylModeState, WeylModeState]:
    """Large-``|tau|`` Kasner spinors from the TEO.

    ``init`` holds the lowest-order initial data ``(phi2^(1)(0), phi1^(2)(0))``.
    Solution 1 is ``(A1 e^{-i tau} / |tau|^{1-delta}, 1 - c eta |tau|^{2 delta - 1}) phi2^(1)(0)``
    and solution 2 the mirrored form with ``A2 = -conj(A1)``.
    """
    if bg is None:
        bg = Background(4.0 / 3.0, 2.0 / 3.0)
    d = bg.delta
    if abs(d - 0.25) > 1e-12:
        raise DomainError("asymptotic Kasner spinors need delta = 1/4")
    ds = derived_scalars(mode, bg, t)
    tau = ds.tau
    a1 = kasner_amplitude(mode, bg)
    a2 = -a1.conjugate()
    dd = approx_constants(d).d
    corr = (
        0.5j
        * mode.sign_k3
        * (bg.mu / 2.0) ** (2.0 * d - 2.0)
        * dd
        * complex(kummer_1f1(1.0, 1.0 + d, 1.0 - d)).real
        / d
        * ds.eta
        * abs(tau) ** (2.0 * d - 1.0)
    )
    env = abs(tau) ** (d - 1.0)
    p20, p10 = init
    s1 = WeylModeState(a1 * cmath.exp(-1j * tau) * env * p20, (1.0 - corr) * p20, "minus", 1)
    s2 = WeylModeState((1.0 + corr) * p10, a2 * cmath.exp(1j * tau) * env * p10, "minus", 2)
    return s1, s2
