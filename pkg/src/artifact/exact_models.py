"""Reference solutions: hypersurface propagation, flat RW, stiff fluid, Kasner.

All solutions are for negative chirality; positive chirality follows from
``k -> -k``.  Unless stated otherwise ``t_tilde_A = 0``, so
``k_plus = k2 + i k1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .background import Background, Mode, named_background
from .errors import DomainError
from .oracle import TeoMatrix, WeylModeState
from .specfun import gamma, rgamma, whittaker_w
from .teo_core import conformal_exact_teo

__all__ = [
    "ModelSolutionPair",
    "hypersurface_solutions",
    "hypersurface_exact_teo",
    "hypersurface_approx_teo",
    "rw_exact_teo",
    "RwCompanions",
    "rw_companions",
    "rw_spinor",
    "stiff_eta",
    "stiff_fluid_solutions",
    "stiff_initial_data",
    "stiff_large_time",
    "stiff_teo_asymptotic",
    "KasnerMatching",
    "kasner_matching",
    "kasner_short_time",
    "kasner_asymptotic",
    "kasner_u",
]

_RW = named_background("rw")
_STIFF = named_background("stiff")
_KASNER = named_background("kasner")


@dataclass(frozen=True)
class ModelSolutionPair:
    """Two solutions ``t -> WeylModeState`` of one model."""

    phi_1: Callable[[float], WeylModeState]
    phi_2: Callable[[float], WeylModeState]
    model: str


def _kp(mode: Mode) -> complex:
    return complex(mode.k2, mode.k1)


def _km(mode: Mode) -> complex:
    return complex(mode.k2, -mode.k1)


def _sgn(mode: Mode) -> float:
    if mode.k3 == 0:
        raise DomainError("model needs k3 != 0")
    return mode.sign_k3


# ---------------------------------------------------------------- hypersurface


def _hypersurface_checks(mode: Mode, bg: Background) -> None:
    if mode.k3 != 0:
        raise DomainError("hypersurface model needs k3 = 0")
    if bg.nu == 1.0:
        raise DomainError("nu = 1 (logarithmic) hypersurface case is not supported")
    if mode.kappa == 0:
        raise DomainError("hypersurface model needs kappa > 0")


def _theta(mode: Mode, bg: Background, t_A: float, t: float) -> float:
    e = 1.0 - bg.nu
    return mode.kappa * (t ** e - t_A ** e) / e


def hypersurface_solutions(
    mode: Mode,
    bg: Background,
    t_A: float | None = None,
    amplitudes: tuple[complex, complex] = (1.0, 1.0),
) -> ModelSolutionPair:
    """Exact cos/sin solution pair for ``k3 = 0``.

    ``phi1 = A1 (cos th, -(kappa/k_plus) sin th)``,
    ``phi2 = A2 (sin th, (kappa/k_plus) cos th)`` with
    ``th = kappa (t**(1-nu) - t_A**(1-nu)) / (1-nu)``.
    """
    _hypersurface_checks(mode, bg)
    if t_A is None:
        t_A = bg.t_A
    a1, a2 = amplitudes
    r = mode.kappa / _kp(mode)

    def s1(t: float) -> WeylModeState:
        th = _theta(mode, bg, t_A, t)
        return WeylModeState(a1 * math.cos(th), -a1 * r * math.sin(th), "minus", 1)

    def s2(t: float) -> WeylModeState:
        th = _theta(mode, bg, t_A, t)
        return WeylModeState(a2 * math.sin(th), a2 * r * math.cos(th), "minus", 2)

    return ModelSolutionPair(s1, s2, "hypersurface")


def _rotation_teo(mode: Mode, xi: float, t_A: float, t: float, method: str) -> TeoMatrix:
    return TeoMatrix(complex(math.cos(xi)), (_kp(mode) / mode.kappa) * math.sin(xi), t_A, t, method, {"xi": xi})


def hypersurface_exact_teo(mode: Mode, bg: Background, t_A: float | None = None, t: float = 1.0) -> TeoMatrix:
    """Exact ``k3 = 0`` TEO with ``xi = (kappa / (mu delta)) (s**delta - s_A**delta)``."""
    _hypersurface_checks(mode, bg)
    if t_A is None:
        t_A = bg.t_A
    return _rotation_teo(mode, _theta(mode, bg, t_A, t), t_A, t, "hypersurface-exact")


def hypersurface_approx_teo(mode: Mode, bg: Background, t_A: float | None = None, t: float = 1.0) -> TeoMatrix:
    """Approximate ``k3 = 0`` TEO from the exponential kernel approximation.

    ``xi = x (e^{(1-delta)(1-sigma_A)} - 1)``, which tends to the exact
    angle as ``t -> t_A`` and equals it for ``delta = 1``.
    """
    _hypersurface_checks(mode, bg)
    if t_A is None:
        t_A = bg.t_A
    d = bg.delta
    if not 0 < d <= 1:
        raise DomainError("approximate hypersurface TEO needs 0 < delta <= 1")
    s, s_a = t ** bg.mu, t_A ** bg.mu
    if bg.is_conformal:
        xi = mode.kappa * (s - s_a) / bg.mu
    else:
        x = mode.kappa * s ** d / (bg.mu * (1.0 - d))
        sig = s_a / s if s > 0 else 1.0
        xi = x * math.expm1((1.0 - d) * (1.0 - sig))
    return _rotation_teo(mode, xi, t_A, t, "hypersurface-approx")


# ---------------------------------------------------------------- flat RW


def rw_exact_teo(mode: Mode, t: float, chirality: str = "minus") -> TeoMatrix:
    """Exact flat-RW (``mu = nu = 1/2``) TEO from ``t_A = 0``."""
    if not t >= 0:
        raise DomainError("need t >= 0")
    k = conformal_exact_teo(mode, _RW, 0.0, t, chirality)
    return TeoMatrix(k.k11, k.k12, 0.0, t, "model-exact", {"model": "rw"})


@dataclass(frozen=True)
class RwCompanions:
    """Normalisation data of the RW bispinors (up to constant phases)."""

    cos_zeta: float
    tan_zeta: float
    c2_minus: float
    c1_minus: float
    c1_plus: float
    c2_plus: float


def rw_companions(mode: Mode) -> RwCompanions:
    """``cos zeta = sqrt((k + |k3|) / 2k)``, ``c2 = cos zeta / (sqrt 2 (2 pi)**1.5)``, ``c1 = tan zeta c2``."""
    k = mode.k_total
    if k == 0:
        raise DomainError("needs k != 0")
    cz = math.sqrt((k + abs(mode.k3)) / (2.0 * k))
    sz = math.sqrt(max(0.0, 1.0 - cz * cz))
    tz = sz / cz
    c2 = cz / (math.sqrt(2.0) * (2.0 * math.pi) ** 1.5)
    c1 = tz * c2
    return RwCompanions(cz, tz, c2, c1, c1, c2)


def rw_spinor(mode: Mode, t: float, j: int, chirality: str = "minus") -> WeylModeState:
    """RW Weyl spinor ``|g|^{-1/4} e^{+-2i(-1)^j k sgn(k3) sqrt t} (1, i((-1)^j k sgn - k3)/k_plus)``."""
    if j not in (1, 2):
        raise DomainError("j must be 1 or 2")
    if not t > 0:
        raise DomainError("need t > 0")
    sg = _sgn(mode)
    k = mode.k_total
    sign = 1.0 if chirality == "minus" else -1.0
    ph = sign * 2.0 * (-1) ** j * k * sg * math.sqrt(t)
    amp = t ** (-0.75) * cmath.exp(1j * ph)
    second = 1j * ((-1) ** j * k * sg - mode.k3) / _kp(mode)
    return WeylModeState(amp, amp * second, chirality, j)  # type: ignore[arg-type]


# ---------------------------------------------------------------- stiff fluid


def stiff_eta(mode: Mode) -> float:
    """``eta = kappa**2 / (2 k3)`` (signed)."""
    _sgn(mode)
    return mode.kappa ** 2 / (2.0 * mode.k3)


def _stiff_state(mode: Mode, t: float, which: int) -> WeylModeState:
    k3 = mode.k3
    eta = stiff_eta(mode)
    sg = _sgn(mode)
    a = -2j * k3 * t
    pre1 = cmath.exp(-0.25 * cmath.log(a) - 1j * k3 * t)
    pre2 = cmath.exp(-0.75 * cmath.log(a) + 1j * k3 * t)
    if which == 1:
        z = 2j * k3 * t
        wa = whittaker_w(-0.25 - 1j * eta, 0.25, z)
        wb = whittaker_w(0.75 - 1j * eta, 0.25, z)
        p1 = pre1 * wa
        p2 = cmath.sqrt(-2j * k3) / _kp(mode) * pre2 * (1j * eta * wa - wb)
    else:
        z = -2j * k3 * t
        wa = whittaker_w(0.25 + 1j * eta, 0.25, z)
        wb = whittaker_w(-0.75 + 1j * eta, 0.25, z)
        p1 = pre1 * wa
        p2 = 1j * _km(mode) * sg / cmath.sqrt(2j * k3) * pre2 * (wa + (1j * eta - 0.5) * wb)
    return WeylModeState(p1, p2, "minus", which)


def stiff_fluid_solutions(mode: Mode) -> ModelSolutionPair:
    """Whittaker-function solutions of the stiff-fluid (``mu = 1, nu = 1/2``) system.

    Valid for ``t > 0`` with ``2 |k3| t`` inside the Whittaker working range.
    """
    _sgn(mode)
    if mode.kappa == 0:
        raise DomainError("stiff-fluid solutions need kappa > 0")
    return ModelSolutionPair(
        lambda t: _stiff_state(mode, t, 1),
        lambda t: _stiff_state(mode, t, 2),
        "stiff_fluid",
    )


def stiff_initial_data(mode: Mode, which: int) -> WeylModeState:
    """``t -> 0`` limits of the two stiff-fluid solutions."""
    eta = stiff_eta(mode)
    sg = _sgn(mode)
    sp = math.sqrt(math.pi)
    if which == 1:
        ph = cmath.exp(0.25j * math.pi * sg)
        p1 = sp * ph * rgamma(1.0 + 1j * eta)
        p2 = -sp * ph * cmath.sqrt(2j * mode.k3) / _kp(mode) * rgamma(0.5 + 1j * eta)
    elif which == 2:
        p1 = sp * rgamma(0.5 - 1j * eta)
        p2 = sp * 1j * _km(mode) * sg / cmath.sqrt(2j * mode.k3) * rgamma(1.0 - 1j * eta)
    else:
        raise DomainError("which must be 1 or 2")
    return WeylModeState(p1, p2, "minus", which)


def stiff_large_time(mode: Mode, t: float, which: int) -> WeylModeState:
    """Large-``|k3| t`` forms of the stiff-fluid solutions, including the first correction."""
    k3 = mode.k3
    eta = stiff_eta(mode)
    sg = _sgn(mode)
    if which == 1:
        pref = cmath.exp(0.25j * math.pi * sg) * cmath.exp(-1j * eta * cmath.log(2j * k3 * t))
        p1 = pref * cmath.exp(-2j * k3 * t) / cmath.sqrt(2j * k3 * t) * (
            1.0 - (1.0 + 3j * eta - 2.0 * eta ** 2) / (4j * k3 * t)
        )
        p2 = -pref * cmath.sqrt(2j * k3) / _kp(mode) * (1.0 + sg * (1j * eta - 2.0 * eta ** 2) / (4.0 * k3 * t))
    elif which == 2:
        pref = cmath.exp(1j * eta * cmath.log(-2j * k3 * t))
        p1 = pref * (1.0 - (1j * eta + 2.0 * eta ** 2) / (4j * k3 * t))
        p2 = pref * 1j * _km(mode) * sg / cmath.sqrt(2j * k3) * cmath.exp(2j * k3 * t) / cmath.sqrt(
            -2j * k3 * t
        ) * (1.0 + (1.0 - 1j * eta) * (1.0 - 2j * eta) / (4j * k3 * t))
    else:
        raise DomainError("which must be 1 or 2")
    return WeylModeState(p1, p2, "minus", which)


def stiff_teo_asymptotic(mode: Mode, t: float) -> TeoMatrix:
    """Leading large-``|k3| t`` TEO of the stiff fluid from ``t_A = 0``.

    ``K11 ~ 1 + sqrt(pi) |eta| e^{-2ik3t} / sqrt(2ik3t)`` and
    ``K12 ~ k_plus / sqrt(-2ik3) (-i sqrt(pi) sgn + e^{-2ik3t} / sqrt(-2ik3t))``;
    ``O(eta)`` terms are dropped.
    """
    k3 = mode.k3
    eta = stiff_eta(mode)
    sg = _sgn(mode)
    e = cmath.exp(-2j * k3 * t)
    k11 = 1.0 + math.sqrt(math.pi) * abs(eta) * e / cmath.sqrt(2j * k3 * t)
    k12 = _kp(mode) / cmath.sqrt(-2j * k3) * (-1j * math.sqrt(math.pi) * sg + e / cmath.sqrt(-2j * k3 * t))
    return TeoMatrix(k11, k12, 0.0, t, "stiff-asymptotic", {"dropped": "O(eta)"})


# ---------------------------------------------------------------- Kasner


@dataclass(frozen=True)
class KasnerMatching:
    """Initial-value ratios ``phi1(0) / phi2(0)`` (solution 1) and ``phi1(0) / phi2(0)`` (solution 2).

    ``ratio_teo`` and ``ratio_standard`` refer to solution 1 (the latter at
    ``alpha -> 0``), ``discrepancy = ratio_standard / ratio_teo``.  The
    ``*_2`` fields are the same for solution 2.  ``ratio_standard_alpha``
    keeps the full ``alpha`` dependence.
    """

    ratio_teo: complex
    ratio_standard: complex
    discrepancy: complex
    ratio_teo_2: complex
    ratio_standard_2: complex
    discrepancy_2: complex
    ratio_standard_alpha: complex
    ratio_standard_alpha_2: complex

    def __iter__(self):
        return iter((self.ratio_teo, self.ratio_standard, self.discrepancy))


def _kasner_alpha(mode: Mode) -> complex:
    sg = _sgn(mode)
    return 1.5 * mode.eta(0.25) * cmath.exp(-0.25j * math.pi * sg)


def kasner_matching(mode: Mode) -> KasnerMatching:
    """Compare the TEO-derived and the standard-asymptotics Kasner initial conditions."""
    _sgn(mode)
    kp, km = _kp(mode), _km(mode)
    if kp == 0:
        raise DomainError("needs kappa > 0")
    c = cmath.exp(-0.25 * cmath.log(1.5j * mode.k3))  # (3 i k3 / 2)^(-1/4)
    c_conj_inv = cmath.exp(0.25 * cmath.log(1.5j * mode.k3)).conjugate()
    g14, g34 = gamma(0.25), gamma(0.75)
    r_teo = -0.75 * g14 * kp * c
    f = 3.0 ** 0.75 / 2.0 ** 1.25
    r_std = -f * (g14 / g34) * kp * c
    al = _kasner_alpha(mode)
    r_std_al = -f * gamma(0.25 - al) * rgamma(0.75 - al) * kp * c
    r_teo2 = (4.0 / 3.0) / g14 / km * c_conj_inv
    r_std2 = (1.0 / f) * (g34 / g14) / km * c_conj_inv
    alc = al.conjugate()
    r_std2_al = (1.0 / f) * gamma(0.75 - alc) * rgamma(0.25 - alc) / km * c_conj_inv
    return KasnerMatching(r_teo, r_std, r_std / r_teo, r_teo2, r_std2, r_std2 / r_teo2, r_std_al, r_std2_al)


def kasner_short_time(mode: Mode, t: float, which: int = 1) -> WeylModeState:
    """Whittaker-based early-time Kasner spinors (``t << |k3|^{-3/4}``).

    Solution 2 is the orthogonality partner ``(conj phi2, -conj phi1)`` of
    solution 1.
    """
    sg = _sgn(mode)
    if not t > 0:
        raise DomainError("need t > 0")
    al = _kasner_alpha(mode)
    xi = 3.0 * math.sqrt(abs(mode.k3)) * cmath.exp(0.25j * math.pi * sg) * t ** (2.0 / 3.0)
    beta = 3.0 * _kp(mode) * cmath.exp(-xi * xi / 6.0)
    wa = whittaker_w(al, 0.25, xi)
    wb = whittaker_w(al + 1.0, 0.25, xi)
    pre = cmath.sqrt(beta) * cmath.exp(-0.25 * cmath.log(xi))
    p1 = pre * wa
    p2 = pre * (-2.0 * t ** (-1.0 / 3.0) / beta) * ((xi * xi / 6.0 - xi / 2.0 + al + 0.25) * wa + wb)
    if which == 1:
        return WeylModeState(p1, p2, "minus", 1)
    if which == 2:
        return WeylModeState(p2.conjugate(), -p1.conjugate(), "minus", 2)
    raise DomainError("which must be 1 or 2")


def kasner_u(mode: Mode, t):
    """``u(k, t) = sqrt(k3**2 t**2 + kappa**2 - i kappa**2 t**(-4/3) / (2 k3))`` (principal root)."""
    _sgn(mode)
    t = np.asarray(t, dtype=float)
    k2 = mode.kappa ** 2
    return np.sqrt(mode.k3 ** 2 * t ** 2 + k2 - 1j * k2 * t ** (-4.0 / 3.0) / (2.0 * mode.k3) + 0j)


def kasner_asymptotic(mode: Mode, t: float, which: int = 1, t_lower: float | None = None) -> WeylModeState:
    """Late-time Kasner spinors (``t >> |k3|^{-3/4}``).

    ``phi^(2) = (1, i (sgn u - k3 t) / zeta) phi1^(2)`` with
    ``phi1^(2) = sqrt(3 zeta) exp(3 i sgn int_{t_lower^{1/3}}^{t^{1/3}} u(x^3) dx)``,
    and ``phi^(1)`` the orthogonality-partner structure.  The phase
    integral diverges at 0, so ``t_lower`` defaults to ``|k3|^{-3/4}``.
    """
    sg = _sgn(mode)
    if not t > 0:
        raise DomainError("need t > 0")
    if t_lower is None:
        t_lower = abs(mode.k3) ** -0.75
    if not t_lower > 0:
        raise DomainError("phase integral needs t_lower > 0")
    a, b = t_lower ** (1.0 / 3.0), t ** (1.0 / 3.0)

    def re(x):
        return float(np.real(kasner_u(mode, x ** 3)))

    def im(x):
        return float(np.imag(kasner_u(mode, x ** 3)))

    lim = 200 + int(abs(mode.k3) * (b ** 4) / 4.0)
    phase = quad(re, a, b, limit=lim, epsabs=1e-13, epsrel=1e-12)[0] + 1j * quad(
        im, a, b, limit=lim, epsabs=1e-13, epsrel=1e-12
    )[0]
    zeta = _kp(mode) * cmath.exp(-1.5j * mode.k3 * t ** (4.0 / 3.0))
    u = complex(kasner_u(mode, t))
    f1 = cmath.sqrt(3.0 * zeta) * cmath.exp(3j * sg * phase)
    if which == 2:
        return WeylModeState(f1, 1j * (sg * u - mode.k3 * t) / zeta * f1, "minus", 2)
    if which == 1:
        top = 1j * (sg * u.conjugate() - mode.k3 * t) / zeta.conjugate()
        return WeylModeState(top * f1.conjugate(), f1.conjugate(), "minus", 1)
    raise DomainError("which must be 1 or 2")
