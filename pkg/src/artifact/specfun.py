"""Special functions over complex parameters.

Gamma, Bessel J of complex order, Kummer's 1F1, Whittaker's W, the sine
and cosine integrals and a logarithm with a movable branch cut.  Power
series that suffer cancellation are re-summed in double-double arithmetic
(:mod:`artifact._dd`).
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.integrate import solve_ivp

from ._dd import DDC, dd_add_real
from .errors import SpecfunError

__all__ = [
    "EULER_GAMMA",
    "loggamma",
    "gamma",
    "rgamma",
    "gamma_lambda_pair",
    "bessel_j",
    "bessel_j_reduced",
    "kummer_1f1",
    "f_delta",
    "whittaker_m",
    "whittaker_w",
    "sine_cosine_integrals",
    "principal_log_cut",
    "DEFAULT_CUT_ALPHA",
    "BESSEL_ARG_CAP",
]

EULER_GAMMA = 0.57721566490153286061
BESSEL_ARG_CAP = 60.0
DEFAULT_CUT_ALPHA = 1e-6

_EPS = np.finfo(float).eps
_MAX_TERMS = 4000
# B_{2k} / (2k (2k - 1)) for the Stirling series
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_int(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _log_sin_pi(z: complex) -> complex:
    """``log(sin(pi z))`` without overflow for large ``|Im z|``.

    The argument is reduced exactly to ``z - n`` with ``n`` the nearest
    integer, so accuracy near the zeros of ``sin`` is relative.
    """
    n = math.floor(z.real + 0.5)
    w = math.pi * (z - n)
    sign = complex(0.0, math.pi) if n % 2 else 0j
    if abs(w.imag) < 20.0:
        return cmath.log(cmath.sin(w)) + sign
    if w.imag > 0:
        return sign - 1j * w + complex(-math.log(2.0), 0.5 * math.pi) + cmath.log(1.0 - cmath.exp(2j * w))
    return sign + 1j * w + complex(-math.log(2.0), -0.5 * math.pi) + cmath.log(1.0 - cmath.exp(-2j * w))


def loggamma(z: complex) -> complex:
    """Logarithm of the Gamma function (imaginary part modulo ``2 pi``).

    Stirling series after an upward shift to ``|z| >= 15``; reflection for
    ``Re z < 1/2``.
    """
    z = complex(z)
    if _is_nonpositive_int(z):
        raise SpecfunError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma(1.0 - z)
    prod = 1.0 + 0j
    while abs(z) < 15.0:
        prod *= z
        z += 1.0
    zi = 1.0 / z
    zi2 = zi * zi
    ser = 0j
    p = zi
    for c in _STIRLING:
        ser += c * p
        p *= zi2
    lg = (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + ser
    return lg - cmath.log(prod)


def gamma(z: complex) -> complex:
    """Gamma function of a complex argument.

    Raises
    ------
    SpecfunError
        At the poles ``z = 0, -1, -2, ...``.
    """
    return cmath.exp(loggamma(z))


def rgamma(z: complex) -> complex:
    """``1 / Gamma(z)``, zero at the poles of Gamma."""
    z = complex(z)
    if _is_nonpositive_int(z):
        return 0j
    return cmath.exp(-loggamma(z))


def gamma_lambda_pair(lam: complex) -> float:
    """``Gamma(lam) Gamma(conj(lam))``.

    Uses ``pi / cosh(pi Im lam)`` on the line ``Re lam = 1/2``.
    """
    lam = complex(lam)
    if abs(lam.real - 0.5) < 1e-14:
        return math.pi / math.cosh(math.pi * lam.imag)
    return abs(gamma(lam)) ** 2


# ---------------------------------------------------------------- series core


def _series_double(ratio, n_arr, max_terms):
    """Sum ``sum_m t_m`` with ``t_{m+1} = t_m * ratio(m)`` in double precision.

    Returns the sum, the largest term modulus and the number of terms.
    """
    total = np.ones(n_arr, dtype=complex)
    term = np.ones(n_arr, dtype=complex)
    tmax = np.ones(n_arr)
    for m in range(max_terms):
        r = ratio(m)
        term = term * r
        total = total + term
        at = np.abs(term)
        tmax = np.maximum(tmax, at)
        if np.all((at <= 1e-17 * np.abs(total)) & (np.abs(r) < 0.5)) or np.all(term == 0):
            return total, tmax, m + 1
    raise SpecfunError("power series did not converge")


def _series_dd(ratio_dd, z_count, max_terms):
    """Double-double version of :func:`_series_double`."""
    one = np.ones(z_count)
    zero = np.zeros(z_count)
    total = DDC(one.copy(), zero.copy(), zero.copy(), zero.copy())
    term = DDC(one.copy(), zero.copy(), zero.copy(), zero.copy())
    for m in range(max_terms):
        r = ratio_dd(m)
        term = term * r
        total = total + term
        at = term.abs_hi()
        rr = r.abs_hi()
        if np.all((at <= 1e-33 * total.abs_hi()) & (rr < 0.5)) or np.all(at == 0):
            return total.to_complex()
    raise SpecfunError("double-double power series did not converge")


def _needs_dd(total, tmax, nterms, tol):
    return tmax * (nterms + 4) * _EPS > tol * np.maximum(np.abs(total), 1e-300)


# ---------------------------------------------------------------- Bessel J


def bessel_j_reduced(order: complex, arg, tol: float = 1e-15):
    """Entire part ``Gamma(order+1) (arg/2)**(-order) J_order(arg)``.

    This is ``0F1(; order+1; -arg**2/4)``, summed by the term recurrence
    ``t_{m+1} = t_m (-(arg/2)**2) / ((m+1)(order+m+1))``.  Entries whose
    double sum is cancellation-limited are re-summed in double-double.

    Parameters
    ----------
    order : complex
        Bessel order; ``order + 1`` must not be a non-positive integer.
    arg : complex or array_like
        Argument(s), ``|arg| <= 60``.
    tol : float
        Target relative accuracy used to decide on the extended path.
    """
    nu = complex(order)
    if _is_nonpositive_int(nu + 1.0):
        raise SpecfunError("reduced Bessel series undefined for negative integer order")
    z = np.atleast_1d(np.asarray(arg, dtype=complex))
    shape = z.shape
    z = z.ravel()
    if np.any(np.abs(z) > BESSEL_ARG_CAP):
        raise SpecfunError(f"|arg| exceeds the series cap {BESSEL_ARG_CAP}")
    q = -0.25 * z * z

    def ratio(m):
        return q / ((m + 1.0) * (nu + (m + 1.0)))

    total, tmax, nterms = _series_double(ratio, z.size, _MAX_TERMS)
    bad = _needs_dd(total, tmax, nterms, tol)
    if np.any(bad):
        zb = DDC.from_complex(z[bad])
        qb = (zb * zb).scale_int(-0.25)
        nre = np.full(zb.rh.shape, nu.real)
        nim = np.full(zb.rh.shape, nu.imag)

        def ratio_dd(m):
            den = dd_add_real(DDC.from_complex(nre + 1j * nim), np.full(nre.shape, m + 1.0))
            den = den.scale_int(m + 1.0)
            return qb / den

        total[bad] = _series_dd(ratio_dd, zb.rh.size, _MAX_TERMS)
        # double-double still loses ~log10(tmax/|S|) digits; large |arg| may
        # do better with the Hankel expansion
        still = bad & (tmax * 1e-31 > tol * np.maximum(np.abs(total), 1e-300))
        if np.any(still) and not _is_nonpositive_int(nu + 1.0):
            lg = loggamma(nu + 1.0)
            for i in np.flatnonzero(still):
                zi = complex(z[i])
                if zi == 0:
                    continue
                j, err = _bessel_j_hankel(nu, zi)
                series_err = tmax[i] * 1e-31 / max(abs(total[i]), 1e-300)
                if err < series_err:
                    total[i] = cmath.exp(lg - nu * cmath.log(zi / 2.0)) * j
    out = total.reshape(shape)
    return out if np.ndim(arg) else complex(out[0])


def _bessel_j_hankel(nu: complex, z: complex) -> tuple[complex, float]:
    """Hankel large-argument expansion of ``J_nu(z)`` with a relative error estimate."""
    four_nu2 = 4.0 * nu * nu
    p = 0j
    q = 0j
    a = 1.0 + 0j
    last = 0.0
    for k in range(200):
        if k % 2 == 0:
            p += (-1) ** (k // 2) * a
        else:
            q += (-1) ** (k // 2) * a
        nxt = a * (four_nu2 - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * z)
        last = abs(nxt)
        if last >= abs(a) or last < 1e-17:
            break
        a = nxt
    w = z - 0.5 * nu * math.pi - 0.25 * math.pi
    c, s = cmath.cos(w), cmath.sin(w)
    j = cmath.sqrt(2.0 / (math.pi * z)) * (c * p - s * q)
    scale = abs(cmath.sqrt(2.0 / (math.pi * z))) * (abs(c) + abs(s))
    err = (last + 4 * _EPS) * scale / max(abs(j), 1e-300)
    return j, err


def bessel_j(order: complex, arg):
    """Bessel function of the first kind ``J_order(arg)``, principal branch.

    Valid for ``|arg| <= 60``.  Negative integer orders use
    ``J_{-n} = (-1)**n J_n``.
    """
    nu = complex(order)
    if _is_nonpositive_int(nu) and nu.real != 0:
        n = int(-nu.real)
        return (-1) ** n * bessel_j(float(n), arg)
    z = np.atleast_1d(np.asarray(arg, dtype=complex))
    red = np.atleast_1d(bessel_j_reduced(nu, z))
    out = np.empty_like(red)
    lg = loggamma(nu + 1.0)
    for i, (zi, ri) in enumerate(zip(z.ravel(), red.ravel())):
        if zi == 0:
            if nu == 0:
                out.flat[i] = 1.0
            elif nu.real > 0:
                out.flat[i] = 0.0
            else:
                raise SpecfunError("J_order(0) is singular for Re(order) <= 0, order != 0")
        else:
            out.flat[i] = cmath.exp(nu * cmath.log(zi / 2.0) - lg) * ri
    return out.reshape(np.shape(arg)) if np.ndim(arg) else complex(out.flat[0])


# ---------------------------------------------------------------- Kummer 1F1


def _kummer_series(a: complex, b: complex, z: np.ndarray, tol: float) -> np.ndarray:
    def ratio(m):
        return (a + m) * z / ((b + m) * (m + 1.0))

    total, tmax, nterms = _series_double(ratio, z.size, _MAX_TERMS)
    bad = _needs_dd(total, tmax, nterms, tol)
    if np.any(bad):
        zb = DDC.from_complex(z[bad])
        shp = zb.rh.shape
        ad = DDC.from_complex(np.full(shp, a))
        bd = DDC.from_complex(np.full(shp, b))

        def ratio_dd(m):
            num = dd_add_real(ad, np.full(shp, float(m))) * zb
            den = dd_add_real(bd, np.full(shp, float(m))).scale_int(m + 1.0)
            return num / den

        total[bad] = _series_dd(ratio_dd, zb.rh.size, _MAX_TERMS)
    return total


def _asymptotic_sum(p: complex, q: complex, w: complex, max_terms: int = 200):
    """Optimally truncated ``sum_s (p)_s (q)_s / s! * w**s`` and its last term."""
    total = 1.0 + 0j
    term = 1.0 + 0j
    prev = math.inf
    for s in range(max_terms):
        nxt = term * (p + s) * (q + s) / (s + 1.0) * w
        if abs(nxt) >= prev or nxt == 0:
            return total, abs(nxt)
        prev = abs(nxt)
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total, abs(term)
    return total, abs(term)


def _kummer_asymptotic(a: complex, b: complex, z: complex) -> complex:
    """Large-``|z|`` expansion of ``1F1(a; b; z)`` (two optimally truncated series)."""
    sgn = 1.0 if (z.imag > 0 or (z.imag == 0 and z.real < 0)) else -1.0
    s1, _ = _asymptotic_sum(1.0 - a, b - a, 1.0 / z)
    s2, _ = _asymptotic_sum(a, a - b + 1.0, -1.0 / z)
    lgb = loggamma(b)
    t1 = 0j
    ra = rgamma(a)
    if ra != 0:
        t1 = cmath.exp(lgb + z + (a - b) * cmath.log(z)) * ra * s1
    t2 = 0j
    rba = rgamma(b - a)
    if rba != 0:
        t2 = cmath.exp(lgb + sgn * 1j * math.pi * a - a * cmath.log(z)) * rba * s2
    return t1 + t2


def kummer_1f1(a: complex, b: complex, z, mode: str = "auto", tol: float = 1e-15):
    """Kummer's confluent hypergeometric function ``1F1(a; b; z)``.

    Parameters
    ----------
    a, b : complex
        Parameters; ``b`` must not be a non-positive integer.
    z : complex or array_like
        Argument(s).
    mode : {"auto", "series", "asymptotic"}
        ``series`` sums the Taylor series (double-double when needed);
        ``asymptotic`` uses the two-series large-``|z|`` expansion;
        ``auto`` picks the asymptotic form for ``|z| > 40``.
    """
    a = complex(a)
    b = complex(b)
    if _is_nonpositive_int(b):
        raise SpecfunError("1F1 undefined for b a non-positive integer")
    if mode not in ("auto", "series", "asymptotic"):
        raise ValueError(f"unknown mode {mode!r}")
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    flat = zz.ravel()
    out = np.empty(flat.shape, dtype=complex)
    if mode == "asymptotic":
        use_asy = np.ones(flat.shape, dtype=bool)
    elif mode == "series" or _is_nonpositive_int(a):
        use_asy = np.zeros(flat.shape, dtype=bool)
    else:
        use_asy = np.abs(flat) > max(40.0, 4.0 * (abs(a) + abs(b)))
    if np.any(~use_asy):
        out[~use_asy] = _kummer_series(a, b, flat[~use_asy], tol)
    for i in np.flatnonzero(use_asy):
        if flat[i] == 0:
            out[i] = 1.0
        else:
            out[i] = _kummer_asymptotic(a, b, complex(flat[i]))
    out = out.reshape(zz.shape)
    return out if np.ndim(z) else complex(out.flat[0])


def f_delta(delta: float, z, mode: str = "auto"):
    """``F_delta(z) = 1F1(delta; delta + 1; z)``."""
    return kummer_1f1(delta, delta + 1.0, z, mode=mode)


# ---------------------------------------------------------------- Whittaker


def whittaker_m(kappa: complex, mu: complex, z: complex) -> complex:
    """``M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} 1F1(1/2+mu-kappa; 1+2mu; z)``."""
    z = complex(z)
    return cmath.exp(-0.5 * z + (mu + 0.5) * cmath.log(z)) * kummer_1f1(
        0.5 + mu - kappa, 1.0 + 2.0 * mu, z
    )


_W_ASY_RADIUS = 30.0


def _whittaker_w_asymptotic(kappa: complex, mu: complex, z: complex):
    """Large-``|z|`` series for ``W`` and ``dW/dz``."""
    p = 0.5 + mu - kappa
    q = 0.5 - mu - kappa
    w = -1.0 / z
    total = 1.0 + 0j
    dsum = 0j  # sum of -s c_s z^{-s-1}
    term = 1.0 + 0j
    prev = math.inf
    for s in range(400):
        nxt = term * (p + s) * (q + s) / (s + 1.0) * w
        if abs(nxt) >= prev or nxt == 0:
            break
        prev = abs(nxt)
        term = nxt
        total += term
        dsum += -(s + 1.0) * term / z
        if abs(term) < 1e-17 * abs(total):
            break
    pref = cmath.exp(-0.5 * z + kappa * cmath.log(z))
    val = pref * total
    der = val * (-0.5 + kappa / z) + pref * dsum
    return val, der


def whittaker_w(kappa: complex, mu: complex, z: complex) -> complex:
    """Whittaker's function ``W_{kappa,mu}(z)``, principal branch.

    For ``|z| < 30`` with ``Re z <= 12`` it is the connection

        W = G(-2mu)/G(1/2-mu-kappa) M_{kappa,mu} + G(2mu)/G(1/2+mu-kappa) M_{kappa,-mu}.

    Far out (``|z| >= 30``) the asymptotic series is used, and in between
    (``Re z > 12``, where the connection cancels) Whittaker's equation is
    integrated inward from radius 30 along the ray through ``z``.
    """
    kappa = complex(kappa)
    mu = complex(mu)
    z = complex(z)
    if z == 0:
        raise SpecfunError("W is singular at z = 0")
    if (2.0 * mu).imag == 0 and (2.0 * mu).real == round((2.0 * mu).real):
        raise SpecfunError("connection formula needs 2 mu non-integer")
    if abs(cmath.phase(z)) >= math.pi and z.imag == 0:
        raise SpecfunError("z on the branch cut")
    r = abs(z)
    if r >= _W_ASY_RADIUS:
        return _whittaker_w_asymptotic(kappa, mu, z)[0]
    if z.real > 12.0:
        return _whittaker_w_ode(kappa, mu, z)
    c1 = gamma(-2.0 * mu) * rgamma(0.5 - mu - kappa)
    c2 = gamma(2.0 * mu) * rgamma(0.5 + mu - kappa)
    out = 0j
    if c1 != 0:
        out += c1 * whittaker_m(kappa, mu, z)
    if c2 != 0:
        out += c2 * whittaker_m(kappa, -mu, z)
    return out


def _whittaker_w_ode(kappa: complex, mu: complex, z: complex) -> complex:
    e = z / abs(z)
    r0 = _W_ASY_RADIUS
    w0, d0 = _whittaker_w_asymptotic(kappa, mu, r0 * e)
    c = 0.25 - mu * mu

    def rhs(r, y):
        zz = r * e
        return [y[1], -(e * e) * (-0.25 + kappa / zz + c / (zz * zz)) * y[0]]

    sol = solve_ivp(rhs, (r0, abs(z)), [w0, d0 * e], method="DOP853", rtol=1e-13, atol=1e-300)
    if not sol.success:
        raise SpecfunError(f"Whittaker ODE continuation failed: {sol.message}")
    return complex(sol.y[0, -1])


# ---------------------------------------------------------------- Si / Ci


def _cisi_cf(t: float) -> tuple[float, float]:
    """Si and Ci from the continued fraction of ``E1(i t)``, ``t > 2``."""
    tiny = 1e-300
    b = complex(1.0, t)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(2, 400):
        a = -float((i - 1) * (i - 1))
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        de = c * d
        h *= de
        if abs(de - 1.0) < 1e-16:
            break
    else:
        raise SpecfunError("Si/Ci continued fraction did not converge")
    h *= complex(math.cos(t), -math.sin(t))
    return 0.5 * math.pi + h.imag, -h.real


def _si_cin_series(t: float) -> tuple[float, float]:
    """Si(t) and ``Ci(t) - log t`` by their power series."""
    t2 = t * t
    si = 0.0
    term = t  # t^{2k+1}/(2k+1)!
    k = 0
    while True:
        si_k = term / (2 * k + 1)
        si += si_k
        term *= -t2 / ((2 * k + 2) * (2 * k + 3))
        k += 1
        if abs(si_k) < 1e-18 * abs(si) or k > 200:
            break
    cin = EULER_GAMMA
    term = 1.0  # t^{2k}/(2k)!
    k = 1
    while True:
        term *= -t2 / ((2 * k - 1) * (2 * k))
        c_k = term / (2 * k)
        cin += c_k
        k += 1
        if abs(c_k) < 1e-18 or k > 200:
            break
    return si, cin


_CISI_SWITCH = 2.0


def sine_cosine_integrals(x: float) -> tuple[float, float, float]:
    """Return ``(Si(x), Ci(x), Ci(x) - log x)``.

    ``Si`` is odd and the third value is the even entire function
    ``gamma + sum_k (-x^2)^k / (2k (2k)!)``, so both are defined for any
    real ``x``.  ``Ci`` itself needs ``x > 0`` and is ``nan`` otherwise
    (``-inf`` at 0).
    """
    x = float(x)
    t = abs(x)
    if t == 0:
        return 0.0, -math.inf, EULER_GAMMA
    if t <= _CISI_SWITCH:
        si, cin = _si_cin_series(t)
        ci = cin + math.log(t)
    else:
        si, ci = _cisi_cf(t)
        cin = ci - math.log(t)
    if x < 0:
        return -si, math.nan, cin
    return si, ci, cin


# ---------------------------------------------------------------- logarithm


def principal_log_cut(z: complex, cut_angle: float | None = None) -> complex:
    """Logarithm with its branch cut along the ray at ``cut_angle``.

    The argument is taken in ``(cut_angle, cut_angle + 2 pi]``.  The default
    cut sits at ``alpha - pi`` with a small ``alpha > 0``, so negative reals
    get argument ``+pi``.
    """
    z = complex(z)
    if z == 0:
        raise SpecfunError("log(0)")
    if cut_angle is None:
        cut_angle = DEFAULT_CUT_ALPHA - math.pi
    arg = math.atan2(z.imag, z.real)
    two_pi = 2.0 * math.pi
    while arg <= cut_angle:
        arg += two_pi
    while arg > cut_angle + two_pi:
        arg -= two_pi
    return complex(math.log(abs(z)), arg)
