"""Closed-form, short-time and conformal TEOs, plus Dirac-TEO assembly.

Closed form
-----------
For ``0 < delta < 1`` the entries are

    K11 = 1 + i c x  int_0^{1-sigma_A} (1-z)^{delta-1} V(z) dz
    K12 = (k_plus/kappa) c x e^{-i tau} int_0^{1-sigma_A} (1-z)^{delta-1} U(z) dz

with ``c = 1 - delta``.  The kernels are built from ``J_{+-lambda}`` at
``x`` and ``X = x e^{c z}`` (``x`` replaced by ``D x`` inside the Bessel
functions only).  Writing ``J_nu(y) = (y/2)**nu S_nu(y) / Gamma(nu+1)``
with the entire series ``S_nu`` gives overflow-free kernels

    U = [e^{i tau z} S_{-l}(x) S_{-l*}(X) + q e^{c z} S_l(x) S_{l*}(X)] / B0
    V = i (x / 2 l) [e^{c z} S_{-l}(x) S_l(X) - e^{-i tau z} S_l(x) S_{-l}(X)] / B0

where ``q = x**2 / (4 |l|**2)`` and ``B0 = S_{-l}(x) S_{-l*}(x) + q |S_l(x)|**2``
equals 1 identically (it is ``Z(0) (pi x / 2) / cosh(pi Im l)``).  The
substitution ``w = (1-z)**delta`` removes the endpoint singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .background import Background, Mode, approx_constants, derived_scalars, metric_det_exponent
from .errors import DomainError, IntegrationError
from .oracle import Chirality, TeoMatrix, _effective_mode
from .specfun import bessel_j_reduced

__all__ = [
    "KernelPoint",
    "RZFunctions",
    "DiracTeo",
    "kernels",
    "rz_functions",
    "closed_form_teo",
    "short_time_teo",
    "conformal_exact_teo",
    "dirac_teo",
]


@dataclass(frozen=True)
class KernelPoint:
    """Kernel values ``U(z)``, ``V(z)`` at one integration point."""

    z: float
    u_val: complex
    v_val: complex


@dataclass(frozen=True)
class RZFunctions:
    """``R(z; s)``, ``Z(z; s)`` and ``Z(0; s)`` stored with a common scale.

    The physical values are ``r_scaled * exp(log_scale)`` etc. with
    ``log_scale = log cosh(pi Im lambda)``, which overflows double range for
    large ``|tau|``; ratios are unaffected.  ``z0_rel_dev`` is the relative
    deviation of ``Z(0; s)`` from ``2 cosh(pi Im lambda) / (pi D x)``.
    """

    r_scaled: np.ndarray
    z_scaled: np.ndarray
    z0_scaled: complex
    log_scale: float
    z0_rel_dev: float

    @property
    def r(self):
        return self.r_scaled * _safe_exp(self.log_scale)

    @property
    def z(self):
        return self.z_scaled * _safe_exp(self.log_scale)

    @property
    def z0(self):
        return self.z0_scaled * _safe_exp(self.log_scale)


def _safe_exp(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def _log_cosh(v: float) -> float:
    v = abs(v)
    return v + math.log1p(math.exp(-2.0 * v)) - math.log(2.0)


@dataclass(frozen=True)
class _KernelSetup:
    lam: complex
    xd: float
    c: float
    tau: float
    s_m_x: complex  # S_{-lam}(x_D)
    s_p_x: complex  # S_{lam}(x_D)
    q: float
    b0: complex


def _setup(mode: Mode, bg: Background, t: float, use_d: bool) -> tuple[_KernelSetup, object]:
    ds = derived_scalars(mode, bg, t)
    d = approx_constants(ds.delta).d if use_d else 1.0
    lam = ds.lam
    xd = d * ds.x
    s_m = complex(bessel_j_reduced(-lam, xd))
    s_p = complex(bessel_j_reduced(lam, xd))
    q = xd * xd / (4.0 * abs(lam) ** 2)
    b0 = s_m * s_m.conjugate() + q * s_p * s_p.conjugate()
    return _KernelSetup(lam, xd, 1.0 - ds.delta, ds.tau, s_m, s_p, q, b0), ds


def kernels(z, setup: _KernelSetup):
    """Kernel arrays ``U(z)``, ``V(z)``."""
    z = np.asarray(z, dtype=float)
    lam, c, tau = setup.lam, setup.c, setup.tau
    xx = setup.xd * np.exp(c * z)
    s_m_xx = np.asarray(bessel_j_reduced(-lam, xx))
    s_p_xx = np.asarray(bessel_j_reduced(lam, xx))
    ecz = np.exp(c * z)
    eiz = np.exp(1j * tau * z)
    u = (eiz * setup.s_m_x * s_m_xx.conj() + setup.q * ecz * setup.s_p_x * s_p_xx.conj()) / setup.b0
    v = 1j * (setup.xd / (2.0 * lam)) * (
        ecz * setup.s_m_x * s_p_xx - eiz.conj() * setup.s_p_x * s_m_xx
    ) / setup.b0
    return u, v


def _require_closed_domain(bg: Background, mode: Mode) -> None:
    d = bg.delta
    if bg.is_conformal:
        raise DomainError("delta = 1: use conformal_exact_teo")
    if not 0.0 < d < 1.0:
        raise DomainError(f"closed form needs 0 < delta < 1, got {d!r}; use evolve_oracle")
    if mode.k3 == 0:
        raise DomainError("closed form needs k3 != 0; use exact_models.hypersurface_exact_teo")


def rz_functions(z, s: float, mode: Mode, bg: Background, use_d: bool = True) -> RZFunctions:
    """``R(z; s)``, ``Z(z; s)`` and ``Z(0; s)`` with the D-modified argument.

    Parameters
    ----------
    z : float or array_like
        Points in ``[0, 1 - sigma_A]``.
    s : float
        ``t**mu``.
    """
    _require_closed_domain(bg, mode)
    t = s ** (1.0 / bg.mu)
    st, _ = _setup(mode, bg, t, use_d)
    lam, c = st.lam, st.c
    z = np.asarray(z, dtype=float)
    xx = st.xd * np.exp(c * z)
    s_m_xx = np.asarray(bessel_j_reduced(-lam, xx))
    s_p_xx = np.asarray(bessel_j_reduced(lam, xx))
    # both R and Z carry a factor cosh(pi Im lam); pull it out
    pref_z = 2.0 / (math.pi * st.xd)
    zs = pref_z * (
        np.exp(-lam.conjugate() * c * z) * st.s_m_x * s_m_xx.conj()
        + st.q * np.exp(lam.conjugate() * c * z) * st.s_p_x * s_p_xx.conj()
    )
    rs = (1.0 / (math.pi * lam)) * (
        np.exp(lam * c * z) * st.s_m_x * s_p_xx - np.exp(-lam * c * z) * st.s_p_x * s_m_xx
    )
    z0s = pref_z * st.b0
    return RZFunctions(rs, zs, z0s, _log_cosh(math.pi * lam.imag), abs(st.b0 - 1.0))


def _gauss_legendre_panels(f, a: float, b: float, tol: float, start_panels: int = 4, max_panels: int = 4096):
    """Composite 24-point Gauss-Legendre with panel doubling until ``tol``."""
    xg, wg = np.polynomial.legendre.leggauss(24)
    panels = start_panels
    prev = None
    while True:
        edges = np.linspace(a, b, panels + 1)
        h = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + h[:, None] * xg[None, :]).ravel()
        weights = (h[:, None] * wg[None, :]).ravel()
        vals = f(nodes)
        est = [np.sum(weights * v) for v in vals]
        if prev is not None:
            err = max(abs(e - p) for e, p in zip(est, prev))
            scale = max(1.0, *(abs(e) for e in est))
            if err <= tol * scale:
                return est, err, panels
        if panels >= max_panels:
            raise IntegrationError(f"quadrature not converged with {panels} panels")
        prev = est
        panels *= 2


def closed_form_teo(
    mode: Mode,
    bg: Background,
    chirality: Chirality = "minus",
    t_A: float | None = None,
    t: float = 1.0,
    use_d: bool = True,
    tol: float = 1e-10,
) -> TeoMatrix:
    """Closed-form TEO for ``0 < delta < 1`` by quadrature of the kernel integrals.

    Parameters
    ----------
    use_d : bool
        Replace ``x`` by ``D x`` inside the Bessel functions (default on).
    tol : float
        Target relative accuracy of the two integrals.

    Raises
    ------
    DomainError
        For ``delta`` outside ``(0, 1)``, ``k3 = 0`` or ``t < t_A``.
    """
    m = _effective_mode(mode, chirality)
    if t_A is None:
        t_A = bg.t_A
    bgA = bg.with_times(t_A, min(bg.t_tilde_A, t_A))
    _require_closed_domain(bgA, m)
    if not t >= t_A:
        raise DomainError("need t >= t_A")
    if t == t_A:
        return TeoMatrix.identity(t, "closed")
    st, ds = _setup(m, bgA, t, use_d)
    delta = ds.delta
    if m.kappa == 0:
        return TeoMatrix(1.0 + 0j, 0j, t_A, t, "closed", {"use_d": use_d})
    w_lo = ds.sigma_A ** delta

    def integrand(w):
        z = 1.0 - w ** (1.0 / delta)
        u, v = kernels(z, st)
        return u, v

    (iu, iv), err, panels = _gauss_legendre_panels(integrand, w_lo, 1.0, tol)
    iu /= delta
    iv /= delta
    cx = st.c * ds.x
    k11 = 1.0 + 1j * cx * iv
    k12 = (m.k_plus(bgA) / m.kappa) * cx * np.exp(-1j * ds.tau) * iu
    meta = {
        "use_d": use_d,
        "quad_err": float(err),
        "panels": panels,
        "z0_rel_dev": abs(st.b0 - 1.0),
        "eta": ds.eta,
        "tau": ds.tau,
        "d2_extrapolated": approx_constants(delta).d2_extrapolated,
        "chirality": chirality,
    }
    return TeoMatrix(complex(k11), complex(k12), t_A, t, "closed", meta)


def short_time_teo(
    mode: Mode,
    bg: Background,
    t_A: float | None = None,
    t: float = 0.0,
    chirality: Chirality = "minus",
) -> TeoMatrix:
    """Leading-order TEO for short evolution times.

    For ``t_A = 0`` the off-diagonal entry is ``k_plus s**delta / (mu delta)``
    (error ``O(s**(2 delta))``).  For ``t_A > 0`` it is
    ``k_plus e^{-2 i k3 t**mu / mu} t**(mu delta - 1) (t - t_A)`` (error
    ``O((t - t_A)**2)``).  The diagonal is 1 in both cases.
    """
    m = _effective_mode(mode, chirality)
    if t_A is None:
        t_A = bg.t_A
    if not t >= t_A >= 0:
        raise DomainError("need t >= t_A >= 0")
    bgA = bg.with_times(t_A, min(bg.t_tilde_A, t_A))
    d = bg.delta
    if t_A == 0:
        if not d > 0:
            raise DomainError("t_A = 0 short-time form needs delta > 0")
        s = t ** bg.mu
        k12 = m.k_plus(bgA) * s ** d / (bg.mu * d)
        meta = {"error_order": "O(s^(2 delta))", "form": "t_A=0"}
    else:
        dt = t - t_A
        ph = -2.0 * m.k3 * t ** bg.mu / bg.mu
        k12 = m.k_plus(bgA) * complex(math.cos(ph), math.sin(ph)) * t ** (bg.mu * d - 1.0) * dt
        meta = {"error_order": "O(dt^2)", "form": "t_A>0"}
    return TeoMatrix(1.0 + 0j, complex(k12), t_A, t, "short", meta)


def conformal_exact_teo(
    mode: Mode,
    bg: Background,
    t_A: float | None = None,
    t: float = 1.0,
    chirality: Chirality = "minus",
) -> TeoMatrix:
    """Exact TEO of the conformally flat class ``delta = 1`` (``nu = 1 - mu``)."""
    if not bg.is_conformal:
        raise DomainError(f"conformal TEO needs delta = 1, got {bg.delta!r}")
    m = _effective_mode(mode, chirality)
    if t_A is None:
        t_A = bg.t_A
    if not t >= t_A >= 0:
        raise DomainError("need t >= t_A >= 0")
    bgA = bg.with_times(t_A, min(bg.t_tilde_A, t_A))
    k = m.k_total
    if k == 0:
        return TeoMatrix(1.0 + 0j, 0j, t_A, t, "conformal")
    mu = bg.mu
    s, s_a = t ** mu, t_A ** mu
    ang = k * (s - s_a) / mu
    k11 = np.exp(-1j * (m.k3 / mu) * (s - s_a)) * (math.cos(ang) + 1j * (m.k3 / k) * math.sin(ang))
    k12 = (m.k_plus(bgA) / k) * np.exp(-1j * (m.k3 / mu) * (s + s_a)) * math.sin(ang)
    return TeoMatrix(complex(k11), complex(k12), t_A, t, "conformal")


@dataclass(frozen=True)
class DiracTeo:
    """Dirac TEO ``1_2 (x) K_tilde`` built from a Weyl TEO."""

    weyl_tilde: np.ndarray
    chirality: Chirality
    block: np.ndarray


def dirac_teo(
    mode: Mode,
    bg: Background,
    chirality: Chirality,
    t_A: float,
    t: float,
    base: TeoMatrix,
) -> DiracTeo:
    """Assemble the Dirac TEO from the Weyl TEO ``base`` of the same chirality.

    ``K_tilde = (|g(t_A)| / |g(t)|)**(1/4) Q^{-+1}(t) K Q^{+-1}(t_A)`` with
    ``Q = diag(Q11, conj(Q11))``, ``Q11(t) = exp(-i k3 (t**mu - t_tilde_A**mu) / mu)``
    and ``|g(t)| = t**(2 (2 nu + 1 - mu))``; upper signs for negative chirality.
    """
    if chirality not in ("minus", "plus"):
        raise DomainError(f"bad chirality {chirality!r}")
    if not t >= t_A >= 0:
        raise DomainError("need t >= t_A >= 0")
    p = metric_det_exponent(bg)
    if t_A == 0 and p != 0:
        raise DomainError("|g(t_A)| vanishes at t_A = 0; Dirac TEO needs t_A > 0")
    amp = 1.0 if p == 0 else (t_A / t) ** (p / 4.0)
    tt = bg.t_tilde_A

    def q(tv: float) -> np.ndarray:
        ph = -mode.k3 * (tv ** bg.mu - tt ** bg.mu) / bg.mu
        e = complex(math.cos(ph), math.sin(ph))
        return np.diag([e, e.conjugate()])

    qt, qa = q(t), q(t_A)
    k = base.matrix
    if chirality == "minus":
        kt = amp * np.linalg.inv(qt) @ k @ qa
    else:
        kt = amp * qt @ k @ np.linalg.inv(qa)
    return DiracTeo(kt, chirality, np.kron(np.eye(2), kt))
