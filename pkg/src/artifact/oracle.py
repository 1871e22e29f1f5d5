"""Reference evolution of the mode system, independent of any closed form.

The mode equation is ``d/dt (phi1, phi2) = Omega(t) (phi1, phi2)`` with
``Omega = [[0, P], [-conj(P), 0]]``.  Two independent evaluations of its
propagator are provided: adaptive Runge-Kutta integration
(:func:`evolve_oracle`) and the truncated Picard series (:func:`picard_teo`).

Both work in the variable ``u = t**(1-nu) / (1-nu)`` (``u = log t`` when
``nu = 1``), for which ``du = t**(-nu) dt``.  This absorbs the
``t**(-nu)`` factor of ``P`` so that for ``nu < 1`` the right-hand side is
bounded on ``[0, t]`` and the evolution can start at ``t = 0`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct, idct
from scipy.integrate import solve_ivp

from .background import Background, Mode
from .errors import DomainError, IntegrationError

__all__ = [
    "Chirality",
    "TeoMatrix",
    "WeylModeState",
    "omega_matrix",
    "evolve_oracle",
    "evolve_state",
    "picard_teo",
    "MAX_PICARD_ORDER",
]

Chirality = Literal["minus", "plus"]
MAX_PICARD_ORDER = 6


@dataclass(frozen=True)
class TeoMatrix:
    """Weyl TEO ``[[k11, k12], [-conj(k12), conj(k11)]]`` from ``t_from`` to ``t_to``.

    ``meta`` carries method-specific diagnostics (tolerances, truncation
    orders, validity flags).
    """

    k11: complex
    k12: complex
    t_from: float
    t_to: float
    method: str
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def matrix(self) -> np.ndarray:
        a, b = complex(self.k11), complex(self.k12)
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=complex)

    @property
    def unitarity_defect(self) -> float:
        return abs(self.k11) ** 2 + abs(self.k12) ** 2 - 1.0

    def __matmul__(self, other: "TeoMatrix") -> "TeoMatrix":
        """``self @ other`` is evolution by ``other`` followed by ``self``."""
        m = self.matrix @ other.matrix
        return TeoMatrix(m[0, 0], m[0, 1], other.t_from, self.t_to, f"{self.method}*{other.method}")

    def apply(self, phi: "WeylModeState") -> "WeylModeState":
        v = self.matrix @ phi.as_array()
        return WeylModeState(complex(v[0]), complex(v[1]), phi.chirality, phi.label)

    @classmethod
    def identity(cls, t: float, method: str) -> "TeoMatrix":
        return cls(1.0 + 0j, 0j, t, t, method)


@dataclass(frozen=True)
class WeylModeState:
    """Spinor components ``(phi1, phi2)`` of one mode solution."""

    phi1: complex
    phi2: complex
    chirality: Chirality = "minus"
    label: int = 1

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2], dtype=complex)


def _check_chirality(chirality: str) -> None:
    if chirality not in ("minus", "plus"):
        raise DomainError(f"chirality must be 'minus' or 'plus', got {chirality!r}")


def _effective_mode(mode: Mode, chirality: str) -> Mode:
    _check_chirality(chirality)
    return mode if chirality == "minus" else mode.flipped()


def p_function(mode: Mode, bg: Background, t, chirality: Chirality = "minus"):
    """``P(t) = k_plus t**(-nu) exp(-2 i k3 t**mu / mu)`` of the chosen chirality."""
    m = _effective_mode(mode, chirality)
    t = np.asarray(t, dtype=float)
    return m.k_plus(bg) * t ** (-bg.nu) * np.exp(-2j * m.k3 * t ** bg.mu / bg.mu)


def omega_matrix(mode: Mode, bg: Background, t: float, chirality: Chirality = "minus") -> np.ndarray:
    """Coefficient matrix ``Omega(t)`` of the mode system.

    Raises
    ------
    DomainError
        If ``t <= 0``.
    """
    if not t > 0:
        raise DomainError(f"Omega is defined for t > 0, got {t!r}")
    p = complex(p_function(mode, bg, t, chirality))
    return np.array([[0.0, p], [-p.conjugate(), 0.0]], dtype=complex)


# ---------------------------------------------------------------- u variable


def _u_of_t(bg: Background, t):
    t = np.asarray(t, dtype=float)
    if bg.nu == 1.0:
        return np.log(t)
    return t ** (1.0 - bg.nu) / (1.0 - bg.nu)


def _t_of_u(bg: Background, u):
    if bg.nu == 1.0:
        return np.exp(u)
    return np.maximum((1.0 - bg.nu) * u, 0.0) ** (1.0 / (1.0 - bg.nu))


def _check_interval(bg: Background, t_from: float, t_to: float) -> None:
    if not (t_from >= 0 and t_to >= t_from):
        raise DomainError(f"need 0 <= t_from <= t_to, got {t_from!r}, {t_to!r}")
    if t_from == 0 and bg.nu >= 1.0:
        raise DomainError("t_from = 0 needs nu < 1 (Omega not integrable at 0)")


def _f_of_u(mode: Mode, bg: Background, u):
    """``P dt/du = k_plus exp(-2 i k3 t(u)**mu / mu)``."""
    t = _t_of_u(bg, u)
    return mode.k_plus(bg) * np.exp(-2j * mode.k3 * t ** bg.mu / bg.mu)


# ---------------------------------------------------------------- Runge-Kutta


def evolve_state(
    mode: Mode,
    bg: Background,
    phi0,
    t_from: float,
    t_eval,
    chirality: Chirality = "minus",
    tol: float = 1e-10,
) -> np.ndarray:
    """Integrate the mode system from ``phi0`` at ``t_from``.

    Parameters
    ----------
    phi0 : array_like, shape (2,)
        Initial spinor ``(phi1, phi2)``.
    t_eval : array_like
        Increasing output times ``>= t_from``.
    tol : float
        Relative tolerance of the DOP853 pair (absolute tolerance
        ``tol * 1e-2`` relative to the initial norm).

    Returns
    -------
    ndarray, shape (len(t_eval), 2)
    """
    m = _effective_mode(mode, chirality)
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    if t_eval.size == 0:
        return np.empty((0, 2), dtype=complex)
    _check_interval(bg, t_from, float(t_eval[-1]))
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < t_from:
        raise DomainError("t_eval must be increasing and start at or after t_from")
    y0 = np.asarray(phi0, dtype=complex)
    u0 = float(_u_of_t(bg, t_from))
    u_eval = np.maximum(_u_of_t(bg, t_eval), u0)
    if u_eval[-1] == u0:
        return np.tile(y0, (t_eval.size, 1))
    kp = m.k_plus(bg)
    k3, mu = m.k3, bg.mu

    def rhs(u, y):
        t = _t_of_u(bg, u)
        f = kp * np.exp(-2j * k3 * t ** mu / mu)
        return np.array([f * y[1], -f.conjugate() * y[0]])

    scale = max(float(np.linalg.norm(y0)), 1.0)
    sol = solve_ivp(
        rhs,
        (u0, float(u_eval[-1])),
        y0,
        method="DOP853",
        t_eval=u_eval,
        rtol=tol,
        atol=tol * 1e-2 * scale,
    )
    if not sol.success:
        raise IntegrationError(f"oracle integration failed: {sol.message}")
    return sol.y.T.copy()


def evolve_oracle(
    mode: Mode,
    bg: Background,
    chirality: Chirality = "minus",
    t_from: float | None = None,
    t_to: float = 1.0,
    tol: float = 1e-10,
) -> TeoMatrix:
    """Propagator ``K(t_to | t_from)`` by adaptive Runge-Kutta integration.

    Only the first column is integrated; the second follows from the
    structure ``K = [[a, -conj(b)], [b, conj(a)]]`` of the flow.

    Parameters
    ----------
    t_from : float, optional
        Initial time, default ``bg.t_A``.  ``0`` is allowed for ``nu < 1``.
    tol : float
        Local relative tolerance.
    """
    if t_from is None:
        t_from = bg.t_A
    _check_interval(bg, t_from, t_to)
    if t_to == t_from:
        return TeoMatrix.identity(t_to, "oracle")
    col = evolve_state(mode, bg, [1.0, 0.0], t_from, [t_to], chirality, tol)[0]
    k11 = complex(col[0])
    k12 = -complex(col[1]).conjugate()
    return TeoMatrix(k11, k12, t_from, t_to, "oracle", {"tol": tol, "chirality": chirality})


# ---------------------------------------------------------------- Picard


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from samples at first-kind points (descending order)."""
    n = values.shape[-1]
    a = dct(values, type=2) / n
    a[0] *= 0.5
    return a


def _cheb_values(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_cheb_coeffs`."""
    c = coeffs.copy()
    n = c.shape[-1]
    c[0] *= 2.0
    return idct(c * n, type=2)


def _picard_levels(f_nodes: np.ndarray, half_width: float, order_n: int):
    """Nested ordered integrals of alternating ``f, conj(f)`` for ``n = 1..order_n``.

    Returns the list of ``T_n`` evaluated at the upper endpoint, where
    ``T_n = int_{u_n < ... < u_1} f(u_1) conj(f(u_2)) f(u_3) ...``.
    """
    out = []
    for n in range(1, order_n + 1):
        h = np.ones_like(f_nodes)
        for m in range(n, 0, -1):
            g = (f_nodes if m % 2 == 1 else f_nodes.conj()) * h
            c = C.chebint(_cheb_coeffs(g), lbnd=-1.0) * half_width
            if m == 1:
                out.append(complex(C.chebval(1.0, c)))
            else:
                # T_N vanishes at the N first-kind nodes, so the top
                # coefficient of the integral does not contribute there
                h = _cheb_values(c[:-1])
    return out


def picard_teo(
    mode: Mode,
    bg: Background,
    t_from: float | None = None,
    t_to: float = 1.0,
    order_n: int = 4,
    chirality: Chirality = "minus",
    tol: float = 1e-12,
    max_nodes: int = 1 << 15,
) -> TeoMatrix:
    """Picard (time-ordered) series of the propagator truncated at ``order_n``.

    The n-fold ordered integrals are evaluated level by level with
    Chebyshev spectral cumulative integration in ``u``; the node count is
    doubled until successive results agree to ``tol``.

    Raises
    ------
    DomainError
        If ``order_n`` is negative or exceeds :data:`MAX_PICARD_ORDER`.
    """
    if not 0 <= order_n <= MAX_PICARD_ORDER:
        raise DomainError(f"order_n must be in [0, {MAX_PICARD_ORDER}], got {order_n!r}")
    if t_from is None:
        t_from = bg.t_A
    _check_interval(bg, t_from, t_to)
    m = _effective_mode(mode, chirality)
    if order_n == 0 or t_to == t_from:
        return TeoMatrix(1.0 + 0j, 0j, t_from, t_to, "picard", {"order": order_n, "nodes": 0})
    ua = float(_u_of_t(bg, t_from))
    ub = float(_u_of_t(bg, t_to))
    half = 0.5 * (ub - ua)
    mid = 0.5 * (ub + ua)
    n_nodes = 32
    prev = None
    while True:
        x = np.cos(np.pi * (np.arange(n_nodes) + 0.5) / n_nodes)
        f = _f_of_u(m, bg, mid + half * x)
        terms = _picard_levels(f, half, order_n)
        k11 = 1.0 + 0j
        k12 = 0j
        for n, val in enumerate(terms, start=1):
            sign = (-1) ** (n // 2)
            if n % 2 == 0:
                k11 += sign * val
            else:
                k12 += sign * val
        if prev is not None and abs(k11 - prev[0]) + abs(k12 - prev[1]) <= tol * (1 + abs(k11) + abs(k12)):
            break
        if n_nodes >= max_nodes:
            raise IntegrationError(f"Picard quadrature not converged with {n_nodes} nodes")
        prev = (k11, k12)
        n_nodes *= 2
    return TeoMatrix(k11, k12, t_from, t_to, "picard", {"order": order_n, "nodes": n_nodes})
