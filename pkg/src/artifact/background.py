"""Spacetime and mode parameters together with every derived scalar.

All objects here are immutable value types.  The metric is

    ds^2 = dt^2 - t^{2 nu} (dx1^2 + dx2^2) - t^{2 - 2 mu} dx3^2

and the anisotropy class is ``delta = (1 - nu) / mu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "Background",
    "Mode",
    "DerivedScalars",
    "ApproxConstants",
    "NAMED_MODELS",
    "named_background",
    "derived_delta",
    "physical_momentum",
    "derived_scalars",
    "approx_constants",
    "metric_det_exponent",
]


# ``nu = 1 - mu`` rarely gives ``delta == 1.0`` bit-exactly
CONFORMAL_TOL = 1e-12


def derived_delta(mu: float, nu: float) -> float:
    """Return ``(1 - nu) / mu``.

    Raises
    ------
    DomainError
        If ``mu <= 0``.
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu!r}")
    return (1.0 - nu) / mu


@dataclass(frozen=True)
class Background:
    """Power-law axisymmetric Bianchi I background.

    Parameters
    ----------
    mu, nu : float
        Scale-factor exponents, ``alpha_1 = alpha_2 = t**nu`` and
        ``alpha_3 = t**(1 - mu)``.
    t_A : float
        Initial coordinate time (``>= 0``).
    t_tilde_A : float, optional
        Phase reference time entering ``k_plus``.  Defaults to ``t_A``.
    """

    mu: float
    nu: float
    t_A: float = 0.0
    t_tilde_A: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise DomainError(f"mu must be positive and finite, got {self.mu!r}")
        if not math.isfinite(self.nu):
            raise DomainError("nu must be finite")
        if not self.t_A >= 0:
            raise DomainError(f"t_A must be non-negative, got {self.t_A!r}")
        if self.t_tilde_A is None:
            object.__setattr__(self, "t_tilde_A", float(self.t_A))
        if not 0 <= self.t_tilde_A <= self.t_A:
            raise DomainError("need 0 <= t_tilde_A <= t_A")

    @property
    def delta(self) -> float:
        return derived_delta(self.mu, self.nu)

    @property
    def is_conformal(self) -> bool:
        """True when ``delta = 1`` up to rounding in ``(1 - nu) / mu``."""
        return abs(self.delta - 1.0) <= CONFORMAL_TOL

    def with_times(self, t_A: float, t_tilde_A: float | None = None) -> "Background":
        return Background(self.mu, self.nu, t_A, t_tilde_A)

    def closed_form_ok(self) -> bool:
        return 0.0 < self.delta <= 1.0


NAMED_MODELS: dict[str, tuple[float, float]] = {
    "rw": (0.5, 0.5),
    "stiff": (1.0, 0.5),
    "kasner": (4.0 / 3.0, 2.0 / 3.0),
}


def named_background(name: str, t_A: float = 0.0, t_tilde_A: float | None = None) -> Background:
    """Background for one of the named models ``rw``, ``stiff`` or ``kasner``."""
    try:
        mu, nu = NAMED_MODELS[name]
    except KeyError:
        raise DomainError(f"unknown model {name!r}; choose from {sorted(NAMED_MODELS)}") from None
    return Background(mu, nu, t_A, t_tilde_A)


@dataclass(frozen=True)
class Mode:
    """Comoving wave vector ``(k1, k2, k3)``."""

    k1: float
    k2: float
    k3: float

    @property
    def kappa(self) -> float:
        return math.hypot(self.k1, self.k2)

    @property
    def k_total(self) -> float:
        return math.hypot(self.kappa, self.k3)

    @property
    def sign_k3(self) -> float:
        return math.copysign(1.0, self.k3) if self.k3 != 0 else 0.0

    def k_plus(self, bg: Background) -> complex:
        """``(k2 + i k1) exp(+2 i k3 t_tilde_A**mu / mu)``."""
        ph = 2.0 * self.k3 * bg.t_tilde_A ** bg.mu / bg.mu
        return complex(self.k2, self.k1) * complex(math.cos(ph), math.sin(ph))

    def k_minus(self, bg: Background) -> complex:
        return self.k_plus(bg).conjugate()

    def eta(self, delta: float) -> float:
        """``eta_delta = kappa**2 / (2 |k3|**(2 delta))``."""
        if self.k3 == 0:
            return math.inf
        return self.kappa ** 2 / (2.0 * abs(self.k3) ** (2.0 * delta))

    def flipped(self) -> "Mode":
        """The mode ``-k`` (maps negative to positive chirality)."""
        return Mode(-self.k1, -self.k2, -self.k3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.k1, self.k2, self.k3)


def physical_momentum(mode: Mode, bg: Background, t: float) -> tuple[float, float, float]:
    """Physical momentum ``p_j = k_j / alpha_j(t)``."""
    if not t > 0:
        raise DomainError(f"physical momentum needs t > 0, got {t!r}")
    a12 = t ** bg.nu
    a3 = t ** (1.0 - bg.mu)
    return (mode.k1 / a12, mode.k2 / a12, mode.k3 / a3)


def metric_det_exponent(bg: Background) -> float:
    """Exponent ``p`` in ``|g(t)| = t**p``."""
    return 2.0 * (2.0 * bg.nu + 1.0 - bg.mu)


@dataclass(frozen=True)
class DerivedScalars:
    """Scalars attached to ``(mode, bg, t)``.

    ``x`` and ``lam`` exist only for ``delta < 1``; accessing them in the
    conformal class raises :class:`DomainError`.
    """

    delta: float
    s: float
    s_A: float
    tau: float
    tau_A: float
    sigma_A: float
    eta: float
    _x: float | None = field(default=None, repr=False)
    _lam: complex | None = field(default=None, repr=False)

    @property
    def x(self) -> float:
        if self._x is None:
            raise DomainError("x(s) is undefined for delta = 1")
        return self._x

    @property
    def lam(self) -> complex:
        if self._lam is None:
            raise DomainError("lambda(s) is undefined for delta = 1")
        return self._lam


def derived_scalars(mode: Mode, bg: Background, t: float, t_A: float | None = None) -> DerivedScalars:
    """Compute ``s, tau, sigma_A, eta_delta, x, lambda`` at time ``t``.

    ``lambda = 1/2 + i tau / (2 (1 - delta))``; see the decisions log for the
    factor of two.
    """
    if t_A is None:
        t_A = bg.t_A
    if not t >= 0:
        raise DomainError("t must be non-negative")
    d = bg.delta
    s = t ** bg.mu
    s_A = t_A ** bg.mu
    tau = 2.0 * mode.k3 * s / bg.mu
    tau_A = 2.0 * mode.k3 * s_A / bg.mu
    sigma_A = s_A / s if s > 0 else 1.0
    eta = mode.eta(d)
    if d != 1.0:
        x = mode.kappa * s ** d / (bg.mu * (1.0 - d))
        lam = complex(0.5, tau / (2.0 * (1.0 - d)))
        return DerivedScalars(d, s, s_A, tau, tau_A, sigma_A, eta, x, lam)
    return DerivedScalars(d, s, s_A, tau, tau_A, sigma_A, eta)


@dataclass(frozen=True)
class ApproxConstants:
    """Correction factors ``d1``, ``d2`` and ``d = d1 * d2``.

    ``d2_extrapolated`` flags ``delta >= 1/3`` where the ``d2`` formula is
    used outside the range it was derived for.
    """

    d1: float
    d2: float
    d: float
    d2_extrapolated: bool


def approx_constants(delta: float) -> ApproxConstants:
    """Correction factors for the exponential kernel approximation."""
    from .specfun import kummer_1f1

    if not delta > 0 or delta > 1:
        raise DomainError(f"approx constants need 0 < delta <= 1, got {delta!r}")
    if delta == 1.0:
        return ApproxConstants(1.0, 1.0, 1.0, True)
    c = 1.0 - delta
    d1 = (c / delta) / math.expm1(c)
    d2 = 2.0 * kummer_1f1(1.0, 1.0 + delta, c).real / (math.exp(c) + 1.0)
    return ApproxConstants(d1, d2, d1 * d2, delta >= 1.0 / 3.0)
