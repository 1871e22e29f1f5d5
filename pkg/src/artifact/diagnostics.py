"""Cross-method metrics: unitarity, inner products, group law, power-law fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .background import Background, metric_det_exponent
from .errors import DomainError
from .oracle import TeoMatrix, WeylModeState
from .teo_core import DiracTeo

__all__ = [
    "unitarity_defect",
    "mode_inner_product",
    "orthogonality_partner",
    "fit_power_law",
    "group_law_residual",
    "ComparisonReport",
    "compare",
    "frobenius_error",
    "relative_error",
    "dirac_norm_check",
    "structure_residual",
]

_TINY = 1e-300


def unitarity_defect(k: TeoMatrix) -> float:
    """``|k11|^2 + |k12|^2 - 1``."""
    return k.unitarity_defect


def mode_inner_product(a: WeylModeState, b: WeylModeState) -> complex:
    """Hermitian product ``sum_J conj(a_J) b_J``."""
    return complex(np.vdot(a.as_array(), b.as_array()))


def orthogonality_partner(phi: WeylModeState) -> WeylModeState:
    """``(conj(phi2), -conj(phi1))``, orthogonal to ``phi`` and solving the same equation."""
    return WeylModeState(complex(phi.phi2).conjugate(), -complex(phi.phi1).conjugate(), phi.chirality, phi.label)


def fit_power_law(samples: Iterable[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of ``log m`` against ``log x``.

    Returns
    -------
    exponent, r_squared
        ``r_squared`` is 1 for data with no spread in ``log m``.
    """
    arr = np.asarray(list(samples), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 8 or arr.shape[1] != 2:
        raise DomainError("fit_power_law needs at least 8 (x, magnitude) samples")
    x, m = arr[:, 0], arr[:, 1]
    if np.any(x <= 0) or np.any(m <= 0) or not np.all(np.isfinite(arr)):
        raise DomainError("fit_power_law needs positive finite samples")
    lx, lm = np.log(x), np.log(m)
    if np.ptp(lx) == 0:
        raise DomainError("fit_power_law needs distinct abscissae")
    slope, icpt = np.polyfit(lx, lm, 1)
    resid = lm - (slope * lx + icpt)
    ss_tot = float(np.sum((lm - lm.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot <= 1e-28 * max(1.0, float(np.sum(lm**2))):
        return float(slope), 1.0
    return float(slope), 1.0 - ss_res / ss_tot


def frobenius_error(a: TeoMatrix, b: TeoMatrix) -> float:
    """Frobenius norm of the difference of the full 2x2 matrices."""
    return float(np.linalg.norm(a.matrix - b.matrix))


def relative_error(x: complex, ref: complex) -> float:
    return abs(x - ref) / max(abs(ref), _TINY)


def group_law_residual(teo: Callable[[float, float], TeoMatrix], t0: float, t1: float, t2: float) -> float:
    """``|| K(t2|t0) - K(t2|t1) K(t1|t0) ||_F`` for ``teo(t_from, t_to)``."""
    direct = teo(t0, t2)
    composed = teo(t1, t2) @ teo(t0, t1)
    return frobenius_error(direct, composed)


def structure_residual(m: np.ndarray) -> float:
    """Deviation of a 2x2 matrix from the form ``[[a, b], [-conj(b), conj(a)]]``."""
    m = np.asarray(m, dtype=complex)
    return float(max(abs(m[1, 1] - np.conj(m[0, 0])), abs(m[1, 0] + np.conj(m[0, 1]))))


@dataclass(frozen=True)
class ComparisonReport:
    """Entrywise and Frobenius comparison of two TEO lists."""

    method_a: str
    method_b: str
    max_abs_error: float
    rel_error_k11: float
    rel_error_k12: float
    frobenius: float
    unitarity_defect_a: float
    unitarity_defect_b: float
    samples: int


def compare(a: TeoMatrix | Sequence[TeoMatrix], b: TeoMatrix | Sequence[TeoMatrix]) -> ComparisonReport:
    """Compare ``a`` against reference ``b``; maxima are taken over samples."""
    la = [a] if isinstance(a, TeoMatrix) else list(a)
    lb = [b] if isinstance(b, TeoMatrix) else list(b)
    if len(la) != len(lb) or not la:
        raise DomainError("compare needs equal-length non-empty inputs")
    abs_e = max(max(abs(x.k11 - y.k11), abs(x.k12 - y.k12)) for x, y in zip(la, lb))
    r11 = max(relative_error(x.k11, y.k11) for x, y in zip(la, lb))
    r12 = max(relative_error(x.k12, y.k12) for x, y in zip(la, lb))
    fro = max(frobenius_error(x, y) for x, y in zip(la, lb))
    ua = max(abs(x.unitarity_defect) for x in la)
    ub = max(abs(y.unitarity_defect) for y in lb)
    return ComparisonReport(la[0].method, lb[0].method, abs_e, r11, r12, fro, ua, ub, len(la))


def dirac_norm_check(dirac: DiracTeo, base: TeoMatrix, bg: Background) -> float:
    """Residual of ``sqrt(|g(t)|/|g(t_A)|) (|Kt11|^2 + |Kt12|^2) = |K11|^2 + |K12|^2``.

    ``Kt`` is the Dirac-level TEO carrying the amplitude
    ``(|g(t_A)|/|g(t)|)**(1/4)`` and ``K`` the underlying Weyl TEO.
    """
    p = metric_det_exponent(bg)
    t_a, t = base.t_from, base.t_to
    ratio = 1.0 if p == 0 else (t / t_a) ** (p / 2.0)
    kt = dirac.weyl_tilde
    lhs = ratio * float(abs(kt[0, 0]) ** 2 + abs(kt[0, 1]) ** 2)
    rhs = abs(base.k11) ** 2 + abs(base.k12) ** 2
    return abs(lhs - rhs) / max(rhs, _TINY)
