"""Vectorised complex double-double arithmetic.

Only the handful of operations needed to sum hypergeometric-type series
with exactly representable double inputs are provided.  Each real
double-double is an unevaluated sum ``hi + lo`` with ``|lo| <= ulp(hi)/2``.
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _quick_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    t, f = _two_sum(xl, yl)
    e = e + t
    s, e = _quick_two_sum(s, e)
    e = e + f
    return _quick_two_sum(s, e)


def _mul(xh, xl, yh, yl):
    p, e = _two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return _quick_two_sum(p, e)


def _div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = _mul(q1, 0.0, yh, yl)
    rh, rl = _add(xh, xl, -ph, -pl)
    q2 = rh / yh
    ph, pl = _mul(q2, 0.0, yh, yl)
    rh, rl = _add(rh, rl, -ph, -pl)
    q3 = rh / yh
    qh, ql = _quick_two_sum(q1, q2)
    return _add(qh, ql, q3, 0.0)


class DDC:
    """Array of complex double-double numbers."""

    __slots__ = ("rh", "rl", "ih", "il")

    def __init__(self, rh, rl, ih, il):
        self.rh, self.rl, self.ih, self.il = rh, rl, ih, il

    @classmethod
    def from_complex(cls, z) -> "DDC":
        z = np.asarray(z, dtype=complex)
        zero = np.zeros(z.shape)
        return cls(z.real.copy(), zero, z.imag.copy(), zero.copy())

    def to_complex(self) -> np.ndarray:
        return (self.rh + self.rl) + 1j * (self.ih + self.il)

    def __add__(self, o: "DDC") -> "DDC":
        rh, rl = _add(self.rh, self.rl, o.rh, o.rl)
        ih, il = _add(self.ih, self.il, o.ih, o.il)
        return DDC(rh, rl, ih, il)

    def __neg__(self) -> "DDC":
        return DDC(-self.rh, -self.rl, -self.ih, -self.il)

    def __sub__(self, o: "DDC") -> "DDC":
        return self + (-o)

    def __mul__(self, o: "DDC") -> "DDC":
        ah, al = _mul(self.rh, self.rl, o.rh, o.rl)
        bh, bl = _mul(self.ih, self.il, o.ih, o.il)
        ch, cl = _mul(self.rh, self.rl, o.ih, o.il)
        dh, dl = _mul(self.ih, self.il, o.rh, o.rl)
        rh, rl = _add(ah, al, -bh, -bl)
        ih, il = _add(ch, cl, dh, dl)
        return DDC(rh, rl, ih, il)

    def __truediv__(self, o: "DDC") -> "DDC":
        num = self * o.conj()
        ah, al = _mul(o.rh, o.rl, o.rh, o.rl)
        bh, bl = _mul(o.ih, o.il, o.ih, o.il)
        dh, dl = _add(ah, al, bh, bl)
        rh, rl = _div(num.rh, num.rl, dh, dl)
        ih, il = _div(num.ih, num.il, dh, dl)
        return DDC(rh, rl, ih, il)

    def conj(self) -> "DDC":
        return DDC(self.rh, self.rl, -self.ih, -self.il)

    def scale_int(self, n: float) -> "DDC":
        """Multiply by an exactly representable real ``n``."""
        rh, rl = _mul(self.rh, self.rl, n, 0.0)
        ih, il = _mul(self.ih, self.il, n, 0.0)
        return DDC(rh, rl, ih, il)

    def abs_hi(self) -> np.ndarray:
        return np.hypot(self.rh, self.ih)

    def take(self, mask) -> "DDC":
        return DDC(self.rh[mask], self.rl[mask], self.ih[mask], self.il[mask])


def dd_add_real(x: DDC, r) -> DDC:
    """``x + r`` for a real double array ``r`` (exact input)."""
    r = np.asarray(r, dtype=float)
    rh, rl = _add(x.rh, x.rl, r, np.zeros_like(r))
    return DDC(rh, rl, x.ih, x.il)
