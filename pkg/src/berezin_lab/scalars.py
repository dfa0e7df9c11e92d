"""Scalar coefficient backends.

Two backends are used throughout the package:

* ``exact``: complex rationals with an integer power of pi carried as a
  symbolic unit (``ExactScalar``).  Quantities like 2*pi*B(j+1, m+1-j) stay
  exact, and pi cancels in every normalized ratio.
* ``double``: plain Python ``complex``.

All series/jet/distribution code is generic over the coefficient type and
only relies on ``+ - * /``, ``is_zero`` and ``conj_scalar`` below.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union


class MixedPiError(ArithmeticError):
    """Sum of exact scalars with different powers of pi."""


_Q = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class ExactScalar:
    """Complex rational times an integer power of pi.

    Addition requires equal pi powers (or a zero operand); multiplication
    and division add/subtract them.  The zero element is normalized to
    pi power 0 so equality behaves.
    """

    __slots__ = ("re", "im", "pi")

    def __init__(self, re: _Q = 0, im: _Q = 0, pi: int = 0):
        self.re = _frac(re)
        self.im = _frac(im)
        if self.re == 0 and self.im == 0:
            pi = 0
        self.pi = int(pi)

    # -- constructors ------------------------------------------------
    @staticmethod
    def coerce(x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactScalar(x)
        raise TypeError(f"cannot coerce {x!r} to ExactScalar")

    # -- predicates --------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic --------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = ExactScalar.coerce(other)
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            if self.pi != other.pi:
                raise MixedPiError(f"pi^{self.pi} + pi^{other.pi}")
            return ExactScalar(self.re + other.re, self.im + other.im, self.pi)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.re, -self.im, self.pi)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self + (-ExactScalar.coerce(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = ExactScalar.coerce(other)
            return ExactScalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
                self.pi + other.pi,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = ExactScalar.coerce(other)
            d = other.re * other.re + other.im * other.im
            if d == 0:
                raise ZeroDivisionError("division by exact zero")
            return ExactScalar(
                (self.re * other.re + self.im * other.im) / d,
                (self.im * other.re - self.re * other.im) / d,
                self.pi - other.pi,
            )
        return NotImplemented

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ExactScalar(1) / self ** (-n)
        out = ExactScalar(1)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im, self.pi)

    # -- comparisons / conversions ------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = ExactScalar.coerce(other)
            return (self.re, self.im, self.pi) == (other.re, other.im, other.pi)
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im, self.pi))

    def to_complex(self) -> complex:
        import math

        return complex(self.re + self.im * 1j) * math.pi ** self.pi

    __complex__ = to_complex

    def __repr__(self):
        core = f"{self.re}" if self.im == 0 else f"({self.re}{'+' if self.im >= 0 else ''}{self.im}j)"
        if self.pi == 0:
            return core
        return f"{core}*pi^{self.pi}"


EXACT_ZERO = ExactScalar(0)
EXACT_ONE = ExactScalar(1)
EXACT_I = ExactScalar(0, 1)


def is_zero(x) -> bool:
    """Exact zero test for any supported coefficient object."""
    if isinstance(x, ExactScalar):
        return x.is_zero()
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, (float, complex)):
        return x == 0
    probe = getattr(x, "is_zero", None)
    if probe is not None:
        return probe()
    raise TypeError(f"no zero test for {type(x)}")


def conj_scalar(x):
    """Complex conjugate for any supported scalar type."""
    if isinstance(x, (int, Fraction, float)):
        return x
    if isinstance(x, complex):
        return x.conjugate()
    if isinstance(x, ExactScalar):
        return x.conjugate()
    raise TypeError(f"no conjugation for {type(x)}")


def to_complex(x) -> complex:
    if isinstance(x, ExactScalar):
        return x.to_complex()
    if isinstance(x, Fraction):
        return complex(x)
    return complex(x)


def abs_estimate(x) -> float:
    """Rough magnitude, used only for pivot selection."""
    return abs(to_complex(x))


def make_scalar(backend: str, re, im=0):
    """Build a scalar in the requested backend from rational data."""
    if backend == "exact":
        return ExactScalar(_frac(re), _frac(im))
    if backend == "double":
        return complex(float(re), float(im))
    raise ValueError(f"unknown backend {backend!r}")


def scalar_to_json(x):
    """JSON-friendly encoding; exact scalars keep rational strings."""
    if isinstance(x, ExactScalar):
        return {"re": str(x.re), "im": str(x.im), "pi": x.pi}
    if isinstance(x, Fraction):
        return {"re": str(x), "im": "0", "pi": 0}
    if isinstance(x, int):
        return {"re": str(x), "im": "0", "pi": 0}
    z = complex(x)
    return {"re": z.real, "im": z.imag}
