"""Formal Laurent series in the deformation parameter nu.

A ``NuSeries`` holds coefficients for exponents ``min_order <= r < trunc_order``
over a pluggable coefficient space (scalars, jets, point distributions, grid
arrays).  Exponents below ``min_order`` are exactly zero; exponents at or above
``trunc_order`` are unknown.  Truncation is propagated pessimistically: an
operation never claims more orders than its inputs support.

The "formalizer" maps an asymptotic family v(m) ~ m^n * sum_r a_r / m^r to the
formal series nu^(-n) * sum_r a_r nu^r.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, List, Sequence

from .scalars import ExactScalar, is_zero, scalar_to_json


class DegenerateTruncationError(ArithmeticError):
    """An operation produced a series with no known coefficients."""


class SingularLeadingTermError(ArithmeticError):
    """Inversion/log of a series whose leading coefficient is not a unit."""


def _one_like(c):
    if isinstance(c, ExactScalar):
        return ExactScalar(1)
    if isinstance(c, Fraction):
        return Fraction(1)
    if isinstance(c, int):
        return 1
    if isinstance(c, (float, complex)):
        return type(c)(1)
    f = getattr(c, "one_like", None)
    if f is not None:
        return f()
    raise TypeError(f"no unit element for coefficient type {type(c)}")


def _zero_like(c):
    return _one_like(c) * 0


def _scale(c, q):
    """Multiply coefficient c by an exact rational q."""
    if isinstance(c, (float, complex)):
        return c * float(q)
    return c * q


def _inv_coeff(c):
    if isinstance(c, (float, complex)):
        if c == 0:
            raise SingularLeadingTermError("zero leading coefficient")
        return 1.0 / c
    inv = getattr(c, "invert", None)
    if inv is not None:
        return inv()
    try:
        return _one_like(c) / c
    except ZeroDivisionError as exc:
        raise SingularLeadingTermError(str(exc)) from exc


def _exp_coeff(c):
    if isinstance(c, (float, complex)):
        import cmath

        return cmath.exp(c) if isinstance(c, complex) else __import__("math").exp(c)
    if is_zero(c):
        return _one_like(c)
    f = getattr(c, "exp", None)
    if f is not None:
        return f()
    raise ArithmeticError(f"cannot exponentiate exact constant term {c!r}")


def _log_coeff(c):
    if isinstance(c, (float, complex)):
        import cmath

        return cmath.log(c)
    if c == _one_like(c):
        return _zero_like(c)
    f = getattr(c, "log", None)
    if f is not None:
        return f()
    raise ArithmeticError(f"cannot take log of exact constant term {c!r}")


class NuSeries:
    """Formal Laurent series with finite principal part, explicit truncation."""

    __slots__ = ("min_order", "coeffs", "trunc_order")

    def __init__(self, min_order: int, coeffs: Sequence, trunc_order: int):
        coeffs = list(coeffs)
        if trunc_order - min_order != len(coeffs):
            raise ValueError("coeffs length must equal trunc_order - min_order")
        # normalize: drop leading exact zeros so min_order is tight
        while coeffs and is_zero(coeffs[0]):
            coeffs.pop(0)
            min_order += 1
        self.min_order = min_order
        self.coeffs = coeffs
        self.trunc_order = trunc_order

    # -- constructors --------------------------------------------------
    @staticmethod
    def zero(trunc_order: int) -> "NuSeries":
        return NuSeries(trunc_order, [], trunc_order)

    @staticmethod
    def constant(c, trunc_order: int) -> "NuSeries":
        if trunc_order <= 0:
            raise ValueError("constant needs trunc_order >= 1")
        coeffs = [c] + [_zero_like(c) for _ in range(trunc_order - 1)]
        return NuSeries(0, coeffs, trunc_order)

    @staticmethod
    def nu_power(k: int, c, trunc_order: int) -> "NuSeries":
        """c * nu^k, known through trunc_order."""
        if trunc_order <= k:
            raise ValueError("trunc_order must exceed the exponent")
        coeffs = [c] + [_zero_like(c) for _ in range(trunc_order - k - 1)]
        return NuSeries(k, coeffs, trunc_order)

    # -- accessors -------------------------------------------------------
    def coeff(self, r: int):
        """Coefficient of nu^r; zero below min_order, error at/above trunc."""
        if r >= self.trunc_order:
            raise DegenerateTruncationError(
                f"coefficient nu^{r} not known (truncated at {self.trunc_order})"
            )
        if r < self.min_order:
            return _zero_like(self.coeffs[0]) if self.coeffs else 0
        return self.coeffs[r - self.min_order]

    def known_orders(self) -> range:
        return range(self.min_order, self.trunc_order)

    def is_empty(self) -> bool:
        return not self.coeffs

    def width(self) -> int:
        return self.trunc_order - self.min_order

    def map(self, fn: Callable) -> "NuSeries":
        return NuSeries(self.min_order, [fn(c) for c in self.coeffs], self.trunc_order)

    def restrict(self, trunc_order: int) -> "NuSeries":
        if trunc_order > self.trunc_order:
            raise DegenerateTruncationError("cannot extend truncation order")
        n = max(0, trunc_order - self.min_order)
        return NuSeries(min(self.min_order, trunc_order), self.coeffs[:n], trunc_order)

    def shift(self, k: int) -> "NuSeries":
        """Multiply by nu^k."""
        return NuSeries(self.min_order + k, self.coeffs, self.trunc_order + k)

    # -- ring operations ---------------------------------------------------
    def _check_window(self) -> "NuSeries":
        if self.trunc_order <= self.min_order and not self.coeffs:
            raise DegenerateTruncationError(
                "operation lost every known order; raise the input truncation"
            )
        return self

    def __add__(self, other: "NuSeries") -> "NuSeries":
        if not isinstance(other, NuSeries):
            return NotImplemented
        trunc = min(self.trunc_order, other.trunc_order)
        lo = min(self.min_order, other.min_order)
        if trunc <= lo and not (self.is_empty() and other.is_empty()):
            return NuSeries(trunc, [], trunc)._check_window()
        lo = min(lo, trunc)
        out = []
        for r in range(lo, trunc):
            a = self.coeff(r) if r >= self.min_order else None
            b = other.coeff(r) if r >= other.min_order else None
            if a is None and b is None:
                continue  # unreachable given lo
            out.append(b if a is None else (a if b is None else a + b))
        return NuSeries(lo, out, trunc)

    def __neg__(self) -> "NuSeries":
        return NuSeries(self.min_order, [-c for c in self.coeffs], self.trunc_order)

    def __sub__(self, other: "NuSeries") -> "NuSeries":
        if not isinstance(other, NuSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "NuSeries") -> "NuSeries":
        if not isinstance(other, NuSeries):
            return NotImplemented
        if self.is_empty() or other.is_empty():
            trunc = min(self.min_order + other.trunc_order, other.min_order + self.trunc_order)
            return NuSeries(trunc, [], trunc)
        lo = self.min_order + other.min_order
        trunc = min(self.min_order + other.trunc_order, other.min_order + self.trunc_order)
        if trunc <= lo:
            raise DegenerateTruncationError("product has no known orders")
        out = []
        for r in range(lo, trunc):
            acc = None
            for i in range(self.min_order, r - other.min_order + 1):
                a = self.coeff(i)
                b = other.coeff(r - i)
                term = a * b
                acc = term if acc is None else acc + term
            out.append(acc)
        return NuSeries(lo, out, trunc)

    def scale(self, c) -> "NuSeries":
        """Multiply every coefficient by a fixed coefficient-space element."""
        return NuSeries(self.min_order, [x * c for x in self.coeffs], self.trunc_order)

    def scale_rational(self, q) -> "NuSeries":
        return NuSeries(self.min_order, [_scale(x, q) for x in self.coeffs], self.trunc_order)

    # -- inversion, exp, log ------------------------------------------------
    def invert(self) -> "NuSeries":
        """Multiplicative inverse; leading coefficient must be a unit."""
        if self.is_empty():
            raise SingularLeadingTermError("cannot invert a series with no known terms")
        a0 = self.coeffs[0]
        inv0 = _inv_coeff(a0)
        m = self.min_order
        width = self.width()
        out = [inv0]
        for k in range(1, width):
            acc = None
            for j in range(1, k + 1):
                term = self.coeffs[j] * out[k - j]
                acc = term if acc is None else acc + term
            out.append(-(inv0 * acc))
        return NuSeries(-m, out, -m + width)

    def exp(self) -> "NuSeries":
        if self.min_order < 0 and not self.is_empty():
            raise ArithmeticError("exp of a series with a principal part")
        if self.is_empty():
            one = 1
            return NuSeries.constant(one, max(self.trunc_order, 1))
        trunc = self.trunc_order
        c0 = self.coeff(0) if self.min_order <= 0 else _zero_like(self.coeffs[0])
        head = _exp_coeff(c0)
        # strictly positive part
        tailc = [self.coeff(r) for r in range(1, trunc)]
        tail = NuSeries(1, tailc, trunc) if tailc else NuSeries.zero(trunc)
        result = NuSeries.constant(_one_like(head), trunc)
        power = NuSeries.constant(_one_like(head), trunc)
        fact = 1
        for k in range(1, trunc):
            if tail.is_empty():
                break
            power = (power * tail).restrict(trunc)
            if power.is_empty():
                break
            fact *= k
            result = result + power.scale_rational(Fraction(1, fact))
        return result.scale(head)

    def log(self) -> "NuSeries":
        if self.is_empty():
            raise SingularLeadingTermError("log of a series with no known terms")
        if self.min_order != 0:
            raise SingularLeadingTermError("log needs an order-zero unit leading term")
        c0 = self.coeffs[0]
        head = _log_coeff(c0)
        trunc = self.trunc_order
        u = self.scale(_inv_coeff(c0))  # 1 + positive part
        tailc = [u.coeff(r) for r in range(1, trunc)]
        tail = NuSeries(1, tailc, trunc) if tailc else NuSeries.zero(trunc)
        result = NuSeries.constant(head, trunc) if not is_zero(head) else NuSeries.zero(trunc)
        power = NuSeries.constant(_one_like(c0), trunc)
        for k in range(1, trunc):
            if tail.is_empty():
                break
            power = (power * tail).restrict(trunc)
            if power.is_empty():
                break
            result = result + power.scale_rational(Fraction((-1) ** (k + 1), k))
        return result

    # -- comparisons -------------------------------------------------------
    def eq_through(self, other: "NuSeries", order: int) -> bool:
        """Coefficient-wise equality for all exponents < order."""
        if order > min(self.trunc_order, other.trunc_order):
            raise DegenerateTruncationError("comparison beyond known orders")
        for r in range(min(self.min_order, other.min_order), order):
            a, b = self.coeff(r), other.coeff(r)
            diff = a - b
            if not is_zero(diff):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, NuSeries):
            return NotImplemented
        if (self.min_order, self.trunc_order) != (other.min_order, other.trunc_order):
            return False
        return all(not is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return id(self)

    def __repr__(self):
        terms = ", ".join(f"nu^{r}: {c!r}" for r, c in zip(self.known_orders(), self.coeffs))
        return f"NuSeries[{terms} | O(nu^{self.trunc_order})]"

    def to_json(self, coeff_encoder: Callable = scalar_to_json) -> dict:
        return {
            "min_order": self.min_order,
            "trunc_order": self.trunc_order,
            "coeffs": [coeff_encoder(c) for c in self.coeffs],
        }


def series_arith(a: NuSeries, b: NuSeries, op: str) -> NuSeries:
    """Dispatch wrapper used by the suite runner: op in {add, mul, scale}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        # b must be a length-one constant series acting as a scalar
        if b.width() != 1 or b.min_order != 0:
            raise TypeError("scale expects a constant series")
        return a.scale(b.coeffs[0])
    raise ValueError(f"unknown op {op!r}")


def series_exp_log(a: NuSeries, direction: str) -> NuSeries:
    if direction == "exp":
        return a.exp()
    if direction == "log":
        return a.log()
    raise ValueError(f"unknown direction {direction!r}")


class FormalizeRefusal(ArithmeticError):
    """Fit residual too large to trust the formalized coefficients."""


def formalize(fit, residual_tol: float = 1e-6) -> NuSeries:
    """Map a fitted asymptotic expansion to its formal nu-series.

    ``fit`` needs attributes ``coeffs`` (a_0..a_{N-1}), ``prefactor_power``
    (the integer n in m^n * sum a_r/m^r) and ``residual``.  The result is
    nu^(-n) * sum_r a_r nu^r with truncation at N - n.
    """
    if fit.residual > residual_tol:
        raise FormalizeRefusal(
            f"fit residual {fit.residual:.3e} exceeds tolerance {residual_tol:.3e}"
        )
    n = fit.prefactor_power
    coeffs = list(fit.coeffs)
    if not coeffs:
        raise ValueError("empty coefficient list")
    return NuSeries(-n, coeffs, -n + len(coeffs))


def formalize_exact(coeffs: Iterable, prefactor_power: int = 0) -> NuSeries:
    """Formalizer for analytically known coefficient lists."""
    coeffs = list(coeffs)
    n = prefactor_power
    return NuSeries(-n, coeffs, -n + len(coeffs))
