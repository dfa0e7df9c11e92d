"""Rational symbol class on CP^1.

Symbols are finite sums of z^a zbar^b (1+z zbar)^(-c) kept in a canonical
reduced form: one common denominator power C with a numerator polynomial not
divisible by (1+z zbar).  In that form smoothness across the point at
infinity is a termwise degree condition (deg_z, deg_zbar <= C), every
Toeplitz/volume integral reduces to Beta functions, and the class is closed
under products, conjugation, Wirtinger derivatives and division by the
Fubini-Study metric.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .jets import Jet
from .scalars import ExactScalar, is_zero

TermKey = Tuple[int, int]


class SymbolSmoothnessError(ValueError):
    """The rational expression does not extend smoothly to CP^1."""


def _exact(c) -> ExactScalar:
    if isinstance(c, ExactScalar):
        return c
    if isinstance(c, (int, Fraction)):
        return ExactScalar(c)
    if isinstance(c, tuple) and len(c) == 2:
        return ExactScalar(Fraction(c[0]), Fraction(c[1]))
    raise TypeError(f"symbol coefficients must be exact, got {c!r}")


class SymbolFunction:
    """Smooth rational symbol P(z, zbar) / (1 + z zbar)^C on CP^1."""

    __slots__ = ("numerator", "denom_power")

    def __init__(self, numerator: Dict[TermKey, ExactScalar], denom_power: int,
                 validate: bool = True):
        num = {k: _exact(v) for k, v in numerator.items() if not is_zero(_exact(v))}
        if denom_power < 0:
            num = _poly_mul(num, _one_plus_t_power(-denom_power))
            denom_power = 0
        num, denom_power = _reduce(num, denom_power)
        self.numerator = num
        self.denom_power = denom_power
        if validate:
            self._validate_smooth()

    def _validate_smooth(self):
        C = self.denom_power
        for (a, b) in self.numerator:
            if a > C or b > C:
                raise SymbolSmoothnessError(
                    f"term z^{a} zbar^{b} (1+zzbar)^-{C} is singular at infinity"
                )

    # -- constructors ------------------------------------------------------
    @staticmethod
    def from_terms(terms: Iterable[Tuple[int, int, int, object]]) -> "SymbolFunction":
        """Assemble from (a, b, c, coeff) monomials z^a zbar^b (1+zzbar)^-c."""
        terms = [(a, b, c, _exact(co)) for a, b, c, co in terms]
        if not terms:
            return SymbolFunction({}, 0)
        C = max(max(c for _, _, c, _ in terms), 0)
        num: Dict[TermKey, ExactScalar] = {}
        for a, b, c, co in terms:
            lift = _poly_mul({(a, b): co}, _one_plus_t_power(C - c))
            _poly_addto(num, lift)
        return SymbolFunction(num, C)

    @staticmethod
    def constant(c) -> "SymbolFunction":
        return SymbolFunction({(0, 0): _exact(c)}, 0)

    @staticmethod
    def zero() -> "SymbolFunction":
        return SymbolFunction({}, 0)

    def terms(self) -> List[Tuple[int, int, int, ExactScalar]]:
        """Spec-shaped term list (a, b, c, coeff) with a, b <= c termwise."""
        C = self.denom_power
        return [(a, b, C, co) for (a, b), co in sorted(self.numerator.items())]

    # -- algebra -----------------------------------------------------------
    def __add__(self, other: "SymbolFunction") -> "SymbolFunction":
        C = max(self.denom_power, other.denom_power)
        num: Dict[TermKey, ExactScalar] = {}
        _poly_addto(num, _poly_mul(self.numerator, _one_plus_t_power(C - self.denom_power)))
        _poly_addto(num, _poly_mul(other.numerator, _one_plus_t_power(C - other.denom_power)))
        return SymbolFunction(num, C)

    def __neg__(self) -> "SymbolFunction":
        return SymbolFunction({k: -v for k, v in self.numerator.items()},
                              self.denom_power, validate=False)

    def __sub__(self, other: "SymbolFunction") -> "SymbolFunction":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SymbolFunction):
            return SymbolFunction(_poly_mul(self.numerator, other.numerator),
                                  self.denom_power + other.denom_power)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "SymbolFunction":
        c = _exact(c)
        return SymbolFunction({k: v * c for k, v in self.numerator.items()},
                              self.denom_power, validate=False)

    def conj(self) -> "SymbolFunction":
        return SymbolFunction({(b, a): v.conjugate() for (a, b), v in self.numerator.items()},
                              self.denom_power, validate=False)

    def is_real(self) -> bool:
        return self == self.conj()

    def __eq__(self, other):
        if not isinstance(other, SymbolFunction):
            return NotImplemented
        return (self.denom_power == other.denom_power
                and _poly_equal(self.numerator, other.numerator))

    def __hash__(self):
        return id(self)

    def is_zero(self) -> bool:
        return not self.numerator

    # -- calculus ----------------------------------------------------------
    def d_z(self) -> "SymbolFunction":
        """Wirtinger derivative d/dz (smooth on the chart, not on CP^1)."""
        C = self.denom_power
        num: Dict[TermKey, ExactScalar] = {}
        for (a, b), co in self.numerator.items():
            if a > 0:
                _poly_addto(num, _poly_mul({(a - 1, b): co * a}, _one_plus_t_power(1)))
            _poly_addto(num, {(a, b + 1): co * (-C)})
        return SymbolFunction(num, C + 1, validate=False)

    def d_zbar(self) -> "SymbolFunction":
        return self.conj().d_z().conj()

    def metric_inverse_times(self) -> "SymbolFunction":
        """Multiply by (1+z zbar)^2, the inverse Fubini-Study metric factor."""
        return SymbolFunction(dict(self.numerator), self.denom_power - 2)

    def laplacian(self) -> "SymbolFunction":
        """Laplace-Beltrami operator (1+z zbar)^2 d_z d_zbar."""
        return self.d_z().d_zbar().metric_inverse_times()

    # -- evaluation ---------------------------------------------------------
    def eval_exact(self, z_re: Fraction, z_im: Fraction) -> ExactScalar:
        z = ExactScalar(z_re, z_im)
        zb = z.conjugate()
        t = ExactScalar(1) + z * zb
        acc = ExactScalar(0)
        for (a, b), co in self.numerator.items():
            acc = acc + co * z ** a * zb ** b
        return acc / t ** self.denom_power

    def eval(self, z: complex) -> complex:
        z = complex(z)
        zb = z.conjugate()
        t = 1.0 + (z * zb).real
        acc = 0j
        for (a, b), co in self.numerator.items():
            acc += co.to_complex() * z ** a * zb ** b
        return acc / t ** self.denom_power

    def value_at_infinity(self) -> ExactScalar:
        C = self.denom_power
        return self.numerator.get((C, C), ExactScalar(0))

    def sup_norm(self, grid: Iterable[complex]) -> float:
        """Max modulus over a sample grid plus both poles."""
        best = max(abs(self.eval(0j)), abs(self.value_at_infinity().to_complex()))
        for z in grid:
            best = max(best, abs(self.eval(z)))
        return best

    def jet_at(self, x, order: int, backend: str = "exact") -> Jet:
        """Taylor jet in displacement (u, ubar) around a chart point.

        ``x`` is an exact pair (re, im) for the exact backend or a complex
        number for doubles.
        """
        if backend == "exact":
            x0 = ExactScalar(Fraction(x[0]), Fraction(x[1])) if isinstance(x, tuple) else _exact(x)
            one = ExactScalar(1)
            zero = ExactScalar(0)
        elif backend == "double":
            x0 = complex(x[0], x[1]) if isinstance(x, tuple) else complex(x)
            one = 1 + 0j
            zero = 0j
        else:
            raise ValueError(f"unknown backend {backend!r}")
        xb = x0.conjugate()
        vars_, kinds = ("u", "ubar"), ("h", "a")
        u = Jet.coordinate("u", vars_, kinds, order, one)
        ub = Jet.coordinate("ubar", vars_, kinds, order, one)
        zj = u + x0
        zbj = ub + xb
        num = Jet.zeros(vars_, kinds, order, zero)
        for (a, b), co in sorted(self.numerator.items()):
            term = Jet.constant(_cast(co, backend), vars_, kinds, order, zero)
            for _ in range(a):
                term = term * zj
            for _ in range(b):
                term = term * zbj
            num = num + term
        denom = (zj * zbj + one).invert()
        powd = Jet.constant(one, vars_, kinds, order, zero)
        for _ in range(self.denom_power):
            powd = powd * denom
        return num * powd

    def __repr__(self):
        if not self.numerator:
            return "SymbolFunction(0)"
        body = " + ".join(
            f"{co!r}*z^{a}*zb^{b}" for (a, b), co in sorted(self.numerator.items())
        )
        return f"SymbolFunction(({body})/(1+zzb)^{self.denom_power})"

    def to_json(self) -> dict:
        from .scalars import scalar_to_json

        return {
            "denom_power": self.denom_power,
            "terms": [
                {"a": a, "b": b, "c": c, "coeff": scalar_to_json(co)}
                for a, b, c, co in self.terms()
            ],
        }


def _cast(c: ExactScalar, backend: str):
    return c if backend == "exact" else c.to_complex()


# -- polynomial helpers (dicts (a, b) -> ExactScalar) -----------------------

def _poly_addto(target: Dict[TermKey, ExactScalar], source: Dict[TermKey, ExactScalar]):
    for k, v in source.items():
        cur = target.get(k)
        nxt = v if cur is None else cur + v
        if is_zero(nxt):
            target.pop(k, None)
        else:
            target[k] = nxt


def _poly_mul(a: Dict[TermKey, ExactScalar], b: Dict[TermKey, ExactScalar]):
    out: Dict[TermKey, ExactScalar] = {}
    for (i, j), u in a.items():
        for (k, l), v in b.items():
            key = (i + k, j + l)
            w = u * v
            cur = out.get(key)
            nxt = w if cur is None else cur + w
            if is_zero(nxt):
                out.pop(key, None)
            else:
                out[key] = nxt
    return out


def _one_plus_t_power(n: int) -> Dict[TermKey, ExactScalar]:
    """(1 + z zbar)^n as a polynomial dict, n >= 0."""
    if n < 0:
        raise ValueError("negative power in numerator lift")
    from math import comb

    return {(k, k): ExactScalar(comb(n, k)) for k in range(n + 1)}


def _poly_equal(a, b) -> bool:
    keys = set(a) | set(b)
    zero = ExactScalar(0)
    return all(is_zero(a.get(k, zero) - b.get(k, zero)) for k in keys)


def _reduce(num: Dict[TermKey, ExactScalar], C: int):
    """Divide numerator by (1 + z zbar) while possible and C > 0."""
    while C > 0 and num:
        quot = _divide_once(num)
        if quot is None:
            break
        num = quot
        C -= 1
    return num, C


def _divide_once(num: Dict[TermKey, ExactScalar]):
    """Exact division by (1+t) along each angular mode, or None."""
    modes: Dict[int, Dict[int, ExactScalar]] = {}
    for (a, b), co in num.items():
        s = a - b
        modes.setdefault(s, {})[min(a, b)] = co
    out: Dict[TermKey, ExactScalar] = {}
    for s, poly in modes.items():
        # poly: t-degree -> coeff of z^s t^k (or zbar^{-s} for s < 0)
        deg = max(poly)
        quot: Dict[int, ExactScalar] = {}
        rem = dict(poly)
        for k in range(deg, 0, -1):
            c = rem.get(k)
            if c is None or is_zero(c):
                continue
            quot[k - 1] = c
            rem.pop(k)
            prev = rem.get(k - 1, ExactScalar(0)) - c
            if is_zero(prev):
                rem.pop(k - 1, None)
            else:
                rem[k - 1] = prev
        if rem:
            return None  # remainder at t^0: not divisible
        for k, c in quot.items():
            key = (k + s, k) if s >= 0 else (k, k - s)
            out[key] = c
    return out


# -- frequently used symbols -------------------------------------------------

def symbol_height() -> SymbolFunction:
    """z zbar / (1 + z zbar): height function, sup-norm 1 at infinity."""
    return SymbolFunction.from_terms([(1, 1, 1, 1)])


def symbol_re_z() -> SymbolFunction:
    """Re(z) / (1 + z zbar)."""
    return SymbolFunction.from_terms([(1, 0, 1, Fraction(1, 2)), (0, 1, 1, Fraction(1, 2))])


def symbol_z() -> SymbolFunction:
    return SymbolFunction.from_terms([(1, 0, 1, 1)])


def symbol_zbar() -> SymbolFunction:
    return SymbolFunction.from_terms([(0, 1, 1, 1)])


def symbol_im_z() -> SymbolFunction:
    return SymbolFunction.from_terms([
        (1, 0, 1, (0, Fraction(-1, 2))), (0, 1, 1, (0, Fraction(1, 2)))
    ])


def symbol_bump(n: int) -> SymbolFunction:
    """(z zbar / (1+z zbar))^n: vanishes to order 2n at 0, ~1 away from it."""
    return SymbolFunction.from_terms([(n, n, n, 1)])


def poisson_bracket_i(f: SymbolFunction, g: SymbolFunction) -> SymbolFunction:
    """i{f, g} = (1+z zbar)^2 (d_zbar f d_z g - d_z f d_zbar g).

    Normalized so that C_1(f,g) - C_1(g,f) = i{f,g} for the quantization's
    first-order coefficient; see the conventions section of the README.
    """
    comm = f.d_zbar() * g.d_z() - f.d_z() * g.d_zbar()
    return comm.metric_inverse_times()


def bt_first_order(f: SymbolFunction, g: SymbolFunction) -> SymbolFunction:
    """C_1(f,g) = -(1+z zbar)^2 d_z f d_zbar g, the level-one product term."""
    return (f.d_z() * g.d_zbar()).metric_inverse_times().scale(-1)
