"""Truncated multivariate power series (jets) at a chart basepoint.

Variables are tagged holomorphic ('h'), antiholomorphic ('a') or real ('r').
Coefficients live in a pluggable ring: exact complex rationals, doubles, or
(for parametric-basepoint work) jets again, one level deep.

The module also houses the chart-level geometry built from jets: holomorphic
polarization of real-analytic potentials, the diastatic two-point function
and the cyclic three-point function, both recentred so that the moving point
appears through displacement variables around the evaluation point.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .scalars import conj_scalar, is_zero
from .series import NuSeries

MultiIndex = Tuple[int, ...]


class VariableMismatchError(ValueError):
    """Binary jet operation on incompatible variable frames."""


class NondegeneracyError(ArithmeticError):
    """A required Hessian/leading term is degenerate."""


def _conj_coeff(c):
    if hasattr(c, "conj"):
        # nested jets derive their own pairing from variable names
        return c.conj()
    return conj_scalar(c)


class Jet:
    """Power series in ``vars`` truncated at total degree ``order``.

    ``coeffs`` maps multi-indices (one entry per variable) to coefficients;
    absent entries are zero.  ``zero`` is a prototype zero of the coefficient
    ring, kept so empty jets still know their ring.
    """

    __slots__ = ("vars", "kinds", "order", "coeffs", "zero", "basepoint")

    def __init__(self, vars: Sequence[str], kinds: Sequence[str], order: int,
                 coeffs: Mapping[MultiIndex, object], zero, basepoint=None):
        self.vars = tuple(vars)
        self.kinds = tuple(kinds)
        if len(self.vars) != len(self.kinds):
            raise ValueError("vars and kinds must align")
        if order < 0:
            raise ValueError("jet order must be >= 0")
        self.order = order
        self.zero = zero
        self.basepoint = tuple(basepoint) if basepoint is not None else None
        clean: Dict[MultiIndex, object] = {}
        n = len(self.vars)
        for alpha, c in coeffs.items():
            if len(alpha) != n:
                raise VariableMismatchError(f"index {alpha} has wrong arity")
            if sum(alpha) > order or is_zero(c):
                continue
            clean[tuple(alpha)] = c
        self.coeffs = clean

    # ------------------------------------------------------------------
    @staticmethod
    def zeros(vars, kinds, order, zero, basepoint=None) -> "Jet":
        return Jet(vars, kinds, order, {}, zero, basepoint)

    @staticmethod
    def constant(value, vars, kinds, order, zero=None, basepoint=None) -> "Jet":
        zero = zero if zero is not None else value * 0
        return Jet(vars, kinds, order, {(0,) * len(vars): value}, zero, basepoint)

    @staticmethod
    def coordinate(name, vars, kinds, order, one, basepoint=None) -> "Jet":
        idx = list(vars).index(name)
        alpha = tuple(1 if i == idx else 0 for i in range(len(vars)))
        return Jet(vars, kinds, order, {alpha: one}, one * 0, basepoint)

    def one_like(self) -> "Jet":
        one = _ring_one(self.zero)
        return Jet.constant(one, self.vars, self.kinds, self.order, self.zero, self.basepoint)

    def zero_like(self, order=None) -> "Jet":
        return Jet.zeros(self.vars, self.kinds, self.order if order is None else order,
                         self.zero, self.basepoint)

    # ------------------------------------------------------------------
    def coeff(self, alpha: MultiIndex):
        return self.coeffs.get(tuple(alpha), self.zero)

    def eval0(self):
        """Constant coefficient (value at the basepoint)."""
        return self.coeff((0,) * len(self.vars))

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        kept = {a: c for a, c in self.coeffs.items() if sum(a) <= order}
        return Jet(self.vars, self.kinds, order, kept, self.zero, self.basepoint)

    def _merge_basepoint(self, other: "Jet"):
        if self.basepoint is not None and other.basepoint is not None:
            if self.basepoint != other.basepoint:
                raise VariableMismatchError("jets centred at different basepoints")
        return self.basepoint if self.basepoint is not None else other.basepoint

    def _check_frame(self, other: "Jet"):
        if self.vars != other.vars or self.kinds != other.kinds:
            raise VariableMismatchError(f"{self.vars} vs {other.vars}")

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_frame(other)
            order = min(self.order, other.order)
            out = dict(self.coeffs)
            for a, c in other.coeffs.items():
                out[a] = out[a] + c if a in out else c
            out = {a: c for a, c in out.items() if sum(a) <= order}
            return Jet(self.vars, self.kinds, order, out,
                       self.zero, self._merge_basepoint(other))
        # scalar: add to the constant coefficient
        k = (0,) * len(self.vars)
        out = dict(self.coeffs)
        out[k] = out.get(k, self.zero) + other
        return Jet(self.vars, self.kinds, self.order, out, self.zero, self.basepoint)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.vars, self.kinds, self.order,
                   {a: -c for a, c in self.coeffs.items()}, self.zero, self.basepoint)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_frame(other)
            order = min(self.order, other.order)
            out: Dict[MultiIndex, object] = {}
            for a, ca in self.coeffs.items():
                da = sum(a)
                if da > order:
                    continue
                for b, cb in other.coeffs.items():
                    if da + sum(b) > order:
                        continue
                    key = tuple(x + y for x, y in zip(a, b))
                    prod = ca * cb
                    out[key] = out[key] + prod if key in out else prod
            return Jet(self.vars, self.kinds, order, out,
                       self.zero, self._merge_basepoint(other))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Jet":
        if is_zero(c):
            return self.zero_like()
        return Jet(self.vars, self.kinds, self.order,
                   {a: v * c for a, v in self.coeffs.items()}, self.zero, self.basepoint)

    def scale_rational(self, q) -> "Jet":
        def mulq(v):
            if isinstance(v, (float, complex)):
                return v * float(q)
            return v * q
        return Jet(self.vars, self.kinds, self.order,
                   {a: mulq(v) for a, v in self.coeffs.items()}, self.zero, self.basepoint)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.invert()
        if isinstance(other, (float, complex)):
            return self.scale(1.0 / other)
        return self.scale(_ring_one(self.zero) / other)

    # -- calculus --------------------------------------------------------
    def derive(self, var: str) -> "Jet":
        """Partial derivative; the result is one order lower."""
        if self.order == 0:
            raise ArithmeticError("cannot derive a jet of order 0")
        i = list(self.vars).index(var)
        out: Dict[MultiIndex, object] = {}
        for a, c in self.coeffs.items():
            if a[i] == 0:
                continue
            key = a[:i] + (a[i] - 1,) + a[i + 1:]
            out[key] = c * a[i]
        return Jet(self.vars, self.kinds, self.order - 1, out, self.zero, self.basepoint)

    def derivative_at0(self, alpha: MultiIndex):
        """(d^alpha f)(basepoint) = alpha! * coefficient."""
        c = self.coeff(alpha)
        fact = 1
        for k in alpha:
            for j in range(2, k + 1):
                fact *= j
        if isinstance(c, (float, complex)):
            return c * float(fact)
        return c * fact

    def map_coeffs(self, fn, zero=None) -> "Jet":
        return Jet(self.vars, self.kinds, self.order,
                   {a: fn(c) for a, c in self.coeffs.items()},
                   self.zero if zero is None else zero, self.basepoint)

    # -- unit operations ---------------------------------------------------
    def invert(self) -> "Jet":
        """Inverse of a jet with invertible constant term."""
        c0 = self.eval0()
        if is_zero(c0):
            raise NondegeneracyError("jet has no invertible constant term")
        inv0 = _ring_inv(c0)
        u = (self.scale(inv0) - self.one_like()).truncate(self.order)
        out = self.one_like()
        power = self.one_like()
        for _ in range(self.order):
            power = (power * u).truncate(self.order)
            if power.is_zero():
                break
            out = out + (-power if _ % 2 == 0 else power)
        return out.scale(inv0)

    def exp(self) -> "Jet":
        c0 = self.eval0()
        head = _const_exp(c0)
        nil = self - Jet.constant(c0, self.vars, self.kinds, self.order, self.zero, self.basepoint)
        out = self.one_like()
        power = self.one_like()
        fact = 1
        for k in range(1, self.order + 1):
            power = (power * nil).truncate(self.order)
            if power.is_zero():
                break
            fact *= k
            out = out + power.scale_rational(Fraction(1, fact))
        return out.scale(head)

    def log(self) -> "Jet":
        c0 = self.eval0()
        if is_zero(c0):
            raise NondegeneracyError("log of a jet vanishing at the basepoint")
        head = _const_log(c0)
        u = self.scale(_ring_inv(c0)) - self.one_like()
        out = self.zero_like()
        power = self.one_like()
        for k in range(1, self.order + 1):
            power = (power * u).truncate(self.order)
            if power.is_zero():
                break
            out = out + power.scale_rational(Fraction((-1) ** (k + 1), k))
        return out + head

    # -- structure ---------------------------------------------------------
    def rename(self, mapping: Mapping[str, str], kinds: Optional[Mapping[str, str]] = None) -> "Jet":
        new_vars = tuple(mapping.get(v, v) for v in self.vars)
        new_kinds = tuple((kinds or {}).get(v, k) for v, k in zip(self.vars, self.kinds))
        return Jet(new_vars, new_kinds, self.order, self.coeffs, self.zero, self.basepoint)

    def embed(self, vars, kinds) -> "Jet":
        """View the jet in a larger variable frame (missing vars get index 0)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        out: Dict[MultiIndex, object] = {}
        for a, c in self.coeffs.items():
            key = [0] * len(vars)
            for p, e in zip(pos, a):
                key[p] = e
            out[tuple(key)] = c
        return Jet(vars, kinds, self.order, out, self.zero, None)

    def substitute(self, assignments: Mapping[str, "Jet"]) -> "Jet":
        """Substitute jets for variables (all target jets share one frame)."""
        target = next(iter(assignments.values()))
        out = Jet.zeros(target.vars, target.kinds, target.order, target.zero, target.basepoint)
        for a, c in self.coeffs.items():
            term = out.one_like()
            for v, e in zip(self.vars, a):
                if e == 0:
                    continue
                g = assignments[v]
                for _ in range(e):
                    term = (term * g).truncate(target.order)
            out = out + term.scale(c)
        return out

    def conj(self, pairing: Optional[Mapping[str, str]] = None) -> "Jet":
        """Complex conjugate: swap each variable with its partner, conjugate coefficients."""
        pairing = dict(pairing) if pairing else _default_pairing(self.vars, self.kinds)
        perm = [self.vars.index(pairing[v]) for v in self.vars]
        out: Dict[MultiIndex, object] = {}
        for a, c in self.coeffs.items():
            key = tuple(a[perm[i]] for i in range(len(a)))
            out[key] = _conj_coeff(c)
        bp = None
        if self.basepoint is not None:
            bp = tuple(conj_scalar(b) for b in self.basepoint)
        return Jet(self.vars, self.kinds, self.order, out, self.zero, bp)

    def evaluate(self, values: Mapping[str, object]):
        """Polynomial evaluation of the truncated series at numeric offsets."""
        total = None
        for a, c in self.coeffs.items():
            term = c
            for v, e in zip(self.vars, a):
                for _ in range(e):
                    term = term * values[v]
            total = term if total is None else total + term
        return self.zero if total is None else total

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        if self.vars != other.vars:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(is_zero(self.coeff(k) - other.coeff(k)) for k in keys)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        items = sorted(self.coeffs.items())[:8]
        body = ", ".join(f"{a}:{c!r}" for a, c in items)
        more = "" if len(self.coeffs) <= 8 else f", ... ({len(self.coeffs)} terms)"
        return f"Jet<{','.join(self.vars)}|N={self.order}>({body}{more})"

    def to_json(self, coeff_encoder=None) -> dict:
        from .scalars import scalar_to_json

        enc = coeff_encoder or scalar_to_json
        return {
            "vars": list(self.vars),
            "kinds": list(self.kinds),
            "basepoint": None if self.basepoint is None else [enc(b) for b in self.basepoint],
            "order": self.order,
            "coeffs": [
                {"alpha": list(a), "value": enc(c)}
                for a, c in sorted(self.coeffs.items())
            ],
        }


# ---------------------------------------------------------------------------
# ring helpers (work for scalars and nested jets alike)
# ---------------------------------------------------------------------------

def _ring_one(zero):
    if isinstance(zero, Jet):
        return zero.one_like()
    from .series import _one_like

    return _one_like(zero)


def _ring_inv(c):
    if isinstance(c, Jet):
        return c.invert()
    if isinstance(c, (float, complex)):
        return 1.0 / c
    from .series import _one_like

    return _one_like(c) / c


def _const_exp(c):
    if isinstance(c, Jet):
        return c.exp()
    if isinstance(c, (float, complex)):
        import cmath
        import math

        return cmath.exp(c) if isinstance(c, complex) else math.exp(c)
    if is_zero(c):
        return _ring_one(c)
    raise ArithmeticError("exact backend cannot exponentiate a nonzero constant term")


def _const_log(c):
    if isinstance(c, Jet):
        return c.log()
    if isinstance(c, (float, complex)):
        import cmath

        return cmath.log(c)
    if c == _ring_one(c):
        return c * 0
    raise ArithmeticError("exact backend cannot take log of a constant term != 1")


def _default_pairing(vars, kinds) -> Dict[str, str]:
    pairing: Dict[str, str] = {}
    vs = list(vars)
    for v, k in zip(vars, kinds):
        if k == "r":
            pairing[v] = v
        elif k == "h":
            w = v + "bar"
            if w not in vs:
                raise VariableMismatchError(f"no conjugate partner for {v}")
            pairing[v] = w
        else:
            if not v.endswith("bar") or v[:-3] not in vs:
                raise VariableMismatchError(f"no conjugate partner for {v}")
            pairing[v] = v[:-3]
    return pairing


def jet_calculus(a: Jet, b: Optional[Jet], op: str, var: Optional[str] = None):
    """Dispatch wrapper: op in {add, mul, derive, eval0}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "derive":
        return a.derive(var)
    if op == "eval0":
        return a.eval0()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# polarization and the two/three point functions
# ---------------------------------------------------------------------------

def polarize(phi: Jet, x_suffix: str = "_x", y_suffix: str = "_y") -> Jet:
    """Holomorphic polarization of a real-analytic jet in one complex variable.

    For phi = sum c_ab w^a wbar^b this returns sum c_ab w_x^a wbar_y^b: the
    holomorphic and antiholomorphic slots become independent arguments.  On
    real-analytic germs this is the exact almost-analytic extension, so the
    antiholomorphic derivative in the first slot vanishes identically rather
    than merely to infinite order.
    """
    mapping, kinds = {}, {}
    for v, k in zip(phi.vars, phi.kinds):
        if k == "h":
            mapping[v] = v + x_suffix
            kinds[v] = "h"
        elif k == "a":
            mapping[v] = v + y_suffix
            kinds[v] = "a"
        else:
            raise VariableMismatchError("polarize needs holomorphic/antiholomorphic pairs")
    return phi.rename(mapping, kinds)


def hermitize(phi: Jet) -> Jet:
    """Symmetrized coefficients: c_ab -> (c_ab + conj(c_ba))/2.

    Guarantees that the polarized extension satisfies
    ext(y, x) = conj(ext(x, y)).  Real-analytic real potentials are fixed
    points of this map.
    """
    if len(phi.vars) != 2:
        raise VariableMismatchError("hermitize expects jets in one complex variable")
    out: Dict[MultiIndex, object] = {}
    for (a, b), c in phi.coeffs.items():
        cc = phi.coeff((b, a))
        half = c + _conj_coeff(cc)
        out[(a, b)] = half.scale_rational(Fraction(1, 2)) if isinstance(half, Jet) else _half(half)
    return Jet(phi.vars, phi.kinds, phi.order, out, phi.zero, phi.basepoint)


def _half(c):
    if isinstance(c, (float, complex)):
        return c * 0.5
    return c * Fraction(1, 2)


class FormalPotential:
    """Formal potential Phi = (1/nu) Phi_{-1} + Phi_0 + nu Phi_1 + ...

    ``value`` is a NuSeries whose coefficients are jets in one complex
    variable (displacement coordinates around the chart basepoint).  The
    order (-1) jet must have an invertible mixed Hessian there.
    """

    def __init__(self, value: NuSeries, chart: str = "affine"):
        self.value = value
        self.chart = chart
        lead = value.coeff(-1)
        if not isinstance(lead, Jet):
            raise TypeError("potential coefficients must be jets")
        h = lead.coeff((1, 1))
        if is_zero(h):
            raise NondegeneracyError("mixed Hessian of Phi_{-1} vanishes at basepoint")
        self.vars = lead.vars

    def metric_jet(self) -> Jet:
        """Mixed Hessian jet d_z d_zbar Phi_{-1}."""
        lead = self.value.coeff(-1)
        return lead.derive(lead.vars[0]).derive(lead.vars[1])


def _two_sided(pot: Jet, hol_splits, anti_splits, out_vars, out_kinds, out_order,
               inner_vars, inner_kinds, inner_order, inner_zero):
    """Expand sum c_ab (hol side)^a (anti side)^b into displacement jets.

    ``hol_splits``/``anti_splits`` give, for the holomorphic and the
    antiholomorphic argument, a list of variables with multiplicity-1 weight:
    e.g. ('p', 'u') encodes p+u.  Variables in ``inner_vars`` land in inner
    jet coefficients, those in ``out_vars`` in the outer multi-index.  With
    inner_order = 0 the coefficients are plain scalars.
    """
    nested = inner_order > 0
    n_out = len(out_vars)
    out_pos = {v: i for i, v in enumerate(out_vars)}
    inner_pos = {v: i for i, v in enumerate(inner_vars)} if nested else {}

    def make_zero():
        if nested:
            return Jet.zeros(inner_vars, inner_kinds, inner_order, inner_zero)
        return inner_zero

    acc: Dict[MultiIndex, object] = {}

    def add_term(out_idx, inner_idx, value):
        if sum(out_idx) > out_order:
            return
        if nested:
            if sum(inner_idx) > inner_order:
                return
            cur = acc.get(out_idx)
            if cur is None:
                cur = make_zero()
            acc[out_idx] = cur + Jet(inner_vars, inner_kinds, inner_order,
                                     {inner_idx: value}, inner_zero)
        else:
            if any(inner_idx):
                return
            acc[out_idx] = acc.get(out_idx, inner_zero) + value

    def splits(total, parts):
        if len(parts) == 1:
            yield (total,)
            return
        for k in range(total + 1):
            for rest in splits(total - k, parts[1:]):
                yield (k,) + rest

    n_inner = len(inner_vars)
    for (a, b), c in pot.coeffs.items():
        for sa in splits(a, hol_splits):
            ca = 1
            for e, tot in zip(sa, _prefix_totals(a, sa)):
                ca *= comb(tot, e)
            for sb in splits(b, anti_splits):
                cb = 1
                for e, tot in zip(sb, _prefix_totals(b, sb)):
                    cb *= comb(tot, e)
                out_idx = [0] * n_out
                inner_idx = [0] * n_inner
                ok = True
                for v, e in list(zip(hol_splits, sa)) + list(zip(anti_splits, sb)):
                    if e == 0:
                        continue
                    if v in out_pos:
                        out_idx[out_pos[v]] += e
                    elif v in inner_pos or (not nested and v in inner_vars):
                        if nested:
                            inner_idx[inner_pos[v]] += e
                        else:
                            ok = False
                            break
                    else:
                        raise VariableMismatchError(f"unrouted variable {v}")
                if not ok:
                    continue
                add_term(tuple(out_idx), tuple(inner_idx), c * (ca * cb))
    zero = make_zero()
    return Jet(out_vars, out_kinds, out_order, acc, zero)


def _prefix_totals(total, split):
    """Remaining totals before each split entry (for multinomial weights)."""
    outs = []
    rem = total
    for e in split:
        outs.append(rem)
        rem -= e
    return outs


def _sided_potential_term(pot_sym: Jet, hol_side, anti_side, out_vars, out_kinds,
                          out_order, inner_vars, inner_kinds, inner_order, inner_zero):
    return _two_sided(pot_sym, hol_side, anti_side, out_vars, out_kinds, out_order,
                      inner_vars, inner_kinds, inner_order, inner_zero)


def diastasis(potential: FormalPotential, outer_order: int, parametric_order: int = 0) -> NuSeries:
    """Diastatic function D(x, y) recentred at the evaluation point.

    Returns a NuSeries of jets in (u, ubar), the displacement of y around x;
    when ``parametric_order`` > 0 the coefficients are jets in (p, pbar), the
    displacement of x around the chart basepoint.  D(x, x) = 0 by
    construction, and the quadratic part of the leading coefficient is minus
    the positive form built from the mixed Hessian.
    """
    def build(pot: Jet) -> Jet:
        sym = hermitize(pot)
        kw = dict(out_vars=("u", "ubar"), out_kinds=("h", "a"), out_order=outer_order,
                  inner_vars=("p", "pbar"), inner_kinds=("h", "a"),
                  inner_order=parametric_order, inner_zero=pot.zero)
        # x ~ p, y ~ p + u in displacement coordinates around the basepoint
        t_xy = _sided_potential_term(sym, ("p",), ("pbar", "ubar"), **kw)
        t_yx = _sided_potential_term(sym, ("p", "u"), ("pbar",), **kw)
        t_xx = _sided_potential_term(sym, ("p",), ("pbar",), **kw)
        t_yy = _sided_potential_term(sym, ("p", "u"), ("pbar", "ubar"), **kw)
        return t_xy + t_yx - t_xx - t_yy

    return potential.value.map(build)


def three_point(potential: FormalPotential, outer_order: int, parametric_order: int = 0) -> NuSeries:
    """Cyclic three-point function T(x, y, z) recentred at x.

    Jets in (u, ubar, v, vbar): displacements of y and z around x.  The
    leading coefficient satisfies
    T_{-1}(x,y,z) = (D_{-1}(x,y) + D_{-1}(y,z) + D_{-1}(z,x))/2 at jet level.
    """
    def build(pot: Jet) -> Jet:
        sym = hermitize(pot)
        kw = dict(out_vars=("u", "ubar", "v", "vbar"), out_kinds=("h", "a", "h", "a"),
                  out_order=outer_order, inner_vars=("p", "pbar"),
                  inner_kinds=("h", "a"), inner_order=parametric_order,
                  inner_zero=pot.zero)
        t_xy = _sided_potential_term(sym, ("p",), ("pbar", "ubar"), **kw)
        t_yz = _sided_potential_term(sym, ("p", "u"), ("pbar", "vbar"), **kw)
        t_zx = _sided_potential_term(sym, ("p", "v"), ("pbar",), **kw)
        t_xx = _sided_potential_term(sym, ("p",), ("pbar",), **kw)
        t_yy = _sided_potential_term(sym, ("p", "u"), ("pbar", "ubar"), **kw)
        t_zz = _sided_potential_term(sym, ("p", "v"), ("pbar", "vbar"), **kw)
        return t_xy + t_yz + t_zx - t_xx - t_yy - t_zz

    return potential.value.map(build)


def restrict_pair_to_diagonal(series: NuSeries) -> NuSeries:
    """Collapse three-point jets (u,ubar,v,vbar) to diastasis jets by v := u."""
    def collapse(jet: Jet) -> Jet:
        out: Dict[MultiIndex, object] = {}
        for (i, j, k, l), c in jet.coeffs.items():
            key = (i + k, j + l)
            out[key] = out[key] + c if key in out else c
        return Jet(("u", "ubar"), ("h", "a"), jet.order, out, jet.zero)

    return series.map(collapse)
