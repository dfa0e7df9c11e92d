"""Normalized formal integrals at a nondegenerate critical point.

A phase pair (phi, mu) consists of a formal phase
phi = (1/nu) phi_{-1} + phi_0 + nu phi_1 + ... whose leading part has a
nondegenerate critical point at the basepoint, and a formal volume density
mu = mu_0 + nu mu_1 + ... (relative to the coordinate volume) with mu_0
invertible there.  The associated formal integral K is the unique functional
with K_0 = delta, K(1) = 1 and K(Xf + (X phi + div_mu X) f) = 0 for vector
fields X; coordinate fields suffice.

Two engines compute K and cross-validate:

* ``formal_integral_recursion`` solves the defining identity degree by
  degree, writing each monomial in terms of the ideal generated by the
  leading-phase partials (invertible Hessian).
* ``formal_integral_wick`` evaluates the formal Gaussian integral: rescale
  by sqrt(m), expand the non-quadratic exponent, and contract with Wick
  pairings of covariance -H^{-1}; no positivity of the Hessian is needed.

Both engines accept scalar coefficients or one level of nested jets, which
makes the basepoint parametric.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .jets import Jet, NondegeneracyError
from .scalars import is_zero, to_complex
from .series import NuSeries

MultiIndex = Tuple[int, ...]


class TruncationTooLowError(ArithmeticError):
    """The jet data cannot support the requested nu-order."""


def _ring_zero(proto):
    if isinstance(proto, Jet):
        return proto.zero_like()
    return proto * 0


def _is_unit(x) -> bool:
    if isinstance(x, Jet):
        return not is_zero(x.eval0())
    return not is_zero(x)


def _magnitude(x) -> float:
    if isinstance(x, Jet):
        return _magnitude(x.eval0())
    return abs(to_complex(x))


def _ring_inverse(x):
    if isinstance(x, Jet):
        return x.invert()
    if isinstance(x, (float, complex)):
        return 1.0 / x
    from .series import _one_like

    return _one_like(x) / x


def mat_inverse(rows: List[List[object]], exact: bool = True) -> List[List[object]]:
    """Gauss-Jordan inverse of a small matrix over the coefficient ring.

    Pivots must be units (nonzero constant term for jets).  Double backend
    picks the largest pivot; exact backend the first invertible one.
    """
    n = len(rows)
    zero = _ring_zero(rows[0][0])
    aug = [list(r) + [zero] * n for r in rows]
    for i in range(n):
        aug[i][n + i] = aug[i][n + i] + 1
    for col in range(n):
        pivot = None
        best = -1.0
        for r in range(col, n):
            if _is_unit(aug[r][col]):
                if exact:
                    pivot = r
                    break
                mag = _magnitude(aug[r][col])
                if mag > best:
                    best, pivot = mag, r
        if pivot is None:
            raise NondegeneracyError("singular matrix in formal-integral setup")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _ring_inverse(aug[col][col])
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r == col:
                continue
            factor = aug[r][col]
            if is_zero(factor):
                continue
            aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class PhasePair:
    """Formal phase and volume density at a critical basepoint.

    ``phi``: NuSeries of jets with min_order -1; ``mu``: NuSeries of jets
    with min_order >= 0 (density relative to the reference coordinate
    volume).  Construction validates the critical-point and nondegeneracy
    requirements on the leading phase and the density.
    """

    def __init__(self, phi: NuSeries, mu: NuSeries, exact: bool = True):
        if phi.min_order < -1:
            raise ValueError("phase must have min_order >= -1")
        if mu.min_order < 0:
            raise ValueError("density must have min_order >= 0")
        lead = phi.coeff(-1)
        if not isinstance(lead, Jet):
            raise TypeError("phase coefficients must be jets")
        self.vars = lead.vars
        self.kinds = lead.kinds
        self.n = len(self.vars)
        for i in range(self.n):
            e = tuple(1 if j == i else 0 for j in range(self.n))
            if not is_zero(lead.coeff(e)):
                raise NondegeneracyError("basepoint is not a critical point of phi_{-1}")
        if mu.is_empty() or mu.min_order != 0 or not _is_unit(mu.coeff(0).eval0()):
            raise NondegeneracyError("mu_0 vanishes at the basepoint")
        self.phi = phi
        self.mu = mu
        self.exact = exact
        self.hessian = self._hessian(lead)
        self.hessian_inv = mat_inverse(self.hessian, exact=exact)

    def _hessian(self, lead: Jet) -> List[List[object]]:
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                c = lead.coeff(tuple(alpha))
                if i == j:
                    c = c * 2
                row.append(c)
            rows.append(row)
        return rows

    def jet_order(self) -> int:
        return self.phi.coeff(-1).order

    def reduced_phase(self, order: int) -> NuSeries:
        """Equivalent pair (phi + log mu_hat, dV); constant-normalized.

        The density is first scaled by the inverse of its value series at the
        basepoint (formal integrals are insensitive to constant factors),
        which keeps the exact backend inside the rationals.
        """
        needed = order + 1
        if self.phi.trunc_order < needed or self.mu.trunc_order < needed:
            raise TruncationTooLowError(
                f"phase/density known to nu-orders ({self.phi.trunc_order}, "
                f"{self.mu.trunc_order}), need {needed}"
            )
        mu = self.mu.restrict(needed)
        values = mu.map(lambda j: Jet.constant(j.eval0(), j.vars, j.kinds, j.order, j.zero))
        mu_hat = mu * values.invert()
        logmu = mu_hat.log()
        return (self.phi.restrict(needed) + logmu).restrict(needed)


def pair_reduce(pair: PhasePair, u: NuSeries) -> PhasePair:
    """Equivalent pair (phi - u, e^u mu); requires u without principal part."""
    if u.min_order < 0 and not u.is_empty():
        raise ValueError("reduction by a series with a principal part would "
                         "change the critical structure")
    return PhasePair(pair.phi - u, pair.mu * u.exp(), exact=pair.exact)


class PointDistribution:
    """Formal distribution at a point: nu-graded derivative-evaluation tables.

    ``tables[r]`` maps a monomial multi-index gamma to K_r(y^gamma); the
    action on a jet f is K_r(f) = sum_gamma tables[r][gamma] * f.coeff(gamma).
    The spec-level view (weights of d^alpha) divides by alpha!.
    """

    def __init__(self, vars: Sequence[str], kinds: Sequence[str],
                 tables: List[Dict[MultiIndex, object]], basepoint=None,
                 normalization: Optional[NuSeries] = None):
        self.vars = tuple(vars)
        self.kinds = tuple(kinds)
        self.tables = [
            {a: c for a, c in t.items() if not is_zero(c)} for t in tables
        ]
        self.basepoint = basepoint
        self.normalization = normalization  # c(nu) from the Wick route, if any

    @property
    def order(self) -> int:
        return len(self.tables)

    def max_nu_order(self) -> int:
        return self.order - 1

    def table(self, r: int) -> Dict[MultiIndex, object]:
        return self.tables[r] if r < len(self.tables) else {}

    def monomial_value(self, r: int, gamma: MultiIndex):
        t = self.table(r)
        return t.get(tuple(gamma), 0)

    def weight(self, alpha: MultiIndex) -> List[object]:
        """d^alpha weights per nu-order: K_r(y^alpha)/alpha!."""
        fact = 1
        for k in alpha:
            for j in range(2, k + 1):
                fact *= j
        out = []
        for r in range(self.order):
            v = self.table(r).get(tuple(alpha))
            if v is None:
                out.append(0)
            elif isinstance(v, (float, complex)):
                out.append(v / fact)
            else:
                out.append(v * Fraction(1, fact))
        return out

    def apply_jet(self, f: Jet, nu_order: Optional[int] = None) -> NuSeries:
        """K(f) for a single jet (interpreted at nu^0)."""
        upto = self.order if nu_order is None else min(nu_order + 1, self.order)
        coeffs = []
        for r in range(upto):
            acc = None
            for gamma, w in self.table(r).items():
                c = f.coeffs.get(gamma)
                if c is None:
                    continue
                term = w * c
                acc = term if acc is None else acc + term
            coeffs.append(acc if acc is not None else _table_zero(f))
        return NuSeries(0, coeffs, upto)

    def apply(self, f) -> NuSeries:
        """K(f) for a jet or a NuSeries of jets."""
        if isinstance(f, Jet):
            return self.apply_jet(f)
        lo = f.min_order
        trunc = min(self.order + f.min_order, f.trunc_order)
        if trunc <= lo:
            raise TruncationTooLowError("distribution order too low for this series")
        coeffs = []
        for r in range(lo, trunc):
            acc = None
            for s in range(lo, r + 1):
                t = r - s
                if t >= self.order:
                    continue
                val = None
                for gamma, w in self.table(t).items():
                    c = f.coeff(s).coeffs.get(gamma)
                    if c is None:
                        continue
                    term = w * c
                    val = term if val is None else val + term
                if val is None:
                    continue
                acc = val if acc is None else acc + val
            coeffs.append(acc if acc is not None else _table_zero(f.coeff(lo)))
        return NuSeries(lo, coeffs, trunc)

    def check_normalized(self) -> bool:
        """K_0 = delta and K_r(1) = 0 for r >= 1."""
        t0 = self.table(0)
        zero_key = (0,) * len(self.vars)
        if set(t0.keys()) - {zero_key}:
            return False
        v = t0.get(zero_key)
        if v is None or not is_zero(v - _one_of(v)):
            return False
        for r in range(1, self.order):
            v = self.table(r).get(zero_key)
            if v is not None and not is_zero(v):
                return False
        return True

    def support_bound_ok(self) -> bool:
        """The nu^r table touches only derivatives of order <= 2r."""
        return all(
            all(sum(g) <= 2 * r for g in t) for r, t in enumerate(self.tables)
        )

    def scaled(self, series: NuSeries) -> "PointDistribution":
        """Multiply the distribution by a scalar nu-series."""
        order = min(self.order, series.trunc_order)
        out: List[Dict[MultiIndex, object]] = [dict() for _ in range(order)]
        for r in range(order):
            for s in range(0, r + 1):
                c = series.coeff(r - s) if r - s >= series.min_order else None
                if c is None or is_zero(c):
                    continue
                for g, w in self.table(s).items():
                    cur = out[r].get(g)
                    term = w * c
                    out[r][g] = term if cur is None else cur + term
        return PointDistribution(self.vars, self.kinds, out, self.basepoint)

    def __sub__(self, other: "PointDistribution") -> "PointDistribution":
        order = min(self.order, other.order)
        out = []
        for r in range(order):
            t = dict(self.table(r))
            for g, w in other.table(r).items():
                t[g] = t[g] - w if g in t else -w
            out.append(t)
        return PointDistribution(self.vars, self.kinds, out, self.basepoint)

    def max_abs_entry(self) -> float:
        worst = 0.0
        for t in self.tables:
            for w in t.values():
                worst = max(worst, _magnitude(w))
        return worst

    def to_json(self, coeff_encoder=None) -> dict:
        from .scalars import scalar_to_json

        enc = coeff_encoder or scalar_to_json

        def encode(w):
            return w.to_json(enc) if isinstance(w, Jet) else enc(w)

        return {
            "vars": list(self.vars),
            "basepoint": None if self.basepoint is None
            else [encode(b) if isinstance(b, Jet) else enc(b) for b in self.basepoint],
            "terms": [
                {
                    "nu_order": r,
                    "entries": [
                        {"alpha": list(g), "monomial_value": encode(w)}
                        for g, w in sorted(t.items())
                    ],
                }
                for r, t in enumerate(self.tables)
            ],
        }


def _table_zero(proto_jet: Jet):
    return _ring_zero(proto_jet.zero) if not isinstance(proto_jet.zero, Jet) else proto_jet.zero.zero_like()


def _one_of(v):
    if isinstance(v, Jet):
        return v.one_like()
    from .series import _one_like

    return _one_like(v)


# ---------------------------------------------------------------------------
# engine 1: recursion on the defining identity
# ---------------------------------------------------------------------------

def formal_integral_recursion(pair: PhasePair, order: int,
                              self_check: bool = True) -> PointDistribution:
    """Unique normalized formal integral through nu^order.

    Works degree by degree: every monomial of positive degree is rewritten as
    a combination of leading-phase partials (Hessian-preconditioned) plus
    strictly higher-degree corrections, and the defining identity turns that
    into a recursion on the K_r tables.  Each K_r is assumed to touch only
    derivatives of order <= 2r; ``self_check`` re-derives a redundant subset
    of equations and raises if the truncation assumption breaks.
    """
    n = pair.n
    phi = pair.reduced_phase(order)
    lead = phi.coeff(-1)
    need_jet = 2 * order + 1
    if lead.order < need_jet:
        raise TruncationTooLowError(
            f"phase jets of order {lead.order} cannot support nu^{order} "
            f"(need {need_jet})"
        )
    hinv = pair.hessian_inv
    dphi: Dict[int, Dict[int, Jet]] = {}
    for t in range(-1, order):
        row = {}
        for k in range(n):
            row[k] = phi.coeff(t).derive(pair.vars[k])
        dphi[t] = row

    # G_l = sum_k Hinv[l][k] d_k phi_{-1} = y_l + Gamma_l, deg(Gamma_l) >= 2
    gammas: List[Jet] = []
    for l in range(n):
        acc = None
        for k in range(n):
            term = dphi[-1][k].scale(hinv[l][k])
            acc = term if acc is None else acc + term
        e_l = tuple(1 if i == l else 0 for i in range(n))
        y_l = Jet(lead.vars, lead.kinds, acc.order, {e_l: _one_of(acc.zero)}, acc.zero)
        gammas.append(acc - y_l)

    zero_key = (0,) * n
    one = _one_of(lead.zero)
    tables: List[Dict[MultiIndex, object]] = [{zero_key: one}]

    def table_apply(table: Dict[MultiIndex, object], jet: Jet, shift: MultiIndex):
        """sum_gamma table[gamma] * coeff_{gamma - shift}(jet)."""
        acc = None
        for g, w in table.items():
            key = tuple(a - b for a, b in zip(g, shift))
            if any(x < 0 for x in key):
                continue
            c = jet.coeffs.get(key)
            if c is None:
                continue
            term = w * c
            acc = term if acc is None else acc + term
        return acc

    def identity_rhs(r: int, k: int, beta: MultiIndex):
        """-K_r(d_k y^beta) - sum_s K_s((d_k phi_{r-s}) y^beta)."""
        acc = None
        if beta[k] > 0:
            down = tuple(b - (1 if i == k else 0) for i, b in enumerate(beta))
            prev = tables[r].get(down)
            if prev is not None:
                acc = prev * (-beta[k])
        for s in range(0, r + 1):
            t = r - s
            if t >= order:
                continue
            term = table_apply(tables[s], dphi[t][k], beta)
            if term is None:
                continue
            acc = -term if acc is None else acc - term
        return acc

    for r in range(0, order):
        cap = 2 * (r + 1)
        new: Dict[MultiIndex, object] = {}
        for d in range(cap, 0, -1):
            for gamma in _monomials(n, d):
                l = next(i for i, g in enumerate(gamma) if g > 0)
                beta = tuple(g - (1 if i == l else 0) for i, g in enumerate(gamma))
                acc = None
                for k in range(n):
                    v = identity_rhs(r, k, beta)
                    if v is None:
                        continue
                    term = v * hinv[l][k]
                    acc = term if acc is None else acc + term
                corr = table_apply(new, gammas[l], beta)
                if corr is not None:
                    acc = -corr if acc is None else acc - corr
                if acc is not None and not is_zero(acc):
                    new[gamma] = acc
        tables.append(new)
        if self_check and pair.exact:
            _redundancy_check(n, tables, r, hinv, gammas, identity_rhs, table_apply)
    return PointDistribution(pair.vars, pair.kinds, tables, basepoint=None)


def _redundancy_check(n, tables, r, hinv, gammas, identity_rhs, table_apply):
    """Re-derive K_{r+1} on low-degree monomials via a different generator."""
    new = tables[r + 1]
    for gamma in list(new.keys()):
        choices = [i for i, g in enumerate(gamma) if g > 0]
        if len(choices) < 2 or sum(gamma) > 2 * (r + 1) - 1:
            continue
        l = choices[-1]
        beta = tuple(g - (1 if i == l else 0) for i, g in enumerate(gamma))
        acc = None
        for k in range(n):
            v = identity_rhs(r, k, beta)
            if v is None:
                continue
            term = v * hinv[l][k]
            acc = term if acc is None else acc + term
        corr = table_apply(new, gammas[l], beta)
        if corr is not None:
            acc = -corr if acc is None else acc - corr
        expected = new.get(gamma)
        got = acc if acc is not None else (expected * 0 if expected is not None else None)
        if expected is None and got is None:
            continue
        ref = expected if expected is not None else got * 0
        diff = ref - got if got is not None else ref
        if not is_zero(diff):
            raise TruncationTooLowError(
                f"inconsistent linear system at nu^{r + 1}, monomial {gamma}: "
                "jet truncation too low"
            )


def _monomials(n: int, degree: int):
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in _monomials(n - 1, degree - first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# engine 2: formal Gaussian integration / Wick pairings
# ---------------------------------------------------------------------------

def formal_integral_wick(pair: PhasePair, order: int) -> PointDistribution:
    """Formal stationary-phase evaluation of the same functional.

    Splits phi_{-1} into its Hessian quadratic form and the remainder,
    rescales by sqrt(m), expands the exponential by half-integer grading and
    contracts against Gaussian moments of covariance -H^{-1}.  The result is
    normalized by the value on f = 1; the unnormalized value is retained as
    ``normalization`` (the formal constant in front of the expansion).
    """
    n = pair.n
    phi = pair.reduced_phase(order)
    lead = phi.coeff(-1)
    cov = [[-x for x in row] for row in pair.hessian_inv]

    moments: Dict[MultiIndex, object] = {}
    one = _one_of(lead.zero)

    def moment(beta: MultiIndex):
        total = sum(beta)
        if total == 0:
            return one
        if total % 2 == 1:
            return None
        got = moments.get(beta)
        if got is not None:
            return got
        i = next(idx for idx, b in enumerate(beta) if b > 0)
        acc = None
        base = list(beta)
        base[i] -= 1
        for j in range(n):
            if base[j] == 0:
                continue
            nxt = list(base)
            nxt[j] -= 1
            sub = moment(tuple(nxt))
            if sub is None:
                continue
            term = sub * cov[i][j]
            term = term * base[j]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = lead.zero if not isinstance(lead.zero, Jet) else lead.zero.zero_like()
        moments[beta] = acc
        return acc

    # exponent terms by half-power lambda = 2t + deg (Gaussian part excluded)
    half: Dict[int, Dict[MultiIndex, object]] = {}
    zero_key = (0,) * n

    def put(lam: int, mono: MultiIndex, c):
        if is_zero(c):
            return
        bucket = half.setdefault(lam, {})
        bucket[mono] = bucket[mono] + c if mono in bucket else c

    for t in range(-1, order):
        jet = phi.coeff(t)
        for mono, c in jet.coeffs.items():
            d = sum(mono)
            if t == -1 and d <= 2:
                continue  # constant/linear dropped; quadratic is the weight
            if d == 0:
                continue  # overall constants cancel in the normalization
            lam = 2 * t + d
            if lam < 1:
                raise NondegeneracyError("phase term below Gaussian grading")
            if lam <= 2 * order:
                put(lam, mono, c)

    # B_lambda: coefficient polynomials of exp(sum), by total half-power
    b_polys: Dict[int, Dict[MultiIndex, object]] = {0: {zero_key: one}}
    frontier: Dict[int, Dict[MultiIndex, object]] = {0: {zero_key: one}}
    for k in range(1, 2 * order + 1):
        nxt: Dict[int, Dict[MultiIndex, object]] = {}
        for lam0, poly in frontier.items():
            for lam1, terms in half.items():
                lam = lam0 + lam1
                if lam > 2 * order:
                    continue
                bucket = nxt.setdefault(lam, {})
                for m0, c0 in poly.items():
                    for m1, c1 in terms.items():
                        key = tuple(a + b for a, b in zip(m0, m1))
                        prod = c0 * c1
                        bucket[key] = bucket[key] + prod if key in bucket else prod
        if not nxt:
            break
        scaled: Dict[int, Dict[MultiIndex, object]] = {}
        for lam, poly in nxt.items():
            scaled[lam] = {m: _scale_rat(c, Fraction(1, _fact(k))) for m, c in poly.items()}
        # frontier for next power: raw k-fold products (divide by k! at use)
        frontier = nxt
        for lam, poly in scaled.items():
            tgt = b_polys.setdefault(lam, {})
            for m, c in poly.items():
                tgt[m] = tgt[m] + c if m in tgt else c

    # unnormalized tables: K~_r(y^gamma) = sum_lam E[u^gamma * B_lam], |gamma| + lam = 2r
    raw: List[Dict[MultiIndex, object]] = []
    for r in range(order + 1):
        table: Dict[MultiIndex, object] = {}
        for gamma in _all_monomials(n, 2 * r):
            lam = 2 * r - sum(gamma)
            poly = b_polys.get(lam)
            if poly is None:
                continue
            acc = None
            for mono, c in poly.items():
                mom = moment(tuple(a + b for a, b in zip(gamma, mono)))
                if mom is None:
                    continue
                term = mom * c
                acc = term if acc is None else acc + term
            if acc is not None and not is_zero(acc):
                table[gamma] = acc
        raw.append(table)

    norm = NuSeries(0, [t.get(zero_key, one * 0) for t in raw], order + 1)
    inv = norm.invert()
    unnorm = PointDistribution(pair.vars, pair.kinds, raw, basepoint=None)
    out = unnorm.scaled(inv)
    out.normalization = norm
    return out


def _fact(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def _scale_rat(c, q: Fraction):
    if isinstance(c, (float, complex)):
        return c * float(q)
    if isinstance(c, Jet):
        return c.scale_rational(q)
    return c * q


def _all_monomials(n: int, max_degree: int):
    for d in range(max_degree + 1):
        yield from _monomials(n, d)


# ---------------------------------------------------------------------------
# condition (d) verification
# ---------------------------------------------------------------------------

class ConditionDReport:
    """Residuals of K(d_k f + (d_k phi') f) = 0 on the monomial basis."""

    def __init__(self, failures, max_residual: float, checked: int):
        self.failures = failures  # list of (field, nu_order, gamma, magnitude)
        self.max_residual = max_residual
        self.checked = checked

    @property
    def ok(self) -> bool:
        return not self.failures

    def __repr__(self):
        state = "ok" if self.ok else f"{len(self.failures)} failures"
        return (f"ConditionDReport({state}, checked={self.checked}, "
                f"max_residual={self.max_residual:.3e})")


def verify_condition_d(K: PointDistribution, pair: PhasePair,
                       fields: Optional[Sequence[str]] = None,
                       tol: float = 0.0) -> ConditionDReport:
    """Check the invariance identity for the coordinate vector fields.

    Tests every monomial f = y^gamma for which all contributions stay inside
    the computed tables: the nu^r residual needs K through order r+1 and
    touches derivatives up to 2(r+1).
    """
    order = K.max_nu_order()
    phi = pair.reduced_phase(order)
    names = list(fields) if fields is not None else list(pair.vars)
    n = pair.n
    failures = []
    worst = 0.0
    checked = 0
    for name in names:
        k = list(pair.vars).index(name)
        djets = {t: phi.coeff(t).derive(name) for t in range(-1, order)}
        for r in range(0, order):
            cap = 2 * (r + 1) - 1
            for gamma in _all_monomials(n, cap):
                acc = None
                if gamma[k] > 0:
                    down = tuple(g - (1 if i == k else 0) for i, g in enumerate(gamma))
                    prev = K.table(r).get(down)
                    if prev is not None:
                        acc = prev * gamma[k]
                for s in range(0, r + 2):
                    t = r - s
                    if t < -1 or t >= order:
                        continue
                    term = _shifted_apply(K.table(s), djets[t], gamma)
                    if term is not None:
                        acc = term if acc is None else acc + term
                checked += 1
                if acc is None:
                    continue
                mag = _magnitude(acc)
                worst = max(worst, mag)
                if mag > tol if tol > 0 else not is_zero(acc):
                    failures.append((name, r, gamma, mag))
    return ConditionDReport(failures, worst, checked)


def _shifted_apply(table: Dict[MultiIndex, object], jet: Jet, shift: MultiIndex):
    acc = None
    for g, w in table.items():
        key = tuple(a - b for a, b in zip(g, shift))
        if any(x < 0 for x in key):
            continue
        c = jet.coeffs.get(key)
        if c is None:
            continue
        term = w * c
        acc = term if acc is None else acc + term
    return acc
