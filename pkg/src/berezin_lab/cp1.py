"""Exact Berezin-Toeplitz quantization on CP^1.

Conventions (fixed once, used everywhere):

* Affine chart z, Kahler potential log(1+z zbar), form i d dbar log(1+z zbar)
  with total area 2*pi; the volume form equals the Kahler form.
* Level-m sections are polynomials of degree <= m in z with
  <z^j, z^k> = delta_jk * 2*pi * j!(m-j)!/(m+1)!.
* The reference coordinate volume for densities is i dz^dzbar, so the
  volume density is e^theta with theta = -2 log(1+z zbar) up to a constant.

With the rational symbol class every matrix element, covariant symbol and
kernel value is an exact rational (pi cancels in normalized quantities), so
the level-m Berezin transform and twisted product are computed without
quadrature; quadrature survives only as an independent cross-check route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .jets import Jet, FormalPotential
from .scalars import ExactScalar, is_zero
from .series import NuSeries
from .symbols import SymbolFunction

ExactPoint = Tuple[Fraction, Fraction]
Point = Union[complex, ExactPoint]


def _as_exact_point(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, tuple):
        return ExactScalar(Fraction(x[0]), Fraction(x[1]))
    raise TypeError("exact backend needs points as (re, im) rational pairs")


def _as_complex_point(x) -> complex:
    if isinstance(x, tuple):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, ExactScalar):
        return x.to_complex()
    return complex(x)


# ---------------------------------------------------------------------------
# section norms and kernel data
# ---------------------------------------------------------------------------

def section_inner_product(j: int, k: int, m: int) -> ExactScalar:
    """<z^j, z^k>_m, exact: delta_jk * 2*pi * j!(m-j)!/(m+1)!."""
    if not (0 <= j <= m and 0 <= k <= m):
        raise IndexError(f"monomial indices ({j}, {k}) out of range for level {m}")
    if j != k:
        return ExactScalar(0)
    val = Fraction(2) * Fraction(math.factorial(j) * math.factorial(m - j),
                                 math.factorial(m + 1))
    return ExactScalar(val, 0, 1)


def norms_squared(m: int) -> List[ExactScalar]:
    return [section_inner_product(j, j, m) for j in range(m + 1)]


def dim_holomorphic(m: int) -> int:
    """dim H_m computed from the integrated kernel diagonal, exactly."""
    data = KernelData(m)
    total = data.u_m * ExactScalar(2, 0, 1)  # u_m * vol(CP^1), vol = 2*pi
    if total.im != 0 or total.pi != 0 or total.re.denominator != 1:
        raise ArithmeticError("integrated kernel diagonal is not an integer")
    return int(total.re)


@dataclass
class KernelData:
    """Level-m Bergman kernel data in the monomial frame."""

    m: int
    norms: List[ExactScalar] = field(init=False)
    u_m: ExactScalar = field(init=False)

    def __post_init__(self):
        self.norms = norms_squared(self.m)
        # u_m(0) = 1/||z^0||^2; constancy over the chart is a tested invariant
        self.u_m = ExactScalar(1) / self.norms[0]

    def u_at(self, x: ExactPoint) -> ExactScalar:
        """u_m(x) from the defining sum, exact at rational points."""
        z = _as_exact_point(x)
        t = z * z.conjugate()
        acc = ExactScalar(0)
        power = ExactScalar(1)
        for j in range(self.m + 1):
            acc = acc + power / self.norms[j]
            power = power * t
        a = ExactScalar(1) + t
        return acc / a ** self.m

    def v_at(self, x: ExactPoint, y: ExactPoint) -> ExactScalar:
        """v_m(x, y) = |B_m(alpha(x), alpha(y))|^2, exact."""
        zx, zy = _as_exact_point(x), _as_exact_point(y)
        c = ExactScalar(1) + zx * zy.conjugate()
        ax = ExactScalar(1) + zx * zx.conjugate()
        ay = ExactScalar(1) + zy * zy.conjugate()
        ratio = (c * c.conjugate()) / (ax * ay)
        return self.u_m * self.u_m * ratio ** self.m

    def w_at(self, x: ExactPoint, y: ExactPoint, z: ExactPoint) -> ExactScalar:
        """Cyclic three-point function w_m(x, y, z), exact."""
        zx, zy, zz = (_as_exact_point(p) for p in (x, y, z))
        one = ExactScalar(1)
        num = ((one + zx * zy.conjugate()) * (one + zy * zz.conjugate())
               * (one + zz * zx.conjugate()))
        den = ((one + zx * zx.conjugate()) * (one + zy * zy.conjugate())
               * (one + zz * zz.conjugate()))
        return self.u_m ** 3 * (num / den) ** self.m

    def log_v(self, x: complex, y: complex) -> float:
        """log v_m(x,y) in doubles, stable for large m via the cosine ratio."""
        c2 = chordal_cos2(x, y)
        if c2 <= 0.0:
            return -math.inf
        return 2 * math.log(self.u_m.to_complex().real) + self.m * math.log(c2)

    def reproducing_check(self, x: ExactPoint) -> bool:
        """Coherent-state reproducing property on the monomial basis."""
        z = _as_exact_point(x)
        for i in range(min(self.m, 4) + 1):
            acc = ExactScalar(0)
            for j in range(self.m + 1):
                inner = section_inner_product(i, j, self.m)
                if is_zero(inner):
                    continue
                acc = acc + (z ** j) * inner / self.norms[j]
            if not is_zero(acc - z ** i):
                return False
        return True


def chordal_cos2(x: complex, y: complex) -> float:
    """|<x, y>|^2 / (|x|^2 |y|^2) for the lifted points (1, z): in [0, 1]."""
    x, y = complex(x), complex(y)
    if abs(x) <= 1.0 and abs(y) <= 1.0:
        num = abs(1 + x * y.conjugate()) ** 2
        den = (1 + abs(x) ** 2) * (1 + abs(y) ** 2)
        return num / den
    # dual-chart evaluation avoids overflow for distant points
    if abs(x) > 1.0 and abs(y) > 1.0:
        xi, yi = 1 / x, 1 / y
        num = abs(xi.conjugate() + yi) ** 2
        den = (1 + abs(xi) ** 2) * (1 + abs(yi) ** 2)
        return num / den
    if abs(x) > 1.0:
        xi = 1 / x
        num = abs(xi.conjugate() + y.conjugate()) ** 2
        den = (1 + abs(xi) ** 2) * (1 + abs(y) ** 2)
        return num / den
    return chordal_cos2(y, x)


def bergman_data(m: int, points: Sequence[ExactPoint]) -> dict:
    """u_m, v_m, w_m evaluations at the requested tuples (exact backend)."""
    data = KernelData(m)
    us = [data.u_at(p) for p in points]
    vs = {}
    ws = {}
    for i, p in enumerate(points):
        for j, q in enumerate(points):
            if i < j:
                vs[(i, j)] = data.v_at(p, q)
    n = len(points)
    for i in range(min(n, 3)):
        for j in range(min(n, 3)):
            for k in range(min(n, 3)):
                if len({i, j, k}) == 3:
                    ws[(i, j, k)] = data.w_at(points[i], points[j], points[k])
    return {"m": m, "u": us, "v": vs, "w": ws, "u_const": data.u_m}


# ---------------------------------------------------------------------------
# Toeplitz operators
# ---------------------------------------------------------------------------

class ToeplitzOperator:
    """Berezin-Toeplitz operator at level m in the monomial basis.

    ``matrix[k][j]`` is the coefficient of z^k in T_f z^j.  The exact backend
    stores rational entries (pi cancels); the double backend stores a numpy
    array.  ``orthonormal()`` returns the matrix in the orthonormal section
    basis, which is Hermitian for real symbols.
    """

    def __init__(self, m: int, matrix, backend: str, symbol: Optional[SymbolFunction] = None):
        self.m = m
        self.matrix = matrix
        self.backend = backend
        self.symbol = symbol

    @staticmethod
    def identity(m: int, backend: str = "exact") -> "ToeplitzOperator":
        if backend == "exact":
            mat = [[ExactScalar(1 if i == j else 0) for j in range(m + 1)]
                   for i in range(m + 1)]
        else:
            mat = np.eye(m + 1, dtype=complex)
        return ToeplitzOperator(m, mat, backend, SymbolFunction.constant(1))

    def entry(self, k: int, j: int):
        return self.matrix[k][j] if self.backend == "exact" else self.matrix[k, j]

    def compose(self, other: "ToeplitzOperator") -> "ToeplitzOperator":
        if self.m != other.m or self.backend != other.backend:
            raise ValueError("level/backend mismatch in composition")
        if self.backend == "double":
            return ToeplitzOperator(self.m, self.matrix @ other.matrix, "double")
        n = self.m + 1
        out = [[ExactScalar(0)] * n for _ in range(n)]
        for i in range(n):
            row = self.matrix[i]
            for l in range(n):
                a = row[l]
                if is_zero(a):
                    continue
                other_row = other.matrix[l]
                dst = out[i]
                for j in range(n):
                    b = other_row[j]
                    if not is_zero(b):
                        dst[j] = dst[j] + a * b
        return ToeplitzOperator(self.m, out, "exact")

    def __matmul__(self, other):
        return self.compose(other)

    def adjoint(self) -> "ToeplitzOperator":
        n = self.m + 1
        if self.backend == "double":
            # conjugate-transpose in the orthonormal basis, mapped back
            norms = np.array([s.to_complex().real for s in norms_squared(self.m)])
            mat = self.matrix
            adj = (np.conj(mat).T * norms[None, :]) / norms[:, None]
            return ToeplitzOperator(self.m, adj, "double")
        norms = norms_squared(self.m)
        out = [[(self.matrix[j][i].conjugate() * norms[i]) / norms[j]
                for i in range(n)] for j in range(n)]
        return ToeplitzOperator(self.m, out, "exact")

    def trace(self):
        if self.backend == "double":
            return complex(np.trace(self.matrix))
        acc = ExactScalar(0)
        for i in range(self.m + 1):
            acc = acc + self.matrix[i][i]
        return acc

    def orthonormal(self) -> np.ndarray:
        """Matrix in the orthonormal basis z^j/||z^j||, as a numpy array."""
        n = self.m + 1
        half = np.array([
            0.5 * (math.lgamma(j + 1) + math.lgamma(self.m - j + 1))
            for j in range(n)
        ])
        if self.backend == "double":
            base = np.asarray(self.matrix, dtype=complex)
        else:
            base = np.array([[self.matrix[k][j].to_complex() for j in range(n)]
                             for k in range(n)], dtype=complex)
        scale = np.exp(half[:, None] - half[None, :])
        return base * scale

    def to_json(self) -> dict:
        from .scalars import scalar_to_json

        if self.backend != "exact":
            raise ValueError("golden serialization is exact-backend only")
        return {
            "m": self.m,
            "backend": self.backend,
            "symbol": None if self.symbol is None else self.symbol.to_json(),
            "matrix": [[scalar_to_json(e) for e in row] for row in self.matrix],
        }


def toeplitz_matrix(f: SymbolFunction, m: int, backend: str = "exact") -> ToeplitzOperator:
    """T_f at level m: compression of multiplication by f to degree <= m."""
    n = m + 1
    if backend == "exact":
        mat = [[ExactScalar(0)] * n for _ in range(n)]
        C = f.denom_power
        fmp1 = math.factorial(m + 1)
        fCm1 = math.factorial(C + m + 1)
        for (a, b), co in f.numerator.items():
            for j in range(n):
                k = a + j - b
                if not (0 <= k <= m):
                    continue
                s = a + j
                val = Fraction(
                    math.factorial(s) * math.factorial(C + m - s) * fmp1,
                    fCm1 * math.factorial(k) * math.factorial(m - k),
                )
                mat[k][j] = mat[k][j] + co * val
        return ToeplitzOperator(m, mat, "exact", f)
    if backend == "double":
        mat = np.zeros((n, n), dtype=complex)
        C = f.denom_power
        lg = math.lgamma
        for (a, b), co in f.numerator.items():
            cof = co.to_complex()
            for j in range(n):
                k = a + j - b
                if not (0 <= k <= m):
                    continue
                s = a + j
                logv = (lg(s + 1) + lg(C + m - s + 1) + lg(m + 2)
                        - lg(C + m + 2) - lg(k + 1) - lg(m - k + 1))
                mat[k, j] += cof * math.exp(logv)
        return ToeplitzOperator(m, mat, "double", f)
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# covariant symbols, Berezin transform, twisted product
# ---------------------------------------------------------------------------

def covariant_symbol_exact(A: ToeplitzOperator, x: ExactPoint) -> ExactScalar:
    if A.backend != "exact":
        raise ValueError("exact covariant symbol needs an exact operator")
    z = _as_exact_point(x)
    zb = z.conjugate()
    m = A.m
    norms = norms_squared(m)
    num = ExactScalar(0)
    den = ExactScalar(0)
    zb_pows = [ExactScalar(1)]
    z_pows = [ExactScalar(1)]
    for _ in range(m):
        zb_pows.append(zb_pows[-1] * zb)
        z_pows.append(z_pows[-1] * z)
    for j in range(m + 1):
        cj = zb_pows[j] / norms[j]
        den = den + cj * z_pows[j]
        row_acc = ExactScalar(0)
        for k in range(m + 1):
            e = A.matrix[k][j]
            if not is_zero(e):
                row_acc = row_acc + e * z_pows[k]
        num = num + cj * row_acc
    return num / den


def coherent_unit_vector(x: complex, m: int) -> np.ndarray:
    """Unit coherent state at x in the orthonormal basis, stable in logs."""
    x = _as_complex_point(x)
    j = np.arange(m + 1)
    logbin = np.array([
        0.5 * (math.lgamma(m + 2) - math.lgamma(k + 1) - math.lgamma(m - k + 1)
               - math.log(m + 1))
        for k in j
    ])
    if x == 0:
        amp = np.where(j == 0, 0.0, -np.inf)
        phase = np.zeros(m + 1)
    else:
        amp = logbin + j * math.log(abs(x)) - 0.5 * m * math.log1p(abs(x) ** 2)
        phase = -j * np.angle(x)  # components go with conj(x)^j
    vec = np.exp(amp + 1j * phase)
    nrm = np.linalg.norm(vec)
    return vec / nrm


def covariant_symbol(A, x, m: Optional[int] = None) -> complex:
    """sigma(A)(x) for an operator (ToeplitzOperator or orthonormal ndarray)."""
    if isinstance(A, ToeplitzOperator):
        if A.backend == "exact" and isinstance(x, tuple):
            return covariant_symbol_exact(A, x)
        mat = A.orthonormal()
        m = A.m
    else:
        mat = np.asarray(A)
        if m is None:
            m = mat.shape[0] - 1
    eps = coherent_unit_vector(_as_complex_point(x), m)
    return complex(np.vdot(eps, mat @ eps))


def berezin_transform_m(f: SymbolFunction, x, m: int, route: str = "operator",
                        backend: str = "exact", quad=None):
    """Level-m Berezin transform of f at x.

    The operator route sigma(T_f)(x) is exact for exact points; the integral
    route evaluates (1/u_m) integral of v_m(x, .) f against the volume form
    by quadrature and is used as an independent cross-check.
    """
    if route == "operator":
        T = toeplitz_matrix(f, m, backend=backend)
        return covariant_symbol(T, x)
    if route == "integral":
        return _berezin_integral(f, _as_complex_point(x), m, quad or QuadratureGrid())
    raise ValueError(f"unknown route {route!r}")


def twisted_product_m(f: SymbolFunction, g: SymbolFunction, x, m: int,
                      route: str = "operator", backend: str = "exact", quad=None):
    """Q_m(f, g)(x) = sigma(T_f T_g)(x)."""
    if route == "operator":
        Tf = toeplitz_matrix(f, m, backend=backend)
        Tg = toeplitz_matrix(g, m, backend=backend)
        return covariant_symbol(Tf.compose(Tg), x)
    if route == "integral":
        return _twisted_integral(f, g, _as_complex_point(x), m, quad or QuadratureGrid(n_radial=48, n_theta=48))
    raise ValueError(f"unknown route {route!r}")


class QuadratureGrid:
    """Product quadrature on the chart: Gauss-Legendre radially, trapezoid in angle.

    Integrals against the volume form use t = u/(1-u), under which
    (1+t)^-2 dt dtheta becomes du dtheta on (0,1) x (0, 2pi).
    """

    def __init__(self, n_radial: int = 160, n_theta: int = 256):
        nodes, weights = np.polynomial.legendre.leggauss(n_radial)
        self.u = 0.5 * (nodes + 1.0)
        self.wu = 0.5 * weights
        self.theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        self.wt = 2.0 * np.pi / n_theta
        t = self.u / (1.0 - self.u)
        r = np.sqrt(t)
        self.points = r[:, None] * np.exp(1j * self.theta)[None, :]
        self.weights = (self.wu[:, None] * self.wt) * np.ones_like(self.theta)[None, :]

    def volume_integral(self, values: np.ndarray) -> complex:
        """Integrate values(y) against the volume form Omega."""
        return complex(np.sum(values * self.weights))


def _berezin_integral(f: SymbolFunction, x: complex, m: int, quad: QuadratureGrid) -> complex:
    u_m = (m + 1) / (2 * math.pi)
    pts = quad.points
    cos2 = np.empty(pts.shape)
    for idx in np.ndindex(pts.shape):
        cos2[idx] = chordal_cos2(x, complex(pts[idx]))
    fv = np.empty(pts.shape, dtype=complex)
    for idx in np.ndindex(pts.shape):
        fv[idx] = f.eval(complex(pts[idx]))
    return u_m * quad.volume_integral(cos2 ** m * fv)


def _kernel_ratio(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """B_m(alpha(a), alpha(b)) / u_m over broadcast arrays of chart points."""
    num = (1.0 + a * np.conj(b)) ** m
    den = ((1.0 + np.abs(a) ** 2) * (1.0 + np.abs(b) ** 2)) ** (m / 2.0)
    return num / den


def _twisted_integral(f: SymbolFunction, g: SymbolFunction, x: complex, m: int,
                      quad: QuadratureGrid) -> complex:
    u_m = (m + 1) / (2 * math.pi)
    pts = quad.points.ravel()
    w = quad.weights.ravel()
    fv = np.array([f.eval(complex(p)) for p in pts])
    gv = np.array([g.eval(complex(p)) for p in pts])
    kxy = _kernel_ratio(np.array([x]), pts, m)[0]
    kzx = _kernel_ratio(pts, np.array([x]), m)[:, ]
    kzx = _kernel_ratio(pts, np.array([x]), m).ravel() if kzx.ndim > 1 else kzx
    kyz = _kernel_ratio(pts[:, None], pts[None, :], m)
    left = (kxy * fv * w)
    right = (kzx * gv * w)
    return u_m ** 2 * complex(left @ kyz @ right)


# ---------------------------------------------------------------------------
# norms, traces, volume integrals
# ---------------------------------------------------------------------------

class PowerIterationStagnation(RuntimeError):
    pass


def operator_norm(A, tol: float = 1e-13, max_iter: int = 20000) -> float:
    """Spectral norm via power iteration on the Hermitian square.

    Deterministic ramp start vector; falls back to a full Hermitian
    eigensolve if the iteration stagnates before reaching ``tol``.
    """
    if isinstance(A, ToeplitzOperator):
        mat = A.orthonormal()
    else:
        mat = np.asarray(A, dtype=complex)
    n = mat.shape[0]
    gram = np.conj(mat.T) @ mat
    v = np.linspace(1.0, 2.0, n).astype(complex)
    v /= np.linalg.norm(v)
    lam = 0.0
    try:
        for it in range(max_iter):
            w = gram @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
            v = w / nw
            if it % 8 == 7:
                new_lam = float(np.real(np.vdot(v, gram @ v)))
                if lam > 0 and abs(new_lam - lam) <= tol * max(new_lam, 1e-300):
                    return math.sqrt(new_lam)
                lam = new_lam
        raise PowerIterationStagnation(f"no convergence in {max_iter} iterations")
    except PowerIterationStagnation:
        eigs = np.linalg.eigvalsh(gram)
        return math.sqrt(float(max(eigs[-1], 0.0)))


def trace(A: ToeplitzOperator):
    return A.trace()


def volume_integral_exact(f: SymbolFunction) -> ExactScalar:
    """Integral of f against the volume form, exact (2*pi times Beta sums)."""
    acc = ExactScalar(0)
    C = f.denom_power
    for (a, b), co in f.numerator.items():
        if a != b:
            continue
        if C - a < 1:
            raise ArithmeticError("non-integrable symbol term")
        beta = Fraction(math.factorial(a) * math.factorial(C - a),
                        math.factorial(C + 1))
        acc = acc + co * ExactScalar(2 * beta, 0, 1)
    return acc


def form_integral_exact(hessian: SymbolFunction) -> ExactScalar:
    """Integral of a (1,1)-form i*h dz^dzbar given its coefficient symbol h."""
    acc = ExactScalar(0)
    C = hessian.denom_power
    for (a, b), co in hessian.numerator.items():
        if a != b:
            continue
        if C - a < 2:
            raise ArithmeticError("form coefficient decays too slowly to integrate")
        beta = Fraction(math.factorial(a) * math.factorial(C - a - 2),
                        math.factorial(C - 1))
        acc = acc + co * ExactScalar(2 * beta, 0, 1)
    return acc


def form_integral_quadrature(hessian: SymbolFunction, quad: Optional[QuadratureGrid] = None) -> float:
    quad = quad or QuadratureGrid()
    pts = quad.points
    vals = np.empty(pts.shape, dtype=complex)
    for idx in np.ndindex(pts.shape):
        p = complex(pts[idx])
        vals[idx] = hessian.eval(p) * (1.0 + abs(p) ** 2) ** 2
    return float(np.real(quad.volume_integral(vals)))


# ---------------------------------------------------------------------------
# geometry feed for the formal side
# ---------------------------------------------------------------------------

def fs_potential_jet(x, order: int, backend: str = "exact") -> Jet:
    """Jet of log(1+z zbar) around a chart point, constant term dropped.

    Constant terms never enter the diastasis or the twisted phases, and
    dropping them keeps the exact backend inside the rationals.
    """
    if backend == "exact":
        x0 = _as_exact_point(x) if isinstance(x, tuple) else _as_exact_point((x, 0))
        one = ExactScalar(1)
    else:
        x0 = _as_complex_point(x)
        one = 1 + 0j
    xb = x0.conjugate()
    a = one + x0 * xb
    vars_, kinds = ("w", "wbar"), ("h", "a")
    zero = one * 0
    w = Jet.coordinate("w", vars_, kinds, order, one)
    wb = Jet.coordinate("wbar", vars_, kinds, order, one)
    g = (w.scale(xb) + wb.scale(x0) + w * wb) * (one / a if backend == "double" else ExactScalar(1) / a)
    return (g + 1).log()


def fs_formal_potential(x, jet_order: int, nu_trunc: int, backend: str = "exact") -> FormalPotential:
    """Formal potential (1/nu) log(1+z zbar) as jets; higher orders zero."""
    lead = fs_potential_jet(x, jet_order, backend)
    coeffs = [lead] + [lead.zero_like() for _ in range(nu_trunc - (-1) - 1)]
    return FormalPotential(NuSeries(-1, coeffs, nu_trunc))


def flat_formal_potential(jet_order: int, nu_trunc: int, backend: str = "exact") -> FormalPotential:
    one = ExactScalar(1) if backend == "exact" else 1 + 0j
    vars_, kinds = ("w", "wbar"), ("h", "a")
    lead = Jet(vars_, kinds, jet_order, {(1, 1): one}, one * 0)
    coeffs = [lead] + [lead.zero_like() for _ in range(nu_trunc)]
    return FormalPotential(NuSeries(-1, coeffs, nu_trunc))


def volume_density_jet(x, order: int, backend: str = "exact", flat: bool = False) -> Jet:
    """e^theta relative to i dz^dzbar around x, constant factor dropped."""
    if flat:
        one = ExactScalar(1) if backend == "exact" else 1 + 0j
        return Jet.constant(one, ("w", "wbar"), ("h", "a"), order, one * 0)
    pot = fs_potential_jet(x, order, backend)
    e = pot.exp()  # (1+z zbar)/(1+|x|^2), constant-normalized
    return (e * e).invert()


def theta_hessian_symbol() -> SymbolFunction:
    """d_z d_zbar theta for theta = -2 log(1+z zbar): -2 (1+z zbar)^-2."""
    return SymbolFunction.from_terms([(0, 0, 2, -2)])


def metric_hessian_symbol() -> SymbolFunction:
    """d_z d_zbar log(1+z zbar) = (1+z zbar)^-2."""
    return SymbolFunction.from_terms([(0, 0, 2, 1)])


def kodaira_pullback(m: int) -> ExactScalar:
    """Scale factor of the level-m coherent-map pullback of the chart form.

    The pullback potential is log sum_j |z^j|^2/||z^j||^2; by rotation
    invariance its mixed Hessian at 0 equals F'(0)/F(0) for
    F(t) = sum_j t^j/||z^j||^2, an exact rational.  Equals m on the nose.
    """
    norms = norms_squared(m)
    if m < 1:
        raise ValueError("needs m >= 1")
    return norms[0] / norms[1]


def kodaira_series(m_values: Sequence[int]) -> List[Tuple[int, ExactScalar]]:
    return [(m, kodaira_pullback(m)) for m in m_values]


def sphere_grid(n: int = 2000) -> np.ndarray:
    """Quasi-uniform Fibonacci sphere grid mapped to the affine chart."""
    golden = (1 + 5 ** 0.5) / 2
    k = np.arange(n)
    cos_phi = 1 - 2 * (k + 0.5) / n
    phi = np.arccos(np.clip(cos_phi, -1, 1))
    theta = 2 * np.pi * k / golden
    # stereographic projection from the north pole; the pole itself is
    # handled separately by value_at_infinity in sup-norm computations
    half = phi / 2
    r = np.tan(half)
    return r * np.exp(1j * theta)
