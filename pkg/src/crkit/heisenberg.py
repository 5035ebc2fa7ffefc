"""Frame calculus on the Heisenberg group.

Coordinates are ``z^a = x^a + i y^a`` and ``t``; real axes are ordered
``(x_1..x_n, y_1..y_n, t)``.  The frame is

    eta_a    = d/dz^a    + i conj(z^a) d/dt
    eta_abar = d/dzbar^a - i z^a       d/dt

and the Tanaka-Webster connection is flat, so covariant derivatives are
iterated frame derivatives: ``u_{AB} = eta_B eta_A u``.

Two routes evaluate every operator: a closed-form route on a small sympy
catalogue (exact derivatives) and a grid route with second-order central
differences.  Grid values within two cells of the box boundary are never
used.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .errors import DomainError

MARGIN = 2
DECAY_TOL = 1e-8
REEB = "0"


class DecayWarning(UserWarning):
    """Integrand is not negligible on the box boundary."""


@dataclass(frozen=True)
class HeisenbergPoint:
    z: tuple
    t: float = 0.0

    def __post_init__(self):
        z = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.z, dtype=np.complex128)))
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in z) or not math.isfinite(self.t):
            raise DomainError("point has non-finite coordinates")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return len(self.z)

    def real_coords(self) -> np.ndarray:
        z = np.array(self.z)
        return np.concatenate([z.real, z.imag, [self.t]])


# -- symbols ------------------------------------------------------------------

@lru_cache(maxsize=None)
def coordinates(n: int):
    xs = sp.symbols(f"x1:{n + 1}", real=True)
    ys = sp.symbols(f"y1:{n + 1}", real=True)
    t = sp.Symbol("t", real=True)
    return xs, ys, t


def _check_index(n: int, alpha: int) -> None:
    if not 0 <= alpha < n:
        raise DomainError(f"frame index {alpha} out of range for n={n}")


def _frame_expr(expr, n: int, alpha: int, barred: bool):
    xs, ys, t = coordinates(n)
    x, y = xs[alpha], ys[alpha]
    if barred:
        return (sp.diff(expr, x) + sp.I * sp.diff(expr, y)) / 2 - sp.I * (x + sp.I * y) * sp.diff(expr, t)
    return (sp.diff(expr, x) - sp.I * sp.diff(expr, y)) / 2 + sp.I * (x - sp.I * y) * sp.diff(expr, t)


@dataclass(frozen=True)
class ClosedFormFunction:
    """A member of the closed-form catalogue, held as a sympy expression."""

    n: int
    expr: sp.Expr
    label: str = "expr"

    def __add__(self, other):
        other = _lift(other, self.n)
        return ClosedFormFunction(self.n, self.expr + other.expr, f"({self.label}+{other.label})")

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other, self.n)
        return ClosedFormFunction(self.n, self.expr - other.expr, f"({self.label}-{other.label})")

    def __mul__(self, other):
        other = _lift(other, self.n)
        return ClosedFormFunction(self.n, self.expr * other.expr, f"{self.label}*{other.label}")

    __rmul__ = __mul__

    def frame(self, alpha: int, barred: bool = False) -> "ClosedFormFunction":
        _check_index(self.n, alpha)
        tag = f"eta{alpha + 1}{'bar' if barred else ''}"
        return ClosedFormFunction(self.n, _frame_expr(self.expr, self.n, alpha, barred), f"{tag}({self.label})")

    def reeb(self) -> "ClosedFormFunction":
        return ClosedFormFunction(self.n, sp.diff(self.expr, coordinates(self.n)[2]), f"T({self.label})")

    def apply(self, index) -> "ClosedFormFunction":
        if index == REEB:
            return self.reeb()
        alpha, barred = index
        return self.frame(alpha, barred)

    @property
    def numeric(self) -> Callable:
        return _lambdify(self.n, self.expr)

    def __call__(self, p: HeisenbergPoint) -> complex:
        if p.n != self.n:
            raise DomainError("point dimension does not match function")
        return complex(self.numeric(*p.real_coords()))

    def is_zero(self) -> bool:
        return sp.simplify(sp.expand(self.expr)) == 0

    def sample(self, grid: "GridSpec") -> "GridFunction":
        if grid.n != self.n:
            raise DomainError("grid dimension does not match function")
        axes = grid.mesh()
        vals = np.asarray(self.numeric(*axes), dtype=np.complex128)
        vals = np.broadcast_to(vals, grid.shape).copy()
        return GridFunction(grid, vals)


@lru_cache(maxsize=512)
def _lambdify_cached(n: int, expr):
    xs, ys, t = coordinates(n)
    return sp.lambdify((*xs, *ys, t), expr, modules="numpy")


def _lambdify(n: int, expr):
    return _lambdify_cached(n, expr)


def _lift(f, n: int) -> ClosedFormFunction:
    if isinstance(f, ClosedFormFunction):
        if f.n != n:
            raise DomainError("catalogue functions live on different groups")
        return f
    return ClosedFormFunction(n, sp.nsimplify(f) if isinstance(f, (int, float)) else sp.sympify(f), str(f))


# catalogue constructors

def constant(n: int, value) -> ClosedFormFunction:
    return ClosedFormFunction(n, sp.sympify(value), str(value))


def z_coord(n: int, alpha: int, conjugate: bool = False) -> ClosedFormFunction:
    _check_index(n, alpha)
    xs, ys, _ = coordinates(n)
    sign = -1 if conjugate else 1
    return ClosedFormFunction(n, xs[alpha] + sign * sp.I * ys[alpha], f"{'zbar' if conjugate else 'z'}{alpha + 1}")


def re_z(n: int, alpha: int) -> ClosedFormFunction:
    _check_index(n, alpha)
    return ClosedFormFunction(n, coordinates(n)[0][alpha], f"Re z{alpha + 1}")


def t_coord(n: int) -> ClosedFormFunction:
    return ClosedFormFunction(n, coordinates(n)[2], "t")


def abs_z2(n: int) -> ClosedFormFunction:
    xs, ys, _ = coordinates(n)
    return ClosedFormFunction(n, sum(x**2 + y**2 for x, y in zip(xs, ys)), "|z|^2")


def gaussian(n: int, a: float = 1.0, b: float = 1.0) -> ClosedFormFunction:
    """``exp(-a |z|^2 - b t^2)``."""
    if a <= 0 or b <= 0:
        raise DomainError("gaussian needs positive a and b")
    xs, ys, t = coordinates(n)
    r2 = sum(x**2 + y**2 for x, y in zip(xs, ys))
    a_s, b_s = sp.nsimplify(a), sp.nsimplify(b)
    return ClosedFormFunction(n, sp.exp(-a_s * r2 - b_s * t**2), f"gauss({a},{b})")


def polynomial(n: int, expr: str) -> ClosedFormFunction:
    """Polynomial in ``z1.., zb1.. (conjugates), t`` given as a string."""
    xs, ys, t = coordinates(n)
    names = {"t": t}
    for k in range(n):
        names[f"z{k + 1}"] = xs[k] + sp.I * ys[k]
        names[f"zb{k + 1}"] = xs[k] - sp.I * ys[k]
    e = sp.expand(sp.sympify(expr, locals=names))
    if not e.is_polynomial(*xs, *ys, t):
        raise DomainError("expression is not a polynomial")
    return ClosedFormFunction(n, e, expr)


CATALOGUE: dict[str, Callable[..., ClosedFormFunction]] = {
    "abs_z2": abs_z2,
    "gaussian": gaussian,
    "t": t_coord,
}


def catalogue_function(name: str, n: int, **params) -> ClosedFormFunction:
    if name not in CATALOGUE:
        raise DomainError(f"unknown catalogue function {name!r}; choose from {sorted(CATALOGUE)}")
    return CATALOGUE[name](n, **params)


# -- grids ---------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice; ``axes[k] = (min, max, samples)`` in real-axis order."""

    n: int
    axes: tuple

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(m)) for lo, hi, m in self.axes)
        if len(axes) != 2 * self.n + 1:
            raise DomainError(f"need {2 * self.n + 1} axes, got {len(axes)}")
        for lo, hi, m in axes:
            if m < 2 * MARGIN + 1:
                raise DomainError(f"need at least {2 * MARGIN + 1} samples per axis")
            if not hi > lo:
                raise DomainError("axis spacing must be positive")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def box(cls, n: int, samples: int, half_z: float = 5.0, half_t: float = 7.0) -> "GridSpec":
        return cls(n, tuple([(-half_z, half_z, samples)] * (2 * n) + [(-half_t, half_t, samples)]))

    @property
    def shape(self) -> tuple:
        return tuple(m for _, _, m in self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([(hi - lo) / (m - 1) for lo, hi, m in self.axes])

    def coords(self, k: int) -> np.ndarray:
        lo, hi, m = self.axes[k]
        return np.linspace(lo, hi, m)

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.coords(k) for k in range(len(self.axes))], indexing="ij", sparse=True)

    def refine(self) -> "GridSpec":
        """Halve every spacing; old nodes remain nodes."""
        return GridSpec(self.n, tuple((lo, hi, 2 * m - 1) for lo, hi, m in self.axes))

    def interior(self, margin: int = MARGIN) -> tuple:
        return tuple(slice(margin, m - margin) for m in self.shape)

    def locate(self, p: HeisenbergPoint, margin: int = MARGIN) -> tuple:
        """Node index of ``p``; the point must be a node at least ``margin`` cells inside."""
        if p.n != self.n:
            raise DomainError("point dimension does not match grid")
        idx = []
        for (lo, _, m), h, c in zip(self.axes, self.spacing, p.real_coords()):
            k = (c - lo) / h
            kr = int(round(k))
            if abs(k - kr) > 1e-9:
                raise DomainError("point is not a grid node")
            if not margin <= kr <= m - 1 - margin:
                raise DomainError("point lies outside the grid interior")
            idx.append(kr)
        return tuple(idx)

    def point(self, idx: Sequence[int]) -> HeisenbergPoint:
        c = np.array([self.coords(k)[i] for k, i in enumerate(idx)])
        n = self.n
        return HeisenbergPoint(c[:n] + 1j * c[n : 2 * n], c[-1])


@dataclass(frozen=True)
class GridFunction:
    grid: GridSpec
    values: np.ndarray
    margin: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise DomainError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def spacing(self) -> np.ndarray:
        return self.grid.spacing

    def __add__(self, other):
        return GridFunction(self.grid, self.values + other.values, max(self.margin, other.margin))

    def __mul__(self, s):
        if isinstance(s, GridFunction):
            return GridFunction(self.grid, self.values * s.values, max(self.margin, s.margin))
        return GridFunction(self.grid, self.values * s, self.margin)

    __rmul__ = __mul__

    def frame(self, alpha: int, barred: bool = False) -> "GridFunction":
        _check_index(self.n, alpha)
        n = self.n
        h = self.spacing
        v = self.values
        dx = np.gradient(v, h[alpha], axis=alpha)
        dy = np.gradient(v, h[n + alpha], axis=n + alpha)
        dt = np.gradient(v, h[2 * n], axis=2 * n)
        mesh = self.grid.mesh()
        x, y = mesh[alpha], mesh[n + alpha]
        if barred:
            out = 0.5 * (dx + 1j * dy) - 1j * (x + 1j * y) * dt
        else:
            out = 0.5 * (dx - 1j * dy) + 1j * (x - 1j * y) * dt
        return GridFunction(self.grid, out, self.margin + 1)

    def reeb(self) -> "GridFunction":
        n = self.n
        return GridFunction(self.grid, np.gradient(self.values, self.spacing[2 * n], axis=2 * n), self.margin + 1)

    def apply(self, index) -> "GridFunction":
        if index == REEB:
            return self.reeb()
        alpha, barred = index
        return self.frame(alpha, barred)

    def __call__(self, p: HeisenbergPoint) -> complex:
        return complex(self.values[self.grid.locate(p, max(MARGIN, self.margin))])

    def boundary_ratio(self) -> float:
        v = np.abs(self.values)
        top = float(v.max())
        if top == 0.0:
            return 0.0
        edge = 0.0
        for k in range(v.ndim):
            edge = max(edge, float(np.take(v, 0, axis=k).max()), float(np.take(v, -1, axis=k).max()))
        return edge / top


Function = ClosedFormFunction | GridFunction


# -- pointwise operators ------------------------------------------------------------

def frame_apply(alpha: int, barred: bool, f: Function, p: HeisenbergPoint) -> complex:
    """``(eta_a f)(p)``, or ``(eta_abar f)(p)`` when ``barred``."""
    return f.frame(alpha, barred)(p)


def covariant_second(f: Function, first, second, p: HeisenbergPoint) -> complex:
    """``f_{AB}(p) = (eta_B eta_A f)(p)``.

    Indices are ``(alpha, barred)`` pairs or :data:`REEB` for the Reeb slot.
    """
    return f.apply(first).apply(second)(p)


def sub_laplacian_function(f: Function) -> Function:
    out = None
    for a in range(f.n):
        term = f.frame(a, False).frame(a, True) + f.frame(a, True).frame(a, False)
        out = term if out is None else out + term
    return out


def sub_laplacian(f: Function, p: HeisenbergPoint) -> float:
    """``sum_a (f_{a abar} + f_{abar a})`` at ``p``; real for real ``f``."""
    return sub_laplacian_function(f)(p).real


def gradient_pairing(u: Function, v: Function) -> Function:
    """``<grad_b u, grad_b v> = sum_a (eta_a u)(eta_abar v) + (eta_abar u)(eta_a v)``."""
    out = None
    for a in range(u.n):
        term = u.frame(a, False) * v.frame(a, True) + u.frame(a, True) * v.frame(a, False)
        out = term if out is None else out + term
    return out


def horizontal_gradient_norm(u: Function, p: HeisenbergPoint) -> float:
    """``|grad_b u|^2`` at ``p``; equals ``2 sum |eta_a u|^2`` for real ``u``."""
    return gradient_pairing(u, u)(p).real


def commutator(f: Function, lam: int, mu: int) -> Function:
    """``[eta_lam, eta_mubar] f``."""
    return f.frame(mu, True).frame(lam, False) - f.frame(lam, False).frame(mu, True)


# -- volume -----------------------------------------------------------------------

def _wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            if set(ka) & set(kb):
                continue
            idx = ka + kb
            inversions = sum(1 for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] > idx[j])
            key = tuple(sorted(idx))
            out[key] = out.get(key, 0) + (-1) ** inversions * ca * cb
    return {k: sp.expand(v) for k, v in out.items() if sp.expand(v) != 0}


@lru_cache(maxsize=None)
def volume_constant(n: int) -> int:
    """Density of ``theta ^ dtheta^n`` against ``dx_1 dy_1 ... dx_n dy_n dt``.

    ``theta = dt + i sum (z dzbar - zbar dz)`` is expanded in the real basis
    and wedged out exactly.
    """
    if n < 1:
        raise DomainError("n must be positive")
    xs, ys, _ = coordinates(n)
    # basis order: dx_1, dy_1, ..., dx_n, dy_n, dt
    dxk = lambda k: 2 * k
    dyk = lambda k: 2 * k + 1
    dtk = 2 * n
    theta: dict = {(dtk,): sp.Integer(1)}
    for k in range(n):
        z, zb = xs[k] + sp.I * ys[k], xs[k] - sp.I * ys[k]
        # dz = dx + i dy, dzbar = dx - i dy
        cx = sp.I * (z - zb)
        cy = sp.I * (z * (-sp.I) - zb * sp.I)
        theta[(dxk(k),)] = sp.expand(cx)
        theta[(dyk(k),)] = sp.expand(cy)
    theta = {k: v for k, v in theta.items() if v != 0}
    # exterior derivative of a 1-form with polynomial coefficients
    syms = []
    for k in range(n):
        syms += [xs[k], ys[k]]
    syms.append(coordinates(n)[2])
    dtheta: dict = {}
    for (j,), coeff in theta.items():
        for i, s in enumerate(syms):
            c = sp.diff(coeff, s)
            if c != 0:
                dtheta = _merge(dtheta, _wedge({(i,): c}, {(j,): sp.Integer(1)}))
    form = theta
    for _ in range(n):
        form = _wedge(form, dtheta)
    top = tuple(range(2 * n + 1))
    value = sp.simplify(form.get(top, 0))
    if not value.is_number or value == 0:
        raise DomainError("volume form is not a nonzero constant multiple of the coordinate density")
    return int(value)


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = sp.expand(out.get(k, 0) + v)
    return {k: v for k, v in out.items() if v != 0}


def volume_integrate(f: GridFunction, interior: bool = False) -> complex | float:
    """``int f theta ^ dtheta^n`` by the trapezoidal rule.

    A :class:`DecayWarning` is issued when the boundary values exceed
    ``1e-8`` of the maximum.
    """
    ratio = f.boundary_ratio()
    if ratio > DECAY_TOL:
        warnings.warn(f"integrand boundary/max ratio {ratio:.2e} exceeds {DECAY_TOL:g}", DecayWarning, stacklevel=2)
    vals = f.values
    weights = [np.full(m, 1.0) for m in f.grid.shape]
    for w in weights:
        w[0] = w[-1] = 0.5
    if interior:
        m = max(MARGIN, f.margin)
        for w in weights:
            w[:m] = 0.0
            w[len(w) - m :] = 0.0
    total = vals
    for k in reversed(range(vals.ndim)):
        total = np.tensordot(total, weights[k], axes=([k], [0]))
    cell = float(np.prod(f.spacing))
    value = complex(total) * cell * volume_constant(f.n)
    return value.real if np.isrealobj(vals) else value


# -- Yamabe quotient ------------------------------------------------------------------

def yamabe_exponent(n: int) -> float:
    return 2.0 + 2.0 / n


def yamabe_quotient(u: GridFunction, rho: float = 0.0) -> float:
    """``int (b_n |grad_b u|^2 + rho u^2) / (int |u|^p)^(2/p)`` with ``b_n = p = 2 + 2/n``."""
    vals = np.asarray(u.values)
    if not np.any(vals):
        raise DomainError("quotient of the zero function")
    if u.boundary_ratio() > DECAY_TOL:
        raise DomainError("function does not decay inside the box; enlarge the box")
    n = u.n
    p = yamabe_exponent(n)
    grad = gradient_pairing(u, u)
    num_vals = p * grad.values.real + rho * np.abs(vals) ** 2
    num = volume_integrate(GridFunction(u.grid, num_vals, grad.margin), interior=True)
    den = volume_integrate(GridFunction(u.grid, np.abs(vals) ** p, grad.margin), interior=True)
    return float(num / den ** (2.0 / p))


def gaussian_grid(grid: GridSpec, a: float, b: float) -> GridFunction:
    mesh = grid.mesh()
    n = grid.n
    r2 = sum(mesh[k] ** 2 for k in range(2 * n))
    return GridFunction(grid, np.exp(-a * r2 - b * mesh[2 * n] ** 2))


def _axis_weights(m: int) -> np.ndarray:
    w = np.ones(m)
    w[:MARGIN] = 0.0
    w[m - MARGIN :] = 0.0
    return w


def gaussian_quotient(grid: GridSpec, a: float, b: float, rho: float = 0.0) -> float:
    """:func:`yamabe_quotient` of :func:`gaussian_grid` computed axis by axis.

    The sampled gaussian is a product of one-dimensional factors and each
    difference operator acts along a single axis, so every grid sum in the
    quotient factors into products of one-dimensional sums.  The result is
    the same discrete quantity at a cost linear in the samples per axis.
    """
    if a <= 0 or b <= 0:
        raise DomainError("gaussian needs positive a and b")
    n = grid.n
    p = yamabe_exponent(n)
    h = grid.spacing
    g, dg, w, s = [], [], [], []
    for k in range(2 * n + 1):
        c = b if k == 2 * n else a
        sk = grid.coords(k)
        gk = np.exp(-c * sk**2)
        g.append(gk)
        dg.append(np.gradient(gk, h[k]))
        w.append(_axis_weights(len(sk)))
        s.append(sk)
        edge = max(gk[0], gk[-1]) / gk.max()
        if edge > DECAY_TOL:
            raise DomainError("function does not decay inside the box; enlarge the box")

    def total(factors: dict) -> float:
        # product over axes of sum(w_k * factor_k), default factor g_k^2
        out = 1.0
        for k in range(2 * n + 1):
            out *= float(np.sum(w[k] * factors.get(k, g[k] ** 2)))
        return out

    tt = 2 * n
    grad = 0.0
    for al in range(n):
        x, y = al, n + al
        grad += 0.25 * total({x: dg[x] ** 2}) + 0.25 * total({y: dg[y] ** 2})
        grad += total({y: s[y] ** 2 * g[y] ** 2, tt: dg[tt] ** 2}) + total({x: s[x] ** 2 * g[x] ** 2, tt: dg[tt] ** 2})
        grad += total({x: g[x] * dg[x], y: s[y] * g[y] ** 2, tt: g[tt] * dg[tt]})
        grad -= total({y: g[y] * dg[y], x: s[x] * g[x] ** 2, tt: g[tt] * dg[tt]})
    grad *= 2.0
    l2 = total({})
    lp = total({k: g[k] ** p for k in range(2 * n + 1)})
    cell = float(np.prod(h)) * volume_constant(n)
    return float((p * grad + rho * l2) * cell / (lp * cell) ** (2.0 / p))


def golden_section(f: Callable[[float], float], lo: float, hi: float, iterations: int = 40) -> tuple[float, float]:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - inv * (hi - lo), lo + inv * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - inv * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv * (hi - lo)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


@dataclass
class GaussianMinimum:
    quotient: float
    a: float
    b: float
    evaluations: int
    history: list = field(default_factory=list)

    @property
    def interior(self) -> bool:
        return bool(self.history and self.history[-1].get("interior", False))


def minimize_gaussian(
    grid: GridSpec,
    rho: float = 0.0,
    a_range: tuple = (1.0, 3.0),
    b_range: tuple = (0.5, 2.0),
    start: tuple = (1.0, 1.0),
    iterations: int = 40,
    restarts: int = 1,
    separable: bool = True,
) -> GaussianMinimum:
    """Coordinate-wise golden-section search of the quotient over ``exp(-a|z|^2 - b t^2)``.

    ``separable=False`` evaluates every trial on the full lattice instead of
    through :func:`gaussian_quotient`; both give the same numbers.
    """
    count = 0

    def q(a, b):
        nonlocal count
        count += 1
        if separable:
            return gaussian_quotient(grid, a, b, rho)
        return yamabe_quotient(gaussian_grid(grid, a, b), rho)

    a, b = start
    best = q(a, b)
    history = []
    for _ in range(restarts + 1):
        a, qa = golden_section(lambda s: q(s, b), *a_range, iterations)
        b, qb = golden_section(lambda s: q(a, s), *b_range, iterations)
        best = qb
        tol = 1e-6
        interior = (a_range[0] + tol < a < a_range[1] - tol) and (b_range[0] + tol < b < b_range[1] - tol)
        history.append({"a": a, "b": b, "quotient": qb, "interior": interior})
    return GaussianMinimum(best, a, b, count, history)


def observed_order(errors: Sequence[float], ratio: float = 2.0, floor: float = 1e-12) -> float:
    """``log_ratio(e_k / e_{k+1})`` for the last pair; ``inf`` when the error is at round-off."""
    e1, e2 = float(errors[-2]), float(errors[-1])
    if e1 <= floor and e2 <= floor:
        return math.inf
    if e2 <= floor:
        return math.inf
    return math.log(e1 / e2) / math.log(ratio)


def richardson_order(values: Sequence[float], ratio: float = 2.0) -> float:
    """Convergence order from three successive refinements of a scalar."""
    q1, q2, q3 = (float(v) for v in values[-3:])
    return observed_order([abs(q1 - q2), abs(q2 - q3)], ratio)


def dilate(f: ClosedFormFunction, r: float) -> ClosedFormFunction:
    """``f o delta_r`` with ``delta_r(z, t) = (r z, r^2 t)``."""
    xs, ys, t = coordinates(f.n)
    r_s = sp.nsimplify(r)
    subs = {s: r_s * s for s in (*xs, *ys)}
    subs[t] = r_s**2 * t
    return ClosedFormFunction(f.n, f.expr.subs(subs, simultaneous=True), f"{f.label}@{r}")


def heisenberg_multiply(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    """Group law ``(z, t)(w, s) = (z + w, t + s + 2 Im <z, w>)``, which leaves the frame invariant."""
    z, w = np.array(p.z), np.array(q.z)
    return HeisenbergPoint(z + w, p.t + q.t + 2.0 * float(np.imag(np.vdot(w, z))))

