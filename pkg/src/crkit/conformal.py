"""CR-conformal and D-homothetic transformation laws on the Heisenberg base.

For ``theta~ = e^{2u} theta`` over the flat Heisenberg group (zero torsion
and curvature) the transformed torsion and Ricci tensor, in the transformed
coframe, are

    A~_{ab}         = e^{-2u} (i u_{ab} - 2i u_a u_b)
    e^{2u} R~_{l mbar} = -(n+2)(u_{l mbar} + u_{mbar l})
                         - delta_{l m} (Delta_b u + 4(n+1) sum_a u_a u_abar)

and the scalar curvature is taken as the trace of ``R~``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .heisenberg import ClosedFormFunction, HeisenbergPoint, abs_z2, sub_laplacian_function
from .tensor import HermitianMatrix, TorsionMatrix

REAL_TOL = 1e-12


@dataclass(frozen=True)
class ConformalFactor:
    u: ClosedFormFunction

    @property
    def n(self) -> int:
        return self.u.n


@dataclass(frozen=True)
class TransformedPointData:
    point: HeisenbergPoint
    torsion: TorsionMatrix
    ricci: HermitianMatrix
    scalar: float
    webster_scale: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        tr = float(np.real(np.trace(self.ricci.entries)))
        if abs(tr - self.scalar) > 1e-12 * max(1.0, abs(tr)):
            raise DomainError("scalar curvature is not the trace of the Ricci tensor")

    @property
    def traceless_ricci(self) -> np.ndarray:
        n = self.ricci.n
        return self.ricci.entries - self.scalar / n * np.eye(n)

    @property
    def traceless_residual(self) -> float:
        return float(np.max(np.abs(self.traceless_ricci)))

    def to_dict(self) -> dict:
        def cplx(m):
            return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]

        return {
            "z": [[v.real, v.imag] for v in self.point.z],
            "t": self.point.t,
            "torsion": cplx(self.torsion.entries),
            "ricci": cplx(self.ricci.entries),
            "scalar": self.scalar,
            "traceless_residual": self.traceless_residual,
            "webster_scale": self.webster_scale,
            **self.metadata,
        }


def _factor(u) -> ConformalFactor:
    return u if isinstance(u, ConformalFactor) else ConformalFactor(u)


def _real_value(f: ClosedFormFunction, p: HeisenbergPoint) -> float:
    v = f(p)
    if abs(v.imag) > REAL_TOL * max(1.0, abs(v.real)):
        raise DomainError("conformal factor must be real valued")
    return v.real


def transform_torsion(u, p: HeisenbergPoint) -> TorsionMatrix:
    u = _factor(u).u
    n = u.n
    u0 = _real_value(u, p)
    first = [u.frame(a, False) for a in range(n)]
    d1 = np.array([f(p) for f in first])
    d2 = np.array([[first[a].frame(b, False)(p) for b in range(n)] for a in range(n)])
    a_t = np.exp(-2.0 * u0) * (1j * d2 - 2j * np.outer(d1, d1))
    return TorsionMatrix(0.5 * (a_t + a_t.T))


def _displayed_scalar(n: int, lap: float, grad2: float) -> float:
    """The alternative scalar law with ``4(n+1)`` on the gradient term, kept for comparison."""
    return -2.0 * (n + 1) * lap - 4.0 * (n + 1) * grad2


def transform_ricci_scalar(u, p: HeisenbergPoint) -> TransformedPointData:
    u = _factor(u).u
    n = u.n
    u0 = _real_value(u, p)
    hol = [u.frame(a, False) for a in range(n)]
    anti = [u.frame(a, True) for a in range(n)]
    # u_{l mbar} = eta_mbar eta_l u
    mixed = np.array([[hol[l].frame(m, True)(p) for m in range(n)] for l in range(n)])
    mixed_rev = np.array([[anti[m].frame(l, False)(p) for m in range(n)] for l in range(n)])
    lap = float(np.real(sub_laplacian_function(u)(p)))
    grad2 = float(np.real(sum(hol[a](p) * anti[a](p) for a in range(n))))
    scaled = -(n + 2) * (mixed + mixed_rev) - np.eye(n) * (lap + 4.0 * (n + 1) * grad2)
    ricci = np.exp(-2.0 * u0) * scaled
    ricci = 0.5 * (ricci + ricci.conj().T)
    scalar = float(np.real(np.trace(ricci)))
    torsion = transform_torsion(u, p)
    meta = {"scalar_displayed_formula": float(np.exp(-2.0 * u0) * _displayed_scalar(n, lap, grad2))}
    return TransformedPointData(p, torsion, HermitianMatrix(ricci), scalar, float(np.exp(2.0 * u0)), meta)


def example_closed_forms(n: int, z: Sequence[complex]) -> dict:
    """Reference values for ``u = |z|^2`` written out by hand."""
    z = np.asarray(z, dtype=np.complex128)
    r2 = float(np.sum(np.abs(z) ** 2))
    decay = np.exp(-2.0 * r2)
    return {
        "torsion": -2j * np.outer(np.conj(z), np.conj(z)) * decay,
        "ricci": -4.0 * (n + 1) * (1.0 + r2) * decay * np.eye(n),
        "scalar": -4.0 * n * (n + 1) * (1.0 + r2) * decay,
    }


@dataclass(frozen=True)
class ScalarWitness:
    points: list
    scalars: list
    spread: float
    traceless_residual: float
    nonconstant: bool
    pseudo_einstein: bool
    consequence: str

    def to_dict(self) -> dict:
        return {
            "kind": "nonconstant-scalar",
            "points": self.points,
            "scalars": self.scalars,
            "spread": self.spread,
            "traceless_residual": self.traceless_residual,
            "nonconstant": self.nonconstant,
            "pseudo_einstein": self.pseudo_einstein,
            "consequence": self.consequence,
        }


CONSEQUENCE = (
    "scalar curvature of the transformed structure varies although it is pseudo-Einstein, "
    "so the divergence of the transformed torsion cannot vanish"
)


def as_point(p) -> HeisenbergPoint:
    """Accept a point, a ``{"z": ..., "t": ...}`` mapping, or a bare ``z`` vector (``t = 0``)."""
    if isinstance(p, HeisenbergPoint):
        return p
    if isinstance(p, dict):
        return HeisenbergPoint(_complex_list(p["z"]), p.get("t", 0.0))
    return HeisenbergPoint(_complex_list(p))


def _complex_list(z) -> list:
    out = []
    for v in z:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise DomainError("complex entries are written as [re, im]")
            out.append(complex(v[0], v[1]))
        else:
            out.append(complex(v))
    return out


def nonconstant_scalar_witness(points: Iterable, n: int | None = None, u=None) -> ScalarWitness:
    pts = [as_point(p) for p in points]
    if len(pts) < 2:
        raise DomainError("inconclusive: need at least two points")
    n = n or pts[0].n
    radii = {round(float(np.sum(np.abs(np.array(p.z)) ** 2)), 12) for p in pts}
    if len(radii) < 2:
        raise DomainError("inconclusive: all points have the same |z|")
    u = abs_z2(n) if u is None else u
    data = [transform_ricci_scalar(u, p) for p in pts]
    scalars = [d.scalar for d in data]
    spread = max(scalars) - min(scalars)
    top = max(abs(s) for s in scalars)
    resid = max(d.traceless_residual for d in data)
    nonconstant = spread > 1e-6 * top
    pe = resid <= 1e-12 * max(1.0, top)
    return ScalarWitness(
        points=[{"z": [[v.real, v.imag] for v in p.z], "t": p.t} for p in pts],
        scalars=scalars,
        spread=spread,
        traceless_residual=resid,
        nonconstant=nonconstant,
        pseudo_einstein=pe,
        consequence=CONSEQUENCE if (nonconstant and pe) else "inconclusive",
    )


# -- D-homothety ------------------------------------------------------------------

@dataclass(frozen=True)
class HomotheticBundle:
    """Curvature data of a pseudo-Hermitian structure sampled at some points.

    ``ricci`` has shape ``(..., n, n)``; ``chern_moser_norm`` and
    ``volume_density`` are pointwise arrays over the same sample set (the
    density already includes quadrature weights).
    """

    n: int
    ricci: np.ndarray
    scalar: np.ndarray
    chern_moser_norm: np.ndarray
    traceless_ricci_norm: np.ndarray
    torsion: np.ndarray
    volume_density: np.ndarray

    def lp_functional(self, power: float | None = None) -> float:
        """``int |C|^q dV`` with ``q = n + 1`` by default."""
        q = self.n + 1 if power is None else power
        return float(np.sum(np.asarray(self.chern_moser_norm) ** q * np.asarray(self.volume_density)))

    def fields(self) -> dict:
        return {
            "ricci": self.ricci,
            "scalar": self.scalar,
            "chern_moser_norm": self.chern_moser_norm,
            "traceless_ricci_norm": self.traceless_ricci_norm,
            "torsion": self.torsion,
            "volume_density": self.volume_density,
        }


def d_homothety(data: HomotheticBundle, lam: float) -> HomotheticBundle:
    """Data of ``theta~ = lam theta``: curvature and torsion scale by ``1/lam``, volume by ``lam^(n+1)``."""
    if not lam > 0:
        raise DomainError("D-homothety factor must be positive")
    inv = 1.0 / lam
    return HomotheticBundle(
        n=data.n,
        ricci=inv * np.asarray(data.ricci),
        scalar=inv * np.asarray(data.scalar),
        chern_moser_norm=inv * np.asarray(data.chern_moser_norm),
        traceless_ricci_norm=inv * np.asarray(data.traceless_ricci_norm),
        torsion=inv * np.asarray(data.torsion),
        volume_density=lam ** (data.n + 1) * np.asarray(data.volume_density),
    )


def ricci_positivity_window(c: float) -> float:
    """Supremum of ``lam`` with ``c/lam - 2 > 0``: the homothety makes the Riemannian Ricci positive below it."""
    if not c > 0:
        raise DomainError("lower Ricci bound must be positive")
    return c / 2.0


def horizontal_riemannian_lower_bound(c: float, lam: float) -> float:
    """Lower bound ``c/lam - 2`` of the horizontal Riemannian Ricci block after ``theta -> lam theta``."""
    if not lam > 0:
        raise DomainError("D-homothety factor must be positive")
    return c / lam - 2.0
