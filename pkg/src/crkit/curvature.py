"""Orthogonal decomposition of Webster curvature and related algebra.

The decomposition splits a Webster-type tensor into its Chern-Moser part
``C``, a block built from the traceless Ricci tensor ``E`` and a block built
from the scalar curvature ``rho``:

    R = C + (1/(n+2)) * trace_block(E) + rho/(n(n+1)) * scalar_block

The tangent-space model used by the Riemannian bridge represents a real
vector as ``X = xi^a eta_a + conj(xi^a) eta_abar + s T``.  The Webster metric
is ``g(X, Y) = 2 Re <xi_X, xi_Y> + s_X s_Y``, ``J`` multiplies ``xi`` by ``i``
and kills ``T``, and ``dtheta(X, Y) = g(JX, Y)``.  The Tanaka-Webster
curvature acts on the horizontal part by the matrix
``Omega_{ab}(X, Y) = sum R[a, b, l, m] (x^l conj(y^m) - y^l conj(x^m))``.
These choices are pinned by requiring that the space-form generator has
pseudo-Hermitian sectional curvature exactly ``kappa``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .tensor import (
    SlackRecord,
    TracelessHermitianMatrix,
    WebsterTensor,
    _check_n,
    _unwrap,
    frame_change_webster,
    hermitian_eigen,
    inner_webster,
    norm_C,
    norm_E,
    ricci_contraction,
    scalar_block,
    trace_block,
)

MODEL_LABELS = {1: "sphere", 0: "heisenberg", -1: "complex-ball-times-line"}


@dataclass(frozen=True)
class CurvatureDecomposition:
    chern_moser: WebsterTensor
    traceless_ricci: TracelessHermitianMatrix
    scalar: float
    n: int

    @property
    def ricci_part(self) -> np.ndarray:
        return trace_block(self.traceless_ricci) / (self.n + 2)

    @property
    def scalar_part(self) -> np.ndarray:
        return self.scalar / (self.n * (self.n + 1)) * scalar_block(self.n)

    @property
    def ricci(self) -> np.ndarray:
        return self.traceless_ricci.entries + self.scalar / self.n * np.eye(self.n)


@dataclass(frozen=True)
class FDecomposition:
    F: WebsterTensor
    T: WebsterTensor
    P: WebsterTensor
    Q: WebsterTensor
    Z: float
    f: float


def _webster(r) -> WebsterTensor:
    return r if isinstance(r, WebsterTensor) else WebsterTensor(r)


def _traceless(e) -> TracelessHermitianMatrix:
    if isinstance(e, TracelessHermitianMatrix):
        return e
    return TracelessHermitianMatrix(_unwrap(e))


def decompose(r) -> CurvatureDecomposition:
    r = _webster(r)
    n = r.n
    _check_n(n)
    ric = ricci_contraction(r)
    rho = float(np.real(np.trace(ric)))
    e = ric - rho / n * np.eye(n)
    e = 0.5 * (e + e.conj().T)
    e = e - np.trace(e) / n * np.eye(n)
    e_part = trace_block(e) / (n + 2)
    s_part = rho / (n * (n + 1)) * scalar_block(n)
    c = r.entries - e_part - s_part
    return CurvatureDecomposition(WebsterTensor(c), TracelessHermitianMatrix(e), rho, n)


def recompose(d: CurvatureDecomposition) -> WebsterTensor:
    return WebsterTensor(d.chern_moser.entries + d.ricci_part + d.scalar_part)


def space_form_curvature(n: int, kappa: float) -> WebsterTensor:
    """``2 kappa (d_{abar b} d_{l mbar} + d_{abar l} d_{b mbar})``."""
    _check_n(n)
    return WebsterTensor(2.0 * float(kappa) * scalar_block(n))


def holomorphic_quartic(r, z) -> float:
    """``sum R[a, b, l, m] conj(z_a) z_b z_l conj(z_m)`` (real by symmetry)."""
    z = np.asarray(z, dtype=np.complex128)
    zc = np.conj(z)
    return float(np.real(np.einsum("ablm,a,b,l,m->", _unwrap(r), zc, z, z, zc, optimize=True)))


def k_theta(r, z) -> float:
    """Pseudo-Hermitian sectional curvature of the plane spanned by ``z`` and ``J z``."""
    z = np.asarray(z, dtype=np.complex128)
    norm2 = float(np.sum(np.abs(z) ** 2))
    if norm2 == 0.0:
        raise DomainError("k_theta needs a nonzero direction")
    return holomorphic_quartic(r, z) / (4.0 * norm2**2)


def f_decompose(e) -> FDecomposition:
    e = _traceless(e)
    m = e.entries
    n = e.n
    big_f = np.einsum("ba,lm->ablm", m, m) + np.einsum("la,bm->ablm", m, m)
    dec = decompose(big_f)
    f = float(np.real(np.trace(m @ m)))
    z = float(np.real(np.trace(m @ m @ m @ m)))
    return FDecomposition(
        F=WebsterTensor(big_f),
        T=dec.chern_moser,
        P=WebsterTensor(dec.ricci_part),
        Q=WebsterTensor(dec.scalar_part),
        Z=z,
        f=f,
    )


def coupling_inner(e, c, imag_tol: float = 1e-10) -> float:
    """``sum E_{g lbar} C_{bbar l a gbar} E_{abar b}``.

    The sum is real for Hermitian ``E`` and Webster-symmetric ``C``; an
    imaginary residual above ``imag_tol`` (relative) signals broken input.
    """
    m = _unwrap(e)
    arr = _unwrap(c)
    val = np.einsum("gl,blag,ba->", m, arr, m, optimize=True)
    scale = max(float(np.sum(np.abs(m) ** 2)) * float(np.sqrt(np.sum(np.abs(arr) ** 2))), np.finfo(float).tiny)
    if abs(val.imag) > imag_tol * scale:
        raise DomainError(f"coupling has imaginary residual {val.imag:.3e}")
    return float(val.real)


def f_pairing(e, c) -> float:
    """``<F, C>/8`` from the F tensor of ``e``; equals :func:`coupling_inner`."""
    return inner_webster(f_decompose(e).F, c) / 8.0


# -- Riemannian bridge -------------------------------------------------------

@dataclass(frozen=True)
class TangentVector:
    horizontal: np.ndarray
    reeb: float = 0.0

    def __post_init__(self):
        h = np.array(self.horizontal, dtype=np.complex128).reshape(-1)
        h.setflags(write=False)
        object.__setattr__(self, "horizontal", h)
        object.__setattr__(self, "reeb", float(self.reeb))

    @property
    def n(self) -> int:
        return self.horizontal.shape[0]

    def __add__(self, other):
        return TangentVector(self.horizontal + other.horizontal, self.reeb + other.reeb)

    def __sub__(self, other):
        return TangentVector(self.horizontal - other.horizontal, self.reeb - other.reeb)

    def __mul__(self, s: float):
        return TangentVector(float(s) * self.horizontal, float(s) * self.reeb)

    __rmul__ = __mul__

    def as_real(self) -> np.ndarray:
        """Real coordinates ``(Re xi, Im xi, s)``."""
        return np.concatenate([self.horizontal.real, self.horizontal.imag, [self.reeb]])

    @classmethod
    def from_real(cls, v: np.ndarray) -> "TangentVector":
        n = (len(v) - 1) // 2
        return cls(v[:n] + 1j * v[n : 2 * n], v[2 * n])


def reeb(n: int) -> TangentVector:
    return TangentVector(np.zeros(n), 1.0)


def metric(x: TangentVector, y: TangentVector) -> float:
    return 2.0 * float(np.real(np.vdot(y.horizontal, x.horizontal))) + x.reeb * y.reeb


def complex_structure(x: TangentVector) -> TangentVector:
    return TangentVector(1j * x.horizontal, 0.0)


def dtheta(x: TangentVector, y: TangentVector) -> float:
    return metric(complex_structure(x), TangentVector(y.horizontal, 0.0))


def webster_operator(r, x: TangentVector, y: TangentVector, z: TangentVector) -> TangentVector:
    """Tanaka-Webster curvature ``R(X, Y) Z`` on a Sasakian manifold."""
    arr = _unwrap(r)
    xh, yh = x.horizontal, y.horizontal
    omega = np.einsum("ablm,l,m->ab", arr, xh, np.conj(yh)) - np.einsum("ablm,l,m->ab", arr, yh, np.conj(xh))
    return TangentVector(omega @ z.horizontal, 0.0)


def riemannian_operator(r, x: TangentVector, y: TangentVector, z: TangentVector) -> TangentVector:
    """Levi-Civita curvature ``R^theta(X, Y) Z`` of the Webster metric."""
    n = x.n
    t = reeb(n)
    jx, jy, jz = complex_structure(x), complex_structure(y), complex_structure(z)
    out = webster_operator(r, x, y, z)
    out = out + metric(jx, z) * jy - metric(jy, z) * jx + 2.0 * dtheta(x, y) * jz
    out = out + (x.reeb * metric(y, z)) * t - (y.reeb * metric(x, z)) * t
    out = out - (z.reeb * x.reeb) * y + (z.reeb * y.reeb) * x
    return out


def webster_to_riemannian(r, x, y, z, w) -> float:
    """``g(R^theta(X, Y) Z, W)`` for a Sasakian manifold with Webster curvature ``r``."""
    return metric(riemannian_operator(r, x, y, z), w)


def sectional_curvature(r, x: TangentVector, y: TangentVector) -> float:
    area = metric(x, x) * metric(y, y) - metric(x, y) ** 2
    if area <= 0:
        raise DomainError("sectional curvature needs two independent vectors")
    return webster_to_riemannian(r, x, y, y, x) / area


def orthonormal_basis(n: int) -> list[TangentVector]:
    eye = np.eye(n)
    basis = [TangentVector(eye[a] / np.sqrt(2.0)) for a in range(n)]
    basis += [TangentVector(1j * eye[a] / np.sqrt(2.0)) for a in range(n)]
    return basis + [reeb(n)]


def riemannian_ricci(r) -> np.ndarray:
    """Real Ricci matrix of the Webster metric in :func:`orthonormal_basis`."""
    n = _unwrap(r).shape[0]
    basis = orthonormal_basis(n)
    dim = len(basis)
    ric = np.zeros((dim, dim))
    for i, y in enumerate(basis):
        for j, z in enumerate(basis):
            ric[i, j] = sum(webster_to_riemannian(r, e, y, z, e) for e in basis)
    return ric


def riemannian_ricci_components(r) -> dict[str, np.ndarray]:
    """Complex frame components of the Riemannian Ricci tensor.

    Keys: ``"hermitian"`` (``Ric_{a bbar}``), ``"holomorphic"`` (``Ric_{ab}``),
    ``"mixed"`` (``Ric_{a0}``) and ``"reeb"`` (``Ric_{00}``).
    """
    n = _unwrap(r).shape[0]
    ric = riemannian_ricci(r)
    # ON basis vector k has real coordinates scaled by 1/sqrt(2) for horizontal entries
    # eta_a = (X_a - i J X_a)/2 with X_a = sqrt(2) e_a, J X_a = sqrt(2) e_{n+a}
    to_frame = np.zeros((n, 2 * n + 1), dtype=np.complex128)
    for a in range(n):
        to_frame[a, a] = np.sqrt(2.0) / 2.0
        to_frame[a, n + a] = -1j * np.sqrt(2.0) / 2.0
    hol = to_frame @ ric @ to_frame.T
    herm = to_frame @ ric @ np.conj(to_frame).T
    t = np.zeros(2 * n + 1)
    t[-1] = 1.0
    return {
        "hermitian": herm,
        "holomorphic": hol,
        "mixed": to_frame @ ric @ t,
        "reeb": np.array(ric[-1, -1]),
    }


# -- identity used for orthogonal sectional curvature ------------------------

def b2_identity_check(r) -> SlackRecord:
    """Both sides of ``4 sum l^3 - 4 sum K_ab l_a l_b = 2 sum_{a != b} K_ab (l_a - l_b)^2``.

    ``K_ab = R_{abar a b bbar}`` and ``l`` are taken in an eigenframe of the
    Ricci tensor.  The two sides are equal for every Webster tensor; the
    returned slack is their difference.
    """
    r = _webster(r)
    lam, u = hermitian_eigen(ricci_contraction(r))
    rp = frame_change_webster(r, np.conj(u))
    k = np.real(np.einsum("aabb->ab", rp))
    lhs = 4.0 * np.sum(lam**3) - 4.0 * lam @ k @ lam
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    rhs = 2.0 * np.sum(k * diff2)
    scale = max(float(np.sum(np.abs(k))) * float(np.max(np.abs(lam))) ** 2, float(np.sum(np.abs(lam) ** 3)))
    return SlackRecord.of(lhs, rhs, {"eigenvalues": lam.tolist(), "orthogonal_sectional": k.tolist()}, scale)


def tanno_classify(kappa: float) -> str:
    """Model space of a complete simply connected Sasakian space form."""
    return MODEL_LABELS[int(np.sign(kappa))]


__all__ = [
    "CurvatureDecomposition",
    "FDecomposition",
    "TangentVector",
    "b2_identity_check",
    "complex_structure",
    "coupling_inner",
    "decompose",
    "dtheta",
    "f_decompose",
    "f_pairing",
    "holomorphic_quartic",
    "k_theta",
    "metric",
    "norm_C",
    "norm_E",
    "orthonormal_basis",
    "recompose",
    "reeb",
    "riemannian_ricci",
    "riemannian_ricci_components",
    "sectional_curvature",
    "space_form_curvature",
    "tanno_classify",
    "webster_to_riemannian",
]
