"""Verifiers for the sharp algebraic inequalities behind the Weitzenboeck estimates.

Every verifier returns a :class:`~crkit.tensor.SlackRecord` with
``slack = rhs - lhs`` and a ``scale`` of the same homogeneity as both sides,
so that ``slack / scale`` is a dimensionless violation measure.

Derivative tensors use these layouts:

* ``de[a, b, g] = E_{a bbar, g}``; Codazzi symmetry swaps slots 0 and 2 and
  the trace ``sum_a de[a, a, g]`` vanishes.
* ``dc[a, b, l, m, g] = C_{abar b l mbar, g}``; the unbarred slots 1, 2, 4
  are fully symmetric and the barred slots 0, 3 are symmetric.  A derivative
  in an unbarred direction is not mapped to itself by conjugation, so the
  reality condition of ``C`` does not constrain ``dc``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError, SymmetryError
from .linalg import jacobi_eigh
from .tensor import (
    WEIGHT_C,
    WEIGHT_E,
    WEIGHT_GRAD_C,
    WEIGHT_GRAD_E,
    SlackRecord,
    TracelessHermitianMatrix,
    WebsterTensor,
    _unwrap,
    frame_change_codazzi,
    hermitian_eigen,
    ricci_contraction,
)
from .curvature import coupling_inner

TOL = 1e-10
TOL_KATO_C = 1e-9
NEAR_EQUALITY = 1e-3
CONSTRAINT_TOL = 1e-12


def _tiny() -> float:
    return float(np.finfo(float).tiny)


def _traceless(e) -> TracelessHermitianMatrix:
    return e if isinstance(e, TracelessHermitianMatrix) else TracelessHermitianMatrix(_unwrap(e))


def _webster(c) -> WebsterTensor:
    return c if isinstance(c, WebsterTensor) else WebsterTensor(c)


def _require_traceless_c(c: WebsterTensor) -> None:
    arr = c.entries
    worst = float(np.max(np.abs(ricci_contraction(arr))))
    if worst > 1e-10 * max(float(np.max(np.abs(arr))), _tiny()):
        raise DomainError(f"tensor is not traceless (contraction {worst:.3e})")


def okumura_coefficient(m: int) -> float:
    return (m - 2) / np.sqrt(m * (m - 1))


# -- scalar inequalities ------------------------------------------------------

def okumura(a) -> SlackRecord:
    """``|sum a^3| <= (m-2)/sqrt(m(m-1)) k^3`` for centred ``a`` with ``k^2 = sum a^2``."""
    a = np.asarray(a, dtype=float).reshape(-1)
    m = a.size
    if m < 2:
        raise DomainError("okumura needs at least two numbers")
    k = float(np.sqrt(np.sum(a * a)))
    if abs(float(np.sum(a))) > CONSTRAINT_TOL * max(k, 1.0) * np.sqrt(m):
        raise DomainError("okumura input must sum to zero")
    lhs = abs(float(np.sum(a**3)))
    rhs = okumura_coefficient(m) * k**3
    return SlackRecord.of(lhs, rhs, {"a": a.tolist()}, k**3)


def okumura_extremal(m: int, k: float = 1.0, sign: int = 1) -> np.ndarray:
    """The equality configuration ``(m-1, -1, ..., -1) k / sqrt(m(m-1))``."""
    a = -np.ones(m)
    a[0] = m - 1
    return sign * k * a / np.sqrt(m * (m - 1))


def okumura_shape_distance(a) -> float:
    """Distance from ``a / |a|`` to the nearest signed permutation of the extremal shape."""
    a = np.asarray(a, dtype=float)
    k = float(np.linalg.norm(a))
    if k == 0:
        return 0.0
    u = a / k
    best = np.inf
    for sign in (1, -1):
        base = okumura_extremal(a.size, 1.0, sign)
        for j in range(a.size):
            best = min(best, float(np.linalg.norm(u - np.roll(base, j))))
    return best


def kato_E_pointwise(lam, mu, gamma: int) -> SlackRecord:
    """``|sum l mu|^2 <= n/(n+1) sum l^2 (|mu_g|^2 + 2 sum_{a != g} |mu_a|^2)``."""
    lam = np.asarray(lam, dtype=float).reshape(-1)
    mu = np.asarray(mu, dtype=np.complex128).reshape(-1)
    n = lam.size
    if mu.size != n or not 0 <= gamma < n:
        raise DomainError("lambda, mu and gamma are inconsistent")
    if abs(lam.sum()) > CONSTRAINT_TOL * max(float(np.abs(lam).max()), 1.0) * n:
        raise DomainError("lambda must be traceless")
    if abs(mu.sum()) > CONSTRAINT_TOL * max(float(np.abs(mu).max()), 1.0) * n:
        raise DomainError("mu must sum to zero")
    lhs = abs(complex(np.dot(lam, mu))) ** 2
    m2 = np.abs(mu) ** 2
    weight = m2[gamma] + 2.0 * (m2.sum() - m2[gamma])
    l2 = float(np.dot(lam, lam))
    rhs = n / (n + 1) * l2 * weight
    return SlackRecord.of(lhs, rhs, {"lambda": lam.tolist(), "gamma": int(gamma)}, l2 * float(m2.sum()))


# -- Ricci-type inequalities --------------------------------------------------

def project_codazzi(raw) -> np.ndarray:
    """Orthogonal projection onto ``{de : de[a,b,g] = de[g,b,a], sum_a de[a,a,g] = 0}``."""
    x = np.asarray(_unwrap(raw), dtype=np.complex128)
    n = x.shape[0]
    s = 0.5 * (x + x.transpose(2, 1, 0))
    t = np.einsum("aag->g", s)
    eye = np.eye(n)
    return s - (np.einsum("ab,g->abg", eye, t) + np.einsum("gb,a->abg", eye, t)) / (n + 1)


def _check_codazzi(de: np.ndarray) -> None:
    if de.ndim != 3 or len(set(de.shape)) != 1:
        raise DomainError(f"derivative must be an n x n x n array, got {de.shape}")
    tol = CONSTRAINT_TOL * max(float(np.max(np.abs(de))), _tiny())
    if np.max(np.abs(de - de.transpose(2, 1, 0))) > tol:
        raise SymmetryError("derivative violates the Codazzi symmetry")
    if np.max(np.abs(np.einsum("aag->g", de))) > tol * de.shape[0]:
        raise SymmetryError("derivative is not traceless")


def grad_norm_sq_E(e, de) -> float:
    """``|grad_b |E|^2|^2`` in a general frame: ``32 sum_g |tr(E de_g)|^2``."""
    tr = np.einsum("ab,bag->g", _unwrap(e), _unwrap(de))
    return 32.0 * float(np.sum(np.abs(tr) ** 2))


def kato_E_tensor(e, de) -> SlackRecord:
    """``1/4 |grad_b |E|^2|^2 <= n/(n+1) |E|^2 |grad_b E|^2``."""
    e = _traceless(e)
    de = np.asarray(_unwrap(de), dtype=np.complex128)
    n = e.n
    if de.shape[0] != n:
        raise DomainError("E and its derivative have different sizes")
    _check_codazzi(de)
    lam, u = hermitian_eigen(e)
    dp = frame_change_codazzi(de, np.conj(u))
    lhs = 8.0 * float(np.sum(np.abs(np.einsum("a,aag->g", lam, dp)) ** 2))
    e2 = WEIGHT_E * float(np.sum(lam**2))
    d2 = WEIGHT_GRAD_E * float(np.sum(np.abs(de) ** 2))
    return SlackRecord.of(lhs, n / (n + 1) * e2 * d2, {"eigenvalues": lam.tolist()}, e2 * d2)


def cubic_E(e) -> SlackRecord:
    """``|tr E^3| <= (n-2)/(2 sqrt(2) sqrt(n(n-1))) |E|^3``."""
    e = _traceless(e)
    m = e.entries
    n = e.n
    lhs = abs(float(np.real(np.trace(m @ m @ m))))
    norm = np.sqrt(WEIGHT_E * float(np.sum(np.abs(m) ** 2)))
    rhs = okumura_coefficient(n) / (2.0 * np.sqrt(2.0)) * norm**3
    return SlackRecord.of(lhs, rhs, {"n": n}, norm**3)


def coupling_coefficient(n: int) -> float:
    return 0.25 * np.sqrt((2 * n * n + 4 * n + 3) / (2.0 * (n + 1) * (n + 2)))


def coupling_bound(e, c) -> SlackRecord:
    """``|sum E C E| <= 1/4 sqrt((2n^2+4n+3)/(2(n+1)(n+2))) |E|^2 |C|``."""
    e = _traceless(e)
    c = _webster(c)
    _require_traceless_c(c)
    n = e.n
    lhs = abs(coupling_inner(e, c))
    e2 = WEIGHT_E * float(np.sum(np.abs(e.entries) ** 2))
    cn = np.sqrt(WEIGHT_C * float(np.sum(np.abs(c.entries) ** 2)))
    return SlackRecord.of(lhs, coupling_coefficient(n) * e2 * cn, {"n": n}, e2 * cn)


def z_bound(e) -> SlackRecord:
    """``Z = tr E^4 <= |E|^4 / 4``."""
    e = _traceless(e)
    m = e.entries
    m2 = m @ m
    z = float(np.real(np.trace(m2 @ m2)))
    e4 = (WEIGHT_E * float(np.sum(np.abs(m) ** 2))) ** 2
    return SlackRecord.of(z, e4 / 4.0, {"n": e.n}, e4)


# -- Chern-Moser inequalities -------------------------------------------------

def cm_matrix(c) -> np.ndarray:
    """The ``n^2 x n^2`` matrix ``D[(l,a),(m,b)] = C[l,a,m,b]``; Hermitian and traceless."""
    arr = _unwrap(c)
    n = arr.shape[0]
    d = arr.reshape(n * n, n * n)
    tol = 1e-10 * max(float(np.max(np.abs(d))), _tiny())
    if np.max(np.abs(d - d.conj().T)) > tol:
        raise SymmetryError("reshaped tensor is not Hermitian; the reality convention is broken")
    return 0.5 * (d + d.conj().T)


def cm_cubic_direct(c) -> float:
    arr = _unwrap(c)
    return float(np.real(np.einsum("lamb,mbgn,gnla->", arr, arr, arr, optimize=True)))


def cm_cubic(c) -> SlackRecord:
    """``|sum C C C| <= (n^2-2)/sqrt(n^2(n^2-1)) (sum |C|^2)^{3/2}``, checked by two routes."""
    c = _webster(c)
    _require_traceless_c(c)
    n = c.n
    direct = cm_cubic_direct(c)
    nu, _, _ = jacobi_eigh(cm_matrix(c))
    eigen = float(np.sum(nu**3))
    s = float(np.sum(np.abs(c.entries) ** 2))
    rhs = okumura_coefficient(n * n) * s**1.5
    witness = {"direct": direct, "eigen": eigen, "route_gap": abs(direct - eigen) / max(s**1.5, _tiny())}
    return SlackRecord.of(abs(direct), rhs, witness, s**1.5)


def _derivative_permutations() -> list[list[int]]:
    out = []
    for p in itertools.permutations((1, 2, 4)):
        for bar in ((0, 3), (3, 0)):
            ax = [0] * 5
            ax[0], ax[3] = bar
            ax[1], ax[2], ax[4] = p
            out.append(ax)
    return out


@lru_cache(maxsize=None)
def cm_derivative_basis(n: int, traceless: bool = True) -> np.ndarray:
    """Real orthonormal basis (columns) of the symmetry class of ``dc``.

    The class is fixed by symmetry in the unbarred slots (1, 2, 4), in the
    barred slots (0, 3), and, when ``traceless``, by ``sum_a dc[a,a,...] = 0``.
    """
    size = n**5
    eye = np.eye(size).reshape((size,) + (n,) * 5)
    perms = _derivative_permutations()
    sym = sum(eye.transpose([0] + [a + 1 for a in ax]) for ax in perms) / len(perms)
    rows = [np.eye(size) - sym.reshape(size, size)]
    if traceless:
        rows.append(np.einsum("kaalmg->klmg", eye).reshape(size, -1).T)
    basis = null_space(np.vstack(rows))
    basis.setflags(write=False)
    return basis


def project_cm_derivative(raw, traceless: bool = True) -> np.ndarray:
    x = np.asarray(_unwrap(raw), dtype=np.complex128)
    n = x.shape[0]
    b = cm_derivative_basis(n, traceless)
    return (b @ (b.T @ x.reshape(-1))).reshape((n,) * 5)


def _check_cm_derivative(dc: np.ndarray, traceless: bool) -> None:
    if dc.ndim != 5 or len(set(dc.shape)) != 1:
        raise DomainError(f"derivative must be a 5-index cube, got {dc.shape}")
    tol = CONSTRAINT_TOL * max(float(np.max(np.abs(dc))), _tiny())
    for ax in _derivative_permutations():
        if np.max(np.abs(dc - dc.transpose(ax))) > tol:
            raise SymmetryError("derivative violates the curvature symmetry class")
    if traceless and np.max(np.abs(np.einsum("aalmg->lmg", dc))) > tol * dc.shape[0]:
        raise SymmetryError("derivative is not traceless")


def cm_pairing(c, dc) -> np.ndarray:
    """Components ``omega_g = 4 sum dc[..., g] conj(C)`` of ``<C, grad_b C>``."""
    return WEIGHT_C * np.einsum("ablmg,ablm->g", _unwrap(dc), np.conj(_unwrap(c)))


def kato_C(c, dc, traceless: bool = True) -> SlackRecord:
    """``(n+3)/(n+1) |<C, grad_b C>|^2 <= |C|^2 |grad_b C|^2``.

    ``traceless=False`` accepts curvature-type tensors that are not
    trace free; the constant is not valid for them and such records are
    informational only.
    """
    c = _webster(c)
    dc = np.asarray(_unwrap(dc), dtype=np.complex128)
    n = c.n
    if dc.shape[0] != n:
        raise DomainError("C and its derivative have different sizes")
    if traceless:
        _require_traceless_c(c)
    _check_cm_derivative(dc, traceless)
    omega = cm_pairing(c, dc)
    pair2 = 2.0 * float(np.sum(np.abs(omega) ** 2))
    c2 = WEIGHT_C * float(np.sum(np.abs(c.entries) ** 2))
    d2 = WEIGHT_GRAD_C * float(np.sum(np.abs(dc) ** 2))
    rec = SlackRecord.of((n + 3) / (n + 1) * pair2, c2 * d2, {"n": n, "traceless": traceless}, c2 * d2)
    return rec


VERIFIERS = {
    "okumura": okumura,
    "kato_E_pointwise": kato_E_pointwise,
    "kato_E_tensor": kato_E_tensor,
    "cubic_E": cubic_E,
    "coupling_bound": coupling_bound,
    "cm_cubic": cm_cubic,
    "kato_C": kato_C,
    "z_bound": z_bound,
}

TOLERANCES = {name: (TOL_KATO_C if name == "kato_C" else TOL) for name in VERIFIERS}
