"""Complex tensor containers, Webster symmetry projector, norms and sampling.

Index conventions
-----------------
A Hermitian matrix ``E[a, b]`` stores ``E_{a bbar}``: first slot unbarred,
second slot barred.  A Webster-type tensor ``R[a, b, l, m]`` stores
``R_{abar b l mbar}`` (slots 0 and 3 barred, slots 1 and 2 unbarred).

Symmetries of a Webster-type tensor:

* first Bianchi      ``R[a, b, l, m] == R[a, l, b, m]``
* barred-pair swap   ``R[a, b, l, m] == R[m, b, l, a]``
* reality            ``conj(R[a, b, l, m]) == R[b, a, m, l]``

All frame changes use ``eta'_a = sum_x U[x, a] eta_x``: unbarred slots
transform with ``U``, barred slots with ``conj(U)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, SymmetryError
from .linalg import jacobi_eigh
from .rng import complex_uniform

SYM_TOL = 1e-12
RECON_TOL = 1e-10

# norm convention weights: |E|^2 = 2 sum|E|^2, |C|^2 = 4 sum|C|^2,
# |grad_b C|^2 = 8 sum|C_{,g}|^2, |grad_b E|^2 = 4 sum|E_{,g}|^2
WEIGHT_E = 2.0
WEIGHT_C = 4.0
WEIGHT_GRAD_C = 8.0
WEIGHT_GRAD_E = 4.0


def _as_complex(x, ndim: int, name: str) -> np.ndarray:
    arr = np.array(x, dtype=np.complex128)
    if arr.ndim != ndim or len(set(arr.shape)) != 1:
        raise DomainError(f"{name} must be a cubical {ndim}-index array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _tol(arr: np.ndarray, tol: float = SYM_TOL) -> float:
    return tol * (float(np.max(np.abs(arr))) if arr.size else 0.0)


def _check(defect: np.ndarray, arr: np.ndarray, what: str) -> None:
    worst = float(np.max(np.abs(defect))) if defect.size else 0.0
    if worst > _tol(arr):
        raise SymmetryError(f"{what} violated by {worst:.3e}")


@dataclass(frozen=True)
class HermitianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.entries, 2, type(self).__name__)
        _check(arr - arr.conj().T, arr, "Hermitian symmetry")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


@dataclass(frozen=True)
class TracelessHermitianMatrix(HermitianMatrix):
    def __post_init__(self):
        super().__post_init__()
        arr = self.entries
        if abs(np.trace(arr)) > self.n * _tol(arr):
            raise SymmetryError(f"trace {abs(np.trace(arr)):.3e} is not zero")


@dataclass(frozen=True)
class TorsionMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.entries, 2, "TorsionMatrix")
        _check(arr - arr.T, arr, "torsion symmetry A_ab = A_ba")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_sasakian(self) -> bool:
        return not np.any(self.entries)


def webster_defects(arr: np.ndarray) -> dict[str, np.ndarray]:
    return {
        "first Bianchi": arr - arr.transpose(0, 2, 1, 3),
        "barred-pair symmetry": arr - arr.transpose(3, 1, 2, 0),
        "reality": np.conj(arr) - arr.transpose(1, 0, 3, 2),
    }


@dataclass(frozen=True)
class WebsterTensor:
    entries: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.entries, 4, "WebsterTensor")
        for what, defect in webster_defects(arr).items():
            _check(defect, arr, what)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: "WebsterTensor") -> "WebsterTensor":
        return WebsterTensor(self.entries + other.entries)

    def __sub__(self, other: "WebsterTensor") -> "WebsterTensor":
        return WebsterTensor(self.entries - other.entries)

    def scaled(self, s: float) -> "WebsterTensor":
        return WebsterTensor(float(s) * self.entries)


@dataclass(frozen=True)
class SlackRecord:
    """Outcome of one inequality check, ``lhs <= rhs``.

    ``scale`` is the homogeneous size of the inputs; violations are judged
    on ``slack / scale``.
    """

    lhs: float
    rhs: float
    slack: float
    witness: dict = field(default_factory=dict)
    scale: float = 1.0

    @classmethod
    def of(cls, lhs: float, rhs: float, witness: dict | None = None, scale: float = 1.0) -> "SlackRecord":
        lhs, rhs = float(lhs), float(rhs)
        return cls(lhs, rhs, rhs - lhs, witness or {}, float(scale))

    @property
    def ratio(self) -> float:
        """slack / rhs, the scale-free distance from equality (0 when rhs is 0)."""
        return self.slack / self.rhs if self.rhs > 0 else 0.0

    def violated(self, tol: float = 1e-10) -> bool:
        return self.slack < -tol * max(self.scale, np.finfo(float).tiny)

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "scale": self.scale,
            "witness": self.witness,
        }


def _unwrap(x) -> np.ndarray:
    return x.entries if hasattr(x, "entries") else np.asarray(x, dtype=np.complex128)


# -- eigensolver ------------------------------------------------------------

def hermitian_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and a unitary ``U`` with ``U^H m U`` diagonal."""
    if not isinstance(m, HermitianMatrix):
        m = HermitianMatrix(m)
    w, v, _ = jacobi_eigh(m.entries)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


# -- Webster symmetry projector ---------------------------------------------

def project_webster_symmetry(raw) -> WebsterTensor:
    """Average ``raw`` over the 8-element group generated by the Webster symmetries.

    The map is real-linear (reality involves conjugation) and idempotent.
    """
    x = _as_complex(_unwrap(raw), 4, "raw tensor")
    y = (x + x.transpose(0, 2, 1, 3) + x.transpose(3, 1, 2, 0) + x.transpose(3, 2, 1, 0)) / 4.0
    return WebsterTensor(0.5 * (y + np.conj(y.transpose(1, 0, 3, 2))))


# -- inner products and norms ----------------------------------------------

def inner_webster(a, b) -> float:
    """Real inner product ``4 Re sum a conj(b)``; ``inner_webster(c, c) == norm_C(c)**2``."""
    return WEIGHT_C * float(np.real(np.vdot(_unwrap(b), _unwrap(a))))


def norm_E(e) -> float:
    arr = _unwrap(e)
    return float(np.sqrt(WEIGHT_E * np.sum(np.abs(arr) ** 2)))


def norm_C(c) -> float:
    arr = _unwrap(c)
    return float(np.sqrt(WEIGHT_C * np.sum(np.abs(arr) ** 2)))


def norm_gradC(d) -> float:
    arr = _unwrap(d)
    return float(np.sqrt(WEIGHT_GRAD_C * np.sum(np.abs(arr) ** 2)))


def norm_gradE(d) -> float:
    arr = _unwrap(d)
    return float(np.sqrt(WEIGHT_GRAD_E * np.sum(np.abs(arr) ** 2)))


# -- frame changes -----------------------------------------------------------

def frame_change_matrix(e, u: np.ndarray) -> np.ndarray:
    """Components ``E'_{a bbar}`` of a Hermitian 2-tensor in the frame ``eta U``."""
    return np.einsum("xa,yb,xy->ab", u, np.conj(u), _unwrap(e), optimize=True)


def frame_change_webster(r, u: np.ndarray) -> np.ndarray:
    uc = np.conj(u)
    return np.einsum("xa,yb,zl,wm,xyzw->ablm", uc, u, u, uc, _unwrap(r), optimize=True)


def frame_change_codazzi(d, u: np.ndarray) -> np.ndarray:
    """Frame change for ``E_{a bbar, g}`` (slots: unbarred, barred, unbarred)."""
    return np.einsum("xa,yb,zg,xyz->abg", u, np.conj(u), u, _unwrap(d), optimize=True)


def random_unitary(n: int, seed: int, index: int = 0) -> np.ndarray:
    q, r = np.linalg.qr(complex_uniform(seed, index, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- trace blocks of the orthogonal decomposition ----------------------------

def trace_block(e) -> np.ndarray:
    """``E_{abar b} d_{l mbar} + E_{abar l} d_{b mbar} + d_{abar b} E_{l mbar} + d_{abar l} E_{b mbar}``."""
    arr = _unwrap(e)
    eye = np.eye(arr.shape[0])
    return (
        np.einsum("ba,lm->ablm", arr, eye)
        + np.einsum("la,bm->ablm", arr, eye)
        + np.einsum("ab,lm->ablm", eye, arr)
        + np.einsum("al,bm->ablm", eye, arr)
    )


def scalar_block(n: int) -> np.ndarray:
    """``d_{abar b} d_{l mbar} + d_{abar l} d_{b mbar}``."""
    eye = np.eye(n)
    return np.einsum("ab,lm->ablm", eye, eye) + np.einsum("al,bm->ablm", eye, eye)


def ricci_contraction(r) -> np.ndarray:
    """``R_{l mbar} = sum_a R_{abar a l mbar}``."""
    return np.einsum("aalm->lm", _unwrap(r))


def remove_traces(r) -> np.ndarray:
    """Traceless part of a Webster-type array (the Chern-Moser projection)."""
    arr = _unwrap(r)
    n = arr.shape[0]
    ric = ricci_contraction(arr)
    rho = float(np.real(np.trace(ric)))
    e = ric - rho / n * np.eye(n)
    return arr - trace_block(e) / (n + 2) - rho / (n * (n + 1)) * scalar_block(n)


# -- sampling ----------------------------------------------------------------

def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"CR dimension n must be an integer >= 2 (dim M = 2n+1 >= 5), got {n}")


def random_hermitian(n: int, seed: int, index: int = 0) -> HermitianMatrix:
    _check_n(n)
    m = complex_uniform(seed, index, (n, n))
    return HermitianMatrix(0.5 * (m + m.conj().T))


def random_traceless_hermitian(n: int, seed: int, index: int = 0) -> TracelessHermitianMatrix:
    m = random_hermitian(n, seed, index).entries
    m = m - np.trace(m) / n * np.eye(n)
    m = 0.5 * (m + m.conj().T)
    return TracelessHermitianMatrix(m)


def random_webster(n: int, seed: int, traceless: bool = False, index: int = 0) -> WebsterTensor:
    _check_n(n)
    r = project_webster_symmetry(complex_uniform(seed, index, (n,) * 4))
    if traceless:
        return project_webster_symmetry(remove_traces(r))
    return r


# -- JSON tensor format ------------------------------------------------------

_KINDS = {"webster": (WebsterTensor, 4), "hermitian": (HermitianMatrix, 2), "torsion": (TorsionMatrix, 2)}


def to_json_dict(obj) -> dict[str, Any]:
    if isinstance(obj, WebsterTensor):
        kind = "webster"
    elif isinstance(obj, HermitianMatrix):
        kind = "hermitian"
    elif isinstance(obj, TorsionMatrix):
        kind = "torsion"
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    arr = obj.entries
    entries = [
        [*map(int, idx), float(arr[idx].real), float(arr[idx].imag)]
        for idx in zip(*np.nonzero(arr))
    ]
    return {"kind": kind, "n": int(arr.shape[0]), "entries": entries}


def from_json_dict(doc: dict[str, Any]):
    try:
        kind, n, entries = doc["kind"], int(doc["n"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed tensor document: {exc}") from exc
    if kind not in _KINDS:
        raise DomainError(f"unknown tensor kind {kind!r}")
    if n < 1:
        raise DomainError("n must be positive")
    cls, rank = _KINDS[kind]
    arr = np.zeros((n,) * rank, dtype=np.complex128)
    for row in entries:
        if len(row) != rank + 2:
            raise DomainError(f"{kind} entry needs {rank} indices plus re, im: {row}")
        idx = tuple(int(i) for i in row[:rank])
        if any(i < 0 or i >= n for i in idx) or any(float(i) != int(i) for i in row[:rank]):
            raise DomainError(f"index {idx} out of range for n={n}")
        arr[idx] = complex(float(row[rank]), float(row[rank + 1]))
    return cls(arr)


def dumps(obj) -> str:
    return json.dumps(to_json_dict(obj))


def loads(text: str):
    return from_json_dict(json.loads(text))
