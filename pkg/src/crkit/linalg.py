"""Cyclic Jacobi eigensolver for complex Hermitian matrices.

Rotations are applied in round-robin (tournament) order so that each round
touches n/2 disjoint index pairs at once; a sweep is n-1 rounds.
"""
from __future__ import annotations

import numpy as np

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _tournament(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint pairs covering every (p, q) once; m is even."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            p.append(min(a, b))
            q.append(max(a, b))
        rounds.append((np.array(p), np.array(q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(m: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v, sweeps)`` with ``v.conj().T @ m @ v = diag(w)``; the
    eigenvalues are unsorted.  Iteration stops once the off-diagonal
    Frobenius norm drops below ``tol * ||m||_F``.
    """
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    size = n + (n % 2)
    if size != n:
        # an isolated zero row/column is already diagonal and never rotates
        a = np.pad(a, ((0, 1), (0, 1)))
    v = np.eye(size, dtype=np.complex128)
    scale = float(np.linalg.norm(a))
    sweeps = 0
    if n < 2 or scale == 0.0:
        return np.real(np.diag(a))[:n].copy(), v[:n, :n], sweeps
    rounds = _tournament(size)
    small = np.finfo(float).tiny
    while _off_norm(a) > tol * scale and sweeps < max_sweeps:
        sweeps += 1
        for p, q in rounds:
            app = np.real(a[p, p])
            aqq = np.real(a[q, q])
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > small
            safe = np.where(active, mag, 1.0)
            phase = np.where(active, apq / safe, 1.0)
            tau = (aqq - app) / (2.0 * safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G = [[phase*c, phase*s], [-s, c]] zeroes the (p, q) entry of G^H A G
            g00, g01, g10, g11 = phase * c, phase * s, -s + 0j, c + 0j
            colp, colq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = colp * g00 + colq * g10
            a[:, q] = colp * g01 + colq * g11
            rowp, rowq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = np.conj(g00)[:, None] * rowp + np.conj(g10)[:, None] * rowq
            a[q, :] = np.conj(g01)[:, None] * rowp + np.conj(g11)[:, None] * rowq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * g00 + vq * g10
            v[:, q] = vp * g01 + vq * g11
    return np.real(np.diag(a))[:n].copy(), v[:n, :n], sweeps
