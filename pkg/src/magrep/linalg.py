"""Numerical kernels: Hermitian eigensolves, simultaneous diagonalization,
symmetric-unitary square roots and projector eigenspaces.

These wrap LAPACK via numpy/scipy but add the validation, determinism and
branch-cut policies the representation engines rely on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EigenvalueAtBranchCutWarning,
    NotCommuting,
    NotHermitian,
    NotIdempotent,
    NotSymmetricUnitary,
    TraceNotInteger,
)

LINALG_TOL = 1e-9


@dataclass
class EigenSystem:
    """Ascending real eigenvalues with an orthonormal column eigenbasis."""

    values: np.ndarray
    vectors: np.ndarray


def eigh(a: np.ndarray, tol: float = LINALG_TOL) -> EigenSystem:
    """Hermitian eigendecomposition with an explicit hermiticity gate."""
    a = np.asarray(a)
    scale = max(1.0, np.linalg.norm(a, ord=2))
    dev = np.linalg.norm(a - a.conj().T, ord=2)
    if dev > tol * scale:
        raise NotHermitian(f"deviation {dev:.3e} exceeds {tol:.1e} * norm")
    vals, vecs = np.linalg.eigh(a)
    return EigenSystem(values=vals, vectors=vecs)


def _cluster_slices(values: np.ndarray, gap: float):
    """Split ascending values into contiguous clusters at gaps above ``gap``."""
    slices = []
    start = 0
    for k in range(1, len(values)):
        if values[k] - values[k - 1] > gap:
            slices.append(slice(start, k))
            start = k
    slices.append(slice(start, len(values)))
    return slices


def simultaneous_diag(family: Sequence[np.ndarray], seed: int = 0,
                      tol: float = LINALG_TOL):
    """Common eigenbasis of a family of commuting Hermitian matrices.

    A seeded random real combination of the family is diagonalized first;
    clusters that remain degenerate are refined by each family member in
    turn, restricted to the cluster subspace.  Columns are ordered
    lexicographically by their per-matrix eigenvalue tuples (clustered at
    tolerance) so the output is deterministic given (inputs, seed).

    Returns
    -------
    u : ``(d, d)`` ndarray
        Unitary matrix of common eigenvectors (real when the family is real).
    values : ``(k, d)`` ndarray
        ``values[i, j]`` is the eigenvalue of ``family[i]`` on column j.
    """
    mats = [np.asarray(a) for a in family]
    if not mats:
        raise ValueError("empty family")
    d = mats[0].shape[0]
    real_input = all(np.isrealobj(a) for a in mats)
    scales = []
    for a in mats:
        if a.shape != (d, d):
            raise NotHermitian("family members must share one square shape")
        scale = max(1.0, np.linalg.norm(a, ord=2))
        if np.linalg.norm(a - a.conj().T, ord=2) > tol * scale:
            raise NotHermitian("family member is not Hermitian at tolerance")
        scales.append(scale)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i], ord=2)
            if comm > tol * max(1.0, scales[i] * scales[j]):
                raise NotCommuting(f"members {i} and {j} do not commute: {comm:.3e}")

    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(len(mats))
    combo = sum(c * a for c, a in zip(coeff, mats))
    if real_input:
        combo = combo.real

    def refine(cols: np.ndarray, ops: list) -> np.ndarray:
        # cols: (d, m) isometry onto the current cluster subspace
        if cols.shape[1] == 1 or not ops:
            return cols
        a = ops[0]
        sub = cols.conj().T @ a @ cols
        sub = (sub + sub.conj().T) / 2
        vals, vecs = np.linalg.eigh(sub)
        cols = cols @ vecs
        gap = tol * max(1.0, np.linalg.norm(a, ord=2))
        out = []
        for sl in _cluster_slices(vals, gap):
            out.append(refine(cols[:, sl], ops[1:]))
        return np.hstack(out)

    vals0, vecs0 = np.linalg.eigh((combo + combo.conj().T) / 2)
    gap0 = tol * max(1.0, np.linalg.norm(combo, ord=2))
    blocks = []
    for sl in _cluster_slices(vals0, gap0):
        blocks.append(refine(vecs0[:, sl], mats))
    u = np.hstack(blocks)

    # Per-matrix eigenvalues, clustered so equal labels compare equal.
    values = np.empty((len(mats), d))
    for i, a in enumerate(mats):
        diag = np.einsum("ij,ik,kj->j", u.conj(), a, u).real
        order = np.argsort(diag)
        gap = tol * max(1.0, scales[i]) * 10
        lab = diag.copy()
        for sl in _cluster_slices(diag[order], gap):
            idx = order[sl]
            lab[idx] = diag[idx].mean()
        values[i] = lab
        resid = np.abs(u.conj().T @ a @ u - np.diag(diag)).max()
        if resid > 10 * tol * max(1.0, scales[i]):
            raise NotCommuting(f"off-diagonal residual {resid:.3e} after refinement")

    order = np.lexsort(values[::-1])
    return u[:, order], values[:, order]


def symmetric_unitary_sqrt(m: np.ndarray, tol: float = LINALG_TOL) -> np.ndarray:
    """Principal square root U of a symmetric unitary M, with U^T = U.

    M @ conj(M) = I forces M symmetric; writing M = A + iB with commuting
    real symmetric A, B lets a real orthogonal basis diagonalize both, so the
    root U = R diag(exp(i theta / 2)) R^T stays symmetric and U* = U^-1.
    Phases use theta in (-pi, pi]; eigenvalues within ``tol`` of -1 are
    pinned to theta = pi (deterministic branch) with a warning.
    """
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    eye = np.eye(d)
    if np.linalg.norm(m.conj().T @ m - eye, ord=2) > tol:
        raise NotSymmetricUnitary("matrix is not unitary at tolerance")
    if np.linalg.norm(m @ np.conj(m) - eye, ord=2) > tol:
        raise NotSymmetricUnitary("M @ conj(M) != I")

    a = (m + np.conj(m)).real / 2
    b = (m - np.conj(m)).imag / 2
    u_basis, vals = simultaneous_diag([a, b], seed=0, tol=tol)
    cos_t, sin_t = vals[0], vals[1]
    theta = np.arctan2(sin_t, cos_t)
    near_cut = np.abs(np.exp(1j * theta) + 1.0) <= tol
    if near_cut.any():
        warnings.warn("unitary eigenvalue at the -1 branch cut pinned to phase pi",
                      EigenvalueAtBranchCutWarning)
        theta = np.where(near_cut, np.pi, theta)
    root = u_basis @ np.diag(np.exp(0.5j * theta)) @ u_basis.T
    return root


def eigenspace_of_one(p: np.ndarray, tol: float = LINALG_TOL) -> np.ndarray:
    """Orthonormal basis of the eigenvalue-1 eigenspace of an idempotent.

    Works for oblique projectors too: the fixed space equals the column
    space, and an idempotent's nonzero singular values are all >= 1, so an
    SVD split at 1/2 is unambiguous.  The rank must match round(trace).
    """
    p = np.asarray(p, dtype=complex)
    scale = max(1.0, np.linalg.norm(p, ord=2))
    if np.linalg.norm(p @ p - p, ord=2) > tol * scale:
        raise NotIdempotent("P^2 != P at tolerance")
    tr = np.trace(p)
    count = round(tr.real)
    if abs(tr - count) > max(tol * scale * p.shape[0], 1e-6):
        raise TraceNotInteger(f"trace {tr} is not close to an integer")
    if count == 0:
        return np.zeros((p.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(p)
    rank = int((s > 0.5).sum())
    if rank != count:
        raise TraceNotInteger(f"rank {rank} disagrees with trace {count}")
    basis = u[:, :rank]
    if np.linalg.norm(p @ basis - basis, ord=2) > 10 * tol * scale:
        raise NotIdempotent("recovered basis is not fixed by the projector")
    return basis


# -- small random fixtures ----------------------------------------------------

def random_unitary(d: int, seed) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Ginibre matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_symmetric_unitary(d: int, seed) -> np.ndarray:
    """Q^T D Q fixture with unit-modulus diagonal D and real orthogonal Q."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    phases = np.exp(2j * np.pi * rng.random(d))
    return q.T @ np.diag(phases) @ q


def twist_matrix(d: int) -> np.ndarray:
    """Index-swap operator T on the d^2 product space: T vec(X) = vec(X^T)."""
    t = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            t[i * d + j, j * d + i] = 1.0
    return t
