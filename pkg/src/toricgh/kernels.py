"""Hot numeric kernels.

Each kernel exists twice: a numba-compiled loop (``*_nb``) and a vectorised
numpy version (``*_np``). The public name is bound to one of them at import
time according to :data:`toricgh._accel.USE_NUMBA`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# Guillemin metric quadratic forms


@njit
def _hessians_nb(X, normals, offsets):
    m, n = X.shape
    N = normals.shape[0]
    out = np.zeros((m, n, n))
    for i in range(m):
        for r in range(N):
            lv = -offsets[r]
            for k in range(n):
                lv += X[i, k] * normals[r, k]
            w = 0.5 / lv
            for a in range(n):
                for b in range(n):
                    out[i, a, b] += w * normals[r, a] * normals[r, b]
    return out


def _hessians_np(X, normals, offsets):
    L = X @ normals.T - offsets
    return 0.5 * np.einsum("mr,ra,rb->mab", 1.0 / L, normals, normals)


@njit
def _segment_lengths_nb(X, dX, dY, normals, offsets):
    """sqrt(dx G dx + dy G^-1 dy) with G evaluated at X (one row per segment)."""
    m, n = X.shape
    out = np.empty(m)
    for i in range(m):
        G = np.zeros((n, n))
        for r in range(normals.shape[0]):
            lv = -offsets[r]
            for k in range(n):
                lv += X[i, k] * normals[r, k]
            w = 0.5 / lv
            for a in range(n):
                for b in range(n):
                    G[a, b] += w * normals[r, a] * normals[r, b]
        q = 0.0
        for a in range(n):
            for b in range(n):
                q += dX[i, a] * G[a, b] * dX[i, b]
        has_fiber = False
        for a in range(n):
            if dY[i, a] != 0.0:
                has_fiber = True
        if has_fiber:
            z = np.linalg.solve(G, dY[i].copy())
            for a in range(n):
                q += dY[i, a] * z[a]
        out[i] = math.sqrt(q)
    return out


def _segment_lengths_np(X, dX, dY, normals, offsets):
    G = _hessians_np(X, normals, offsets)
    q = np.einsum("ma,mab,mb->m", dX, G, dX)
    z = np.linalg.solve(G, dY[:, :, None])[:, :, 0]
    q = q + np.einsum("ma,ma->m", dY, z)
    return np.sqrt(q)


# ---------------------------------------------------------------------------
# Sinkhorn in the log domain


@njit
def _sinkhorn_log_nb(C, loga, logb, eps, f, g, max_iter, tol):
    n1, n2 = C.shape
    err = np.inf
    it = 0
    tmp = np.empty(n2)
    tmp1 = np.empty(n1)
    for it in range(1, max_iter + 1):
        for i in range(n1):
            mx = -np.inf
            for j in range(n2):
                tmp[j] = (g[j] - C[i, j]) / eps
                if tmp[j] > mx:
                    mx = tmp[j]
            s = 0.0
            for j in range(n2):
                s += math.exp(tmp[j] - mx)
            f[i] = eps * (loga[i] - mx - math.log(s))
        err = 0.0
        for j in range(n2):
            mx = -np.inf
            for i in range(n1):
                tmp1[i] = (f[i] - C[i, j]) / eps
                if tmp1[i] > mx:
                    mx = tmp1[i]
            s = 0.0
            for i in range(n1):
                s += math.exp(tmp1[i] - mx)
            g[j] = eps * (logb[j] - mx - math.log(s))
        # row marginal error after the column update
        for i in range(n1):
            s = 0.0
            for j in range(n2):
                s += math.exp((f[i] + g[j] - C[i, j]) / eps)
            err += abs(s - math.exp(loga[i]))
        if err < tol:
            break
    return f, g, it, err


def _sinkhorn_log_np(C, loga, logb, eps, f, g, max_iter, tol):
    err = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        f = eps * (loga - logsumexp((g[None, :] - C) / eps, axis=1))
        g = eps * (logb - logsumexp((f[:, None] - C) / eps, axis=0))
        row = np.exp(logsumexp((f[:, None] + g[None, :] - C) / eps, axis=1))
        err = float(np.abs(row - np.exp(loga)).sum())
        if err < tol:
            break
    return f, g, it, err


# ---------------------------------------------------------------------------
# Distortion scans over distance matrices


@njit
def _pair_distortion_nb(D1, D2, assign, I, J):
    best = 0.0
    for k in range(I.shape[0]):
        i = I[k]
        j = J[k]
        d = abs(D1[i, j] - D2[assign[i], assign[j]])
        if d > best:
            best = d
    return best


def _pair_distortion_np(D1, D2, assign, I, J):
    if len(I) == 0:
        return 0.0
    best = 0.0
    step = 1 << 20
    for s in range(0, len(I), step):
        i, j = I[s : s + step], J[s : s + step]
        best = max(best, float(np.abs(D1[i, j] - D2[assign[i], assign[j]]).max()))
    return best


@njit
def _all_pairs_distortion_nb(D1, D2, assign):
    n = D1.shape[0]
    best = 0.0
    for i in range(n):
        ai = assign[i]
        for j in range(i + 1, n):
            d = abs(D1[i, j] - D2[ai, assign[j]])
            if d > best:
                best = d
    return best


def _all_pairs_distortion_np(D1, D2, assign):
    n = D1.shape[0]
    best = 0.0
    step = max(1, (1 << 22) // max(n, 1))
    for s in range(0, n, step):
        rows = np.arange(s, min(n, s + step))
        block = np.abs(D1[rows] - D2[np.ix_(assign[rows], assign)])
        if block.size:
            best = max(best, float(block.max()))
    return best


@njit
def _coverage_radius_nb(D, image):
    best = 0.0
    for p in range(D.shape[0]):
        mn = np.inf
        for q in image:
            if D[p, q] < mn:
                mn = D[p, q]
        if mn > best:
            best = mn
    return best


def _coverage_radius_np(D, image):
    return float(D[:, image].min(axis=1).max())


@njit
def _orbit_diameters_nb(D, n_base, n_fiber):
    out = np.zeros(n_base)
    for b in range(n_base):
        s = b * n_fiber
        best = 0.0
        for i in range(n_fiber):
            for j in range(i + 1, n_fiber):
                if D[s + i, s + j] > best:
                    best = D[s + i, s + j]
        out[b] = best
    return out


def _orbit_diameters_np(D, n_base, n_fiber):
    idx = np.arange(n_base * n_fiber).reshape(n_base, n_fiber)
    blocks = D[idx[:, :, None], idx[:, None, :]]
    return blocks.reshape(n_base, -1).max(axis=1)


# ---------------------------------------------------------------------------
# public bindings

_NUMBA = {
    "hessians": _hessians_nb,
    "segment_lengths": _segment_lengths_nb,
    "sinkhorn_log": _sinkhorn_log_nb,
    "pair_distortion": _pair_distortion_nb,
    "all_pairs_distortion": _all_pairs_distortion_nb,
    "coverage_radius": _coverage_radius_nb,
    "orbit_diameters": _orbit_diameters_nb,
}
_NUMPY = {
    "hessians": _hessians_np,
    "segment_lengths": _segment_lengths_np,
    "sinkhorn_log": _sinkhorn_log_np,
    "pair_distortion": _pair_distortion_np,
    "all_pairs_distortion": _all_pairs_distortion_np,
    "coverage_radius": _coverage_radius_np,
    "orbit_diameters": _orbit_diameters_np,
}

BACKEND = "numba" if USE_NUMBA else "numpy"
_active = _NUMBA if USE_NUMBA else _NUMPY

hessians = _active["hessians"]
segment_lengths = _active["segment_lengths"]
sinkhorn_log = _active["sinkhorn_log"]
pair_distortion = _active["pair_distortion"]
all_pairs_distortion = _active["all_pairs_distortion"]
coverage_radius = _active["coverage_radius"]
orbit_diameters = _active["orbit_diameters"]


def implementations(name: str):
    """``(numba_version, numpy_version)`` of a kernel, for tests and benchmarks."""
    return _NUMBA[name], _NUMPY[name]
