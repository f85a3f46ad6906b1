"""Dense symmetric eigensolver.

Householder reduction to tridiagonal form followed by the implicit-shift QL
iteration with Wilkinson shifts.  Intended for desk-scale matrices
(``n`` up to a few thousand).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure, ShapeMismatch

QL_TOL = 1e-14
_EPS = np.finfo(float).eps


def householder_tridiagonalize(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce a symmetric matrix to tridiagonal form ``T = Q^T A Q``.

    Returns the diagonal ``d`` (length n), the off-diagonal ``e``
    (length n-1, ``e[k] = T[k+1, k]``) and the orthogonal ``Q``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        # reflect x onto -sign(x0) * alpha * e1 to avoid cancellation
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        sub = a[k + 1:, k + 1:]
        p = beta * (sub @ v)
        w = p - (0.5 * beta * (v @ p)) * v
        sub -= np.outer(v, w) + np.outer(w, v)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        q[:, k + 1:] -= beta * np.outer(q[:, k + 1:] @ v, v)
    d = np.diag(a).copy()
    e = np.diag(a, -1).copy()
    return d, e, q


def tridiagonal_ql(d, e, z=None, max_sweeps: int | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """Eigen-decompose the symmetric tridiagonal matrix with diagonal ``d``
    and off-diagonal ``e`` by implicit-shift QL.

    ``z`` (n x n) is post-multiplied by the accumulated rotations, so passing
    the identity yields the tridiagonal eigenvectors and passing the
    Householder ``Q`` yields eigenvectors of the original matrix.  With
    ``z=None`` only eigenvalues are computed.  Results are sorted ascending.

    Raises ConvergenceFailure after ``max_sweeps`` (default 30 n) QL sweeps.
    """
    d = [float(x) for x in np.asarray(d, dtype=float)]
    n = len(d)
    e = [float(x) for x in np.asarray(e, dtype=float)] + [0.0]
    if len(e) != n:
        raise ShapeMismatch(f"off-diagonal must have length {n - 1}")
    # rotations act on columns of z; keep them as contiguous rows of zt
    zt = None if z is None else np.array(z, dtype=float).T.copy()
    if max_sweeps is None:
        max_sweeps = 30 * max(n, 1)
    anorm = max((abs(d[i]) + abs(e[i]) + (abs(e[i - 1]) if i else 0.0) for i in range(n)), default=0.0)
    floor = _EPS * anorm
    sweeps = 0

    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= QL_TOL * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceFailure(f"QL iteration exceeded {max_sweeps} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    lo = zt[i].copy()
                    hi = zt[i + 1]
                    zt[i] *= c
                    zt[i] -= s * hi
                    hi *= c
                    hi += s * lo
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    w = np.array(d)
    order = np.argsort(w, kind="stable")
    w = w[order]
    if zt is None:
        return w, None
    return w, zt[order].T.copy()


def symmetric_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    d, e, q = householder_tridiagonalize(a)
    return tridiagonal_ql(d, e, q)


def symmetric_eigvals(a) -> np.ndarray:
    d, e, _ = householder_tridiagonalize(a)
    return tridiagonal_ql(d, e)[0]
