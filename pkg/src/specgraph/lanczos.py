"""Lanczos approximation of matrix functions applied to a vector.

``g(L) f ~ ||f|| V_M g(H_M) e_1`` where ``V_M`` is an orthonormal basis of
the Krylov space ``span{f, Lf, ..., L^{M-1} f}`` and ``H_M = V_M^T L V_M`` is
tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import chebyshev as C

from .eigen import tridiagonal_ql
from .errors import DimensionMismatch, NonSymmetricKind, ShapeMismatch, ZeroVector
from .laplacian import LaplacianMatrix
from .spectral import _response, eigendecompose, exact_filter

BREAKDOWN_RTOL = 1e-12
BOUND_GRID = 1000


@dataclass(frozen=True)
class LanczosBasis:
    """Result of :func:`lanczos_iterate`.

    ``beta[k]`` couples steps ``k`` and ``k + 1``, so ``H`` has ``alpha`` on
    its diagonal and ``beta`` on both off-diagonals.
    """

    V: np.ndarray = field(repr=False)
    alpha: np.ndarray
    beta: np.ndarray
    norm_f: float

    @property
    def M_effective(self) -> int:
        return len(self.alpha)

    def tridiagonal(self) -> np.ndarray:
        return np.diag(self.alpha) + np.diag(self.beta, 1) + np.diag(self.beta, -1)


def lanczos_iterate(L: LaplacianMatrix, f, M: int) -> LanczosBasis:
    """Run ``M`` Lanczos steps from ``f`` with full reorthogonalization.

    Stops early (``M_effective < M``) when the next off-diagonal falls below
    ``1e-12 * ||L||_F``: the Krylov space is then invariant.
    """
    if not L.kind.symmetric:
        raise NonSymmetricKind(f"{L.kind.value} Laplacian is not symmetric")
    f = np.asarray(f, dtype=float)
    n = L.n
    if f.shape != (n,):
        raise DimensionMismatch(f"signal shape {f.shape} does not match ({n},)")
    if not 1 <= M <= n:
        raise ValueError(f"need 1 <= M <= {n}, got {M}")
    norm_f = float(np.linalg.norm(f))
    if norm_f == 0.0:
        raise ZeroVector("Lanczos needs a nonzero starting vector")
    tol = BREAKDOWN_RTOL * float(np.sqrt(L.mat.multiply(L.mat).sum()))

    V = np.zeros((n, M))
    alpha: list[float] = []
    beta: list[float] = []
    V[:, 0] = f / norm_f
    for j in range(M):
        v = V[:, j]
        w = L.mat @ v
        a = float(v @ w)
        alpha.append(a)
        w = w - a * v
        if j > 0:
            w -= beta[-1] * V[:, j - 1]
        # modified Gram-Schmidt against the whole basis, twice
        for _ in range(2):
            for i in range(j + 1):
                w -= (V[:, i] @ w) * V[:, i]
        if j == M - 1:
            break
        b = float(np.linalg.norm(w))
        if b <= tol:
            break
        beta.append(b)
        V[:, j + 1] = w / b
    m_eff = len(alpha)
    V = V[:, :m_eff].copy()
    return LanczosBasis(V=V, alpha=np.array(alpha), beta=np.array(beta), norm_f=norm_f)


def tridiag_eig(alpha, beta) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of the symmetric tridiagonal
    matrix with diagonal ``alpha`` and off-diagonal ``beta``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.ndim != 1 or beta.shape != (max(len(alpha) - 1, 0),):
        raise ShapeMismatch(f"alpha {alpha.shape} and beta {beta.shape} are inconsistent")
    return tridiagonal_ql(alpha, beta, np.eye(len(alpha)))


def lanczos_filter(L: LaplacianMatrix, g: Callable, f, M: int) -> np.ndarray:
    """Approximate ``g(L) f`` from ``M`` Lanczos steps."""
    basis = lanczos_iterate(L, f, M)
    return _filter_from_basis(basis, g)


def _filter_from_basis(basis: LanczosBasis, g: Callable) -> np.ndarray:
    mu, S = tridiag_eig(basis.alpha, basis.beta)
    gains = _response(g, mu)
    y = S @ (gains * S[0, :])
    out = basis.norm_f * (basis.V @ y)
    return out.real if np.iscomplexobj(out) else out


def chebyshev_interpolant(g: Callable, degree: int, lo: float, hi: float) -> C.Chebyshev:
    """Interpolant of ``g`` at the ``degree + 1`` Chebyshev points of ``[lo, hi]``."""
    if hi <= lo:
        hi = lo + 1.0
    return C.Chebyshev.interpolate(lambda x: _response(g, np.asarray(x, dtype=float)), degree, domain=[lo, hi])


def polynomial_proxy_error(g: Callable, degree: int, lambda_max: float, grid: int = BOUND_GRID) -> float:
    """Sup-error of the degree-``degree`` Chebyshev interpolant of ``g`` on
    ``[0, lambda_max]``, sampled on ``grid`` points.

    Upper-bounds (up to sampling) the best uniform approximation error.
    """
    p = chebyshev_interpolant(g, degree, 0.0, lambda_max)
    z = np.linspace(0.0, max(lambda_max, 0.0), grid)
    return float(np.max(np.abs(_response(g, z) - p(z))))


class BoundCheck(NamedTuple):
    error: float
    bound: float
    satisfied: bool
    ritz_values: np.ndarray


def theorem_bound_check(L: LaplacianMatrix, g: Callable, f, M: int, basis=None) -> BoundCheck:
    """Compare the Lanczos error with ``2 ||f|| * (polynomial proxy error)``.

    The exact filter comes from a full eigendecomposition (pass ``basis`` to
    reuse one); the proxy uses a degree ``M - 1`` Chebyshev interpolant on
    ``[0, lambda_max]``.
    """
    f = np.asarray(f, dtype=float)
    if basis is None:
        basis = eigendecompose(L)
    exact = exact_filter(basis, g, f).values
    lb = lanczos_iterate(L, f, M)
    approx = _filter_from_basis(lb, g)
    error = float(np.linalg.norm(exact - approx))
    lmax = max(basis.lambda_max, 0.0)
    bound = 2.0 * lb.norm_f * polynomial_proxy_error(g, M - 1, lmax)
    ritz = tridiag_eig(lb.alpha, lb.beta)[0]
    return BoundCheck(error, bound, error <= bound + 1e-12, ritz)


# named scalar functions for command-line use ---------------------------------

def parse_function(text: str) -> Callable:
    """``exp-neg`` -> exp(-x); ``heat:t`` -> exp(-t x); ``poly:c0,c1,...`` -> sum c_k x^k."""
    text = text.strip()
    if text == "exp-neg":
        return lambda x: np.exp(-np.asarray(x, dtype=float))
    if text.startswith("heat:"):
        t = float(text[5:])
        return lambda x: np.exp(-t * np.asarray(x, dtype=float))
    if text.startswith("poly:"):
        coeffs = [float(c) for c in text[5:].split(",") if c.strip()]
        if not coeffs:
            raise ValueError("poly: needs at least one coefficient")
        return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)
    raise ValueError(f"unknown function {text!r} (use exp-neg, heat:t or poly:c0,c1,...)")
