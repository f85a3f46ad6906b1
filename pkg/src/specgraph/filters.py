"""Spectral filter families and the first-order GCN propagation rule.

Four filter specifications share one application interface:

* :class:`ExactFilter` - one free gain per eigenvalue (spectral CNN);
* :class:`ChebyshevFilter` - ``sum_k theta_k T_k(2 L / lambda_max - I)``;
* :class:`CayleyFilter` - ``c0 + 2 Re sum_j c_j C(hL)^j`` with the Cayley
  transform ``C(x) = (x - i) / (x + i)``;
* :class:`FirstOrderGCN` - ``theta * A_hat`` with the renormalized adjacency.

Every family can also be routed through :func:`exact_filter` via its
spectral response, which is how the approximate paths are validated.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonpositiveLambdaMax,
    NonSymmetricKind,
    ShapeMismatch,
    SolveFailure,
)
from .graph import Graph
from .laplacian import LaplacianKind, LaplacianMatrix, laplacian
from .spectral import SpectralBasis, eigendecompose, exact_filter
from .eigen import symmetric_eig


# ---------------------------------------------------------------------------
# filter specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactFilter:
    theta: np.ndarray
    laplacian: LaplacianKind = LaplacianKind.SYM_NORMALIZED
    kind = "exact"

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "laplacian", LaplacianKind.parse(self.laplacian))

    @property
    def parameter_count(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class ChebyshevFilter:
    theta: np.ndarray
    lambda_max: float = 2.0
    laplacian: LaplacianKind = LaplacianKind.SYM_NORMALIZED
    kind = "chebyshev"

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        if len(theta) < 1:
            raise ValueError("Chebyshev filter needs at least one coefficient")
        if not self.lambda_max > 0:
            raise NonpositiveLambdaMax(f"lambda_max must be positive, got {self.lambda_max}")
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "lambda_max", float(self.lambda_max))
        object.__setattr__(self, "laplacian", LaplacianKind.parse(self.laplacian))

    @property
    def order(self) -> int:
        return len(self.theta)

    @property
    def parameter_count(self) -> int:
        return len(self.theta)

    def response(self, lam):
        x = 2.0 * np.asarray(lam, dtype=float) / self.lambda_max - 1.0
        t_prev, t_cur = np.ones_like(x), x
        out = self.theta[0] * t_prev
        for k in range(1, self.order):
            out = out + self.theta[k] * t_cur
            t_prev, t_cur = t_cur, 2.0 * x * t_cur - t_prev
        return out


@dataclass(frozen=True)
class CayleyFilter:
    c0: float
    c: np.ndarray
    h: float = 1.0
    laplacian: LaplacianKind = LaplacianKind.SYM_NORMALIZED
    kind = "cayley"

    def __post_init__(self):
        c = np.array(self.c, dtype=complex).ravel()
        if not self.h > 0:
            raise ValueError(f"spectral zoom h must be positive, got {self.h}")
        c.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "laplacian", LaplacianKind.parse(self.laplacian))

    @property
    def order(self) -> int:
        return len(self.c)

    @property
    def parameter_count(self) -> int:
        # real c0, r complex coefficients, zoom h
        return 1 + 2 * self.order + 1

    def response(self, lam):
        x = self.h * np.asarray(lam, dtype=float)
        ct = (x - 1j) / (x + 1j)
        acc = np.zeros_like(ct)
        power = np.ones_like(ct)
        for cj in self.c:
            power = power * ct
            acc = acc + cj * power
        return self.c0 + 2.0 * acc.real


@dataclass(frozen=True)
class FirstOrderGCN:
    theta: float
    kind = "first_order_gcn"

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def parameter_count(self) -> int:
        return 1


FilterSpec = ExactFilter | ChebyshevFilter | CayleyFilter | FirstOrderGCN


def spec_to_dict(spec: FilterSpec) -> dict:
    if isinstance(spec, ExactFilter):
        return {"kind": spec.kind, "theta": spec.theta.tolist(), "laplacian": spec.laplacian.value}
    if isinstance(spec, ChebyshevFilter):
        return {
            "kind": spec.kind,
            "theta": spec.theta.tolist(),
            "lambda_max": spec.lambda_max,
            "laplacian": spec.laplacian.value,
        }
    if isinstance(spec, CayleyFilter):
        return {
            "kind": spec.kind,
            "c0": spec.c0,
            "c": [[z.real, z.imag] for z in spec.c],
            "h": spec.h,
            "laplacian": spec.laplacian.value,
        }
    if isinstance(spec, FirstOrderGCN):
        return {"kind": spec.kind, "theta": spec.theta}
    raise TypeError(f"not a filter spec: {spec!r}")


def spec_from_dict(doc: dict) -> FilterSpec:
    kind = str(doc.get("kind", "")).lower()
    lap = doc.get("laplacian", LaplacianKind.SYM_NORMALIZED.value)
    if kind == "exact":
        return ExactFilter(doc["theta"], laplacian=lap)
    if kind == "chebyshev":
        return ChebyshevFilter(doc["theta"], doc.get("lambda_max", 2.0), laplacian=lap)
    if kind == "cayley":
        c = [complex(re, im) for re, im in doc.get("c", [])]
        return CayleyFilter(doc["c0"], c, doc.get("h", 1.0), laplacian=lap)
    if kind in ("first_order_gcn", "firstordergcn", "gcn"):
        return FirstOrderGCN(doc["theta"])
    raise ValueError(f"unknown filter kind {doc.get('kind')!r}")


def spec_to_json(spec: FilterSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


def spec_from_json(text: str) -> FilterSpec:
    return spec_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# spectral CNN
# ---------------------------------------------------------------------------

def spectral_cnn_layer(
    basis: SpectralBasis,
    filters: Sequence[Sequence[ExactFilter | np.ndarray]],
    F_in,
    sigma: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """One spectral CNN layer.

    ``filters[i][j]`` holds the per-eigenvalue gains from input channel ``i``
    to output channel ``j``; output column ``j`` is
    ``sigma(sum_i U diag(theta_ij) U^T F_in[:, i])``.
    """
    F_in = np.asarray(F_in, dtype=float)
    if F_in.ndim == 1:
        F_in = F_in[:, None]
    n, c_in = F_in.shape
    if n != basis.n:
        raise ShapeMismatch(f"signal has {n} rows, basis has {basis.n}")
    if len(filters) != c_in:
        raise ShapeMismatch(f"filter grid has {len(filters)} rows, input has {c_in} channels")
    c_out = len(filters[0]) if c_in else 0
    theta = np.empty((c_in, c_out, n))
    for i, row in enumerate(filters):
        if len(row) != c_out:
            raise ShapeMismatch("filter grid is ragged")
        for j, spec in enumerate(row):
            gains = spec.theta if isinstance(spec, ExactFilter) else np.asarray(spec, dtype=float)
            if gains.shape != (n,):
                raise ShapeMismatch(f"filter ({i}, {j}) has {gains.shape} gains, need ({n},)")
            theta[i, j] = gains
    fhat = basis.U.T @ F_in
    out_hat = np.einsum("ijn,ni->nj", theta, fhat)
    out = basis.U @ out_hat
    return out if sigma is None else sigma(out)


# ---------------------------------------------------------------------------
# Chebyshev filters
# ---------------------------------------------------------------------------

def _require_symmetric(L: LaplacianMatrix) -> None:
    if not L.kind.symmetric:
        raise NonSymmetricKind(f"{L.kind.value} Laplacian is not symmetric")


def chebyshev_apply(L: LaplacianMatrix, spec: ChebyshevFilter, f) -> np.ndarray:
    """``sum_k theta_k T_k(L~) f`` with ``L~ = 2 L / lambda_max - I``.

    Uses the three-term recurrence on vectors only; ``T_k(L~)`` is never formed.
    """
    _require_symmetric(L)
    if not spec.lambda_max > 0:
        raise NonpositiveLambdaMax(f"lambda_max must be positive, got {spec.lambda_max}")
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (L.n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match {L.n}")
    scale = 2.0 / spec.lambda_max

    def shifted(x):
        return scale * (L.mat @ x) - x

    t_prev = f
    out = spec.theta[0] * t_prev
    if spec.order == 1:
        return out
    t_cur = shifted(f)
    out = out + spec.theta[1] * t_cur
    for k in range(2, spec.order):
        t_prev, t_cur = t_cur, 2.0 * shifted(t_cur) - t_prev
        out = out + spec.theta[k] * t_cur
    return out


def chebyshev_locality_matrix(
    L: LaplacianMatrix,
    K: int,
    theta=None,
    lambda_max: float | None = None,
) -> np.ndarray:
    """Dense matrix of the degree-``K`` filter ``sum_{k<=K} theta_k T_k(L~)``.

    Test surface for K-locality: entry ``(i, j)`` is exactly zero whenever
    nodes ``i`` and ``j`` are more than ``K`` hops apart.  ``theta`` defaults
    to all ones and ``lambda_max`` to 2.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    theta = np.ones(K + 1) if theta is None else np.asarray(theta, dtype=float)
    if theta.shape != (K + 1,):
        raise ShapeMismatch(f"need {K + 1} coefficients for degree {K}")
    lmax = 2.0 if lambda_max is None else float(lambda_max)
    if not lmax > 0:
        raise NonpositiveLambdaMax(f"lambda_max must be positive, got {lmax}")
    n = L.n
    Lt = (2.0 / lmax) * L.toarray() - np.eye(n)
    t_prev = np.eye(n)
    out = theta[0] * t_prev
    if K == 0:
        return out
    t_cur = Lt
    out = out + theta[1] * t_cur
    for k in range(2, K + 1):
        t_prev, t_cur = t_cur, 2.0 * Lt @ t_cur - t_prev
        out = out + theta[k] * t_cur
    return out


# ---------------------------------------------------------------------------
# Cayley filters
# ---------------------------------------------------------------------------

def cayley_transform(L: LaplacianMatrix, h: float) -> np.ndarray:
    """Dense ``(hL - iI)(hL + iI)^{-1}``; unitary for symmetric ``L``."""
    _require_symmetric(L)
    hl = h * L.toarray().astype(complex)
    eye = np.eye(L.n)
    # (hL - iI) and (hL + iI)^{-1} commute
    return np.linalg.solve(hl + 1j * eye, hl - 1j * eye)


def cayley_apply(L: LaplacianMatrix, spec: CayleyFilter, f) -> np.ndarray:
    """``c0 f + 2 Re sum_j c_j (hL - iI)^j (hL + iI)^{-j} f``.

    ``hL + iI`` is LU-factored once; each power costs one solve and one
    multiplication.
    """
    _require_symmetric(L)
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (L.n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match {L.n}")
    out = spec.c0 * f
    if spec.order == 0:
        return out
    hl = spec.h * L.toarray()
    eye = np.eye(L.n)
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu = scipy.linalg.lu_factor(hl + 1j * eye)
        except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError) as exc:
            raise SolveFailure(f"cannot factor hL + iI: {exc}") from exc
    minus = hl - 1j * eye
    y = f.astype(complex)
    acc = np.zeros_like(y)
    for cj in spec.c:
        y = minus @ scipy.linalg.lu_solve(lu, y)
        acc += cj * y
    if not np.all(np.isfinite(acc)):
        raise SolveFailure("non-finite values in Cayley solve")
    return out + 2.0 * acc.real


# ---------------------------------------------------------------------------
# first-order GCN
# ---------------------------------------------------------------------------

def renormalized_adjacency(g: Graph) -> np.ndarray:
    """``D~^{-1/2} (A + I) D~^{-1/2}`` with ``D~`` the degrees of ``A + I``."""
    a = g.dense_adjacency() + np.eye(g.n)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    # symmetric scaling via the commutative product keeps A_hat exactly symmetric
    return a * np.multiply.outer(inv_sqrt, inv_sqrt)


def first_order_filter(g: Graph, theta: float, f, renormalize: bool = True) -> np.ndarray:
    """First-order filter ``theta (I + D^{-1/2} A D^{-1/2}) f``, or with the
    renormalization trick ``theta A_hat f`` (default)."""
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (g.n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match {g.n}")
    if renormalize:
        return theta * (renormalized_adjacency(g) @ f)
    d = g.degrees
    inv_sqrt = np.zeros(g.n)
    inv_sqrt[d > 0] = 1.0 / np.sqrt(d[d > 0])
    a = g.dense_adjacency() * np.multiply.outer(inv_sqrt, inv_sqrt)
    return theta * (f + a @ f)


def gcn_propagate(A_hat, F, W) -> np.ndarray:
    """Linear propagation ``A_hat F W``."""
    F = np.asarray(F, dtype=float)
    W = np.asarray(W, dtype=float)
    if F.ndim != 2 or W.ndim != 2:
        raise ShapeMismatch("features and weights must be 2-d")
    if A_hat.shape != (F.shape[0], F.shape[0]):
        raise ShapeMismatch(f"A_hat {A_hat.shape} incompatible with {F.shape[0]} nodes")
    if F.shape[1] != W.shape[0]:
        raise ShapeMismatch(f"features have {F.shape[1]} channels, weights expect {W.shape[0]}")
    # cheaper association first
    if W.shape[1] < F.shape[1]:
        return A_hat @ (F @ W)
    return (A_hat @ F) @ W


# ---------------------------------------------------------------------------
# lambda_max
# ---------------------------------------------------------------------------

def estimate_lambda_max(
    L: LaplacianMatrix | np.ndarray | sp.spmatrix,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest eigenvalue of a symmetric positive semi-definite matrix by power iteration.

    Stops once the eigen-residual ``||Lx - rho x||`` drops below ``tol * rho``
    or the Rayleigh quotient stalls; a zero matrix yields 0.
    """
    if isinstance(L, LaplacianMatrix):
        _require_symmetric(L)
        mat = L.mat
    else:
        mat = L
    n = mat.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1.0
    x /= np.linalg.norm(x)
    rho = 0.0
    for _ in range(max_iter):
        y = mat @ x
        rho_new = float(x @ y)
        ynorm = np.linalg.norm(y)
        if ynorm == 0.0:
            return 0.0
        resid = np.linalg.norm(y - rho_new * x)
        if resid <= tol * abs(rho_new) or abs(rho_new - rho) <= 1e-3 * tol * abs(rho_new):
            return rho_new
        rho = rho_new
        x = y / ynorm
    raise ConvergenceFailure(f"power iteration did not converge in {max_iter} steps")


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def spectral_response(spec: FilterSpec) -> Callable:
    if isinstance(spec, (ChebyshevFilter, CayleyFilter)):
        return spec.response
    raise TypeError(f"{type(spec).__name__} has no closed-form response in lambda")


def apply_filter(spec: FilterSpec, g: Graph, f, method: str = "direct") -> np.ndarray:
    """Apply ``spec`` to signal ``f`` on graph ``g``.

    ``method="direct"`` uses each family's own algorithm; ``method="exact"``
    routes through the eigendecomposition as a cross-check.
    """
    if method not in ("direct", "exact"):
        raise ValueError(f"unknown method {method!r}")
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (g.n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match {g.n}")

    if isinstance(spec, FirstOrderGCN):
        if method == "direct":
            return first_order_filter(g, spec.theta, f)
        mu, V = symmetric_eig(renormalized_adjacency(g))
        coeffs = V.T @ f
        coeffs = (spec.theta * mu) * coeffs if f.ndim == 1 else (spec.theta * mu)[:, None] * coeffs
        return V @ coeffs

    L = laplacian(g, spec.laplacian)
    if isinstance(spec, ExactFilter):
        basis = eigendecompose(L)
        if len(spec.theta) != basis.n:
            raise ShapeMismatch(f"exact filter has {len(spec.theta)} gains for {basis.n} eigenvalues")
        coeffs = basis.U.T @ f
        coeffs = spec.theta * coeffs if f.ndim == 1 else spec.theta[:, None] * coeffs
        return basis.U @ coeffs
    if method == "exact":
        return exact_filter(eigendecompose(L), spec.response, f).values
    if isinstance(spec, ChebyshevFilter):
        return chebyshev_apply(L, spec, f)
    if isinstance(spec, CayleyFilter):
        return cayley_apply(L, spec, f)
    raise TypeError(f"not a filter spec: {spec!r}")
