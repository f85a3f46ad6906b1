"""Laplacian eigenbasis, graph Fourier transform and exact spectral filtering."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .eigen import symmetric_eig
from .errors import DimensionMismatch, DomainMismatch, NonSymmetricKind, TooManyCoefficients
from .formats import fmt, format_matrix_csv
from .graph import Graph
from .laplacian import LaplacianKind, LaplacianMatrix

ZERO_EIGENVALUE_TOL = 1e-8


class Domain(enum.Enum):
    VERTEX = "vertex"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class GraphSignal:
    values: np.ndarray
    domain: Domain = Domain.VERTEX

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenpairs of a symmetric Laplacian, eigenvalues ascending.

    Column ``U[:, i]`` is the eigenvector for ``lam[i]``.
    """

    U: np.ndarray = field(repr=False)
    lam: np.ndarray
    kind: LaplacianKind

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def lambda_max(self) -> float:
        return float(self.lam[-1])

    def zero_multiplicity(self, tol: float = ZERO_EIGENVALUE_TOL) -> int:
        return int(np.sum(np.abs(self.lam) < tol))

    def matrix_function(self, g: Callable) -> np.ndarray:
        """Dense ``U diag(g(lam)) U^T``."""
        return (self.U * _response(g, self.lam)) @ self.U.T

    def to_csv(self) -> tuple[str, str]:
        """Diagnostic export: eigenvalues as one CSV line, ``U`` as a dense CSV."""
        return ",".join(fmt(x) for x in self.lam) + "\n", format_matrix_csv(self.U)


def eigendecompose(L: LaplacianMatrix) -> SpectralBasis:
    if not L.kind.symmetric:
        raise NonSymmetricKind(f"{L.kind.value} Laplacian is not symmetric")
    lam, U = symmetric_eig(L.toarray())
    lam.flags.writeable = False
    U.flags.writeable = False
    return SpectralBasis(U=U, lam=lam, kind=L.kind)


def _response(g: Callable, lam: np.ndarray) -> np.ndarray:
    """Evaluate a scalar filter response at every eigenvalue."""
    try:
        out = np.asarray(g(lam))
    except TypeError:
        out = None
    if out is None or out.shape != lam.shape:
        if out is not None and out.ndim == 0:
            return np.full(lam.shape, out[()], dtype=out.dtype)
        out = np.array([g(float(x)) for x in lam])
    return out


def _values(f, domain: Domain, n: int) -> np.ndarray:
    if isinstance(f, GraphSignal):
        if f.domain is not domain:
            raise DomainMismatch(f"expected a {domain.value}-domain signal, got {f.domain.value}")
        f = f.values
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match basis size {n}")
    return f


def gft(basis: SpectralBasis, f) -> GraphSignal:
    """Analysis: spectral coefficients ``U^T f``."""
    return GraphSignal(basis.U.T @ _values(f, Domain.VERTEX, basis.n), Domain.SPECTRAL)


def igft(basis: SpectralBasis, fhat) -> GraphSignal:
    """Synthesis: ``U fhat``."""
    return GraphSignal(basis.U @ _values(fhat, Domain.SPECTRAL, basis.n), Domain.VERTEX)


def exact_filter(basis: SpectralBasis, g: Callable, f) -> GraphSignal:
    """``U diag(g(lam)) U^T f``; accepts an (n,) signal or an (n, k) stack."""
    x = _values(f, Domain.VERTEX, basis.n)
    gain = _response(g, basis.lam)
    coeffs = basis.U.T @ x
    coeffs = gain * coeffs if x.ndim == 1 else gain[:, None] * coeffs
    out = basis.U @ coeffs
    if np.iscomplexobj(out):
        out = out.real
    return GraphSignal(out, Domain.VERTEX)


def polynomial_shift_filter(g: Graph, h: Sequence[float], f) -> np.ndarray:
    """``(h0 I + h1 W + ... + hL W^L) f`` by Horner's rule on the adjacency shift."""
    h = list(h)
    if not h:
        raise TooManyCoefficients("need at least one coefficient")
    if len(h) - 1 > g.n:
        raise TooManyCoefficients(f"degree {len(h) - 1} exceeds node count {g.n}")
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (g.n,):
        raise DimensionMismatch(f"signal length {f.shape[:1]} does not match {g.n} nodes")
    y = h[-1] * f
    for coeff in reversed(h[:-1]):
        y = g.adjacency @ y + coeff * f
    return y
