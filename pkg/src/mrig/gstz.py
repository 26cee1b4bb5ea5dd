"""The GSTZ_n distribution: density, normalizer, Laplace transform, moments,
marginalization, conditioning, convolution, and the exact sequential sampler.

P(a; b, W) has density
    (2/pi)^(n/2) (prod_j a_j e^(a_j b_j))
        * exp(-1/2 a*M_x a - 1/2 b*M_x^{-1} b) / sqrt(det M_x)
on the cone C_W.  Throughout, the off-diagonal quadratic form is written
as sum_{i<j} w_ij a_i a_j (half the full double sum); with that single
convention the normalizer, Laplace transform, n = 1 reduction and W = 0
reduction are all exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .linalg import (
    ConePoint,
    ModelError,
    NotInConeError,
    WeightMatrix,
    cone_membership,
    m_matrix,
    weight_matrix_from_dense,
)
from .univariate import rig_moments

__all__ = [
    "GstzParams",
    "ConditionalResult",
    "log_density",
    "normalizer",
    "laplace",
    "moments",
    "marginalize",
    "condition",
    "convolve_ig",
    "sample",
    "marginal_b",
    "permute_params",
]


@dataclass(frozen=True)
class GstzParams:
    """The triple (a, b, W): a > 0 entrywise, b >= 0 entrywise."""

    a: np.ndarray
    b: np.ndarray
    W: WeightMatrix

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        n = self.W.n
        if a.shape != (n,) or b.shape != (n,):
            raise ModelError(
                f"parameter shapes {a.shape}, {b.shape} do not match n={n}"
            )
        if not np.all(a > 0):
            raise ModelError("all entries of a must be strictly positive")
        if np.any(b < 0):
            raise ModelError("all entries of b must be nonnegative")

    @property
    def n(self) -> int:
        return self.W.n


@dataclass(frozen=True)
class ConditionalResult:
    """Conditional law of the tail given a head point: GSTZ params plus a shift.

    (X_tail - shift) | X_head is distributed as P(tail_params).
    """

    tail_params: GstzParams
    shift: np.ndarray


def _offdiag_quad(W: WeightMatrix, v: np.ndarray) -> float:
    """sum_{i<j} w_ij v_i v_j."""
    return 0.5 * float(v @ W.w @ v)


def log_density(p: GstzParams, x, rel_tol: float = 1e-12) -> float:
    """Log density of P(a; b, W) at x; -inf outside the open cone."""
    x = np.asarray(x, dtype=float)
    try:
        cp = cone_membership(p.W, x, rel_tol)
    except NotInConeError:
        return -np.inf
    return log_density_at(p, cp)


def log_density_at(p: GstzParams, cp: ConePoint) -> float:
    """Log density evaluated at an already-certified cone point."""
    a, b = p.a, p.b
    aMa = 2.0 * float(a**2 @ cp.x) - 2.0 * _offdiag_quad(p.W, a)
    bMinvb = float(b @ cp.inv @ b)
    const = 0.5 * p.n * np.log(2.0 / np.pi) + float(np.sum(np.log(a) + a * b))
    return const - 0.5 * aMa - 0.5 * bMinvb - 0.5 * cp.log_det


def normalizer(p: GstzParams) -> float:
    """G(a; b, W) = (pi/2)^(n/2) prod_j e^(-a_j b_j)/a_j * exp(-sum_{i<j} w_ij a_i a_j).

    This is the mass of exp(-sum_j a_j^2 x_j) under the base measure
    mu(b, W); the density above equals exp(-<x, a^2>) mu(b, W) / G.
    """
    a, b = p.a, p.b
    return float(
        (np.pi / 2.0) ** (p.n / 2.0)
        * np.exp(-float(a @ b) - _offdiag_quad(p.W, a))
        / np.prod(a)
    )


def laplace(p: GstzParams, s) -> float:
    """E[exp(-<s, X>)] for X ~ P(a; b, W); requires s_j > -a_j^2."""
    s = np.asarray(s, dtype=float)
    a, b = p.a, p.b
    if s.shape != (p.n,):
        raise ModelError(f"s has shape {s.shape}, expected ({p.n},)")
    if not np.all(s > -(a**2)):
        raise ModelError("Laplace argument out of domain: need s_j > -a_j^2")
    r = np.sqrt(a**2 + s)
    return float(
        np.exp(
            float(a @ b) - float(r @ b)
            + _offdiag_quad(p.W, a) - _offdiag_quad(p.W, r)
        )
        * np.prod(a / r)
    )


def marginal_b(p: GstzParams, k: int) -> np.ndarray:
    """b-parameter of the k-dimensional head marginal: b[:k] + W[:k, k:] a[k:]."""
    return p.b[:k] + p.W.w[:k, k:] @ p.a[k:]


def moments(p: GstzParams):
    """Mean vector and covariance matrix of P(a; b, W).

    Each margin X_k is RIG(a_k, b_k + sum_j w_kj a_j); off-diagonal
    covariance is -w_ij / (4 a_i a_j).
    """
    a = p.a
    bw = p.b + p.W.w @ a
    mean = np.empty(p.n)
    var = np.empty(p.n)
    for k in range(p.n):
        mean[k], var[k] = rig_moments(a[k], bw[k])
    cov = -p.W.w / (4.0 * np.outer(a, a))
    cov[np.diag_indices(p.n)] = var
    return mean, cov


def marginalize(p: GstzParams, k: int) -> GstzParams:
    """Distribution of (X_1, ..., X_k): P(a[:k], b[:k] + W[:k, k:] a[k:], W_k)."""
    if not 1 <= k <= p.n:
        raise ModelError(f"keep count {k} out of range for n={p.n}")
    if k == p.n:
        return p
    return GstzParams(p.a[:k].copy(), marginal_b(p, k), p.W.head(k))


def condition(p: GstzParams, head, rel_tol: float = 1e-12) -> ConditionalResult:
    """Conditional law of the tail given X_head = head (a vector or ConePoint).

    With Q = W_cross^T M_head^{-1} W_cross, the tail parameters are
    alpha = a_tail, beta = b_tail + W_cross^T M_head^{-1} b_head,
    script-W = W_tail + offdiag(Q), and the shift is diag(Q)/2, so that
    log f(head, y) = log f_marginal(head) + log f_tail(y - shift).
    """
    if isinstance(head, ConePoint):
        cp = head
        k = cp.n
        if not 1 <= k < p.n:
            raise ModelError(f"head dimension {k} out of range for n={p.n}")
    else:
        head = np.asarray(head, dtype=float)
        k = head.shape[0]
        if not 1 <= k < p.n:
            raise ModelError(f"head dimension {k} out of range for n={p.n}")
        cp = cone_membership(p.W.head(k), head, rel_tol)
    cross = p.W.cross(k)  # (k, n-k)
    q_mat = cross.T @ cp.inv @ cross
    beta = p.b[k:] + cross.T @ (cp.inv @ p.b[:k])
    shift = 0.5 * np.diag(q_mat).copy()
    w_tail = p.W.w[k:, k:] + q_mat
    w_tail = w_tail - np.diag(np.diag(w_tail))
    # Stieltjes nonnegativity of M_head^{-1} keeps both beta and the new
    # weights nonnegative; clip the roundoff tail.
    tail = GstzParams(
        p.a[k:].copy(),
        np.maximum(beta, 0.0),
        weight_matrix_from_dense(np.maximum(w_tail, 0.0)),
    )
    return ConditionalResult(tail, shift)


def convolve_ig(p: GstzParams, b_prime) -> GstzParams:
    """Law of X + Y with Y_i ~ IG(a_i, b'_i) independent: P(a, b + b', W)."""
    b_prime = np.asarray(b_prime, dtype=float)
    if b_prime.shape != (p.n,):
        raise ModelError(f"b' has shape {b_prime.shape}, expected ({p.n},)")
    if not np.all(b_prime > 0):
        raise ModelError("all entries of b' must be strictly positive")
    return GstzParams(p.a.copy(), p.b + b_prime, p.W)


def _marginal_b_table(p: GstzParams) -> np.ndarray:
    """Lower-triangular table: row m holds the b-vector of the (m+1)-marginal."""
    n = p.n
    table = np.zeros((n, n))
    for m in range(1, n + 1):
        table[m - 1, :m] = marginal_b(p, m)
    return table


def sample(p: GstzParams, rng, count: int) -> np.ndarray:
    """Draw `count` exact samples from P(a; b, W), shape (count, n).

    Sequential construction from the Schur factorization: X_1 is RIG
    under the 1-marginal; each X_{m+1} is an RIG draw under its
    conditional parameters plus the shift c.v/2 with v = M_head^{-1} c.
    All returned points lie in C_W by construction.
    """
    if count < 1:
        raise ModelError(f"count must be >= 1, got {count}")
    n = p.n
    gammas = rng.standard_gamma(0.5, (count, n))
    normals = rng.standard_normal((count, n))
    uniforms = rng.random((count, n))
    return backend.sample_kernel(
        p.a, p.W.w, _marginal_b_table(p), gammas, normals, uniforms
    )


def permute_params(p: GstzParams, perm) -> GstzParams:
    """Relabel vertices by `perm`: component i of the result is component perm[i]."""
    perm = np.asarray(perm, dtype=int)
    return GstzParams(p.a[perm], p.b[perm], p.W.permute(perm))
