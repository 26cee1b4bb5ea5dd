"""Weight matrices, the positive-definite cone C_W, and closed-form determinants.

A weight matrix W is symmetric with zero diagonal and nonnegative
off-diagonal entries.  For a vector x, M_x = 2*diag(x) - W; the cone C_W
is the open convex set of x for which M_x is positive definite.  Because
the off-diagonal entries of M_x are nonpositive, M_x is an M-matrix on
the cone and its inverse has nonnegative entries (Stieltjes property).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

__all__ = [
    "ModelError",
    "NotInConeError",
    "WeightMatrix",
    "ConePoint",
    "build_weight_matrix",
    "weight_matrix_from_dense",
    "complete_weights",
    "daisy_weights",
    "m_matrix",
    "cone_membership",
    "schur_split",
    "det_complete",
    "det_daisy",
]


class ModelError(ValueError):
    """Invalid weight-matrix or distribution-parameter specification."""


class NotInConeError(ValueError):
    """Point rejected: 2*diag(x) - W is not positive definite."""

    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"not in cone: pivot {pivot_index} is {pivot_value:.6e}"
        )


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric nonnegative weight matrix with zero diagonal, plus graph metadata."""

    n: int
    w: np.ndarray  # (n, n), symmetric, zero diagonal
    edges: tuple  # ((i, j), ...) with i < j and w[i, j] > 0
    degrees: tuple  # neighbor counts per vertex
    connected: bool
    is_tree: bool

    def head(self, k: int) -> "WeightMatrix":
        """Weight matrix of the leading k vertices."""
        if not 1 <= k <= self.n:
            raise ModelError(f"head size {k} out of range for n={self.n}")
        return weight_matrix_from_dense(self.w[:k, :k])

    def tail(self, k: int) -> "WeightMatrix":
        """Weight matrix of the trailing n-k vertices."""
        return weight_matrix_from_dense(self.w[k:, k:])

    def cross(self, k: int) -> np.ndarray:
        """Off-diagonal block coupling vertices 0..k-1 to k..n-1, shape (k, n-k)."""
        return self.w[:k, k:].copy()

    def permute(self, perm) -> "WeightMatrix":
        perm = np.asarray(perm, dtype=int)
        return weight_matrix_from_dense(self.w[np.ix_(perm, perm)])


@dataclass(frozen=True)
class ConePoint:
    """A vector x certified to lie in C_W, with the factorization of M_x.

    Carries the lower Cholesky factor, log det M_x, and the (symmetric,
    entrywise nonnegative) inverse of M_x.
    """

    x: np.ndarray
    chol: np.ndarray
    log_det: float
    inv: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _graph_metadata(w: np.ndarray):
    n = w.shape[0]
    adj = w > 0.0
    edges = tuple(
        (i, j) for i in range(n) for j in range(i + 1, n) if adj[i, j]
    )
    degrees = tuple(int(adj[i].sum()) for i in range(n))
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    connected = bool(seen.all())
    is_tree = connected and len(edges) == n - 1
    return edges, degrees, connected, is_tree


def build_weight_matrix(n: int, entries) -> WeightMatrix:
    """Assemble a WeightMatrix from upper-triangle entries (i, j, w_ij).

    Requires 0 <= i < j < n, w_ij > 0, and no duplicate pairs.
    """
    if n < 1:
        raise ModelError(f"dimension must be >= 1, got {n}")
    w = np.zeros((n, n))
    seen = set()
    for i, j, wij in entries:
        if not (0 <= i < j < n):
            raise ModelError(f"edge indices ({i}, {j}) out of range for n={n}")
        if (i, j) in seen:
            raise ModelError(f"duplicate edge ({i}, {j})")
        if not wij > 0:
            raise ModelError(f"edge ({i}, {j}) has nonpositive weight {wij}")
        seen.add((i, j))
        w[i, j] = w[j, i] = float(wij)
    edges, degrees, connected, is_tree = _graph_metadata(w)
    return WeightMatrix(n, w, edges, degrees, connected, is_tree)


def weight_matrix_from_dense(w) -> WeightMatrix:
    """Build a WeightMatrix from a dense symmetric array."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ModelError(f"weight matrix must be square, got shape {w.shape}")
    n = w.shape[0]
    if not np.allclose(w, w.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(w).max())):
        raise ModelError("weight matrix must be symmetric")
    if np.any(np.diag(w) != 0.0):
        raise ModelError("weight matrix must have zero diagonal")
    if np.any(w < 0.0):
        raise ModelError("weight matrix entries must be nonnegative")
    w = 0.5 * (w + w.T)
    edges, degrees, connected, is_tree = _graph_metadata(w)
    return WeightMatrix(n, w, edges, degrees, connected, is_tree)


def complete_weights(n: int, c: float) -> WeightMatrix:
    """Complete graph on n vertices with common weight c."""
    return build_weight_matrix(
        n, [(i, j, c) for i in range(n) for j in range(i + 1, n)]
    )


def daisy_weights(c) -> WeightMatrix:
    """Star graph: center vertex 0, leaves 1..len(c) with weights c_i."""
    c = np.asarray(c, dtype=float)
    return build_weight_matrix(
        len(c) + 1, [(0, i + 1, ci) for i, ci in enumerate(c)]
    )


def m_matrix(W: WeightMatrix, x) -> np.ndarray:
    """Return M_x = 2*diag(x) - W.  No positivity requirement on x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (W.n,):
        raise ModelError(f"x has shape {x.shape}, expected ({W.n},)")
    M = -W.w.copy()
    M[np.diag_indices(W.n)] = 2.0 * x
    return M


def cone_membership(W: WeightMatrix, x, rel_tol: float = 1e-12) -> ConePoint:
    """Certify x in C_W via Cholesky with relative pivot tolerance.

    A pivot (squared) below rel_tol * max(diag M_x) rejects the point;
    boundary points are rejected since the densities live on the open cone.
    Raises NotInConeError with the first failing pivot index.
    """
    if not rel_tol > 0:
        raise ModelError(f"rel_tol must be positive, got {rel_tol}")
    M = m_matrix(W, x)
    n = W.n
    scale = float(np.max(np.diag(M))) if n else 0.0
    thresh = rel_tol * max(scale, 0.0)
    L = np.zeros((n, n))
    for k in range(n):
        d = M[k, k] - L[k, :k] @ L[k, :k]
        if not d > thresh:
            raise NotInConeError(k, float(d))
        L[k, k] = np.sqrt(d)
        if k + 1 < n:
            L[k + 1 :, k] = (M[k + 1 :, k] - L[k + 1 :, :k] @ L[k, :k]) / L[k, k]
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    inv = cho_solve((L, True), np.eye(n))
    inv = 0.5 * (inv + inv.T)
    return ConePoint(np.asarray(x, dtype=float).copy(), L, log_det, inv)


def schur_split(p: ConePoint, W: WeightMatrix, k: int):
    """Split M_x at index k into head factorization, tail Schur complement, cross block.

    Returns (head ConePoint for x[:k] under W_k, S, cross) where
    S = 2*diag(x[k:]) - W'_{n-k} - cross^T M_head^{-1} cross and
    det M_x = det M_head * det S.
    """
    n = W.n
    if not 1 <= k < n:
        raise ModelError(f"split index {k} out of range for n={n}")
    head = cone_membership(W.head(k), p.x[:k])
    cross = W.cross(k)
    S = m_matrix(W.tail(k), p.x[k:]) - cross.T @ head.inv @ cross
    return head, S, cross


def det_complete(c: float, x) -> float:
    """det M_x for the complete graph with common weight c > 0."""
    if not c > 0:
        raise ModelError(f"complete-graph weight must be positive, got {c}")
    x = np.asarray(x, dtype=float)
    d = c + 2.0 * x
    return float(np.prod(d) * (1.0 - np.sum(c / d)))


def det_daisy(c, x) -> float:
    """det M_x for the star graph; x = (x_0, x_1, ..., x_n) with center first."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != (len(c) + 1,):
        raise ModelError(
            f"daisy point has shape {x.shape}, expected ({len(c) + 1},)"
        )
    leaves = x[1:]
    return float(
        np.prod(2.0 * leaves) * (2.0 * x[0] - np.sum(c**2 / (2.0 * leaves)))
    )
