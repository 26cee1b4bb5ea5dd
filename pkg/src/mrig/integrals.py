"""Numerical oracles: quadrature and Monte Carlo estimators for every
closed-form integral, plus Gaussian orthant probabilities.

Integrals over the unbounded cone C_W use the sequential Schur
coordinates t_1, ..., t_n: the map t -> x with x_1 = t_1^2/2 and
x_{m+1} = (t_{m+1}^2 + c^T M_head^{-1} c)/2 is a bijection from
(0, inf)^n onto C_W whose Jacobian cancels det(M_x)^{-1/2} exactly,
and det M_x = prod t_m^2 in these coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx, gammaln
from scipy.stats import multivariate_normal

from .linalg import ConePoint, ModelError, WeightMatrix, cone_membership, m_matrix
from .univariate import log_bessel_k

__all__ = [
    "Estimate",
    "quad_gstz_lhs",
    "quad_stz_lhs",
    "quad_tree_integral",
    "mc_gstz_lhs",
    "mc_stz_lhs",
    "gstz_rhs",
    "stz_rhs",
    "tree_integral_closed",
    "tree_integral_closed_y",
    "hhh_rhs",
    "orthant_via_convolution",
    "orthant_mc",
    "orthant_laplace_check",
    "chunked_mc",
]

_MAX_QUAD_DIM = 3


@dataclass(frozen=True)
class Estimate:
    """A numerical-integration or Monte Carlo result."""

    value: float
    error: float  # standard error for MC, bound estimate for quadrature
    evals: int
    method: str  # "quadrature" | "monte_carlo"

    def __post_init__(self):
        if self.error < 0 or self.evals < 1:
            raise ModelError("estimate requires error >= 0 and evals >= 1")


def _offdiag_quad(W: WeightMatrix, v: np.ndarray) -> float:
    return 0.5 * float(v @ W.w @ v)


def _check_dim(W: WeightMatrix):
    if W.n > _MAX_QUAD_DIM:
        raise ModelError(
            f"cone quadrature supports n <= {_MAX_QUAD_DIM}, got n={W.n}"
        )


# ---------------------------------------------------------------------------
# Closed-form right-hand sides


def gstz_rhs(a, b) -> float:
    """(pi/2)^(n/2) exp(-<a, b>) / prod a_j; independent of W."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float((np.pi / 2.0) ** (len(a) / 2.0) * np.exp(-a @ b) / np.prod(a))


def stz_rhs(W: WeightMatrix, y) -> float:
    """(pi/2)^(n/2) prod y_j^(-1/2) exp(-sum_{i<j} w_ij sqrt(y_i y_j))."""
    y = np.asarray(y, dtype=float)
    r = np.sqrt(y)
    return float(
        (np.pi / 2.0) ** (W.n / 2.0)
        / np.prod(r)
        * np.exp(-_offdiag_quad(W, r))
    )


def tree_integral_closed_y(W: WeightMatrix, y, q: float) -> float:
    """Closed form of int_{C_W} exp(-<x, y>) det(M_x)^(q-1) dx on a tree.

    Equals 2^(q-1) Gamma(q) prod_i y_i^(q(s_i - 2)/2)
    prod_{edges} w_ij^q K_q(w_ij sqrt(y_i y_j)).
    """
    if not W.is_tree:
        raise ModelError("closed-form tree integral requires a spanning tree")
    if not q > 0:
        raise ModelError(f"tree integral requires q > 0, got {q}")
    y = np.asarray(y, dtype=float)
    if not np.all(y > 0):
        raise ModelError("all entries of y must be positive")
    s = np.asarray(W.degrees, dtype=float)
    log_val = (q - 1.0) * np.log(2.0) + gammaln(q)
    log_val += float(np.sum(0.5 * q * (s - 2.0) * np.log(y)))
    for i, j in W.edges:
        wij = W.w[i, j]
        log_val += q * np.log(wij) + log_bessel_k(q, wij * np.sqrt(y[i] * y[j]))
    return float(np.exp(log_val))


def tree_integral_closed(W: WeightMatrix, a, q: float) -> float:
    """Closed form of int_{C_W} exp(-1/2 a*M_x a) det(M_x)^(q-1) dx on a tree.

    The extra factor exp(sum_{i<j} w_ij a_i a_j) relative to the y-form
    at y = a^2 absorbs the off-diagonal part of the quadratic form;
    q = 1/2 reproduces the STZ integral.
    """
    a = np.asarray(a, dtype=float)
    return float(
        np.exp(_offdiag_quad(W, a)) * tree_integral_closed_y(W, a**2, q)
    )


def hhh_rhs(W: WeightMatrix, y, theta) -> float:
    """Closed form of int exp(-<x,y>) E[exp(-<theta,B>) 1_{B>0}] dx, B ~ N(0, M_x).

    Equals prod_i 1/(2 sqrt(y_i) (sqrt(y_i) + theta_i)) times the usual
    exp(-sum_{i<j} w_ij sqrt(y_i y_j)) factor: integrating
    exp(-<theta, b>) against the Gaussian-restricted STZ identity over
    b in R_+^n contributes 1/(theta_i + sqrt(y_i)) per axis.
    """
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r = np.sqrt(y)
    return float(
        np.exp(-_offdiag_quad(W, r)) / np.prod(2.0 * r * (r + theta))
    )


# ---------------------------------------------------------------------------
# Schur-coordinate reconstruction


def _x_from_t(W: WeightMatrix, t: np.ndarray) -> np.ndarray:
    """Map Schur coordinates t in (0, inf)^n to the cone point x."""
    n = W.n
    x = np.empty(n)
    x[0] = 0.5 * t[0] ** 2
    for m in range(1, n):
        c = W.w[:m, m]
        M = m_matrix(W.head(m), x[:m])
        x[m] = 0.5 * (t[m] ** 2 + float(c @ np.linalg.solve(M, c)))
    return x


def _nested_quad(f, n, counter, epsabs=None, epsrel=None):
    """Iterated scipy quad of f(t), t in (0, inf)^n; returns (value, outer error).

    Default tolerances are dimension-aware: three nested adaptive levels
    at 1e-9 relative would cost tens of millions of integrand calls, so
    n = 3 runs looser (still far inside the 5e-3 verification budget).
    """
    if epsabs is None:
        epsabs = 1e-11 if n <= 2 else 1e-7
    if epsrel is None:
        epsrel = 1e-9 if n <= 2 else 1e-5

    def level(i, t_prefix):
        if i == n:
            counter[0] += 1
            return f(np.array(t_prefix))
        inner_abs = epsabs if i == n - 1 else epsabs * 0.1
        val, err = quad(
            lambda ti: level(i + 1, t_prefix + [ti]),
            0.0,
            np.inf,
            epsabs=inner_abs,
            epsrel=epsrel,
            limit=200,
        )
        if i == 0:
            level.outer_err = err
        return val

    value = level(0, [])
    return value, getattr(level, "outer_err", 0.0)


def quad_gstz_lhs(W: WeightMatrix, a, b) -> Estimate:
    """Quadrature of exp(-1/2(a*M_x a + b*M_x^{-1} b)) det^{-1/2} over C_W."""
    _check_dim(W)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    counter = [0]

    def f(t):
        x = _x_from_t(W, t)
        M = m_matrix(W, x)
        aMa = float(a @ M @ a)
        bMinvb = float(b @ np.linalg.solve(M, b)) if np.any(b) else 0.0
        return np.exp(-0.5 * (aMa + bMinvb))

    value, err = _nested_quad(f, W.n, counter)
    return Estimate(value, err, counter[0], "quadrature")


def quad_stz_lhs(W: WeightMatrix, y) -> Estimate:
    """Quadrature of exp(-<x, y>) det^{-1/2} over C_W.

    In Schur coordinates this is the q = 1/2 determinant integral.
    """
    return quad_tree_integral(W, y, 0.5)


def quad_tree_integral(W: WeightMatrix, y, q: float) -> Estimate:
    """Quadrature of exp(-<x, y>) det(M_x)^(q-1) dx over C_W.

    In Schur coordinates the integrand is exp(-<x(t), y>) prod t_m^(2q-1);
    for q < 1/2 the endpoint singularity is integrable.  The last axis
    separates as exp(-y_n (t_n^2 + c^T M_head^{-1} c)/2) t_n^(2q-1) and
    integrates analytically to a Gamma factor, so only n - 1 nested
    adaptive levels remain.
    """
    _check_dim(W)
    if not q > 0:
        raise ModelError(f"tree integral requires q > 0, got {q}")
    y = np.asarray(y, dtype=float)
    if not np.all(y > 0):
        raise ModelError("all entries of y must be positive")
    n = W.n
    last = float(np.exp(gammaln(q) - np.log(2.0) - q * np.log(y[n - 1] / 2.0)))
    if n == 1:
        return Estimate(last, 0.0, 1, "quadrature")
    counter = [0]
    pw = 2.0 * q - 1.0
    c = W.w[: n - 1, n - 1]
    Wh = W.head(n - 1)

    def f(t):
        x_head = _x_from_t(Wh, t)
        s = float(c @ np.linalg.solve(m_matrix(Wh, x_head), c))
        return (
            np.exp(-float(x_head @ y[: n - 1]) - 0.5 * y[n - 1] * s)
            * float(np.prod(t**pw))
        )

    value, err = _nested_quad(f, n - 1, counter)
    return Estimate(last * value, last * err, counter[0], "quadrature")


# ---------------------------------------------------------------------------
# Monte Carlo estimators in Schur coordinates (importance sampling with
# per-axis half-normal proposals)


def _batched_x_from_t(W: WeightMatrix, T: np.ndarray) -> np.ndarray:
    count, n = T.shape
    X = np.empty((count, n))
    X[:, 0] = 0.5 * T[:, 0] ** 2
    for m in range(1, n):
        c = W.w[:m, m]
        M = np.broadcast_to(-W.w[:m, :m], (count, m, m)).copy()
        M[:, np.arange(m), np.arange(m)] = 2.0 * X[:, :m]
        v = np.linalg.solve(M, np.broadcast_to(c, (count, m))[..., None])[..., 0]
        X[:, m] = 0.5 * (T[:, m] ** 2 + v @ c)
    return X


def _mc_cone_integral(W: WeightMatrix, scale, log_integrand, rng, N) -> Estimate:
    """MC estimate of a cone integral of exp(log_integrand(x)) det^{-1/2} dx.

    Proposes t_m ~ HalfNormal(1/scale_m) in Schur coordinates.
    """
    if N < 1000:
        raise ModelError(f"MC estimate requires N >= 1000, got {N}")
    scale = np.asarray(scale, dtype=float)
    T = np.abs(rng.standard_normal((N, W.n))) / scale
    X = _batched_x_from_t(W, T)
    log_prop = (
        np.sum(np.log(scale)) + W.n * 0.5 * np.log(2.0 / np.pi)
        - 0.5 * (T * scale) ** 2 @ np.ones(W.n)
    )
    wgt = np.exp(log_integrand(X) - log_prop)
    value = float(np.mean(wgt))
    se = float(np.std(wgt) / np.sqrt(N))
    return Estimate(value, se, N, "monte_carlo")


def mc_gstz_lhs(W: WeightMatrix, a, b, rng, N: int) -> Estimate:
    """MC oracle for the GSTZ integral, importance-sampled in Schur coordinates."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aWa = float(a @ W.w @ a)

    def log_f(X):
        count = X.shape[0]
        out = -(X @ a**2) + 0.5 * aWa
        if np.any(b):
            M = np.broadcast_to(-W.w, (count, W.n, W.n)).copy()
            M[:, np.arange(W.n), np.arange(W.n)] = 2.0 * X
            u = np.linalg.solve(M, np.broadcast_to(b, (count, W.n))[..., None])[..., 0]
            out = out - 0.5 * (u @ b)
        return out

    return _mc_cone_integral(W, a, log_f, rng, N)


def mc_stz_lhs(W: WeightMatrix, y, rng, N: int) -> Estimate:
    """MC oracle for the STZ integral."""
    y = np.asarray(y, dtype=float)
    if not np.all(y > 0):
        raise ModelError("all entries of y must be positive")
    return _mc_cone_integral(W, np.sqrt(y), lambda X: -(X @ y), rng, N)


# ---------------------------------------------------------------------------
# Gaussian orthant probabilities


def _as_cone_point(W: WeightMatrix, x) -> ConePoint:
    if isinstance(x, ConePoint):
        return x
    return cone_membership(W, x)


def _pd_lower_bound(W: WeightMatrix, fill: np.ndarray, i: int) -> float:
    """Smallest t_i keeping M positive definite with coordinates fill and t_i free.

    det is affine increasing in t_i on the feasible side; the caller
    guarantees the region is nonempty (fill itself is feasible).
    """
    v0 = fill.copy()
    v0[i] = 0.0
    d0 = np.linalg.det(m_matrix(W, v0))
    v0[i] = 1.0
    slope = np.linalg.det(m_matrix(W, v0)) - d0
    if slope <= 0:
        raise ModelError("degenerate orthant region")
    return -d0 / slope


def orthant_via_convolution(W: WeightMatrix, x) -> Estimate:
    """Pr(B > 0 componentwise), B ~ N(0, M_x), via the cone convolution integral.

    The innermost axis integrates analytically to pi/sqrt(2); the
    remaining n-1 axes are integrated with a sin^2 substitution that
    absorbs both inverse-square-root endpoint singularities.
    """
    _check_dim(W)
    cp = _as_cone_point(W, x)
    n = W.n
    xv = cp.x
    pref = 2.0 ** (-(n + 1) / 2.0) * np.pi ** (-(n - 1))
    counter = [0]

    def leaf(t_head):
        counter[0] += 1
        M = m_matrix(W.head(n - 1), np.array(t_head)) if n > 1 else None
        det_head = np.linalg.det(M) if n > 1 else 1.0
        return 1.0 / np.sqrt(det_head)

    def level(i, t_head):
        if i == n - 1:
            return leaf(t_head)
        fill = np.concatenate([t_head, xv[i:]])
        lo = _pd_lower_bound(W, fill, i)
        hi = xv[i]
        if lo >= hi:
            return 0.0
        span = hi - lo

        def g(theta):
            ti = lo + span * np.sin(theta) ** 2
            # dt / sqrt(x_i - t_i) = 2 sqrt(span) sin(theta) dtheta
            return 2.0 * np.sqrt(span) * np.sin(theta) * level(i + 1, t_head + [ti])

        val, err = quad(g, 0.0, np.pi / 2.0, epsabs=1e-10, epsrel=1e-8, limit=200)
        if i == 0:
            level.outer_err = err
        return val

    if n == 1:
        return Estimate(0.5, 0.0, 1, "quadrature")
    value = pref * level(0, [])
    err = pref * getattr(level, "outer_err", 0.0)
    return Estimate(float(value), float(err), counter[0], "quadrature")


def orthant_mc(W: WeightMatrix, x, rng, N: int) -> Estimate:
    """Pr(B > 0 componentwise) by direct sampling of B ~ N(0, M_x)."""
    if N < 1000:
        raise ModelError(f"orthant MC requires N >= 1000, got {N}")
    cp = _as_cone_point(W, x)
    hits = 0
    block = 1_000_000
    left = N
    while left > 0:
        k = min(left, block)
        Z = rng.standard_normal((k, W.n))
        B = Z @ cp.chol.T
        hits += int(np.count_nonzero(np.all(B > 0.0, axis=1)))
        left -= k
    p = hits / N
    se = np.sqrt(max(p * (1.0 - p), 1.0 / N) / N)
    return Estimate(p, float(se), N, "monte_carlo")


def _tilted_orthant(cov: np.ndarray, theta: np.ndarray, log_offset: float = 0.0) -> float:
    """exp(log_offset) * E[exp(-<theta, B>) 1_{B > 0}] for B ~ N(0, cov).

    Computed as a single exponential of (log_offset + theta' cov theta / 2
    + log tail) so that large tilts do not overflow before the tiny tail
    probability cancels them.
    """
    n = cov.shape[0]
    shift = cov @ theta
    expo = log_offset + 0.5 * float(theta @ shift)
    if n == 1:
        # erfcx absorbs the e^{m^2/(2 s^2)} factor, stable for large shift.
        z = shift[0] / np.sqrt(2.0 * cov[0, 0])
        return 0.5 * float(erfcx(z)) * np.exp(expo - z * z)
    try:
        tail = multivariate_normal(
            mean=np.zeros(n), cov=cov, allow_singular=False
        ).cdf(-shift)
    except np.linalg.LinAlgError:
        return 0.0
    if tail <= 0.0:
        return 0.0
    return float(np.exp(expo + np.log(tail)))


def orthant_laplace_check(W: WeightMatrix, y, theta, rng=None, N: int = 0):
    """Check of the tilted-orthant Laplace identity: returns (lhs Estimate, rhs).

    lhs integrates exp(-<x, y>) E[exp(-<theta, B>) 1_{B>0}] over C_W by
    quadrature, with the inner Gaussian expectation computed from the
    (bivariate) normal CDF; limited to n <= 2 by nested-estimation cost.
    """
    if W.n > 2:
        raise ModelError("orthant Laplace check supports n <= 2")
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if not np.all(y > 0):
        raise ModelError("all entries of y must be positive")
    if np.any(theta < 0):
        raise ModelError("theta must be nonnegative")
    rhs = hhh_rhs(W, y, theta)
    counter = [0]
    if W.n == 1:

        def f1(x1):
            counter[0] += 1
            # E[e^{-theta B} 1_{B>0}] = erfcx(theta sqrt(x1)) / 2 for B ~ N(0, 2 x1)
            return np.exp(-y[0] * x1) * 0.5 * erfcx(theta[0] * np.sqrt(x1))

        val, err = quad(f1, 0.0, np.inf, epsabs=1e-12, epsrel=1e-10, limit=200)
        return Estimate(val, err + 1e-12, counter[0], "quadrature"), rhs

    w = W.w[0, 1]
    cdf_acc = 1e-6  # bivariate normal CDF accuracy floor

    def inner(x1):
        lo = w * w / (4.0 * x1) if w > 0 else 0.0

        def f2(x2):
            counter[0] += 1
            cov = m_matrix(W, np.array([x1, x2]))
            if 4.0 * x1 * x2 - w * w <= 1e-12 * (4.0 * x1 * x2):
                return 0.0  # at or numerically on the cone boundary
            return _tilted_orthant(cov, theta, log_offset=-y[0] * x1 - y[1] * x2)

        val, _ = quad(f2, lo, np.inf, epsabs=1e-11, epsrel=1e-8, limit=200)
        return val

    val, err = quad(inner, 0.0, np.inf, epsabs=1e-9, epsrel=1e-7, limit=200)
    return Estimate(val, err + cdf_acc * val, counter[0], "quadrature"), rhs


# ---------------------------------------------------------------------------
# Seed-per-chunk Monte Carlo driver


def chunked_mc(fn, seed, N: int, chunks: int = 8, threads: int = 1) -> Estimate:
    """Run fn(rng, n_draws) -> Estimate over fixed chunks and merge.

    Chunk seeds are spawned deterministically from the master seed, so
    the merged result is independent of the thread count.
    """
    if chunks < 1 or N < chunks:
        raise ModelError(f"need N >= chunks >= 1, got N={N}, chunks={chunks}")
    seqs = np.random.SeedSequence(seed).spawn(chunks)
    sizes = [N // chunks] * chunks
    sizes[-1] += N - sum(sizes)
    jobs = [(np.random.default_rng(s), k) for s, k in zip(seqs, sizes)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda j: fn(*j), jobs))
    else:
        parts = [fn(*j) for j in jobs]
    total = sum(e.evals for e in parts)
    value = sum(e.value * e.evals for e in parts) / total
    var = sum((e.error * e.evals) ** 2 for e in parts) / total**2
    return Estimate(value, float(np.sqrt(var)), total, "monte_carlo")
