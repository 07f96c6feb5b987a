"""Covariance construction for the separable power correlation family.

The correlation between two inputs is ``exp(-sum_i b_i |x_ij - x_ik|^p_i / d_i)``
with a nugget ``g`` added on the diagonal.  The boolean vector ``b`` switches
individual dimensions out of the sum; when every entry of ``b`` is zero the
matrix collapses to ``(1 + g) I`` and is represented implicitly, without any
dense factorization.  (The raw formula with an empty sum would give constant 1
off the diagonal; that rank-one matrix is what the intercept column already
provides, so the linearized covariance is the scaled identity.)

Inputs are assumed pre-scaled to the unit cube per dimension, so ``d`` is
interpreted on that scale.

A module-level counter tracks dense Cholesky factorizations of training-sized
matrices so tests can assert that linearized code paths never pay the n^3 cost.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg


class SingularCovariance(Exception):
    """Cholesky factorization failed: numerically unstable parameterization."""


_dense_factor_count = 0


def dense_factor_count() -> int:
    """Number of dense factorizations performed since the last reset."""
    return _dense_factor_count


def reset_dense_factor_count() -> None:
    global _dense_factor_count
    _dense_factor_count = 0


def factor_spd(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a dense SPD matrix.

    Counts toward the dense-factorization instrumentation.  Raises
    :class:`SingularCovariance` when a leading minor is not positive.
    """
    global _dense_factor_count
    _dense_factor_count += 1
    try:
        return scipy.linalg.cholesky(a, lower=True)
    except scipy.linalg.LinAlgError as err:
        raise SingularCovariance(str(err)) from None


@dataclass(frozen=True)
class CorrelationState:
    """Everything that determines the covariance matrix K.

    d : positive range parameters, one per input dimension
    g : nugget (noise-to-signal ratio), >= 0; zero invites singularity
    b : booleans, 1 = dimension active in the correlation, 0 = linearized out
    p : exponents in (0, 2]; defaults to 2 everywhere
    """

    d: np.ndarray
    g: float
    b: np.ndarray
    p: np.ndarray | None = None

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        b = np.atleast_1d(np.asarray(self.b)).astype(np.int8)
        if self.p is None:
            p = np.full(d.shape, 2.0)
        else:
            p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if not (d.shape == b.shape == p.shape):
            raise ValueError("d, b and p must have matching lengths")
        if not np.all(d > 0):
            raise ValueError("range parameters d must be positive")
        if not self.g >= 0:
            raise ValueError("nugget g must be non-negative")
        if not np.all((p > 0) & (p <= 2)):
            raise ValueError("exponents p must lie in (0, 2]")
        if not np.all((b == 0) | (b == 1)):
            raise ValueError("b must be a 0/1 vector")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "g", float(self.g))

    @property
    def m_x(self) -> int:
        return self.d.shape[0]

    @property
    def is_llm(self) -> bool:
        """True iff every dimension is linearized (all b_i = 0)."""
        return not bool(self.b.any())


@dataclass(frozen=True)
class CovMatrix:
    """A factored covariance matrix, immutable after construction.

    For the linearized case (``is_llm``) the matrix ``(1 + g) I`` is implicit:
    ``K``, ``corr`` and ``chol`` are ``None`` and no dense work was done.
    ``corr`` caches the nugget-free correlation so a nugget change only needs a
    refactorization, not an entry rebuild.
    """

    n: int
    g: float
    is_llm: bool
    K: np.ndarray | None
    corr: np.ndarray | None
    chol: np.ndarray | None
    log_det: float

    def dense(self) -> np.ndarray:
        """Materialize the matrix (synthesizes (1+g) I for the implicit case)."""
        if self.K is not None:
            return self.K
        return (1.0 + self.g) * np.eye(self.n)


def corr_entry(x_j: np.ndarray, x_k: np.ndarray, cs: CorrelationState,
               same_index: bool = False) -> float:
    """Single covariance entry K(x_j, x_k); the nugget applies only when the
    two arguments are the same training index.

    This is the raw formula: with all b_i = 0 the off-diagonal value is 1.
    Only :func:`build_cov` applies the linear-model override.
    """
    x_j = np.atleast_1d(np.asarray(x_j, dtype=float))
    x_k = np.atleast_1d(np.asarray(x_k, dtype=float))
    if x_j.shape != x_k.shape or x_j.shape[0] != cs.m_x:
        raise ValueError("input vectors must both have length m_x")
    s = 0.0
    for i in range(cs.m_x):
        if cs.b[i]:
            s += np.abs(x_j[i] - x_k[i]) ** cs.p[i] / cs.d[i]
    val = float(np.exp(-s))
    if same_index:
        val += cs.g
    return val


def _scaled_distances(X: np.ndarray, Xq: np.ndarray, cs: CorrelationState) -> np.ndarray:
    d = np.zeros((X.shape[0], Xq.shape[0]))
    for i in np.flatnonzero(cs.b):
        diff = np.abs(X[:, i, None] - Xq[None, :, i])
        if cs.p[i] == 2.0:
            d += diff * diff / cs.d[i]
        else:
            d += diff ** cs.p[i] / cs.d[i]
    return d


def build_cov(X: np.ndarray, cs: CorrelationState) -> CovMatrix:
    """Construct and factor the covariance of a design matrix.

    Parameters
    ----------
    X : (n, m_x) array of scaled inputs.  n = 0 yields an empty matrix.
    cs : correlation state; when all booleans are zero the result is the
        implicit ``(1 + g) I`` with no dense factorization.

    Raises
    ------
    SingularCovariance
        when the Cholesky factorization fails.  No jitter is added silently;
        callers (e.g. the sampler) treat this as a rejected proposal.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    if n and X.shape[1] != cs.m_x:
        raise ValueError("design matrix width does not match correlation state")
    if n == 0:
        return CovMatrix(0, cs.g, cs.is_llm, None, None, None, 0.0)
    if cs.is_llm:
        return CovMatrix(n, cs.g, True, None, None, None, n * np.log1p(cs.g))
    corr = np.exp(-_scaled_distances(X, X, cs))
    K = corr + cs.g * np.eye(n)
    chol = factor_spd(K)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return CovMatrix(n, cs.g, False, K, corr, chol, log_det)


def update_nugget(cov: CovMatrix, g_new: float) -> CovMatrix:
    """Rebuild a covariance with a new nugget, reusing the cached correlation."""
    if g_new < 0:
        raise ValueError("nugget must be non-negative")
    if cov.is_llm or cov.n == 0:
        log_det = cov.n * np.log1p(g_new)
        return replace(cov, g=float(g_new), log_det=float(log_det))
    K = cov.corr + g_new * np.eye(cov.n)
    chol = factor_spd(K)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return CovMatrix(cov.n, float(g_new), False, K, cov.corr, chol, log_det)


def cross_corr(X: np.ndarray, Xq: np.ndarray, cs: CorrelationState) -> np.ndarray:
    """Correlation between training inputs and query locations, (n, nq).

    Queries are new observations, so no nugget enters even at zero distance.
    Under the linearized model all cross-correlations are exactly zero.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
    if cs.is_llm:
        return np.zeros((X.shape[0], Xq.shape[0]))
    return np.exp(-_scaled_distances(X, Xq, cs))


def solve_with_cov(cov: CovMatrix, rhs: np.ndarray) -> np.ndarray:
    """K^{-1} rhs; the linearized case divides by (1 + g) with no factorization."""
    rhs = np.asarray(rhs, dtype=float)
    if cov.n == 0:
        return rhs.copy()
    if cov.is_llm:
        return rhs / (1.0 + cov.g)
    return scipy.linalg.cho_solve((cov.chol, True), rhs)
