"""Dense graph core: distances, Gaussian affinities, Markov normalization,
two-view fusion, and the leading nontrivial eigenvector.

The affinity between feature rows n and m is exp(-||x_n - x_m||^2 / eps);
row-normalizing it gives a row-stochastic Markov matrix whose random walk
underlies everything else.  Two views are fused by the matrix product
M_v @ M_w (the alternating two-step walk), with entrywise-product and mean
baselines alongside.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import affinity_impl, delta_hat_impl, pairwise_sq_dists_impl
from .errors import DataError, NumericalError

ROW_SUM_TOL = 1e-12

__all__ = [
    "SpectralResult",
    "pairwise_sq_dists",
    "build_affinity",
    "row_normalize",
    "fuse_alternating",
    "fuse_hadamard",
    "fuse_sum",
    "leading_nontrivial_eigenvector",
]


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances between the rows of ``x``.

    Returns an exactly symmetric N x N matrix with a zero diagonal.
    Rejects non-finite input, naming the first offending row.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] < 2 or x.shape[1] < 1:
        raise DataError(f"need at least 2 rows and 1 column, got shape {x.shape}")
    finite_rows = np.isfinite(x).all(axis=1)
    if not finite_rows.all():
        bad = int(np.flatnonzero(~finite_rows)[0])
        raise DataError(f"non-finite feature values in row {bad}")
    return pairwise_sq_dists_impl(x)


def build_affinity(d2: np.ndarray, epsilon: float) -> np.ndarray:
    """Gaussian affinity kernel exp(-d2 / epsilon) with an exact unit diagonal."""
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise DataError(f"kernel bandwidth must be positive, got {epsilon}")
    d2 = np.asarray(d2, dtype=np.float64)
    return affinity_impl(d2, float(epsilon))


def mean_connectivity(d2: np.ndarray, epsilon: float) -> float:
    """Mean off-diagonal row sum of the affinity kernel at ``epsilon``.

    Equals estimate_delta(build_affinity(d2, epsilon)) without materializing
    the kernel; this is the quantity tracked by the bandwidth search.
    """
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise DataError(f"kernel bandwidth must be positive, got {epsilon}")
    return float(delta_hat_impl(np.asarray(d2, dtype=np.float64), float(epsilon)))


def row_normalize(k: np.ndarray) -> np.ndarray:
    """Row-stochastic Markov matrix from an affinity kernel."""
    k = np.asarray(k, dtype=np.float64)
    sums = k.sum(axis=1)
    if not (sums > 0).all():
        raise DataError("affinity kernel has a non-positive row sum")
    return k / sums[:, None]


def _check_pair(mv, mw):
    mv = np.asarray(mv, dtype=np.float64)
    mw = np.asarray(mw, dtype=np.float64)
    if mv.ndim != 2 or mv.shape[0] != mv.shape[1]:
        raise DataError(f"expected a square matrix, got shape {mv.shape}")
    if mv.shape != mw.shape:
        raise DataError(f"dimension mismatch between views: {mv.shape} vs {mw.shape}")
    return mv, mw


def fuse_alternating(mv: np.ndarray, mw: np.ndarray) -> np.ndarray:
    """Two-step fusion M_v @ M_w; row-stochastic when both inputs are."""
    mv, mw = _check_pair(mv, mw)
    return mv @ mw


def fuse_hadamard(mv: np.ndarray, mw: np.ndarray) -> np.ndarray:
    """Entrywise-product baseline, rows renormalized to sum to 1."""
    mv, mw = _check_pair(mv, mw)
    prod = mv * mw
    sums = prod.sum(axis=1)
    if not (sums > 0).all():
        raise DataError("entrywise product produced a zero row")
    return prod / sums[:, None]


def fuse_sum(mv: np.ndarray, mw: np.ndarray) -> np.ndarray:
    """Mean baseline (M_v + M_w) / 2; row-stochastic by construction."""
    mv, mw = _check_pair(mv, mw)
    return 0.5 * (mv + mw)


@dataclass
class SpectralResult:
    """Leading nontrivial eigenpair of a Markov (or symmetrized) matrix.

    ``residual`` is ||A nu - lambda nu|| for the operator A actually
    decomposed: the matrix itself for ``method='direct'``, M @ M.T for
    ``method='symmetrized'``.
    """

    eigenvalue: float
    vector: np.ndarray
    residual: float
    method: str


def _householder_ones(n):
    # reflector u with H = I - beta u u^T orthogonal and H e1 = ones/sqrt(n)
    u = np.full(n, 1.0 / np.sqrt(n))
    u[0] -= 1.0
    beta = 2.0 / (u @ u)
    return u, beta


def _second_symmetrized(m):
    s = m @ m.T
    vals, vecs = np.linalg.eigh(s)
    lam = float(vals[-2])
    nu = vecs[:, -2]
    nu = nu / np.linalg.norm(nu)
    residual = float(np.linalg.norm(s @ nu - lam * nu))
    return SpectralResult(lam, nu, residual, "symmetrized")


def _second_direct(m):
    n = m.shape[0]
    u, beta = _householder_ones(n)
    # similarity transform H M H is block triangular with the trivial pair
    # (1, all-ones) isolated in the first row/column
    t = m - np.outer(beta * u, u @ m)
    t = t - np.outer(t @ u, beta * u)
    b = t[1:, 1:]
    vals, vecs = np.linalg.eig(b)
    top = int(np.argmax(np.abs(vals)))
    lam = vals[top]
    if abs(lam.imag) > 1e-9 * max(1.0, abs(lam.real)):
        return None
    lam = float(lam.real)
    y = np.real(vecs[:, top])
    w = np.concatenate(([0.0], y))
    qy = w - beta * u * (u @ w)
    ones_hat = np.full(n, 1.0 / np.sqrt(n))
    if abs(1.0 - lam) < 1e-10:
        alpha = 0.0
    else:
        alpha = float(ones_hat @ (m @ qy)) / (lam - 1.0)
    nu = qy + alpha * ones_hat
    norm = np.linalg.norm(nu)
    if norm == 0.0:
        return None
    nu = nu / norm
    residual = float(np.linalg.norm(m @ nu - lam * nu))
    return SpectralResult(lam, nu, residual, "direct")


def leading_nontrivial_eigenvector(m: np.ndarray, method: str = "direct") -> SpectralResult:
    """Eigenvector of the second-largest-magnitude eigenvalue of ``m``.

    ``direct`` deflates the trivial pair (eigenvalue 1, constant vector) of
    the row-stochastic matrix and decomposes the rest; if the dominant
    remaining eigenvalue is complex (a conjugate pair), it falls back to the
    ``symmetrized`` route, which takes the second eigenvector of M @ M.T.
    The returned vector has unit norm; its sign is unspecified here.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DataError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DataError("need at least a 2x2 matrix")
    if method not in ("direct", "symmetrized"):
        raise DataError(f"unknown eigen method {method!r}")

    if method == "symmetrized":
        result = _second_symmetrized(m)
    else:
        result = _second_direct(m)
        if result is None:
            result = _second_symmetrized(m)

    n = m.shape[0]
    if not np.isfinite(result.residual) or result.residual >= 1e-8 * n:
        raise NumericalError(
            f"eigen residual {result.residual:.3e} exceeds {1e-8 * n:.3e} "
            f"(method={result.method})"
        )
    return result
