"""Kernel-bandwidth selection.

Single-view rule: eps = C * maxmin, where maxmin is the largest
nearest-neighbor squared distance, so every point keeps at least one
neighbor.  Two-view rule: starting from the single-view kernel's mean
connection count delta, shrink the bandwidth until the count drops to
sqrt(delta), searching a linear grid of C values by bisection.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graph import mean_connectivity

__all__ = [
    "BandwidthConfig",
    "BandwidthReport",
    "maxmin_sq_dist",
    "epsilon_single",
    "estimate_p",
    "estimate_delta",
    "select_bandwidth_ad",
]


@dataclass
class BandwidthConfig:
    """Parameters of the bandwidth search.

    ``c_single`` is the single-view multiplier (conventionally 2 to 3);
    the search grid is C_k = (k / grid_size) * c_single for k = 1..grid_size,
    a step of 0.05 at the defaults.  ``target_exponent`` fixes the shrink
    target at delta ** 0.5.
    """

    c_single: float = 2.0
    grid_size: int = 40
    target_exponent: float = 0.5

    def __post_init__(self):
        if not self.c_single > 0:
            raise DataError(f"c_single must be positive, got {self.c_single}")
        if self.grid_size < 2:
            raise DataError(f"grid_size must be at least 2, got {self.grid_size}")


@dataclass
class BandwidthReport:
    """Outcome of the two-view bandwidth search.

    ``visited`` lists every (C, delta) pair evaluated by the bisection, in
    order.  ``sparse_warning`` is set when the single-view kernel is already
    sparser than the shrink target (delta_hat < 1), in which case c_ad stays
    at c_single.
    """

    epsilon_single: float
    delta_hat: float
    c_ad: float
    epsilon_ad: float
    delta_ad: float
    visited: list = field(default_factory=list)
    sparse_warning: bool = False

    def to_dict(self) -> dict:
        return {
            "epsilon_single": self.epsilon_single,
            "delta_hat": self.delta_hat,
            "c_ad": self.c_ad,
            "epsilon_ad": self.epsilon_ad,
            "delta_ad": self.delta_ad,
            "visited": [[c, d] for c, d in self.visited],
            "sparse_warning": self.sparse_warning,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def maxmin_sq_dist(d2: np.ndarray) -> float:
    """max over points of the squared distance to their nearest neighbor."""
    d2 = np.asarray(d2, dtype=np.float64)
    n = d2.shape[0]
    if d2.ndim != 2 or d2.shape[1] != n or n < 2:
        raise DataError(f"need a square distance matrix with N >= 2, got {d2.shape}")
    masked = d2 + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    return float(masked.min(axis=1).max())


def epsilon_single(d2: np.ndarray, c: float) -> float:
    """Single-view bandwidth c * maxmin_sq_dist(d2)."""
    if not c > 0:
        raise DataError(f"bandwidth multiplier must be positive, got {c}")
    mm = maxmin_sq_dist(d2)
    if mm == 0.0:
        raise DataError(
            "max-min squared distance is zero (every point has a duplicate); "
            "the bandwidth rule is undefined"
        )
    return c * mm


def estimate_p(k: np.ndarray) -> float:
    """Mean off-diagonal kernel value: the estimated pair-connection probability."""
    k = np.asarray(k, dtype=np.float64)
    n = k.shape[0]
    if k.ndim != 2 or k.shape[1] != n or n < 2:
        raise DataError(f"need a square kernel with N >= 2, got {k.shape}")
    return float((k.sum() - np.trace(k)) / (n * (n - 1)))


def estimate_delta(k: np.ndarray) -> float:
    """Estimated mean number of connections per point, (N-1) * estimate_p."""
    return (k.shape[0] - 1) * estimate_p(k)


def select_bandwidth_ad(d2: np.ndarray, cfg: BandwidthConfig | None = None) -> BandwidthReport:
    """Bisection search for the two-view bandwidth multiplier.

    Evaluates delta at the single-view bandwidth, then repeatedly halves the
    grid {C_k}: the middle element (index |grid|/2, floor for odd sizes) is
    evaluated, and the lower half is kept when its delta exceeds the
    sqrt(delta_hat) target, the upper half otherwise (ties go up).  The
    answer is the single surviving grid element; delta_ad is recomputed
    there.
    """
    cfg = cfg or BandwidthConfig()
    mm = maxmin_sq_dist(d2)
    if mm == 0.0:
        raise DataError(
            "max-min squared distance is zero (duplicate-dominated data); "
            "cannot select a bandwidth"
        )
    d2 = np.asarray(d2, dtype=np.float64)
    eps = cfg.c_single * mm
    delta_hat = mean_connectivity(d2, eps)

    if delta_hat < 1.0:
        # already sparser than any sqrt target; keep the single-view bandwidth
        return BandwidthReport(
            epsilon_single=eps,
            delta_hat=delta_hat,
            c_ad=cfg.c_single,
            epsilon_ad=eps,
            delta_ad=delta_hat,
            visited=[],
            sparse_warning=True,
        )

    target = delta_hat ** cfg.target_exponent
    grid = cfg.grid_size
    indices = list(range(1, grid + 1))
    visited = []
    while len(indices) != 1:
        mid = indices[len(indices) // 2 - 1]
        c_mid = (mid / grid) * cfg.c_single
        delta_mid = mean_connectivity(d2, c_mid * mm)
        visited.append((c_mid, delta_mid))
        if delta_mid > target:
            indices = indices[: len(indices) // 2]
        else:
            indices = indices[len(indices) // 2:]

    c_ad = (indices[0] / grid) * cfg.c_single
    epsilon_ad = c_ad * mm
    delta_ad = mean_connectivity(d2, epsilon_ad)
    return BandwidthReport(
        epsilon_single=eps,
        delta_hat=delta_hat,
        c_ad=c_ad,
        epsilon_ad=epsilon_ad,
        delta_ad=delta_ad,
        visited=visited,
    )
