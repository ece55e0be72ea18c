"""Monte Carlo laboratory for the random-graph connectivity model.

Edges inside a view are iid Bernoulli(p) on unordered pairs, so per-point
degrees are Binomial(N-1, p) and the isolated-point probability is roughly
exp(-S) at mean degree S.  Two views compose through the support of the
adjacency product: a pair is product-connected when some third point links
them through one view and then the other, which puts the composite mean
degree near S_v * S_w.

Two edge conventions are measured side by side.  The "strict" one counts
only paths through a third point l distinct from both endpoints (the
counting behind the S_v * S_w law); the "markov" one adds self-loops first,
mirroring the support of the actual Markov product, where being connected
in either single view is enough.

The product mean degree does track S_v * S_w, but isolation does not
follow the idealized exp(-S_v * S_w): a point with an empty view-1 row has
an empty product row, so composite edges are far from pairwise
independent.  Sampled graphs satisfy exp(-S_v * (1 - exp(-S_w))) under the
strict rule and exp(-(S_v + S_w)) under the markov rule instead; the
simulator reports empirical values so the idealization can be compared
against what the graph process actually does.

All draws come from numpy's seeded PCG64 generators; trial t of a run
seeded with s uses the independent stream default_rng([s, t]), so serial
and parallel execution orders agree bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DataError

__all__ = [
    "RandomGraphSpec",
    "ConnectivityStats",
    "sample_view_graph",
    "isolated_fraction",
    "single_view_stats",
    "multiview_degree_stats",
    "verify_proposition1",
]


@dataclass
class RandomGraphSpec:
    """One view's random graph: N nodes, iid edge probability, seed, trials."""

    n: int
    p_edge: float
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise DataError(f"need at least 2 nodes, got {self.n}")
        if not 0.0 <= self.p_edge <= 1.0:
            raise DataError(f"edge probability must be in [0, 1], got {self.p_edge}")
        if self.trials < 1:
            raise DataError(f"need at least 1 trial, got {self.trials}")


@dataclass
class ConnectivityStats:
    """Empirical connectivity summary pooled over trials.

    ``isolated_fraction`` and ``mean_degree`` use the strict third-point
    convention for multi-view graphs (plain degrees for single views);
    the ``*_markov`` fields use the self-loop convention.
    """

    isolated_fraction: float
    mean_degree: float
    degree_histogram: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    isolated_fraction_markov: float | None = None
    mean_degree_markov: float | None = None


def _sample_adjacency(n, p_edge, rng):
    u = rng.random((n, n))
    adj = np.triu(u < p_edge, 1)
    return adj | adj.T


def sample_view_graph(spec: RandomGraphSpec, trial: int = 0) -> np.ndarray:
    """Symmetric boolean adjacency with iid Bernoulli(p_edge) unordered pairs."""
    rng = np.random.default_rng([spec.seed, trial])
    return _sample_adjacency(spec.n, spec.p_edge, rng)


def isolated_fraction(adjacency: np.ndarray) -> float:
    """Fraction of nodes with no off-diagonal neighbor."""
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if adj.ndim != 2 or adj.shape[1] != n:
        raise DataError(f"adjacency must be square, got shape {adj.shape}")
    off = adj.copy()
    np.fill_diagonal(off, False)
    return float((off.sum(axis=1) == 0).mean())


def single_view_stats(spec: RandomGraphSpec) -> ConnectivityStats:
    """Pooled isolated fraction, mean degree, and degree histogram."""
    hist = np.zeros(spec.n, dtype=np.int64)
    isolated = 0
    total_degree = 0
    for trial in range(spec.trials):
        adj = sample_view_graph(spec, trial)
        np.fill_diagonal(adj, False)
        deg = adj.sum(axis=1)
        hist += np.bincount(deg, minlength=spec.n)
        isolated += int((deg == 0).sum())
        total_degree += int(deg.sum())
    count = spec.n * spec.trials
    return ConnectivityStats(
        isolated_fraction=isolated / count,
        mean_degree=total_degree / count,
        degree_histogram=hist,
    )


def multiview_degree_stats(
    n: int, s_v: float, s_w: float, trials: int, seed: int = 0
) -> ConnectivityStats:
    """Composite-graph degree statistics at per-view mean degrees s_v, s_w.

    Samples independent view graphs with p = S / (N - 1) per trial and
    measures the support of their adjacency product under both edge
    conventions (see module docstring).
    """
    if n < 2 or trials < 1:
        raise DataError(f"need n >= 2 and trials >= 1, got n={n}, trials={trials}")
    if s_v < 0 or s_w < 0:
        raise DataError(f"mean degrees must be non-negative, got {s_v}, {s_w}")
    if s_v * s_w >= n - 1:
        raise DataError(
            f"model requires s_v * s_w < n - 1, got {s_v} * {s_w} >= {n - 1}"
        )
    p_v = s_v / (n - 1)
    p_w = s_w / (n - 1)
    if p_v > 1.0 or p_w > 1.0:
        raise DataError("per-view edge probability exceeds 1")

    hist = np.zeros(n, dtype=np.int64)
    isolated = 0
    total_degree = 0
    isolated_markov = 0
    total_degree_markov = 0
    eye = sp.identity(n, dtype=np.uint8, format="csr")
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        av = sp.csr_matrix(_sample_adjacency(n, p_v, rng), dtype=np.uint8)
        aw = sp.csr_matrix(_sample_adjacency(n, p_w, rng), dtype=np.uint8)

        strict = (av @ aw).toarray() > 0
        np.fill_diagonal(strict, False)
        deg = strict.sum(axis=1)
        hist += np.bincount(deg, minlength=n)[:n]
        isolated += int((deg == 0).sum())
        total_degree += int(deg.sum())

        markov = ((av + eye) @ (aw + eye)).toarray() > 0
        np.fill_diagonal(markov, False)
        deg_m = markov.sum(axis=1)
        isolated_markov += int((deg_m == 0).sum())
        total_degree_markov += int(deg_m.sum())

    count = n * trials
    return ConnectivityStats(
        isolated_fraction=isolated / count,
        mean_degree=total_degree / count,
        degree_histogram=hist,
        isolated_fraction_markov=isolated_markov / count,
        mean_degree_markov=total_degree_markov / count,
    )


def verify_proposition1(mv_support: np.ndarray, mw_support: np.ndarray) -> bool:
    """Check the connectivity-transfer equivalence on a pair of supports.

    For supports that include self-loops, each point must have an
    off-diagonal neighbor in the product support exactly when it has one in
    at least one of the views.  Returns True when the equivalence holds for
    every point.
    """
    mv = np.asarray(mv_support, dtype=bool)
    mw = np.asarray(mw_support, dtype=bool)
    n = mv.shape[0]
    if mv.ndim != 2 or mv.shape[1] != n or mw.shape != mv.shape:
        raise DataError(f"supports must be square and matching, got {mv.shape}, {mw.shape}")
    if not mv.diagonal().all() or not mw.diagonal().all():
        raise DataError("supports must include self-loops (all-true diagonal)")

    product = (mv.astype(np.float64) @ mw.astype(np.float64)) > 0
    offdiag = ~np.eye(n, dtype=bool)
    connected_product = (product & offdiag).any(axis=1)
    connected_views = ((mv | mw) & offdiag).any(axis=1)
    return bool(np.array_equal(connected_product, connected_views))
