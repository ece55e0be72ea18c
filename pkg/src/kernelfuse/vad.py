"""End-to-end two-view voice activity detector and its evaluation.

The detector builds a Gaussian kernel per view (bandwidths from the
single-view rule or from the two-view bisection search), row-normalizes,
fuses, and scores every frame by the leading nontrivial eigenvector of the
fused walk.  Thresholding that score gives the speech indicator; sweeping
the threshold gives the ROC and its area.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import graph
from .bandwidth import BandwidthConfig, BandwidthReport, maxmin_sq_dist, select_bandwidth_ad
from .errors import DataError
from .graph import SpectralResult, leading_nontrivial_eigenvector

FUSION_MODES = ("alternating", "hadamard", "sum", "audio_only", "video_only")
BANDWIDTH_MODES = ("single_view_rule", "algorithm1")
EIGEN_METHODS = ("direct", "symmetrized")

__all__ = [
    "DetectorConfig",
    "ActivityScore",
    "DetectionResult",
    "RocCurve",
    "detect",
    "orient_sign",
    "threshold_indicator",
    "roc",
    "sweep_c",
]


@dataclass
class DetectorConfig:
    """Detector choices: fusion variant, bandwidth policy, eigen route.

    ``bandwidth_mode='algorithm1'`` runs the bisection search on the views
    named in ``apply_algorithm1_to`` (the noisy view by default); the others
    use the single-view rule at ``c_single``.  ``c_audio`` / ``c_video``
    override the multiplier for one view explicitly, as in a C sweep.
    """

    fusion: str = "alternating"
    bandwidth_mode: str = "single_view_rule"
    apply_algorithm1_to: tuple = ("audio",)
    eigen_method: str = "direct"
    c_single: float = 2.0
    grid_size: int = 40
    c_audio: float | None = None
    c_video: float | None = None

    def __post_init__(self):
        if self.fusion not in FUSION_MODES:
            raise DataError(f"fusion must be one of {FUSION_MODES}, got {self.fusion!r}")
        if self.bandwidth_mode not in BANDWIDTH_MODES:
            raise DataError(
                f"bandwidth_mode must be one of {BANDWIDTH_MODES}, got {self.bandwidth_mode!r}"
            )
        if self.eigen_method not in EIGEN_METHODS:
            raise DataError(f"eigen_method must be one of {EIGEN_METHODS}, got {self.eigen_method!r}")
        unknown = set(self.apply_algorithm1_to) - {"audio", "video"}
        if unknown:
            raise DataError(f"apply_algorithm1_to may contain only audio/video, got {unknown}")
        if not self.c_single > 0:
            raise DataError(f"c_single must be positive, got {self.c_single}")


@dataclass
class ActivityScore:
    """Oriented per-frame activity score (unit-norm eigenvector)."""

    nu1: np.ndarray
    orientation_source: str


@dataclass
class DetectionResult:
    """Score plus the spectral and bandwidth details behind it."""

    score: ActivityScore
    eigen: SpectralResult
    fusion: str
    epsilon_audio: float | None
    epsilon_video: float | None
    bandwidth_audio: BandwidthReport | None = None
    bandwidth_video: BandwidthReport | None = None


def orient_sign(nu1: np.ndarray, audio_energy: np.ndarray, source: str = "audio energy") -> ActivityScore:
    """Fix the eigenvector sign so larger score means more speech-like.

    Flips the vector when its correlation with the per-frame audio energy
    is negative.  A zero-variance vector is a degenerate embedding and is
    rejected.
    """
    nu1 = np.asarray(nu1, dtype=np.float64)
    energy = np.asarray(audio_energy, dtype=np.float64)
    if nu1.shape != energy.shape:
        raise DataError(f"score and energy lengths differ: {nu1.shape} vs {energy.shape}")
    if np.std(nu1) == 0.0:
        raise DataError("degenerate embedding: score vector has zero variance")
    corr = 0.0
    if np.std(energy) > 0.0:
        corr = float(np.corrcoef(nu1, energy)[0, 1])
    flipped = corr < 0.0
    return ActivityScore(
        nu1=-nu1 if flipped else nu1,
        orientation_source=f"correlation with {source} (r={abs(corr):.3f}"
        f"{', flipped' if flipped else ''})",
    )


def _view_epsilon(d2, which, cfg):
    override = cfg.c_audio if which == "audio" else cfg.c_video
    if override is not None:
        if not override > 0:
            raise DataError(f"c_{which} must be positive, got {override}")
        return override * maxmin_sq_dist(d2), None
    if cfg.bandwidth_mode == "algorithm1" and which in cfg.apply_algorithm1_to:
        report = select_bandwidth_ad(d2, BandwidthConfig(cfg.c_single, cfg.grid_size))
        return report.epsilon_ad, report
    return cfg.c_single * maxmin_sq_dist(d2), None


def _markov_for_view(d2, which, cfg):
    eps, report = _view_epsilon(d2, which, cfg)
    m = graph.row_normalize(graph.build_affinity(d2, eps))
    return m, eps, report


def _detect_from_dists(d2v, d2w, cfg, energy, source):
    eps_v = eps_w = None
    report_v = report_w = None
    if cfg.fusion == "audio_only":
        m, eps_v, report_v = _markov_for_view(d2v, "audio", cfg)
    elif cfg.fusion == "video_only":
        m, eps_w, report_w = _markov_for_view(d2w, "video", cfg)
    else:
        mv, eps_v, report_v = _markov_for_view(d2v, "audio", cfg)
        mw, eps_w, report_w = _markov_for_view(d2w, "video", cfg)
        if cfg.fusion == "alternating":
            m = graph.fuse_alternating(mv, mw)
        elif cfg.fusion == "hadamard":
            m = graph.fuse_hadamard(mv, mw)
        else:
            m = graph.fuse_sum(mv, mw)
    eigen = leading_nontrivial_eigenvector(m, cfg.eigen_method)
    score = orient_sign(eigen.vector, energy, source=source)
    return DetectionResult(
        score=score,
        eigen=eigen,
        fusion=cfg.fusion,
        epsilon_audio=eps_v,
        epsilon_video=eps_w,
        bandwidth_audio=report_v,
        bandwidth_video=report_w,
    )


def detect(
    v: np.ndarray,
    w: np.ndarray,
    cfg: DetectorConfig | None = None,
    audio_energy: np.ndarray | None = None,
) -> DetectionResult:
    """Run the full detector on aligned view features.

    Without ``audio_energy``, orientation falls back to the per-frame mean
    of the audio features, which tracks energy for both the cepstral and
    synthetic front ends.
    """
    cfg = cfg or DetectorConfig()
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape[0] != w.shape[0]:
        raise DataError(f"views must have equal frame counts, got {v.shape[0]} vs {w.shape[0]}")
    if audio_energy is None:
        energy, source = v.mean(axis=1), "audio feature row means"
    else:
        energy, source = np.asarray(audio_energy, dtype=np.float64), "audio energy"
    d2v = graph.pairwise_sq_dists(v)
    d2w = graph.pairwise_sq_dists(w)
    return _detect_from_dists(d2v, d2w, cfg, energy, source)


def threshold_indicator(score, tau: float) -> np.ndarray:
    """Per-frame indicator: 1 where the score strictly exceeds tau."""
    nu = score.nu1 if isinstance(score, ActivityScore) else np.asarray(score)
    return (nu > tau).astype(np.int64)


@dataclass
class RocCurve:
    """Empirical ROC: one point per distinct score value plus both extremes."""

    pfa: np.ndarray
    pd: np.ndarray
    thresholds: np.ndarray
    auc: float

    @property
    def points(self):
        return list(zip(self.pfa.tolist(), self.pd.tolist()))


def roc(score, labels) -> RocCurve:
    """Detection/false-alarm curve of a score against binary labels.

    The threshold sweeps all distinct score values plus both infinities;
    predictions use the strict inequality score > tau.  The area is the
    trapezoidal integral over false-alarm rate.
    """
    nu = score.nu1 if isinstance(score, ActivityScore) else np.asarray(score, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64).ravel()
    if nu.shape[0] != labels.shape[0]:
        raise DataError(f"score and label lengths differ: {nu.shape[0]} vs {labels.shape[0]}")
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("labels must contain both classes to evaluate a ROC")

    order = np.argsort(-nu, kind="mergesort")
    sorted_scores = nu[order]
    is_pos = labels[order] == 1
    tp = np.cumsum(is_pos)
    fp = np.cumsum(~is_pos)
    # indices where a run of equal scores ends; counts there are the
    # (TP, FP) totals for any threshold just below that run's value
    run_ends = np.nonzero(np.diff(sorted_scores) != 0)[0]
    run_ends = np.concatenate([run_ends, [nu.size - 1]])

    thresholds = np.concatenate([[np.inf], sorted_scores[run_ends]])
    pd_vals = np.concatenate([[0.0], tp[run_ends] / n_pos])
    pfa_vals = np.concatenate([[0.0], fp[run_ends] / n_neg])
    # the lowest distinct value's own point equals the tau=-inf point
    thresholds = np.concatenate([thresholds, [-np.inf]])
    pd_vals = np.concatenate([pd_vals, [1.0]])
    pfa_vals = np.concatenate([pfa_vals, [1.0]])

    auc = float(np.trapezoid(pd_vals, pfa_vals))
    return RocCurve(pfa=pfa_vals, pd=pd_vals, thresholds=thresholds, auc=auc)


def sweep_c(
    v: np.ndarray,
    w: np.ndarray,
    labels: np.ndarray,
    c_grid,
    cfg: DetectorConfig | None = None,
    audio_energy: np.ndarray | None = None,
) -> list:
    """AUC per audio-view bandwidth multiplier, video multiplier held fixed.

    Each grid value c sets the audio bandwidth to c * maxmin directly; the
    video view stays at the single-view rule with cfg.c_single.  Returns
    [(c, auc), ...] in grid order.
    """
    cfg = cfg or DetectorConfig()
    c_grid = list(c_grid)
    if not c_grid:
        raise DataError("the C grid is empty")
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape[0] != w.shape[0]:
        raise DataError(f"views must have equal frame counts, got {v.shape[0]} vs {w.shape[0]}")
    if audio_energy is None:
        energy, source = v.mean(axis=1), "audio feature row means"
    else:
        energy, source = np.asarray(audio_energy, dtype=np.float64), "audio energy"
    d2v = graph.pairwise_sq_dists(v)
    d2w = graph.pairwise_sq_dists(w)
    out = []
    for c in c_grid:
        point_cfg = replace(cfg, c_audio=float(c), c_video=cfg.c_video or cfg.c_single)
        result = _detect_from_dists(d2v, d2w, point_cfg, energy, source)
        out.append((float(c), roc(result.score, labels).auc))
    return out
