"""kernelfuse: two-view Gaussian-kernel fusion, connectivity-aware bandwidth
selection, a Monte Carlo connectivity model, and an audio-visual voice
activity detector built on the fused random walk."""

__version__ = "0.1.0"

from ._backend import backend_name
from .bandwidth import (
    BandwidthConfig,
    BandwidthReport,
    epsilon_single,
    estimate_delta,
    estimate_p,
    maxmin_sq_dist,
    select_bandwidth_ad,
)
from .connectivity import (
    ConnectivityStats,
    RandomGraphSpec,
    isolated_fraction,
    multiview_degree_stats,
    sample_view_graph,
    single_view_stats,
    verify_proposition1,
)
from .errors import DataError, NumericalError
from .features import (
    FrameSpec,
    MfccConfig,
    SampleBuffer,
    SynthConfig,
    audio_features,
    context_concat,
    frame_energies,
    frame_signal,
    label_ground_truth,
    load_video_features,
    load_wav,
    mfcc,
    mfcc_matrix,
    mix_interference,
    save_wav,
    synth_multiview,
)
from .graph import (
    SpectralResult,
    build_affinity,
    fuse_alternating,
    fuse_hadamard,
    fuse_sum,
    leading_nontrivial_eigenvector,
    pairwise_sq_dists,
    row_normalize,
)
from .vad import (
    ActivityScore,
    DetectionResult,
    DetectorConfig,
    RocCurve,
    detect,
    orient_sign,
    roc,
    sweep_c,
    threshold_indicator,
)

__all__ = [
    "__version__",
    "backend_name",
    "DataError",
    "NumericalError",
    "SpectralResult",
    "pairwise_sq_dists",
    "build_affinity",
    "row_normalize",
    "fuse_alternating",
    "fuse_hadamard",
    "fuse_sum",
    "leading_nontrivial_eigenvector",
    "BandwidthConfig",
    "BandwidthReport",
    "maxmin_sq_dist",
    "epsilon_single",
    "estimate_p",
    "estimate_delta",
    "select_bandwidth_ad",
    "RandomGraphSpec",
    "ConnectivityStats",
    "sample_view_graph",
    "isolated_fraction",
    "single_view_stats",
    "multiview_degree_stats",
    "verify_proposition1",
    "SampleBuffer",
    "FrameSpec",
    "MfccConfig",
    "SynthConfig",
    "load_wav",
    "save_wav",
    "frame_signal",
    "frame_energies",
    "mfcc",
    "mfcc_matrix",
    "audio_features",
    "context_concat",
    "load_video_features",
    "mix_interference",
    "label_ground_truth",
    "synth_multiview",
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
