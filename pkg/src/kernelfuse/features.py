"""Feature extraction and data preparation for the two-view detector.

Audio arrives as 16-bit PCM mono WAV, is cut into fixed-length overlapping
frames, and becomes mel-cepstral coefficient vectors; the video view is
ingested as precomputed per-frame motion magnitudes.  Both views get a
three-frame context concatenation.  A seeded synthetic generator produces
matched two-view data with view-specific interference for experiments that
need ground truth.
"""

import wave
from dataclasses import asdict, dataclass

import numpy as np
import scipy.fft
import scipy.signal

from .errors import DataError

__all__ = [
    "SampleBuffer",
    "FrameSpec",
    "MfccConfig",
    "SynthConfig",
    "load_wav",
    "save_wav",
    "frame_signal",
    "frame_energies",
    "mel_filterbank",
    "mel_energies",
    "mfcc",
    "mfcc_matrix",
    "audio_features",
    "context_concat",
    "load_video_features",
    "mix_interference",
    "label_ground_truth",
    "synth_multiview",
]


@dataclass
class SampleBuffer:
    """Mono audio samples in [-1, 1] at a given rate."""

    samples: np.ndarray
    rate: int


@dataclass
class FrameSpec:
    """Framing geometry; the defaults give 50% overlap at 8 kHz."""

    frame_len: int = 634
    hop: int = 317

    def __post_init__(self):
        if not 0 < self.hop <= self.frame_len:
            raise DataError(f"need 0 < hop <= frame_len, got hop={self.hop}, frame_len={self.frame_len}")


@dataclass
class MfccConfig:
    """Mel-cepstrum parameters (standard speech front-end defaults)."""

    fft_size: int = 1024
    n_mel_filters: int = 26
    n_coeffs: int = 13
    sample_rate: int = 8000
    mel_low: float = 0.0
    mel_high: float = 4000.0
    log_floor: float = 1e-10
    include_zeroth: bool = True

    def __post_init__(self):
        if self.n_coeffs > self.n_mel_filters:
            raise DataError(
                f"n_coeffs ({self.n_coeffs}) cannot exceed n_mel_filters ({self.n_mel_filters})"
            )


def load_wav(path, expected_rate: int | None = None, resample: bool = False) -> SampleBuffer:
    """Read 16-bit PCM mono WAV, scaled to [-1, 1] by 1/32768.

    With ``expected_rate`` set, a file at a different rate is either
    polyphase-resampled (``resample=True``) or rejected.
    """
    try:
        with wave.open(str(path), "rb") as f:
            n_channels = f.getnchannels()
            width = f.getsampwidth()
            comp = f.getcomptype()
            rate = f.getframerate()
            raw = f.readframes(f.getnframes())
    except (wave.Error, EOFError) as exc:
        raise DataError(f"{path}: not a readable WAV file ({exc})") from exc
    if comp != "NONE":
        raise DataError(f"{path}: compressed WAV ({comp}) not supported, need PCM")
    if width != 2:
        raise DataError(f"{path}: need 16-bit PCM, got sample width {width} bytes")
    if n_channels != 1:
        raise DataError(f"{path}: need mono audio, got {n_channels} channels")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if expected_rate is not None and rate != expected_rate:
        if not resample:
            raise DataError(
                f"{path}: sample rate {rate} Hz, expected {expected_rate} Hz "
                "(pass resample=True / --resample to convert)"
            )
        samples = scipy.signal.resample_poly(samples, expected_rate, rate)
        rate = expected_rate
    return SampleBuffer(samples=samples, rate=rate)


def save_wav(path, buf: SampleBuffer) -> None:
    """Write a SampleBuffer as 16-bit PCM mono WAV (values clipped to range)."""
    q = np.clip(np.round(np.asarray(buf.samples) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(buf.rate)
        f.writeframes(q.tobytes())


def _as_samples(buf):
    return np.asarray(buf.samples if isinstance(buf, SampleBuffer) else buf, dtype=np.float64)


def frame_signal(buf, spec: FrameSpec | None = None) -> np.ndarray:
    """Slice into overlapping frames; a trailing partial frame is dropped.

    Frame i covers samples [i*hop, i*hop + frame_len); the count is
    floor((len - frame_len) / hop) + 1.
    """
    spec = spec or FrameSpec()
    x = _as_samples(buf)
    if x.size < spec.frame_len:
        raise DataError(
            f"signal too short to frame: {x.size} samples < frame_len {spec.frame_len}"
        )
    count = (x.size - spec.frame_len) // spec.hop + 1
    idx = spec.hop * np.arange(count)[:, None] + np.arange(spec.frame_len)[None, :]
    return x[idx]


def frame_energies(buf, spec: FrameSpec | None = None) -> np.ndarray:
    """Per-frame energy, sum of squared samples."""
    frames = frame_signal(buf, spec)
    return np.einsum("ij,ij->i", frames, frames)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MfccConfig | None = None) -> np.ndarray:
    """Triangular mel filters on the one-sided FFT bins, shape (n_filters, bins)."""
    cfg = cfg or MfccConfig()
    n_bins = cfg.fft_size // 2 + 1
    freqs = np.arange(n_bins) * (cfg.sample_rate / cfg.fft_size)
    mel_pts = np.linspace(_hz_to_mel(cfg.mel_low), _hz_to_mel(cfg.mel_high), cfg.n_mel_filters + 2)
    hz = _mel_to_hz(mel_pts)
    fb = np.zeros((cfg.n_mel_filters, n_bins))
    for i in range(cfg.n_mel_filters):
        lo, center, hi = hz[i], hz[i + 1], hz[i + 2]
        rising = (freqs - lo) / (center - lo)
        falling = (hi - freqs) / (hi - center)
        fb[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return fb


def mel_energies(frames: np.ndarray, cfg: MfccConfig | None = None) -> np.ndarray:
    """Mel filter energies per frame: Hamming window, zero-padded power spectrum, filterbank."""
    cfg = cfg or MfccConfig()
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    if frames.shape[1] > cfg.fft_size:
        raise DataError(f"frame length {frames.shape[1]} exceeds fft_size {cfg.fft_size}")
    windowed = frames * np.hamming(frames.shape[1])
    spectrum = np.fft.rfft(windowed, n=cfg.fft_size, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    return power @ mel_filterbank(cfg).T


def mfcc_matrix(frames: np.ndarray, cfg: MfccConfig | None = None) -> np.ndarray:
    """Mel-cepstral coefficients per frame, shape (n_frames, n_coeffs)."""
    cfg = cfg or MfccConfig()
    energies = mel_energies(frames, cfg)
    log_e = np.log(np.maximum(energies, cfg.log_floor))
    cep = scipy.fft.dct(log_e, type=2, norm="ortho", axis=1)
    if cfg.include_zeroth:
        return cep[:, : cfg.n_coeffs]
    return cep[:, 1 : cfg.n_coeffs + 1]


def mfcc(frame: np.ndarray, cfg: MfccConfig | None = None) -> np.ndarray:
    """Coefficient vector for a single frame."""
    return mfcc_matrix(np.atleast_2d(frame), cfg)[0]


def context_concat(per_frame: np.ndarray) -> np.ndarray:
    """Concatenate each row with its neighbors: [f(n-1), f(n), f(n+1)].

    Boundary rows replicate the edge frame, keeping the frame count intact.
    """
    x = np.atleast_2d(np.asarray(per_frame, dtype=np.float64))
    if x.shape[0] < 3:
        raise DataError(f"context concatenation needs at least 3 frames, got {x.shape[0]}")
    prev = np.vstack([x[:1], x[:-1]])
    nxt = np.vstack([x[1:], x[-1:]])
    return np.hstack([prev, x, nxt])


def audio_features(buf, frame_spec: FrameSpec | None = None, cfg: MfccConfig | None = None) -> np.ndarray:
    """Audio-view feature matrix: framing, mel cepstrum, context concatenation."""
    return context_concat(mfcc_matrix(frame_signal(buf, frame_spec), cfg))


def load_video_features(path, expected_frames: int | None = None) -> np.ndarray:
    """Video-view features from a CSV of per-frame motion-magnitude vectors.

    Takes absolute values, then applies the three-frame context
    concatenation.  An optional header line is skipped.  When
    ``expected_frames`` is given, a row-count mismatch is rejected with both
    counts in the message.
    """
    with open(path) as f:
        first = f.readline()
    skip = 0
    try:
        [float(tok) for tok in first.strip().split(",")]
    except ValueError:
        skip = 1
    raw = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=np.float64)
    if expected_frames is not None and raw.shape[0] != expected_frames:
        raise DataError(
            f"{path}: {raw.shape[0]} motion rows but {expected_frames} audio frames; "
            "the views must be aligned 1:1"
        )
    return context_concat(np.abs(raw))


def _fit_length(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.size < n:
        x = np.tile(x, int(np.ceil(n / x.size)))
    return x[:n]


def mix_interference(
    clean: SampleBuffer,
    noise: SampleBuffer | None = None,
    transients: SampleBuffer | None = None,
    snr_db: float | None = None,
) -> SampleBuffer:
    """Contaminate a clean signal with scaled noise and peak-matched transients.

    Noise is scaled so the clean-to-noise power ratio over the whole
    sequence equals ``snr_db``; transients are scaled to the clean signal's
    peak amplitude.  Both are tiled or truncated to the clean length.
    """
    c = _as_samples(clean)
    p_clean = float(np.mean(c**2))
    if p_clean == 0.0:
        raise DataError("clean signal has zero power; SNR and peak scaling are undefined")
    out = c.copy()
    if noise is not None:
        if snr_db is None:
            raise DataError("snr_db is required when noise is given")
        if isinstance(noise, SampleBuffer) and noise.rate != clean.rate:
            raise DataError(f"noise rate {noise.rate} != clean rate {clean.rate}")
        nz = _fit_length(_as_samples(noise), c.size)
        p_noise = float(np.mean(nz**2))
        if p_noise == 0.0:
            raise DataError("noise signal has zero power; cannot reach the target SNR")
        gain = np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0)))
        out += gain * nz
    if transients is not None:
        if isinstance(transients, SampleBuffer) and transients.rate != clean.rate:
            raise DataError(f"transient rate {transients.rate} != clean rate {clean.rate}")
        tr = _fit_length(_as_samples(transients), c.size)
        peak = np.abs(tr).max()
        if peak > 0.0:
            out += tr * (np.abs(c).max() / peak)
    return SampleBuffer(samples=out, rate=clean.rate)


def label_ground_truth(clean, spec: FrameSpec | None = None) -> np.ndarray:
    """Per-frame speech indicator: energy strictly above 1% of the peak frame energy."""
    energies = frame_energies(clean, spec)
    return (energies > 0.01 * energies.max()).astype(np.int64)


@dataclass
class SynthConfig:
    """Synthetic two-view generator parameters.

    A two-state chain (speech on/off) drives both views: each view embeds
    the state as one of two cluster centers plus a shared slow wobble and
    iid noise.  Interference hits each view independently at its own rate;
    a burst adds an on-axis component that smears points along the class
    direction (transients that look speech-like) plus a larger off-axis
    component in one of two fixed nuisance directions.  Everything is
    deterministic given the seed, and the two views consume independent
    substreams, so changing one view's interference leaves the other view's
    output bit-identical.
    """

    n_frames: int = 1000
    seed: int = 0
    speech_on_prob: float = 0.06
    speech_off_prob: float = 0.06
    dim_audio: int = 8
    dim_video: int = 6
    class_sep_audio: float = 1.5
    class_sep_video: float = 1.5
    noise_level: float = 0.3
    shared_wobble: float = 0.15
    interference_rate_audio: float = 0.0
    interference_rate_video: float = 0.0
    interference_amp_audio: float = 1.0
    interference_amp_video: float = 1.0

    def __post_init__(self):
        if self.n_frames < 16:
            raise DataError(f"n_frames must be at least 16, got {self.n_frames}")
        for name in ("speech_on_prob", "speech_off_prob",
                     "interference_rate_audio", "interference_rate_video"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DataError(f"{name} must be in [0, 1], got {p}")
        if self.dim_audio < 1 or self.dim_video < 1:
            raise DataError("view dimensions must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise DataError(f"unknown SynthConfig fields: {sorted(unknown)}")
        return cls(**d)


def _synth_view(rng, states, wobble, dim, sep, rate, amp, noise_level, wobble_scale):
    n = states.size
    class_dir = rng.standard_normal(dim) * 0.3 + 1.0  # positive-mean class axis
    class_dir /= np.linalg.norm(class_dir)
    wobble_dir = rng.standard_normal(dim)
    wobble_dir /= np.linalg.norm(wobble_dir)
    x = np.where(states[:, None] == 1, sep, 0.0) * class_dir
    x += wobble_scale * wobble[:, None] * wobble_dir
    x += noise_level * rng.standard_normal((n, dim))

    nuisance = rng.standard_normal((2, dim))
    nuisance -= nuisance.mean(axis=1, keepdims=True)  # zero-sum: off the class axis mean
    nuisance /= np.linalg.norm(nuisance, axis=1, keepdims=True)
    occ = rng.random(n) < rate
    choice = rng.integers(0, 2, n)
    on_axis = sep * amp * (0.4 + rng.random(n))
    off_axis = sep * amp * 2.2 * (0.5 + 0.5 * rng.random(n))
    x[occ] += on_axis[occ, None] * class_dir + off_axis[occ, None] * nuisance[choice[occ]]
    return x


def synth_multiview(cfg: SynthConfig | None = None):
    """Generate (audio_view, video_view, labels) from a SynthConfig."""
    cfg = cfg or SynthConfig()
    n = cfg.n_frames
    rng_state = np.random.default_rng([cfg.seed, 0])
    states = np.empty(n, dtype=np.int64)
    states[0] = 1 if rng_state.random() < 0.5 else 0
    u = rng_state.random(n)
    for i in range(1, n):
        if states[i - 1] == 0:
            states[i] = 1 if u[i] < cfg.speech_on_prob else 0
        else:
            states[i] = 0 if u[i] < cfg.speech_off_prob else 1
    innov = rng_state.standard_normal(n)
    wobble = np.empty(n)
    wobble[0] = innov[0]
    for i in range(1, n):
        wobble[i] = 0.95 * wobble[i - 1] + 0.31 * innov[i]

    v = _synth_view(
        np.random.default_rng([cfg.seed, 1]), states, wobble,
        cfg.dim_audio, cfg.class_sep_audio,
        cfg.interference_rate_audio, cfg.interference_amp_audio,
        cfg.noise_level, cfg.shared_wobble,
    )
    w = _synth_view(
        np.random.default_rng([cfg.seed, 2]), states, wobble,
        cfg.dim_video, cfg.class_sep_video,
        cfg.interference_rate_video, cfg.interference_amp_video,
        cfg.noise_level, cfg.shared_wobble,
    )
    return v, w, states
