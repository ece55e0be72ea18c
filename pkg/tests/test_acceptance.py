"""Acceptance gate: one test per criterion, each timed against its budget
and printing a PASS line (run with `pytest tests/test_acceptance.py -v -s`).
"""

import time

import numpy as np
import pytest

from kernelfuse import (
    BandwidthConfig,
    DetectorConfig,
    FrameSpec,
    SampleBuffer,
    SynthConfig,
    build_affinity,
    detect,
    frame_signal,
    fuse_alternating,
    fuse_hadamard,
    fuse_sum,
    leading_nontrivial_eigenvector,
    mfcc,
    mix_interference,
    multiview_degree_stats,
    pairwise_sq_dists,
    roc,
    row_normalize,
    select_bandwidth_ad,
    single_view_stats,
    sweep_c,
    synth_multiview,
    verify_proposition1,
)
from kernelfuse.connectivity import RandomGraphSpec


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            print(f"PASS {self.name} ({elapsed:.1f} s < {self.seconds} s)")
            assert elapsed < self.seconds, (
                f"{self.name}: runtime {elapsed:.1f} s exceeds budget {self.seconds} s"
            )
        else:
            print(f"FAIL {self.name} ({elapsed:.1f} s)")
        return False


def test_criterion_1_stochasticity_suite():
    """Every constructed Markov matrix has unit row sums to 1e-12."""
    with Budget("criterion 1: stochasticity suite", 10):
        rng = np.random.default_rng(101)
        for _ in range(100):
            n = int(rng.integers(8, 129))
            dims = int(rng.integers(2, 8))
            d2v = pairwise_sq_dists(rng.standard_normal((n, dims)))
            d2w = pairwise_sq_dists(rng.standard_normal((n, dims)))
            eps_v = 2.0 * float(np.median(d2v[d2v > 0]))
            eps_w = 2.0 * float(np.median(d2w[d2w > 0]))
            mv = row_normalize(build_affinity(d2v, eps_v))
            mw = row_normalize(build_affinity(d2w, eps_w))
            for m in (mv, mw, fuse_alternating(mv, mw),
                      fuse_hadamard(mv, mw), fuse_sum(mv, mw)):
                assert np.abs(m.sum(axis=1) - 1.0).max() < 1e-12
                assert m.min() >= 0.0


def test_criterion_2_proposition1_brute_force():
    """Connectivity equivalence on 1000 random sparse supports, checked
    against an explicit boolean-product oracle."""
    with Budget("criterion 2: proposition-1 brute force", 5):
        rng = np.random.default_rng(102)
        for _ in range(1000):
            n = int(rng.integers(2, 13))
            density = float(rng.uniform(0.05, 0.5))
            mv = rng.random((n, n)) < density
            mw = rng.random((n, n)) < density
            mv |= np.eye(n, dtype=bool)
            mw |= np.eye(n, dtype=bool)
            assert verify_proposition1(mv, mw)

            # boolean triple-loop oracle for the same equivalence
            for row in range(n):
                product_connected = False
                for col in range(n):
                    if col == row:
                        continue
                    if any(mv[row, l] and mw[l, col] for l in range(n)):
                        product_connected = True
                        break
                view_connected = any(
                    (mv[row, col] or mw[row, col]) and col != row for col in range(n)
                )
                assert product_connected == view_connected


def test_criterion_3_connectivity_model():
    """Isolated fractions track exp(-S); composite mean degree tracks S_v*S_w."""
    with Budget("criterion 3: connectivity model", 60):
        n, trials = 2000, 100
        for s in (2.0, 3.0, 5.0):
            stats = single_view_stats(
                RandomGraphSpec(n=n, p_edge=s / (n - 1), seed=int(s * 10), trials=trials))
            predicted = np.exp(-s)
            assert abs(stats.isolated_fraction - predicted) <= 0.2 * predicted, (
                f"S={s}: isolated {stats.isolated_fraction:.5f} vs e^-S {predicted:.5f}"
            )
        for s in (2.0, 3.0):
            stats = multiview_degree_stats(n, s, s, trials=trials, seed=int(s))
            assert abs(stats.mean_degree - s * s) <= 0.2 * s * s, (
                f"S={s}: composite mean degree {stats.mean_degree:.3f} vs {s * s}"
            )


def test_criterion_4_bandwidth_search_fidelity():
    """Bisection trace equals a pseudocode transcription on a fixed seed;
    iteration count within the log bound; bracket optimality; monotone
    connectivity in C over the full grid."""
    with Budget("criterion 4: bandwidth-search fidelity", 30):
        rng = np.random.default_rng(7)
        centers = rng.normal(size=(3, 5)) * 3.0
        x = np.concatenate([rng.normal(size=(s, 5)) + c
                            for s, c in zip((200, 160, 140), centers)])
        d2 = pairwise_sq_dists(x)
        report = select_bandwidth_ad(d2, BandwidthConfig(c_single=2.0, grid_size=40))

        # independent transcription, full kernel rebuilt at every step
        n = d2.shape[0]
        masked = d2 + np.diag(np.full(n, np.inf))
        mm = masked.min(axis=1).max()
        k = np.exp(-d2 / (2.0 * mm))
        np.fill_diagonal(k, 1.0)
        delta_hat = (k.sum() - n) / n
        cs = [(j / 40) * 2.0 for j in range(1, 41)]
        visited = []
        while len(cs) != 1:
            mid = cs[len(cs) // 2 - 1]
            kk = np.exp(-d2 / (mid * mm))
            np.fill_diagonal(kk, 1.0)
            d_mid = (kk.sum() - n) / n
            visited.append((mid, d_mid))
            cs = cs[: len(cs) // 2] if d_mid > np.sqrt(delta_hat) else cs[len(cs) // 2 :]

        assert [c for c, _ in report.visited] == [c for c, _ in visited]
        for (_, lib), (_, orc) in zip(report.visited, visited):
            assert lib == pytest.approx(orc, rel=1e-9)
        assert report.c_ad == cs[0]
        assert [round(c, 10) for c, _ in report.visited] == [1.0, 0.5, 0.25, 0.35, 0.3]
        assert len(report.visited) <= int(np.ceil(np.log2(40)))

        deltas = []
        for j in range(1, 41):
            kj = np.exp(-d2 / ((j / 40) * 2.0 * mm))
            np.fill_diagonal(kj, 1.0)
            deltas.append((kj.sum() - n) / n)
        deltas = np.array(deltas)
        assert np.all(np.diff(deltas) > 0)

        target = np.sqrt(delta_hat)
        below = np.nonzero(deltas <= target)[0]
        crossing = int(below[-1]) + 1 if below.size else 0
        returned_idx = int(round(report.c_ad / 2.0 * 40))
        assert returned_idx in (crossing, crossing + 1)


CONTAMINATED = dict(interference_rate_audio=0.2, interference_rate_video=0.2)


def test_criterion_5_fusion_ordering_trend():
    """Alternating fusion beats both single views in >= 8 of 10 seeds."""
    with Budget("criterion 5: fusion-ordering trend", 120):
        wins = 0
        details = []
        for seed in range(10):
            v, w, labels = synth_multiview(SynthConfig(n_frames=1000, seed=seed, **CONTAMINATED))
            aucs = {}
            for fusion in ("alternating", "audio_only", "video_only"):
                result = detect(v, w, DetectorConfig(fusion=fusion))
                aucs[fusion] = roc(result.score, labels).auc
            won = aucs["alternating"] > aucs["audio_only"] and aucs["alternating"] > aucs["video_only"]
            wins += won
            details.append(f"seed {seed}: alt={aucs['alternating']:.3f} "
                           f"aud={aucs['audio_only']:.3f} vid={aucs['video_only']:.3f}")
        print("\n".join(details))
        assert wins >= 8, f"fusion ordering held in only {wins}/10 seeds"


def test_criterion_6_c_sweep_trend():
    """The AUC-vs-C curve peaks below C=1 in >= 8 of 10 seeds, and the
    selected C^AD lands within 2 grid steps of the argmax in >= 7 of 10."""
    with Budget("criterion 6: C-sweep trend", 300):
        grid = np.round(np.arange(0.1, 2.01, 0.1), 10)
        peak_below_one = 0
        cad_close = 0
        degraded_below = 0
        for seed in range(10):
            v, w, labels = synth_multiview(SynthConfig(n_frames=1000, seed=seed, **CONTAMINATED))
            cfg = DetectorConfig(eigen_method="symmetrized")
            pairs = sweep_c(v, w, labels, grid, cfg)
            aucs = np.array([a for _, a in pairs])
            argmax_c = float(grid[int(np.argmax(aucs))])
            peak_below_one += argmax_c < 1.0
            degraded_below += aucs[0] < aucs.max()
            report = select_bandwidth_ad(pairwise_sq_dists(v),
                                         BandwidthConfig(c_single=2.0, grid_size=40))
            close = abs(report.c_ad - argmax_c) <= 0.2 + 1e-9
            cad_close += close
            print(f"seed {seed}: argmax={argmax_c:.1f} c_ad={report.c_ad:.2f} "
                  f"auc@0.1={aucs[0]:.3f} auc@max={aucs.max():.3f} auc@2.0={aucs[-1]:.3f}")
        assert peak_below_one >= 8, f"peak below C=1 in only {peak_below_one}/10 seeds"
        assert cad_close >= 7, f"C^AD within 2 grid steps in only {cad_close}/10 seeds"
        assert degraded_below >= 8, f"degradation below the peak in only {degraded_below}/10 seeds"


def test_criterion_7_roc_correctness():
    """AUC equals the rank-statistic oracle; perfect and chance sanity."""
    with Budget("criterion 7: ROC correctness", 30):
        rng = np.random.default_rng(107)
        for _ in range(100):
            n = int(rng.integers(10, 400))
            labels = np.zeros(n, dtype=int)
            labels[: int(rng.integers(1, n))] = 1
            rng.shuffle(labels)
            if labels.min() == labels.max():
                continue
            scores = rng.standard_normal(n)
            if rng.random() < 0.3:
                scores = np.round(scores, 1)

            order = np.argsort(scores, kind="mergesort")
            ranks = np.empty(n)
            ss = scores[order]
            base = np.arange(1, n + 1, dtype=np.float64)
            i = 0
            while i < n:
                j = i
                while j + 1 < n and ss[j + 1] == ss[i]:
                    j += 1
                ranks[order[i : j + 1]] = base[i : j + 1].mean()
                i = j + 1
            n1 = int(labels.sum())
            n0 = n - n1
            oracle = (ranks[labels == 1].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0)
            assert roc(scores, labels).auc == pytest.approx(oracle, abs=1e-10)

        labels = (rng.random(500) < 0.5).astype(int)
        assert roc(labels.astype(float), labels).auc == 1.0
        labels = (rng.random(10000) < 0.5).astype(int)
        chance = roc(rng.standard_normal(10000), labels).auc
        assert 0.45 <= chance <= 0.55


def test_criterion_8_dsp_checks():
    """Framing count formula, mixing SNR, cepstral scale invariance, and
    the eigen residual contract against a dense-solver oracle."""
    with Budget("criterion 8: DSP checks", 60):
        rng = np.random.default_rng(108)
        spec = FrameSpec()
        for _ in range(1000):
            length = int(rng.integers(634, 200000))
            count = 0
            while count * spec.hop + spec.frame_len <= length:
                count += 1
            assert (length - spec.frame_len) // spec.hop + 1 == count
            if count < 4000:
                assert frame_signal(np.zeros(length), spec).shape[0] == count

        clean = SampleBuffer(rng.standard_normal(8000) * 0.2, rate=8000)
        noise = SampleBuffer(rng.standard_normal(5000), rate=8000)
        for target in (-5.0, 0.0, 7.5):
            mixed = mix_interference(clean, noise=noise, snr_db=target)
            added = mixed.samples - clean.samples
            achieved = 10.0 * np.log10(np.mean(clean.samples**2) / np.mean(added**2))
            assert abs(achieved - target) < 0.01

        for _ in range(20):
            frame = rng.standard_normal(634) * 0.2
            gain = float(rng.uniform(0.25, 4.0))
            base = mfcc(frame)
            scaled = mfcc(gain * frame)
            assert np.abs(scaled[1:] - base[1:]).max() < 1e-9

        for _ in range(100):
            n = int(rng.integers(16, 97))
            d2 = pairwise_sq_dists(rng.standard_normal((n, 4)))
            m = row_normalize(build_affinity(d2, 2.0 * float(np.median(d2[d2 > 0]))))
            res = leading_nontrivial_eigenvector(m, method="direct")
            assert res.method == "direct"
            assert np.linalg.norm(m @ res.vector - res.eigenvalue * res.vector) < 1e-8 * n

            vals, vecs = np.linalg.eig(m)
            trivial = int(np.argmin(np.abs(vals - 1.0)))
            rest = [i for i in range(n) if i != trivial]
            top = rest[int(np.argmax(np.abs(vals[rest])))]
            assert res.eigenvalue == pytest.approx(float(vals[top].real), abs=1e-8)
            oracle_vec = np.real(vecs[:, top])
            oracle_vec /= np.linalg.norm(oracle_vec)
            assert abs(float(oracle_vec @ res.vector)) == pytest.approx(1.0, abs=1e-6)
