"""Command-line surface for reproduction runs.

Subcommands: synth (generate a labeled two-view dataset), features (WAV +
motion CSV to feature/label files), vad (run the detector and emit
scores/ROC/summary), sweep (AUC versus the audio bandwidth multiplier),
simulate (the random-graph connectivity model), rerun (replay a manifest).

Every command writes a manifest.json snapshot of its resolved parameters;
rerunning from the manifest reproduces the data outputs byte for byte.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, features, matio, vad
from .connectivity import multiview_degree_stats
from .errors import DataError, NumericalError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write_manifest(out_dir, command, params, inputs, outputs, started):
    manifest = {
        "tool": "kernelfuse",
        "version": __version__,
        "command": command,
        "params": params,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "duration_s": round(time.monotonic() - started, 6),
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _prepare_out(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_synth(params):
    started = time.monotonic()
    cfg = features.SynthConfig.from_dict(params["config"])
    out = _prepare_out(params["out_dir"])
    v, w, labels = features.synth_multiview(cfg)
    matio.save_matrix_csv(out / "v.csv", v, prefix="a")
    matio.save_matrix_csv(out / "w.csv", w, prefix="m")
    matio.save_labels_csv(out / "labels.csv", labels)
    _write_manifest(out, "synth", params, [],
                    [out / "v.csv", out / "w.csv", out / "labels.csv"], started)
    print(f"wrote {cfg.n_frames} frames to {out}")


def _cmd_synth(args):
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"{args.config}: cannot read SynthConfig JSON ({exc})") from exc
    run_synth({"config": config, "out_dir": args.out_dir})


def run_features(params):
    started = time.monotonic()
    out = _prepare_out(params["out_dir"])
    spec = features.FrameSpec(params["frame_len"], params["hop"])
    clean = features.load_wav(params["wav"], expected_rate=params["rate"],
                              resample=params["resample"])
    labels = features.label_ground_truth(clean, spec)

    mixed = clean
    if params["noise"] or params["transients"]:
        noise = features.load_wav(params["noise"], expected_rate=clean.rate,
                                  resample=params["resample"]) if params["noise"] else None
        trans = features.load_wav(params["transients"], expected_rate=clean.rate,
                                  resample=params["resample"]) if params["transients"] else None
        mixed = features.mix_interference(clean, noise, trans, snr_db=params["snr"])

    v = features.audio_features(mixed, spec)
    energy = features.frame_energies(mixed, spec)
    w = features.load_video_features(params["motion"], expected_frames=v.shape[0])

    matio.save_matrix_csv(out / "v.csv", v, prefix="a")
    matio.save_matrix_csv(out / "w.csv", w, prefix="m")
    matio.save_labels_csv(out / "labels.csv", labels)
    matio.save_columns_csv(out / "energy.csv", ["energy"], [energy])
    _write_manifest(out, "features", params, [params["wav"], params["motion"]],
                    [out / "v.csv", out / "w.csv", out / "labels.csv", out / "energy.csv"],
                    started)
    print(f"wrote {v.shape[0]} frames to {out}")


def _cmd_features(args):
    if args.noise and args.snr is None:
        raise UsageError("kernelfuse features: --snr is required with --noise")
    run_features({
        "wav": args.wav, "motion": args.motion, "out_dir": args.out_dir,
        "noise": args.noise, "transients": args.transients, "snr": args.snr,
        "rate": args.rate, "resample": args.resample,
        "frame_len": args.frame_len, "hop": args.hop,
    })


def _load_views(params):
    v = matio.load_matrix_csv(params["v"])
    w = matio.load_matrix_csv(params["w"])
    labels = matio.load_labels_csv(params["labels"])
    if not (v.shape[0] == w.shape[0] == labels.shape[0]):
        raise DataError(
            f"misaligned inputs: v has {v.shape[0]} rows, w has {w.shape[0]}, "
            f"labels has {labels.shape[0]}"
        )
    energy = None
    if params.get("energy"):
        energy = np.loadtxt(params["energy"], skiprows=1, ndmin=1, dtype=np.float64)
        if energy.shape[0] != v.shape[0]:
            raise DataError(
                f"energy file has {energy.shape[0]} rows but views have {v.shape[0]}"
            )
    return v, w, labels, energy


def _detector_config(params):
    return vad.DetectorConfig(
        fusion=params["fusion"],
        bandwidth_mode=params["bandwidth"],
        apply_algorithm1_to=tuple(params["apply_to"]),
        eigen_method=params["eigen"],
        c_single=params["c"],
        grid_size=params["grid"],
    )


def run_vad(params):
    started = time.monotonic()
    out = _prepare_out(params["out_dir"])
    v, w, labels, energy = _load_views(params)
    cfg = _detector_config(params)
    result = vad.detect(v, w, cfg, audio_energy=energy)
    curve = vad.roc(result.score, labels)

    matio.save_columns_csv(out / "scores.csv", ["frame", "nu1", "label"],
                           [np.arange(labels.size), result.score.nu1, labels],
                           fmts=["%d", "%.17g", "%d"])
    matio.save_columns_csv(out / "roc.csv", ["tau", "pfa", "pd"],
                           [curve.thresholds, curve.pfa, curve.pd])
    summary = {
        "auc": curve.auc,
        "fusion": result.fusion,
        "eigen_method": result.eigen.method,
        "eigenvalue": result.eigen.eigenvalue,
        "c_single": cfg.c_single,
        "c_ad": result.bandwidth_audio.c_ad if result.bandwidth_audio else None,
        "epsilon_ad": result.bandwidth_audio.epsilon_ad if result.bandwidth_audio else None,
        "epsilon_audio": result.epsilon_audio,
        "epsilon_video": result.epsilon_video,
        "orientation": result.score.orientation_source,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if result.bandwidth_audio:
        (out / "bandwidth_audio.json").write_text(result.bandwidth_audio.to_json(indent=2) + "\n")
    if result.bandwidth_video:
        (out / "bandwidth_video.json").write_text(result.bandwidth_video.to_json(indent=2) + "\n")
    _write_manifest(out, "vad", params, [params["v"], params["w"], params["labels"]],
                    [out / "scores.csv", out / "roc.csv", out / "summary.json"], started)
    print(f"auc={curve.auc:.6f} fusion={result.fusion} -> {out}")


def _cmd_vad(args):
    run_vad({
        "v": args.v, "w": args.w, "labels": args.labels, "out_dir": args.out_dir,
        "fusion": args.fusion, "bandwidth": args.bandwidth, "c": args.c,
        "eigen": args.eigen, "grid": args.grid, "apply_to": list(args.apply_to),
        "energy": args.energy,
    })


def run_sweep(params):
    started = time.monotonic()
    out = _prepare_out(params["out_dir"])
    v, w, labels, energy = _load_views(params)
    cfg = _detector_config(params)
    grid = np.linspace(params["c_min"], params["c_max"], params["steps"])
    pairs = vad.sweep_c(v, w, labels, grid, cfg, audio_energy=energy)
    cs = np.array([c for c, _ in pairs])
    aucs = np.array([a for _, a in pairs])
    matio.save_columns_csv(out / "sweep.csv", ["c", "auc"], [cs, aucs])

    from .bandwidth import BandwidthConfig, select_bandwidth_ad
    from .graph import pairwise_sq_dists

    report = select_bandwidth_ad(pairwise_sq_dists(v), BandwidthConfig(params["c"], params["grid"]))
    auc_at_cad = vad.sweep_c(v, w, labels, [report.c_ad], cfg, audio_energy=energy)[0][1]
    best = int(np.argmax(aucs))
    summary = {
        "c_ad": report.c_ad,
        "epsilon_ad": report.epsilon_ad,
        "auc_at_c_ad": auc_at_cad,
        "argmax_c": float(cs[best]),
        "argmax_auc": float(aucs[best]),
        "fusion": cfg.fusion,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "sweep", params, [params["v"], params["w"], params["labels"]],
                    [out / "sweep.csv", out / "summary.json"], started)
    print(f"argmax c={cs[best]:.3f} auc={aucs[best]:.6f}, algorithm-1 c_ad={report.c_ad:.3f} -> {out}")


def _cmd_sweep(args):
    if args.c_min <= 0:
        raise UsageError("kernelfuse sweep: --c-min must be positive")
    if args.steps < 1:
        raise UsageError("kernelfuse sweep: --steps must be at least 1")
    run_sweep({
        "v": args.v, "w": args.w, "labels": args.labels, "out_dir": args.out_dir,
        "c_min": args.c_min, "c_max": args.c_max, "steps": args.steps,
        "fusion": args.fusion, "bandwidth": "single_view_rule", "c": args.c,
        "eigen": args.eigen, "grid": args.grid, "apply_to": ["audio"],
        "energy": args.energy,
    })


def run_simulate(params):
    started = time.monotonic()
    n, s_v, s_w = params["n"], params["s_v"], params["s_w"]
    stats = multiview_degree_stats(n, s_v, s_w, params["trials"], params["seed"])
    payload = {
        "n": n,
        "s_v": s_v,
        "s_w": s_w,
        "trials": params["trials"],
        "seed": params["seed"],
        "mean_degree": stats.mean_degree,
        "isolated_fraction": stats.isolated_fraction,
        "predicted_mean_degree": s_v * s_w,
        "predicted_isolated_fraction": math.exp(-s_v * s_w),
        "mean_degree_markov": stats.mean_degree_markov,
        "isolated_fraction_markov": stats.isolated_fraction_markov,
        "predicted_isolated_fraction_markov": math.exp(-(s_v + s_w)),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if params.get("out_dir"):
        out = _prepare_out(params["out_dir"])
        (out / "connectivity.json").write_text(text + "\n")
        _write_manifest(out, "simulate", params, [], [out / "connectivity.json"], started)


def _cmd_simulate(args):
    run_simulate({
        "n": args.n, "s_v": args.s_v, "s_w": args.s_w,
        "trials": args.trials, "seed": args.seed,
        "out_dir": args.out,
    })


_RUNNERS = {
    "synth": run_synth,
    "features": run_features,
    "vad": run_vad,
    "sweep": run_sweep,
    "simulate": run_simulate,
}


def _cmd_rerun(args):
    try:
        manifest = json.loads(Path(args.manifest).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"{args.manifest}: cannot read manifest ({exc})") from exc
    command = manifest.get("command")
    if command not in _RUNNERS:
        raise DataError(f"{args.manifest}: unknown command {command!r}")
    params = dict(manifest["params"])
    if args.out:
        params["out_dir" if "out_dir" in params else "out"] = args.out
    _RUNNERS[command](params)


def build_parser():
    parser = _Parser(prog="kernelfuse",
                     description="Two-view kernel fusion and voice activity detection")
    parser.add_argument("--version", action="version", version=f"kernelfuse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled two-view dataset")
    p.add_argument("config", help="SynthConfig JSON file")
    p.add_argument("out_dir", help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("features", help="extract features from WAV + motion CSV")
    p.add_argument("wav", help="clean 16-bit PCM mono WAV")
    p.add_argument("motion", help="per-frame motion-magnitude CSV, aligned with audio frames")
    p.add_argument("out_dir", help="output directory")
    p.add_argument("--noise", help="background-noise WAV, scaled to --snr")
    p.add_argument("--transients", help="transient WAV, peak-matched to the clean signal")
    p.add_argument("--snr", type=float, help="clean-to-noise ratio in dB")
    p.add_argument("--rate", type=int, default=8000, help="expected sample rate (default 8000)")
    p.add_argument("--resample", action="store_true", help="resample inputs at other rates")
    p.add_argument("--frame-len", type=int, default=634, help="frame length in samples")
    p.add_argument("--hop", type=int, default=317, help="hop in samples")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("vad", help="run the detector on feature/label CSVs")
    p.add_argument("v", help="audio-view feature CSV")
    p.add_argument("w", help="video-view feature CSV")
    p.add_argument("labels", help="ground-truth label CSV")
    p.add_argument("--out", dest="out_dir", default="vad_out", help="output directory")
    p.add_argument("--fusion", choices=vad.FUSION_MODES, default="alternating")
    p.add_argument("--bandwidth", choices=vad.BANDWIDTH_MODES, default="single_view_rule")
    p.add_argument("--c", type=float, default=2.0, help="single-view multiplier C")
    p.add_argument("--eigen", choices=vad.EIGEN_METHODS, default="direct")
    p.add_argument("--grid", type=int, default=40, help="bandwidth search grid size")
    p.add_argument("--apply-to", nargs="+", choices=("audio", "video"), default=("audio",),
                   help="views the bandwidth search applies to")
    p.add_argument("--energy", help="per-frame energy CSV for sign orientation")
    p.set_defaults(func=_cmd_vad)

    p = sub.add_parser("sweep", help="AUC versus the audio bandwidth multiplier")
    p.add_argument("v", help="audio-view feature CSV")
    p.add_argument("w", help="video-view feature CSV")
    p.add_argument("labels", help="ground-truth label CSV")
    p.add_argument("--out", dest="out_dir", default="sweep_out", help="output directory")
    p.add_argument("--c-min", type=float, default=0.1)
    p.add_argument("--c-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--fusion", choices=vad.FUSION_MODES, default="alternating")
    p.add_argument("--c", type=float, default=2.0, help="video-view (and search) multiplier")
    p.add_argument("--eigen", choices=vad.EIGEN_METHODS, default="direct")
    p.add_argument("--grid", type=int, default=40)
    p.add_argument("--energy", help="per-frame energy CSV for sign orientation")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo connectivity model")
    p.add_argument("--n", type=int, required=True, help="node count")
    p.add_argument("--s-v", type=float, required=True, help="view-1 mean degree")
    p.add_argument("--s-w", type=float, required=True, help="view-2 mean degree")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional output directory for connectivity.json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("rerun", help="replay a run from its manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", help="redirect outputs to another directory")
    p.set_defaults(func=_cmd_rerun)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
