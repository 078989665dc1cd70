"""Command-line front end tying the pipeline together.

Subcommands: gen, corrupt, roi, train, eval, predict. Every command that
involves randomness takes --seed; all outputs are deterministic given it.
CINE_QC_THREADS caps worker parallelism for cross-validation (default: one
worker per CPU core).
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import augment, dataio, datasets, evalharness, preprocess
from .augment import AugmentPolicy, LabeledSample
from .cnn import (NetworkConfig, TrainConfig, desk_profile, full_profile,
                  load_checkpoint, predict, save_checkpoint, train)
from .errors import CineQCError, EmptyClass
from .kspace import RANDOM, CorruptionSpec, corrupt_sequence
from .serialize import canonical_json


def _thread_cap(default=None):
    value = os.environ.get("CINE_QC_THREADS")
    if value is None:
        return default if default is not None else (os.cpu_count() or 1)
    return max(1, int(value))


def _int_or_random(text):
    return RANDOM if text == "random" else int(text)


def _corruption_from_args(args):
    return CorruptionSpec(z=args.z, offset=args.offset, phase=args.phase, seed=args.seed)


def _add_corruption_flags(parser, default_offset="random", default_phase="0"):
    parser.add_argument("--z", type=int, default=3, help="replace 1 in z k-space lines")
    parser.add_argument("--offset", type=_int_or_random, default=_int_or_random(default_offset),
                        help='frame offset j: integer or "random"')
    parser.add_argument("--phase", type=_int_or_random, default=_int_or_random(default_phase),
                        help='line phase phi: integer or "random"')


def cmd_gen(args):
    base = datasets.default_phantom_for(H=args.size, W=args.size, T=args.frames, seed=args.seed)
    if args.noise_sigma is not None:
        from dataclasses import replace
        base = replace(base, noise_sigma=args.noise_sigma)
    samples = datasets.generate_labeled_dataset(
        args.n_clean, args.n_artefact, base_config=base,
        corruption=_corruption_from_args(args), seed=args.seed)
    dataio.write_dataset(args.out, samples)
    print(f"wrote {len(samples)} sequences ({args.n_clean} good, {args.n_artefact} artefact) "
          f"to {args.out}")


def cmd_corrupt(args):
    samples = dataio.read_dataset(args.input)
    spec = _corruption_from_args(args)
    rng = np.random.default_rng(args.seed)
    out = []
    for s in samples:
        per_seq = CorruptionSpec(z=spec.z, offset=spec.offset, phase=spec.phase,
                                 seed=int(rng.integers(0, 2**31 - 1)))
        out.append(LabeledSample(seq=corrupt_sequence(s.seq, per_seq),
                                 label=augment.ARTEFACT,
                                 origin=augment.SYNTHETIC_CORRUPTION))
    dataio.write_dataset(args.out, out)
    print(f"corrupted {len(out)} sequences -> {args.out}")


def cmd_roi(args):
    samples = dataio.read_dataset(args.input)
    out = []
    for i, s in enumerate(samples):
        seq = preprocess.normalize(s.seq)
        roi = preprocess.find_roi_center(seq, crop_size=args.crop_size)
        out.append(LabeledSample(seq=preprocess.crop_roi(seq, roi),
                                 label=s.label, origin=s.origin))
        print(f"sequence {i}: center=({roi.center[0]},{roi.center[1]}) "
              f"score={roi.vote_score:.2f}")
        if args.pgm_dir:
            from .numerics import temporal_dft_magnitude
            Path(args.pgm_dir).mkdir(parents=True, exist_ok=True)
            dataio.write_pgm(Path(args.pgm_dir) / f"seq{i:03d}_harmonic.pgm",
                             temporal_dft_magnitude(seq, 1))
            dataio.write_pgm(Path(args.pgm_dir) / f"seq{i:03d}_frame0.pgm", seq[0])
    dataio.write_dataset(args.out, out)
    print(f"wrote {len(out)} cropped sequences to {args.out}")


def _train_config_from(path, seed):
    if path is None:
        return TrainConfig(seed=seed)
    with open(path) as fh:
        raw = json.load(fh)
    raw.setdefault("seed", seed)
    return TrainConfig(**raw)


def _net_for(profile, dims, seed, dropout_p):
    if profile == "full":
        return full_profile(input_dims=dims, dropout_p=dropout_p, seed=seed)
    if profile == "desk":
        return desk_profile(input_dims=dims, dropout_p=dropout_p, seed=seed)
    raise CineQCError(f"unknown profile {profile!r}")


def cmd_train(args):
    samples = dataio.read_dataset(args.dataset)
    if not samples:
        raise EmptyClass("dataset is empty")
    tc = _train_config_from(args.train_config, args.seed)
    dims = samples[0].seq.shape
    net_config = _net_for(args.profile, dims, args.seed, tc.dropout_p)
    policy = AugmentPolicy(max_shift_frac=args.max_shift_frac,
                           balance=not args.no_balance,
                           corruption_spec=_corruption_from_args(args),
                           seed=args.seed)
    net, history = train(samples, net_config, tc, policy)
    save_checkpoint(args.out, net)
    print(f"saved model to {args.out} ({len(history)} epochs, "
          f"best val acc {max(h['val_accuracy'] for h in history):.3f})")
    if args.history:
        with open(args.history, "w") as fh:
            fh.write(canonical_json({"history": history}))
        print(f"wrote history to {args.history}")


def cmd_eval(args):
    samples = dataio.read_dataset(args.dataset)
    if args.method == "cnn":
        tc = _train_config_from(args.train_config, args.seed)
        dims = samples[0].seq.shape
        net_config = _net_for(args.profile, dims, args.seed, tc.dropout_p)
        policy = AugmentPolicy(max_shift_frac=args.max_shift_frac,
                               balance=not args.no_balance,
                               corruption_spec=_corruption_from_args(args),
                               seed=args.seed)
        factory = lambda: evalharness.make_pipeline("cnn", net_config, tc, policy)
    else:
        opts = {"seed": args.seed} if args.method in ("svm", "vol") else {}
        factory = lambda: evalharness.make_pipeline(args.method, **opts)
    report = evalharness.cross_validate(factory, samples, args.k, seed=args.seed,
                                        method=args.method, with_macro=args.macro,
                                        n_workers=_thread_cap(1 if args.method == "cnn" else None))
    print(report.to_text())
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
        print(f"wrote report to {args.report}")


def cmd_predict(args):
    net = load_checkpoint(args.model)
    samples = dataio.read_dataset(args.dataset)
    for i, s in enumerate(samples):
        prob, label, _elapsed = predict(net, s.seq)
        sys.stdout.write(f"{i}\t{prob:.6f}\t{augment.LABEL_NAMES[label]}\n")


def build_parser():
    parser = argparse.ArgumentParser(prog="cineqc",
                                     description="Cine MR motion-artefact simulation and detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled phantom dataset")
    p.add_argument("--n-clean", type=int, required=True)
    p.add_argument("--n-artefact", type=int, required=True)
    p.add_argument("--size", type=int, default=64, help="H = W in pixels")
    p.add_argument("--frames", type=int, default=16, help="frames per sequence")
    p.add_argument("--noise-sigma", type=float, default=None)
    _add_corruption_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("corrupt", help="k-space corrupt the sequences of a dataset")
    p.add_argument("input")
    _add_corruption_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("roi", help="normalize and crop to the motion ROI")
    p.add_argument("input")
    p.add_argument("--crop-size", type=int, default=preprocess.DEFAULT_CROP)
    p.add_argument("--pgm-dir", default=None, help="write PGM diagnostics here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_roi)

    p = sub.add_parser("train", help="train the CNN detector")
    p.add_argument("dataset")
    p.add_argument("--profile", choices=("full", "desk"), default="desk")
    p.add_argument("--train-config", default=None, help="JSON file of TrainConfig fields")
    p.add_argument("--max-shift-frac", type=float, default=0.2)
    p.add_argument("--no-balance", action="store_true")
    _add_corruption_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--history", default=None, help="write JSON training history here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="cross-validate a detector")
    p.add_argument("dataset")
    p.add_argument("--method", choices=evalharness.METHODS, default="cnn")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--profile", choices=("full", "desk"), default="desk")
    p.add_argument("--train-config", default=None)
    p.add_argument("--max-shift-frac", type=float, default=0.2)
    p.add_argument("--no-balance", action="store_true")
    _add_corruption_flags(p)
    p.add_argument("--macro", action="store_true", help="also report macro-averaged metrics")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="write the EvalReport JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="per-sequence artefact probabilities")
    p.add_argument("model")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CineQCError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
