"""Command-line interface: ``cepvad {corpus,train,detect,eval,export,synth}``.

Exit codes: 0 success, 2 usage/configuration error, 3 data or format
error, 4 degenerate input (silent frames, empty SNR pools).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .config import load_config
from .corpus import build_labeled_corpus, load_corpus, save_corpus
from .detector import evaluate, evaluate_by_level
from .dsp import Label, frame_matrix
from .exceptions import CepvadError, DegenerateSplitError
from .model import ModelFile, detect_signal, score_corpus, train_model
from .synthetic import noise_frames, speech_like_frames
from .wavio import read_wav, write_wav

logger = logging.getLogger("cepvad")

LABEL_NAMES = {int(Label.SPEECH): "speech", int(Label.NONSPEECH): "nonspeech", int(Label.UNKNOWN): "unknown"}


def _fmt(x):
    return "" if x is None else repr(float(x))


def _snr_grid(text):
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of dB values: {text!r}") from None


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _config(args):
    cfg = load_config(args.config)
    overrides = {}
    if getattr(args, "snr_grid", None):
        overrides["snr_grid"] = args.snr_grid
    if getattr(args, "bins", None):
        overrides["bins"] = args.bins
    return cfg.replace(**overrides) if overrides else cfg


def cmd_corpus(args):
    cfg = _config(args)
    speech = read_wav(args.speech, cfg.sample_rate)
    sp_frames = frame_matrix(speech.samples, cfg.frame_len, cfg.hop)
    ns_frames = np.empty((0, cfg.frame_len))
    if args.nonspeech:
        nonspeech = read_wav(args.nonspeech, cfg.sample_rate)
        ns_frames = frame_matrix(nonspeech.samples, cfg.frame_len, cfg.hop)
    corpus = build_labeled_corpus(sp_frames, ns_frames, cfg, args.seed)
    save_corpus(corpus, args.out)
    print(f"corpus: {sp_frames.shape[0]} speech + {ns_frames.shape[0]} non-speech clean frames "
          f"x {len(cfg.snr_grid)} SNR levels = {len(corpus)} records, "
          f"{corpus.noise.shape[0]} noise frames -> {args.out}")


def cmd_train(args):
    cfg = _config(args)
    corpus = load_corpus(args.corpus)
    model = train_model(corpus, cfg, args.kind, args.t_snr, args.init, args.split)
    model.save(args.out)
    s = model.scorer
    print(f"kind={s.kind.value} t_snr={s.t_snr:g} dB")
    print(f"Se={s.se:.4f} Sp={s.sp:.4f} Se+Sp={s.se_plus_sp:.4f} t_v={s.t_v:.6g}")
    print("w=[" + ", ".join(f"{x:.4g}" for x in s.w) + "]")
    print(f"model -> {args.out}")


def cmd_detect(args):
    model = ModelFile.load(args.model)
    signal = read_wav(args.wav)
    reports = detect_signal(model, signal)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "v", "p_speech", "decision", "snr_mode_db", "status"])
        for r in reports:
            w.writerow([r.index, _fmt(r.v), _fmt(r.p_speech), "speech" if r.speech else "nonspeech",
                        _fmt(r.snr_mode_db), "degenerate" if r.degenerate else "ok"])
    n_speech = sum(r.speech for r in reports)
    logger.info("%d frames, %d speech, %d non-speech", len(reports), n_speech, len(reports) - n_speech)


def cmd_eval(args):
    model = ModelFile.load(args.model)
    corpus = load_corpus(args.corpus)
    scores, _ = score_corpus(model, corpus, args.split)
    speech_rate, nonspeech_rate = evaluate(model.detector, scores)
    by_level = evaluate_by_level(model.detector, scores)
    n_s = int((scores.is_speech & (scores.snr_db > model.detector.speech_pool_thr)).sum())
    n_n = int((scores.labels == Label.NONSPEECH).sum())
    print(f"{'level':>8} {'n_sp':>6} {'speech%':>8} {'n_ns':>6} {'nonsp%':>8}")
    print(f"{'all':>8} {n_s:>6} {speech_rate:>8.2f} {n_n:>6} {nonspeech_rate:>8.2f}")
    for level, ns, sr, nn, nr in by_level:
        print(f"{level:>8g} {ns:>6} {sr:>8.2f} {nn:>6} {nr:>8.2f}")
    if args.out:
        with _output(args.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "n_speech", "speech_rate", "n_nonspeech", "nonspeech_rate"])
            w.writerow(["all", n_s, _fmt(speech_rate), n_n, _fmt(nonspeech_rate)])
            for level, ns, sr, nn, nr in by_level:
                w.writerow([_fmt(level), ns, _fmt(sr), nn, _fmt(nr)])


def cmd_export(args):
    model = ModelFile.load(args.model)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.what == "scores":
            corpus = load_corpus(args.corpus)
            scores, idx = score_corpus(model, corpus, args.split)
            w.writerow(["frame", "snr_db", "label", "v"])
            for i, rec in zip(idx, scores):
                w.writerow([int(i), _fmt(rec.snr_db), LABEL_NAMES[int(rec.label)], _fmt(rec.v)])
        elif args.what == "pspeech":
            d = model.detector
            w.writerow(["v_bin_center", "h_s", "h_n", "p"])
            for c, hs, hn, p in zip(d.bin_centers, d.h_s, d.h_n, d.p_table):
                w.writerow([_fmt(c), _fmt(hs), _fmt(hn), _fmt(p)])
        else:
            post = model.snr_posterior
            if post is None:
                raise CepvadError("model has no SNR posterior")
            table = post.table
            w.writerow(["v_bin_center", "level_db", "probability"])
            for b, c in enumerate(post.bin_centers):
                for j, level in enumerate(post.snr_levels):
                    w.writerow([_fmt(c), _fmt(level), _fmt(table[j, b])])


def cmd_synth(args):
    cfg = _config(args)
    speech = speech_like_frames(args.frames, cfg.frame_len, cfg.sample_rate, args.seed).reshape(-1)
    noise = noise_frames(args.frames, cfg.frame_len, args.seed).reshape(-1)
    write_wav(args.speech, 0.5 * speech / np.abs(speech).max(), cfg.sample_rate)
    write_wav(args.nonspeech, 0.25 * noise / np.abs(noise).max(), cfg.sample_rate)
    print(f"wrote {args.frames} frames each -> {args.speech}, {args.nonspeech}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config (default: $CEPVAD_CONFIG or built-ins)")
    common.add_argument("--out", help="output path ('-' for stdout where allowed)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cepvad", description="Cepstral-variability speech detector")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("corpus", parents=[common], help="mix clean WAVs with white noise")
    s.add_argument("speech", help="clean speech WAV (PCM16 mono)")
    s.add_argument("nonspeech", nargs="?", help="non-speech WAV (PCM16 mono)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--snr-grid", type=_snr_grid)
    s.set_defaults(func=cmd_corpus, needs_out=True)

    s = sub.add_parser("train", parents=[common], help="optimize weights, fit detector")
    s.add_argument("corpus")
    s.add_argument("--kind", choices=["v1", "v2", "v2n"], default="v2n")
    s.add_argument("--t-snr", type=float, default=None, help="dB; default +5 (v1, v2) or -5 (v2n)")
    s.add_argument("--init", choices=["ones", "linear"], default="linear")
    s.add_argument("--bins", type=int)
    s.add_argument("--split", choices=["train", "test", "all"], default="train")
    s.add_argument("--seed", type=int, default=0, help="accepted for symmetry; training is seed-free")
    s.set_defaults(func=cmd_train, needs_out=True)

    s = sub.add_parser("detect", parents=[common], help="per-frame speech decisions for a WAV")
    s.add_argument("model")
    s.add_argument("wav")
    s.set_defaults(func=cmd_detect, needs_out=False)

    s = sub.add_parser("eval", parents=[common], help="detection/rejection rates on a corpus")
    s.add_argument("model")
    s.add_argument("corpus")
    s.add_argument("--split", choices=["train", "test", "all"], default="test")
    s.set_defaults(func=cmd_eval, needs_out=False)

    s = sub.add_parser("export", parents=[common], help="CSV data behind the score/probability plots")
    s.add_argument("model")
    s.add_argument("corpus", nargs="?")
    s.add_argument("--what", choices=["scores", "pspeech", "snrposterior"], required=True)
    s.add_argument("--split", choices=["train", "test", "all"], default="all")
    s.set_defaults(func=cmd_export, needs_out=False)

    s = sub.add_parser("synth", parents=[common], help="write synthetic speech-like and noise WAVs")
    s.add_argument("speech")
    s.add_argument("nonspeech")
    s.add_argument("--frames", type=int, default=200)
    s.add_argument("--seed", type=int, default=7)
    s.set_defaults(func=cmd_synth, needs_out=False)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.needs_out and not args.out:
        parser.error(f"{args.command} requires --out")
    if args.command == "export" and args.what == "scores" and args.corpus is None:
        parser.error("export --what scores requires a corpus")
    try:
        args.func(args)
    except DegenerateSplitError as exc:
        print(f"error: {exc} (pool counts: above={exc.n_high}, below={exc.n_low})", file=sys.stderr)
        return exc.exit_code
    except CepvadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
