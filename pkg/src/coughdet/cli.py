"""Command-line interface: synth, detect, featurize, train, evaluate, report.

Every flag can also come from a JSON file given with ``--config``; keys
mirror the long flag names (``frame-len`` or ``frame_len``). Flags on the
command line override the file.
"""

import argparse
import json
import logging
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from ._io import atomic_write_json, atomic_write_text
from .balance import SMOTE
from .classifiers import CLASSIFIERS, ExternalScores, make_classifier, save_model
from .evaluation import (
    DESK_CLASSIFIER_GRID,
    DESK_FEATURE_GRID,
    FULL_CLASSIFIER_GRID,
    FULL_FEATURE_GRID,
    EventTable,
    FeatureStore,
    evaluate_external,
    expand,
    make_folds,
    nested_cv,
    report_csv,
    roc_csv,
    usable_events,
)
from .evaluation.report import THRESHOLD_NOTE
from .exceptions import CoughDetError, LoadError
from .segmentation import SegmenterConfig, detect_events
from .signals import read_accel_text, read_manifest, read_wav
from .synth import SynthConfig, generate_dataset

logger = logging.getLogger("coughdet")

EXIT_OK, EXIT_PIPELINE, EXIT_USAGE = 0, 1, 2

# flag dest -> (modality, feature parameter) / (classifier, hyperparameter)
FEATURE_FLAGS = {
    "accel_frame_len": ("accel", "frame_len"),
    "accel_segments": ("accel", "n_segments"),
    "audio_mfcc": ("audio", "n_mfcc"),
    "audio_frame_len": ("audio", "frame_len"),
    "audio_segments": ("audio", "n_segments"),
}
CLASSIFIER_FLAGS = {
    "lr_reg": ("lr", "reg_strength"),
    "lr_l1": ("lr", "l1_ratio"),
    "lr_l2": ("lr", "l2_ratio"),
    "svm_reg": ("svm", "reg_strength"),
    "svm_kernel_coef": ("svm", "kernel_coef"),
    "mlp_l2": ("mlp", "l2_penalty"),
    "mlp_hidden": ("mlp", "n_hidden"),
}


def versions():
    import scipy
    import sklearn

    return {"coughdet": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "scikit-learn": sklearn.__version__}


# --------------------------------------------------------------------------
# parser


def _add_grid_flags(p, with_classifiers=True):
    g = p.add_argument_group("grid (defaults: desk-scale truncation; --full-grid for the full tables)")
    g.add_argument("--full-grid", action="store_true", help="use the full feature/classifier grids")
    g.add_argument("--accel-frame-len", type=int, nargs="+", metavar="N")
    g.add_argument("--accel-segments", type=int, nargs="+", metavar="N")
    g.add_argument("--audio-mfcc", type=int, nargs="+", metavar="N")
    g.add_argument("--audio-frame-len", type=int, nargs="+", metavar="N")
    g.add_argument("--audio-segments", type=int, nargs="+", metavar="N")
    if with_classifiers:
        g.add_argument("--classifiers", nargs="+", choices=sorted(CLASSIFIERS))
        g.add_argument("--lr-reg", type=float, nargs="+", metavar="X")
        g.add_argument("--lr-l1", type=float, nargs="+", metavar="X")
        g.add_argument("--lr-l2", type=float, nargs="+", metavar="X")
        g.add_argument("--svm-reg", type=float, nargs="+", metavar="X")
        g.add_argument("--svm-kernel-coef", type=float, nargs="+", metavar="X")
        g.add_argument("--mlp-l2", type=float, nargs="+", metavar="X")
        g.add_argument("--mlp-hidden", type=int, nargs="+", metavar="N")


def build_parser():
    parser = argparse.ArgumentParser(prog="coughdet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", type=Path, help="JSON file of flag values")
        return p

    p = add("synth", "Generate a synthetic paired accelerometer/audio dataset.")
    p.add_argument("--patients", type=int, default=14)
    p.add_argument("--coughs", type=int, default=50, help="coughs per patient")
    p.add_argument("--noncoughs", type=int, default=200, help="non-coughs per patient")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path)

    p = add("detect", "Detect activity intervals in a continuous recording.")
    p.add_argument("--accel", type=Path, help="accelerometer magnitude text file")
    p.add_argument("--audio", type=Path, help="16-bit mono WAV file")
    p.add_argument("--out", type=Path, help="JSON-lines output (default: stdout)")
    p.add_argument("--window", type=float, default=SegmenterConfig.window_s)
    p.add_argument("--hop", type=float, default=SegmenterConfig.hop_s)
    p.add_argument("--factor", type=float, default=SegmenterConfig.threshold_factor)
    p.add_argument("--merge-gap", type=float, default=SegmenterConfig.merge_gap_s)
    p.add_argument("--min-event", type=float, default=SegmenterConfig.min_event_s)

    p = add("featurize", "Compute and cache feature matrices for every event.")
    p.add_argument("--manifest", type=Path)
    p.add_argument("--modality", choices=["accel", "audio", "both"], default="both")
    p.add_argument("--out", type=Path, help="feature cache directory")
    _add_grid_flags(p, with_classifiers=False)

    p = add("train", "Train one classifier on every event in a manifest.")
    p.add_argument("--manifest", type=Path)
    p.add_argument("--modality", choices=["accel", "audio"], default="audio")
    p.add_argument("--classifier", choices=sorted(CLASSIFIERS), default="lr")
    p.add_argument("--frame-len", type=int)
    p.add_argument("--segments", type=int)
    p.add_argument("--mfcc", type=int)
    p.add_argument("--params", type=json.loads, default={}, help='classifier hyperparameters as JSON')
    p.add_argument("--smote-k", type=int, default=5)
    p.add_argument("--no-smote", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="model JSON path")

    p = add("evaluate", "Nested leave-one-patient-out cross-validation.")
    p.add_argument("--manifest", type=Path)
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--modality", choices=["accel", "audio", "both"], default="both")
    _add_grid_flags(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smote-k", type=int, default=5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--cache-dir", type=Path)
    p.add_argument("--external-scores", type=Path, help="CSV of event_id,score to evaluate instead")

    p = add("report", "Re-emit the summary CSV from a saved report JSON.")
    p.add_argument("--report", type=Path)
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    p.add_argument("--roc-out", type=Path, help="also write mean-ROC CSV")
    return parser, sub.choices


def parse_args(argv):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        sp = subparsers[args.command]
        try:
            values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            sp.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(values, dict):
            sp.error("config file must hold a JSON object")
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in values.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                sp.error(f"unknown config key {key!r}")
            action = known[dest]
            if action.type is not None and value is not None:
                conv = action.type
                value = [conv(v) for v in value] if isinstance(value, list) else conv(value)
            defaults[dest] = value
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return parser, subparsers[args.command], args


def _require(sp, args, *names):
    for name in names:
        if getattr(args, name) is None:
            sp.error(f"--{name.replace('_', '-')} is required")


def resolve_grids(args, modalities):
    """Feature and classifier grids after applying flags to the chosen base grid."""
    base_f = FULL_FEATURE_GRID if args.full_grid else DESK_FEATURE_GRID
    feature = {m: {k: tuple(v) for k, v in base_f[m].items()} for m in modalities}
    for dest, (modality, name) in FEATURE_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None and modality in feature:
            feature[modality][name] = tuple(value)
    classifier = None
    if hasattr(args, "classifiers"):
        base_c = FULL_CLASSIFIER_GRID if args.full_grid else DESK_CLASSIFIER_GRID
        kinds = args.classifiers or list(base_c)
        classifier = {k: {n: tuple(v) for n, v in (base_c.get(k) or FULL_CLASSIFIER_GRID[k]).items()}
                      for k in kinds}
        for dest, (kind, name) in CLASSIFIER_FLAGS.items():
            value = getattr(args, dest)
            if value is not None and kind in classifier:
                classifier[kind][name] = tuple(value)
    truncated = (feature != {m: dict(FULL_FEATURE_GRID[m]) for m in modalities}
                 or (classifier is not None and classifier != {
                     k: dict(v) for k, v in FULL_CLASSIFIER_GRID.items()}))
    return feature, classifier, bool(truncated)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _resolved_config(args):
    return _jsonable({k: v for k, v in sorted(vars(args).items()) if k not in ("config", "verbose")})


def _write_run_log(out_dir, args, timings, extra=None):
    log = {"command": args.command, "config": _resolved_config(args), "versions": versions(),
           "timings_s": timings}
    if extra:
        log.update(_jsonable(extra))
    atomic_write_json(Path(out_dir) / "run_log.json", log)


# --------------------------------------------------------------------------
# subcommands


def cmd_synth(sp, args):
    _require(sp, args, "out")
    t0 = time.perf_counter()
    cfg = SynthConfig(n_patients=args.patients, coughs_per_patient=args.coughs,
                      noncoughs_per_patient=args.noncoughs, seed=args.seed)
    records = generate_dataset(cfg, args.out)
    _write_run_log(args.out, args, {"total": time.perf_counter() - t0}, {"synth_config": asdict(cfg)})
    print(f"wrote {len(records)} events to {args.out / 'manifest.jsonl'}")


def cmd_detect(sp, args):
    _require(sp, args, "accel", "audio")
    cfg = SegmenterConfig(window_s=args.window, hop_s=args.hop, threshold_factor=args.factor,
                          merge_gap_s=args.merge_gap, min_event_s=args.min_event)
    intervals = detect_events(read_accel_text(args.accel), read_wav(args.audio), cfg)
    text = "".join(json.dumps({"start_s": round(s, 6), "end_s": round(e, 6)}) + "\n" for s, e in intervals)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _load_table(path):
    return EventTable.from_manifest(read_manifest(path))


def _drop_short(table, feature_grids):
    keep = usable_events(table, {m: expand(g) for m, g in feature_grids.items()})
    if not keep.all():
        logger.warning("dropping %d event(s) shorter than the largest analysis frame",
                       int((~keep).sum()))
        table = table.subset(keep)
    return table


def _modalities(choice):
    return ["accel", "audio"] if choice == "both" else [choice]


def cmd_featurize(sp, args):
    _require(sp, args, "manifest", "out")
    t0 = time.perf_counter()
    mods = _modalities(args.modality)
    feature, _, _ = resolve_grids(args, mods)
    table = _drop_short(_load_table(args.manifest), feature)
    store = FeatureStore(table, cache_dir=args.out)
    n = 0
    for m in mods:
        for params in expand(feature[m]):
            store.matrix(m, params)
            store.release(m, params)
            n += 1
    _write_run_log(args.out, args, {"total": time.perf_counter() - t0})
    print(f"cached {n} feature configuration(s) for {len(table)} events in {args.out}")


def cmd_train(sp, args):
    _require(sp, args, "manifest", "out")
    t0 = time.perf_counter()
    features = {}
    if args.frame_len is not None:
        features["frame_len"] = args.frame_len
    if args.segments is not None:
        features["n_segments"] = args.segments
    if args.mfcc is not None:
        if args.modality != "audio":
            sp.error("--mfcc applies to the audio modality only")
        features["n_mfcc"] = args.mfcc
    table = _load_table(args.manifest)
    store = FeatureStore(table)
    X, y = store.matrix(args.modality, features), table.labels
    if not args.no_smote:
        X, y = SMOTE(k_neighbors=args.smote_k, random_state=args.seed).fit_resample(X, y)
    try:
        model = make_classifier(args.classifier, random_state=args.seed, **args.params)
    except TypeError as exc:
        sp.error(f"bad --params: {exc}")
    model.fit(X, y)
    meta = {"modality": args.modality, "feature_params": features, "seed": args.seed,
            "smote": not args.no_smote, "n_events": len(table)}
    save_model(model, args.out, extra=meta)
    _write_run_log(args.out.parent, args, {"total": time.perf_counter() - t0})
    print(f"saved {args.classifier} model to {args.out}")


def cmd_evaluate(sp, args):
    _require(sp, args, "manifest", "out")
    if args.threads < 1:
        sp.error("--threads must be at least 1")
    t0 = time.perf_counter()
    timings = {}
    mods = _modalities(args.modality)
    feature, classifier, truncated = resolve_grids(args, mods)
    table = _load_table(args.manifest)
    timings["load"] = time.perf_counter() - t0
    header = {"threshold": args.threshold, "threshold_note": THRESHOLD_NOTE, "seed": args.seed,
              "grid_truncated": truncated, "config": _resolved_config(args),
              "feature_grid": _jsonable(feature), "classifier_grid": _jsonable(classifier)}
    result = {"header": header, "modalities": {}}
    if args.external_scores is not None:
        scores = ExternalScores.from_csv(args.external_scores)
        rep = evaluate_external(table, scores, make_folds(table.patient_ids), args.threshold)
        d = rep.to_dict()
        d["systems"] = [{"id": f"EXTERNAL-{scores.name}", "modality": "external", "classifier": scores.name,
                         "feature_params": {}, "classifier_params": {}, "spec": rep.spec, "sens": rep.sens,
                         "acc": rep.acc, "auc": rep.mean_auc, "std_auc": rep.std_auc,
                         "fold_aucs": [f.auc for f in rep.folds], "mean_roc": d["mean_roc"]}]
        result["modalities"]["external"] = d
    else:
        table = _drop_short(table, feature)
        store = FeatureStore(table, cache_dir=args.cache_dir)
        for m in mods:
            t = time.perf_counter()
            rep, _ = nested_cv(table, store, m, feature[m], classifier, smote_k=args.smote_k,
                               seed=args.seed, threads=args.threads, threshold=args.threshold)
            result["modalities"][m] = rep.to_dict()
            timings[m] = time.perf_counter() - t
            logger.info("%s: mean AUC %.4f (sd %.4f)", m, rep.mean_auc, rep.std_auc)
    out = Path(args.out)
    atomic_write_json(out / "report.json", result)
    atomic_write_text(out / "report.csv", report_csv(result))
    atomic_write_text(out / "mean_roc.csv", roc_csv(result))
    timings["total"] = time.perf_counter() - t0
    _write_run_log(out, args, timings)
    sys.stdout.write(report_csv(result))


def cmd_report(sp, args):
    _require(sp, args, "report")
    try:
        result = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(args.report, "report file does not exist") from None
    except json.JSONDecodeError as exc:
        raise LoadError(args.report, f"invalid JSON ({exc})") from exc
    if not isinstance(result, dict) or "header" not in result or "modalities" not in result:
        raise LoadError(args.report, "not a report file")
    text = report_csv(result)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.roc_out:
        atomic_write_text(args.roc_out, roc_csv(result))


COMMANDS = {"synth": cmd_synth, "detect": cmd_detect, "featurize": cmd_featurize, "train": cmd_train,
            "evaluate": cmd_evaluate, "report": cmd_report}


def main(argv=None):
    try:
        parser, sp, args = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](sp, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (CoughDetError, OSError) as exc:
        print(f"coughdet: error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
