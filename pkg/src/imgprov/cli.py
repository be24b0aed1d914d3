"""Command-line interface over manifests, TNSR tensors, and model dirs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure
(non-convergence or divergence).  Every successful invocation ends with a
one-line JSON summary on stdout.  All defaults reproduce the reference
configuration: JPEG quality 50, blur sigma 5 / kernel 5, noise std 0.3,
brightness 0.5, the 7x7 C/gamma grid, fusion tau 0.5, and the -0.035
distance threshold.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import decision, evalkit, features, imaging, linear, svm, tensorstore
from .errors import DataError, NumericError
from .parallel import parallel_map


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); remap to 1
        raise UsageError(message)


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=42,
                        help="base seed for every randomized step")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel width; results are identical for any value")


def _grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("grid must be nonempty")
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="imgprov", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("extract", help="build 5-channel feature stacks from a manifest",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--manifest", required=True)
    p.add_argument("--images-root", default=None,
                   help="base dir for manifest paths (default: manifest dir)")
    p.add_argument("--recon", default=None,
                   help="TNSR [n,512,512,3] reconstructions in manifest order; "
                        "without it the error channel is zero")
    p.add_argument("--out", required=True, help="output TNSR of stacks or pooled vectors")
    p.add_argument("--pool", type=int, default=0,
                   help="average-pool side; 0 writes full [n,512,512,5] stacks")
    p.add_argument("--labels-out", default=None, help="also write vocabulary ids (u8)")
    p.add_argument("--recon-scores", default=None,
                   help="also write mean raw reconstruction error per image (needs --recon)")
    p.add_argument("--split", default="all", choices=("all",) + tensorstore.SPLITS)
    p.add_argument("--augment", default=None, metavar="KINDS",
                   help="comma-separated perturbations (jpeg,blur,noise,brightness) "
                        "appended as extra training rows per record; 'all' selects "
                        "all four")
    p.add_argument("--jpeg-quality", type=int, default=50,
                   help="augmentation JPEG quality")
    p.add_argument("--blur-sigma", type=float, default=5.0,
                   help="augmentation blur sigma")
    p.add_argument("--blur-kernel", type=int, default=5,
                   help="augmentation blur kernel size")
    p.add_argument("--noise-std", type=float, default=0.3,
                   help="augmentation noise standard deviation on the [0,1] scale")
    p.add_argument("--brightness-factor", type=float, default=0.5,
                   help="augmentation brightness factor")
    _common_flags(p)

    p = sub.add_parser("train-svm", help="train a calibrated one-vs-rest RBF SVM",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--embeddings", required=True, help="TNSR [n,d] f32")
    p.add_argument("--labels", required=True, help="TNSR [n] u8 vocabulary ids")
    p.add_argument("--task", required=True, choices=("a", "b"))
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=svm.DEFAULT_TOL)
    p.add_argument("--max-passes", type=int, default=svm.DEFAULT_MAX_PASSES)
    p.add_argument("--out", required=True, help="model directory")
    _common_flags(p)

    p = sub.add_parser("grid-search", help="stratified k-fold search over C and gamma",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--task", required=True, choices=("a", "b"))
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--c-grid", type=_grid, default=svm.DEFAULT_GRID,
                   help="comma-separated C values")
    p.add_argument("--gamma-grid", type=_grid, default=svm.DEFAULT_GRID,
                   help="comma-separated gamma values")
    p.add_argument("--tol", type=float, default=svm.DEFAULT_TOL)
    p.add_argument("--max-passes", type=int, default=svm.DEFAULT_MAX_PASSES)
    p.add_argument("--out", default=None, help="optional CSV for the CV table")
    _common_flags(p)

    p = sub.add_parser("train-linear", help="train the softmax probe on pooled features",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--features", required=True, help="TNSR [n,feature_dim] f32")
    p.add_argument("--labels", required=True, help="TNSR [n] u8 vocabulary ids")
    p.add_argument("--task", required=True, choices=("a", "b"))
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--out", required=True, help="model directory")
    _common_flags(p)

    p = sub.add_parser("predict", help="predict class ids with a saved model",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--input", required=True, help="TNSR [n,d] embeddings or features")
    p.add_argument("--out", required=True, help="TNSR u8 class ids")
    p.add_argument("--probs-out", default=None,
                   help="optional TNSR [n,k] per-class probabilities (SVM only)")
    _common_flags(p)

    p = sub.add_parser("fuse", help="one-class fusion of five generator probabilities",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--probs", required=True, help="TNSR [n,5] probabilities")
    p.add_argument("--tau", type=float, default=0.5, help="strict acceptance threshold")
    p.add_argument("--out", required=True, help="TNSR u8 class ids (0=real, 1..5)")
    _common_flags(p)

    p = sub.add_parser("threshold", help="fit or apply a score threshold detector")
    tsub = p.add_subparsers(dest="threshold_command", metavar="fit|classify")
    pf = tsub.add_parser("fit", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    pf.add_argument("--real", required=True, help="TNSR scores of real images")
    pf.add_argument("--fake", required=True, help="TNSR scores of generated images")
    pf.add_argument("--threshold", type=float, default=None,
                    help="fixed threshold bypassing the scan (reference: -0.035)")
    pf.add_argument("--out", required=True, help="detector JSON")
    _common_flags(pf)
    pc = tsub.add_parser("classify", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    pc.add_argument("--scores", required=True, help="TNSR [n] scores")
    pc.add_argument("--detector", default=None, help="detector JSON from 'threshold fit'")
    pc.add_argument("--threshold", type=float, default=-0.035,
                    help="explicit threshold, used when no --detector is given")
    pc.add_argument("--direction", choices=("below", "above"), default="below",
                    help="below: fake if score <= threshold; above: fake if score >= it")
    pc.add_argument("--out", required=True, help="TNSR u8 (0=real, 1=fake)")
    _common_flags(pc)

    p = sub.add_parser("eval", help="confusion matrix, accuracy, macro-F1",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--truth", required=True, help="TNSR u8 class ids")
    p.add_argument("--pred", required=True, help="TNSR u8 class ids")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--task", choices=("a", "b"), default=None,
                   help="treat --truth as vocabulary ids and encode them for this task")
    p.add_argument("--out", required=True, help=".json report or .csv (with JSON twin)")
    _common_flags(p)

    p = sub.add_parser("sweep", help="robustness sweep of a model over one perturbation",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--manifest", required=True)
    p.add_argument("--images-root", default=None)
    p.add_argument("--model", required=True, help="model directory (svm_ovr or linear)")
    p.add_argument("--kind", required=True, choices=imaging.PERTURBATION_KINDS)
    p.add_argument("--levels", type=_grid, default=None,
                   help="comma-separated levels; defaults: noise 0,0.1,0.2; "
                        "jpeg 100,80,60; brightness 1,0.75,0.5; blur 0,2,4")
    p.add_argument("--kernel", type=int, default=5, help="blur kernel size")
    p.add_argument("--pool", type=int, default=32, help="pooling side for feature vectors")
    p.add_argument("--recon", default=None, help="TNSR [n,512,512,3] reconstructions")
    p.add_argument("--out", required=True, help="sweep CSV (JSON twin alongside)")
    _common_flags(p)

    return parser


def _load_labels(path, task: str) -> tuple[np.ndarray, tensorstore.LabelSpace]:
    vocab_ids = tensorstore.read_tensor(path)
    if vocab_ids.ndim != 1:
        raise DataError(f"labels file {path} must be a vector")
    vocab_ids = vocab_ids.astype(np.int64)
    if vocab_ids.min(initial=0) < 0 or vocab_ids.max(initial=0) >= len(tensorstore.LABELS):
        raise DataError(f"labels file {path} holds ids outside the vocabulary")
    ls = tensorstore.LabelSpace(task=task.upper())
    if ls.task == "A":
        encoded = (vocab_ids != 0).astype(np.int64)
    else:
        encoded = vocab_ids
    return encoded, ls


def _load_matrix(path, name: str) -> np.ndarray:
    arr = tensorstore.read_tensor(path)
    if arr.ndim != 2:
        raise DataError(f"{name} file {path} must be 2-d, got shape {arr.shape}")
    return arr.astype(np.float64)


def _resolve_images(manifest, root) -> list[Path]:
    base = Path(root) if root else None
    out = []
    for rec in manifest.records:
        p = Path(rec.path)
        if not p.is_absolute() and base is not None:
            p = base / p
        out.append(p)
    return out


def _load_model(directory):
    with open(Path(directory) / "model.json", "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    kind = doc.get("type")
    if kind == "svm_ovr":
        return svm.load_ovr(directory)
    if kind == "linear":
        return linear.load_linear(directory)
    raise DataError(f"unknown model type {kind!r} in {directory}")


def _model_predict(model, x: np.ndarray) -> np.ndarray:
    if isinstance(model, svm.SvmOvrModel):
        return model.predict(x)
    return np.atleast_1d(linear.predict_linear(model, x))


def _stack_batch(args, manifest, recon_path, jobs):
    paths = _resolve_images(manifest, args.images_root or Path(args.manifest).parent)
    recons = None
    if recon_path:
        recons = tensorstore.read_tensor(recon_path)
        if recons.ndim != 4 or recons.shape[0] != len(manifest):
            raise DataError(
                f"reconstructions {recon_path} must be [n,512,512,3] with "
                f"n = {len(manifest)} manifest records, got {recons.shape}"
            )
    images = parallel_map(imaging.load_image, paths, jobs=jobs)
    return images, recons


def _augment_specs(args) -> list[imaging.PerturbationSpec]:
    if not args.augment:
        return []
    kinds = [k.strip() for k in args.augment.split(",") if k.strip()]
    if kinds == ["all"]:
        kinds = list(imaging.PERTURBATION_KINDS)
    specs = []
    for kind in kinds:
        if kind == "jpeg":
            specs.append(imaging.PerturbationSpec(kind="jpeg", quality=args.jpeg_quality))
        elif kind == "blur":
            specs.append(imaging.PerturbationSpec(
                kind="blur", sigma=args.blur_sigma, kernel=args.blur_kernel))
        elif kind == "noise":
            specs.append(imaging.PerturbationSpec(kind="noise", std=args.noise_std))
        elif kind == "brightness":
            specs.append(imaging.PerturbationSpec(
                kind="brightness", factor=args.brightness_factor))
        else:
            raise DataError(f"unknown augmentation kind {kind!r}")
    return specs


def cmd_extract(args) -> dict:
    manifest = tensorstore.read_manifest(args.manifest)
    if args.split != "all":
        manifest = manifest.subset(args.split)
    if len(manifest) == 0:
        raise DataError("no manifest records selected")
    if args.recon_scores and not args.recon:
        raise DataError("--recon-scores requires --recon")
    aug_specs = _augment_specs(args)
    images, recons = _stack_batch(args, manifest, args.recon, args.jobs)

    def one(idx_img):
        # each record yields its clean row plus one row per augmentation;
        # the reconstruction channel always uses the record's reconstruction
        idx, img = idx_img
        recon = recons[idx].astype(np.float32) if recons is not None else None
        variants = [img]
        for spec in aug_specs:
            if spec.kind == "noise":
                spec = imaging.PerturbationSpec(
                    kind="noise", std=spec.std, seed=args.seed + idx)
            variants.append(imaging.apply_perturbation(img, spec))
        stacks = [features.build_stack(v, recon) for v in variants]
        if args.pool:
            return [features.pool_features(s, args.pool) for s in stacks]
        return stacks

    rows = parallel_map(one, enumerate(images), jobs=args.jobs)
    out = np.stack([r for group in rows for r in group]).astype(np.float32)
    tensorstore.write_tensor(out, args.out)
    copies = 1 + len(aug_specs)
    summary = {"command": "extract", "records": len(manifest),
               "rows": int(out.shape[0]), "augment": [s.kind for s in aug_specs],
               "shape": list(out.shape), "out": args.out}
    if args.labels_out:
        ids = np.repeat(manifest.label_ids(), copies)
        tensorstore.write_tensor(ids.astype(np.uint8), args.labels_out)
        summary["labels_out"] = args.labels_out
    if args.recon_scores:
        scores = np.array(
            [features.reconstruction_l1_score(img, recons[i].astype(np.float32))
             for i, img in enumerate(images)],
            dtype=np.float32,
        )
        tensorstore.write_tensor(scores, args.recon_scores)
        summary["recon_scores"] = args.recon_scores
    return summary


def cmd_train_svm(args) -> dict:
    x = _load_matrix(args.embeddings, "embeddings")
    labels, ls = _load_labels(args.labels, args.task)
    if len(labels) != len(x):
        raise DataError(f"{len(x)} embeddings vs {len(labels)} labels")
    model = svm.ovr_train(x, labels, ls, c=args.c, gamma=args.gamma,
                          tol=args.tol, max_passes=args.max_passes, jobs=args.jobs)
    svm.save_ovr(model, args.out)
    summary = {"command": "train-svm", "task": ls.task, "c": args.c,
               "gamma": args.gamma, "converged": model.converged,
               "support_vectors": [len(m.dual_coeffs) for m in model.binaries],
               "out": args.out}
    if not model.converged:
        print("warning: SMO hit the pass limit before satisfying KKT; "
              "model is best-so-far", file=sys.stderr)
        print(json.dumps(summary))
        raise NumericError("training did not converge")
    return summary


def cmd_grid_search(args) -> dict:
    x = _load_matrix(args.embeddings, "embeddings")
    labels, ls = _load_labels(args.labels, args.task)
    if len(labels) != len(x):
        raise DataError(f"{len(x)} embeddings vs {len(labels)} labels")
    best_c, best_gamma, table = svm.grid_search(
        x, labels, ls, c_grid=args.c_grid, gamma_grid=args.gamma_grid,
        k=args.folds, seed=args.seed, tol=args.tol,
        max_passes=args.max_passes, jobs=args.jobs,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("c,gamma,mean_macro_f1\n")
            for row in table:
                fh.write(f"{row['c']:g},{row['gamma']:g},{row['mean_macro_f1']:.6f}\n")
    return {"command": "grid-search", "task": ls.task, "best_c": best_c,
            "best_gamma": best_gamma,
            "best_score": max(r["mean_macro_f1"] for r in table),
            "cells": len(table), "out": args.out}


def cmd_train_linear(args) -> dict:
    x = _load_matrix(args.features, "features")
    labels, ls = _load_labels(args.labels, args.task)
    if len(labels) != len(x):
        raise DataError(f"{len(x)} feature rows vs {len(labels)} labels")
    config = linear.TrainConfig(learning_rate=args.lr, epochs=args.epochs, l2=args.l2)
    model = linear.train_linear(x, labels, ls, config)
    linear.save_linear(model, args.out, config)
    final_loss = linear.ce_loss(model, x, labels, config.l2)
    return {"command": "train-linear", "task": ls.task, "epochs": args.epochs,
            "final_loss": final_loss, "out": args.out}


def cmd_predict(args) -> dict:
    model = _load_model(args.model)
    x = _load_matrix(args.input, "input")
    pred = _model_predict(model, x)
    tensorstore.write_predictions(pred, args.out)
    summary = {"command": "predict", "records": len(pred), "out": args.out}
    if args.probs_out:
        if not isinstance(model, svm.SvmOvrModel):
            raise DataError("--probs-out is only available for svm_ovr models")
        tensorstore.write_tensor(model.probabilities(x).astype(np.float32), args.probs_out)
        summary["probs_out"] = args.probs_out
    return summary


def cmd_fuse(args) -> dict:
    probs = _load_matrix(args.probs, "probabilities")
    if probs.shape[1] != decision.NUM_GENERATORS:
        raise DataError(f"fusion needs [n,5] probabilities, got {probs.shape}")
    ids = np.array([decision.fuse_occ(row, tau=args.tau) for row in probs], dtype=np.uint8)
    tensorstore.write_predictions(ids, args.out)
    return {"command": "fuse", "tau": args.tau, "records": len(ids),
            "real_fraction": float(np.mean(ids == 0)), "out": args.out}


def _load_scores(path) -> np.ndarray:
    arr = tensorstore.read_tensor(path)
    if arr.ndim != 1:
        raise DataError(f"scores file {path} must be a vector, got shape {arr.shape}")
    return arr.astype(np.float64)


def cmd_threshold(args) -> dict:
    if args.threshold_command == "fit":
        real = _load_scores(args.real)
        fake = _load_scores(args.fake)
        detector = decision.fit_threshold(real, fake, fixed_threshold=args.threshold)
        merged = np.concatenate([real, fake])
        bandwidth = None
        if len(merged) >= 2 and not np.all(merged == merged[0]):
            bandwidth = decision.kde_fit(merged).bandwidth
        decision.save_detector(detector, args.out, bandwidth=bandwidth)
        errs = decision._errors_at(detector.threshold, detector.direction, real, fake)
        return {"command": "threshold-fit", "threshold": detector.threshold,
                "direction": detector.direction, "errors": errs,
                "n": len(merged), "out": args.out}
    if args.threshold_command == "classify":
        scores = _load_scores(args.scores)
        if args.detector:
            detector = decision.load_detector(args.detector)
        else:
            detector = decision.ThresholdDetector(
                threshold=args.threshold,
                direction=decision.FAKE_IF_BELOW if args.direction == "below"
                else decision.FAKE_IF_ABOVE,
            )
        ids = np.array(
            [0 if decision.threshold_classify(detector, s) == "real" else 1
             for s in scores],
            dtype=np.uint8,
        )
        tensorstore.write_predictions(ids, args.out)
        return {"command": "threshold-classify", "threshold": detector.threshold,
                "direction": detector.direction,
                "fake_fraction": float(np.mean(ids == 1)), "out": args.out}
    raise UsageError("threshold requires a fit or classify subcommand")


def cmd_eval(args) -> dict:
    if args.task:
        truth, _ = _load_labels(args.truth, args.task)
    else:
        truth = tensorstore.read_predictions(args.truth)
    pred = tensorstore.read_predictions(args.pred)
    report = evalkit.MetricsReport.from_predictions(truth, pred, args.classes)
    if str(args.out).endswith(".csv"):
        evalkit.emit_report(report, args.out)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return {"command": "eval", "accuracy": report.accuracy,
            "macro_f1": report.macro_f1, "n": int(report.confusion.sum()),
            "out": args.out}


def cmd_sweep(args) -> dict:
    manifest = tensorstore.read_manifest(args.manifest)
    if len(manifest) == 0:
        raise DataError("empty manifest")
    model = _load_model(args.model)
    ls = model.label_space
    truth = np.array([ls.class_id(r.label) for r in manifest.records], dtype=np.int64)
    images, recons = _stack_batch(args, manifest, args.recon, args.jobs)

    def predict_fn(imgs):
        rows = [
            features.pool_features(
                features.build_stack(
                    img, recons[i].astype(np.float32) if recons is not None else None
                ),
                args.pool,
            )
            for i, img in enumerate(imgs)
        ]
        return _model_predict(model, np.stack(rows).astype(np.float64))

    grid = evalkit.robustness_sweep(
        images, truth, predict_fn, kind=args.kind, levels=args.levels,
        base_seed=args.seed, num_classes=ls.num_classes,
        kernel=args.kernel, jobs=args.jobs,
    )
    evalkit.emit_report(grid, args.out)
    return {"command": "sweep", "kind": args.kind, "levels": grid.levels,
            "accuracy": [r.accuracy for r in grid.reports], "out": args.out}


_HANDLERS = {
    "extract": cmd_extract,
    "train-svm": cmd_train_svm,
    "grid-search": cmd_grid_search,
    "train-linear": cmd_train_linear,
    "predict": cmd_predict,
    "fuse": cmd_fuse,
    "threshold": cmd_threshold,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        summary = _HANDLERS[args.command](args)
        print(json.dumps(summary))
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
