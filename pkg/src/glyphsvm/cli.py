"""Command-line surface: datagen, preprocess, features, train, gridsearch,
evaluate, repeat-eval.

Every command exits 0 on success; failures print a single
`error: <Category>: <detail>` line on stderr and exit 1 (argparse usage
errors exit 2).
"""

from __future__ import annotations

import argparse
import os
import sys

from .data import load_dataset
from .errors import GlyphSvmError, IoFailureError
from .features import FeatureConfig, extract_features, write_features_csv
from .model_io import load_model, save_model
from .modelsel import (
    Dataset,
    cross_validate,
    evaluate,
    grid_search,
    repeat_evaluate,
)
from .multiclass import train_one_vs_all, train_one_vs_one
from .pgm import read_pgm, write_binary_pgm
from .preprocess import (
    deskew,
    detect_skew,
    median_filter,
    otsu_binarize,
    preprocess_page,
)
from .svm import KernelSpec
from .synth import SynthConfig, generate_synthetic_dataset


def _add_kernel_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", choices=("linear", "poly", "rbf", "sigmoid"),
                        default="rbf")
    parser.add_argument("--c", type=float, default=64.0, help="soft-margin C")
    parser.add_argument("--gamma", type=float, default=None, help="rbf gamma")
    parser.add_argument("--degree", type=int, default=3, help="poly degree")
    parser.add_argument("--slope", type=float, default=None, help="sigmoid slope")
    parser.add_argument("--offset", type=float, default=None, help="sigmoid offset")


def _kernel_from_args(parser: argparse.ArgumentParser, args) -> KernelSpec:
    if args.kernel == "linear":
        return KernelSpec(kind="linear")
    if args.kernel == "poly":
        return KernelSpec(kind="poly", degree=args.degree)
    if args.kernel == "rbf":
        gamma = 0.125 if args.gamma is None else args.gamma
        return KernelSpec(kind="rbf", gamma=gamma)
    if args.slope is None or args.offset is None:
        parser.error("--kernel sigmoid requires explicit --slope and --offset")
    return KernelSpec(kind="sigmoid", slope=args.slope, offset=args.offset)


def _add_data_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True,
                        help="image directory (<root>/<class>/*.pgm) or feature CSV")
    parser.add_argument("--grid-cell", type=int, choices=(16, 8, 4, 2), default=4,
                        help="zoning cell size in pixels")


def _load(args) -> Dataset:
    return load_dataset(args.data, config=FeatureConfig(cell_px=args.grid_cell))


def _write_text(path, text) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise IoFailureError(f"{path}: {exc}") from exc


def cmd_datagen(args) -> int:
    config = SynthConfig(
        classes=args.classes,
        per_class=args.per_class,
        rotation_deg=args.rotation,
        scale_min=args.scale_min,
        scale_max=args.scale_max,
        translation_px=args.translation,
        noise_rate=args.noise,
        seed=args.seed,
    )
    count = generate_synthetic_dataset(config, args.out_dir)
    print(f"wrote {count} samples across {config.classes} classes to {args.out_dir}")
    return 0


def cmd_preprocess(args) -> int:
    gray = read_pgm(args.input)
    if args.dump_binarized or args.dump_deskewed:
        filtered = median_filter(gray)
        threshold, binary = otsu_binarize(filtered)
        if args.dump_binarized:
            write_binary_pgm(binary, args.dump_binarized)
        angle = detect_skew(binary)
        page = deskew(binary, angle)
        if args.dump_deskewed:
            write_binary_pgm(page, args.dump_deskewed)
        print(f"otsu threshold {threshold}, skew {angle:+.1f} degrees")
    records = preprocess_page(gray)
    os.makedirs(args.out_dir, exist_ok=True)
    for idx, rec in enumerate(records):
        source = {"crop": rec.crop, "normalized": rec.normalized,
                  "skeleton": rec.skeleton}[args.emit]
        write_binary_pgm(source, os.path.join(args.out_dir, f"char_{idx:04d}.pgm"))
    print(f"segmented {len(records)} characters into {args.out_dir}")
    return 0


def cmd_features(args) -> int:
    config = FeatureConfig(cell_px=args.grid_cell)
    data = load_dataset(args.data, config=config)
    vectors = [row for row in data.vectors]
    write_features_csv(args.output, data.labels, vectors, config)
    print(f"wrote {len(data)} feature rows ({data.dimension} columns) to {args.output}")
    return 0


def cmd_train(parser, args) -> int:
    kernel = _kernel_from_args(parser, args)
    data = _load(args)
    trainer = train_one_vs_all if args.strategy == "ova" else train_one_vs_one
    model = trainer(data.vectors, data.labels, kernel, args.c)
    save_model(model, args.model)
    print(
        f"trained {args.strategy} model on {len(data)} samples, "
        f"{len(model.class_ids)} classes, kernel {kernel.describe()}, C={args.c:g}; "
        f"saved to {args.model}"
    )
    return 0


def _parse_grid(raw: str | None, cast):
    if raw is None:
        return None
    return [cast(tok) for tok in raw.split(",") if tok.strip()]


def cmd_gridsearch(parser, args) -> int:
    data = _load(args)
    param_grid = None
    if args.kernel == "rbf":
        param_grid = _parse_grid(args.gamma_grid, float)
    elif args.kernel == "poly":
        param_grid = _parse_grid(args.degree_grid, int)
    elif args.kernel == "sigmoid":
        parser.error("gridsearch does not support the sigmoid kernel")
    report = grid_search(
        data,
        args.kernel,
        c_grid=_parse_grid(args.c_grid, float),
        param_grid=param_grid,
        strategy=args.strategy,
        k=args.folds,
        seed=args.seed,
    )
    text = "\n".join(report.text_lines())
    if args.text_out:
        _write_text(args.text_out, text)
    if args.csv_out:
        _write_text(args.csv_out, "\n".join(report.csv_lines()))
    print(text.splitlines()[-1])
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    config = _config_for_model(model)
    data = load_dataset(args.data, config=config)
    report = evaluate(model, data)
    text = (
        report.iteration_table(args.label or "model")
        + "\n\n"
        + report.error_table()
    )
    if args.report:
        _write_text(args.report, text)
    print(text)
    return 0


def _config_for_model(model) -> FeatureConfig | None:
    locals_count = model.scaling.dimension - 4
    for cell in (16, 8, 4, 2):
        cfg = FeatureConfig(cell_px=cell)
        if cfg.local_count == locals_count:
            return cfg
    return None


def cmd_repeat_eval(parser, args) -> int:
    kernel = _kernel_from_args(parser, args)
    data = _load(args)
    report = repeat_evaluate(
        data,
        kernel,
        args.c,
        strategy=args.strategy,
        train_fraction=args.train_frac,
        repetitions=args.repeats,
        seed=args.seed,
        stratified=args.stratified,
    )
    label = f"{args.kernel} C={args.c:g}"
    text = report.iteration_table(label) + "\n\n" + report.error_table()
    if args.report:
        _write_text(args.report, text)
    print(text)
    return 0


def cmd_cv(parser, args) -> int:
    kernel = _kernel_from_args(parser, args)
    data = _load(args)
    mean = cross_validate(
        data, kernel, args.c, strategy=args.strategy, k=args.folds, seed=args.seed
    )
    print(f"{args.folds}-fold cross-validated accuracy: {mean:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glyphsvm",
        description="Handwritten character recognition with a from-scratch kernel SVM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("datagen", help="generate a synthetic glyph dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--rotation", type=float, default=10.0)
    p.add_argument("--scale-min", type=float, default=0.8)
    p.add_argument("--scale-max", type=float, default=1.2)
    p.add_argument("--translation", type=float, default=3.0)

    p = sub.add_parser("preprocess", help="segment a page image into character PGMs")
    p.add_argument("--input", required=True, help="page image (PGM P2/P5)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--emit", choices=("crop", "normalized", "skeleton"), default="crop")
    p.add_argument("--dump-binarized", default=None, help="debug dump path")
    p.add_argument("--dump-deskewed", default=None, help="debug dump path")

    p = sub.add_parser("features", help="extract features into a CSV")
    _add_data_args(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("train", help="train a multiclass model")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--strategy", choices=("ova", "ovo"), default="ova")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gridsearch", help="cross-validated hyperparameter sweep")
    _add_data_args(p)
    p.add_argument("--kernel", choices=("linear", "poly", "rbf", "sigmoid"), default="rbf")
    p.add_argument("--c-grid", default=None, help="comma-separated C values")
    p.add_argument("--gamma-grid", default=None, help="comma-separated gammas (rbf)")
    p.add_argument("--degree-grid", default=None, help="comma-separated degrees (poly)")
    p.add_argument("--strategy", choices=("ova", "ovo"), default="ova")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv-out", default=None)
    p.add_argument("--text-out", default=None)

    p = sub.add_parser("evaluate", help="score a saved model on a test set")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", default=None, help="write the report here too")
    p.add_argument("--label", default=None, help="row label in the report")

    p = sub.add_parser("repeat-eval", help="repeated split/train/test protocol")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--strategy", choices=("ova", "ovo"), default="ova")
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--report", default=None)

    p = sub.add_parser("cv", help="k-fold cross-validation of one configuration")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--strategy", choices=("ova", "ovo"), default="ova")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "datagen":
            return cmd_datagen(args)
        if args.command == "preprocess":
            return cmd_preprocess(args)
        if args.command == "features":
            return cmd_features(args)
        if args.command == "train":
            return cmd_train(parser, args)
        if args.command == "gridsearch":
            return cmd_gridsearch(parser, args)
        if args.command == "evaluate":
            return cmd_evaluate(args)
        if args.command == "repeat-eval":
            return cmd_repeat_eval(parser, args)
        if args.command == "cv":
            return cmd_cv(parser, args)
        parser.error(f"unknown command {args.command!r}")
    except GlyphSvmError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
