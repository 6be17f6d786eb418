"""
``segkit`` command line.

Every command returns a process exit code: 0 on success, the ``exit_code`` of the raised
:class:`~segkit.exceptions.SegkitError` otherwise (2 usage, 3 data, 4 failed verification).
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional

import orjson as json

from segkit import __version__
from segkit.cli.suites import GRADIENT_CASES, SHAPE_SUITE_SIZE, run_gradient_suite, run_shape_suite
from segkit.data.schemas import DEFAULT_PATCH_SIZE, DEFAULT_PATCH_STRIDE, Sample
from segkit.data.synthetic import generate_synthetic_dataset
from segkit.ensembles.ensemble import evaluate_ensemble
from segkit.ensembles.members import DirectoryScoreProvider
from segkit.ensembles.presets import resolve_ensemble
from segkit.ensembles.schemas import EnsembleSpec
from segkit.exceptions import InvalidConfig, SegkitError, VerificationFailed
from segkit.exceptions.handlers import base_exception_handler
from segkit.formats.config import read_model, write_model
from segkit.formats.manifest import load_samples, write_dataset
from segkit.formats.pgm import write_pgm
from segkit.formats.tsr import read_tsr, write_tsr
from segkit.metrics.iou import per_image_iou
from segkit.metrics.reports import read_per_image_csv, write_metrics_csv, write_per_image_csv
from segkit.metrics.schemas import SIGNIFICANCE_LEVEL, EvaluationReport, LabellingCriterion
from segkit.metrics.wilcoxon import compare_runs
from segkit.storages import score_providers_storage, topologies_storage
from segkit.topology.builder import resolve_topology
from segkit.topology.schemas import TopologySpec
from segkit.training.pipeline import LoadedRun, evaluate_run, load_run, predict_image, retune_thresholds, train_run
from segkit.training.schemas import RunConfig, TrainConfig
from segkit.utils.seeding import resolve_seed

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
METRICS_FILE = "metrics.csv"
PER_IMAGE_FILE = "per_image.csv"


def _emit(payload: Any):
    sys.stdout.write(json.dumps(payload, option=json.OPT_INDENT_2 | json.OPT_SERIALIZE_NUMPY).decode())
    sys.stdout.write("\n")


def _summary(report: EvaluationReport) -> dict[str, Any]:
    return {
        "labelling": report.labelling.value,
        "per_class": report.per_class,
        "mean_without_background": report.mean_without_background,
        "mean_with_background": report.mean_with_background,
    }


def _write_report(report: EvaluationReport, out: Path, per_image: Optional[Path]):
    write_metrics_csv(report, out)
    if per_image is not None:
        write_per_image_csv(per_image_iou(report), per_image)


def _train_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if args.learning_rate is not None:
        overrides["learning_rate"] = args.learning_rate
    if args.no_augmentation:
        overrides["augmentation"] = False
    if args.patch_size is not None or args.patch_stride is not None:
        overrides["patch"] = {
            "size": args.patch_size or DEFAULT_PATCH_SIZE,
            "stride": args.patch_stride or DEFAULT_PATCH_STRIDE,
        }
    return overrides


def _topology(args: argparse.Namespace, num_classes: int) -> TopologySpec:
    overrides: dict[str, Any] = {"num_classes": num_classes}
    if args.m is not None:
        overrides["m"] = args.m

    if args.topology_file is not None:
        return resolve_topology(read_model(args.topology_file, TopologySpec), **overrides)

    if args.topology is None:
        msg = "Pass --topology or --topology-file."
        raise InvalidConfig(detail=msg, parameter="topology")

    return resolve_topology(args.topology, **overrides)


def _train_config(args: argparse.Namespace, spec: TopologySpec) -> TrainConfig:
    overrides = _train_overrides(args)
    if args.config is not None:
        config = read_model(args.config, TrainConfig)
        config = TrainConfig.model_validate({**config.model_dump(), **overrides})
    elif topologies_storage.has_topology(spec.id):
        config = TrainConfig.for_topology(spec.id, **overrides)
    else:
        config = TrainConfig.model_validate(overrides)

    return config.model_copy(update={"seed": resolve_seed(args.seed, config.seed)})


def _run_samples(manifest: Optional[Path], run: LoadedRun) -> list[Sample]:
    """Samples of ``manifest``, falling back to the manifest the run was trained on."""
    if manifest is None and run.config.manifest is None:
        msg = f"Run {str(run.run_dir)!r} records no manifest; pass --manifest."
        raise InvalidConfig(detail=msg, parameter="manifest")

    return load_samples(manifest or Path(run.config.manifest))[1]


def synth_data(args: argparse.Namespace) -> int:
    samples = generate_synthetic_dataset(
        args.num_images,
        args.height,
        args.width,
        args.num_classes,
        seed=resolve_seed(args.seed),
        num_patients=args.num_patients,
    )
    manifest = write_dataset(samples, args.num_classes, args.out / "manifest.json")
    _emit({"manifest": str(args.out / "manifest.json"), "images": len(manifest.records)})
    return 0


def train(args: argparse.Namespace) -> int:
    manifest, samples = load_samples(args.manifest)
    spec = _topology(args, manifest.num_classes)
    config = RunConfig(topology=spec, train=_train_config(args, spec), manifest=str(args.manifest))
    results = train_run(samples, config, args.out)
    _emit(
        {
            "run": str(args.out),
            "topology": spec.id,
            "seed": config.train.seed,
            "folds": [
                {"best_epoch": result.best_epoch, "best_validation_accuracy": result.best_validation_accuracy}
                for result in results
            ],
        },
    )
    return 0


def tune_thresholds(args: argparse.Namespace) -> int:
    run = load_run(args.run)
    samples = _run_samples(args.manifest, run)
    tuned = retune_thresholds(run, samples)
    _emit({"run": str(args.run), "thresholds": [thresholds.values for thresholds in tuned]})
    return 0


def predict(args: argparse.Namespace) -> int:
    run = load_run(args.run)
    if args.topology is not None and args.topology != run.config.topology.id:
        msg = f"Run {str(args.run)!r} holds topology {run.config.topology.id!r}, not {args.topology!r}."
        raise InvalidConfig(detail=msg, parameter="topology")

    labels, scores = predict_image(run, read_tsr(args.image), LabellingCriterion(args.label))
    write_pgm(labels, args.out)
    if args.scores_out is not None:
        write_tsr(scores, args.scores_out)
    _emit({"labels": str(args.out), "classes_present": sorted(int(value) for value in set(labels.ravel()))})
    return 0


def evaluate(args: argparse.Namespace) -> int:
    run = load_run(args.run)
    samples = _run_samples(args.manifest, run)
    report = evaluate_run(run, samples, LabellingCriterion(args.label))
    _write_report(report, args.out, args.per_image)
    _emit(_summary(report))
    return 0


def _register_providers(items: Sequence[str]):
    for item in items:
        member_id, separator, directory = item.partition("=")
        if not separator or not member_id or not directory:
            msg = f"Expected --provider ID=DIR, got {item!r}."
            raise InvalidConfig(detail=msg, parameter="provider")
        score_providers_storage.add_provider(member_id, DirectoryScoreProvider(Path(directory)))


def ensemble(args: argparse.Namespace) -> int:
    if args.spec_file is not None:
        spec = read_model(args.spec_file, EnsembleSpec)
    elif args.spec is not None:
        spec = resolve_ensemble(args.spec, args.mode)
    else:
        msg = "Pass --spec or --spec-file."
        raise InvalidConfig(detail=msg, parameter="spec")

    _register_providers(args.provider)
    runs = [load_run(path) for path in args.runs]
    samples = _run_samples(args.manifest, runs[0])
    report = evaluate_ensemble(
        spec,
        runs,
        samples,
        LabellingCriterion(args.label),
        seed=resolve_seed(args.seed, runs[0].config.train.seed),
        out_dir=args.out,
    )
    _write_report(report, args.out / METRICS_FILE, args.out / PER_IMAGE_FILE)
    write_model(report, args.out / "report.json")
    _emit({"ensemble": spec.id, "mode": spec.mode_name, **_summary(report)})
    return 0


def gradcheck(args: argparse.Namespace) -> int:
    report = run_gradient_suite(args.case, seed=resolve_seed(args.seed))
    _emit(
        {
            "passed": report.passed,
            "cases": {
                name: {"passed": case.passed, "max_rel_error": case.max_rel_error}
                for name, case in report.cases.items()
            },
        },
    )
    if not report.passed:
        raise VerificationFailed(detail=f"Gradient check failed for {', '.join(report.failures)}.")
    return 0


def shapes(args: argparse.Namespace) -> int:
    if not args.all and not args.topology:
        msg = "Pass --all or at least one --topology."
        raise InvalidConfig(detail=msg, parameter="topology")

    report = run_shape_suite(() if args.all else args.topology, size=args.size, seed=resolve_seed(args.seed))
    _emit(
        {
            "passed": report.passed,
            "topologies": {
                item.topology_id: {
                    "passed": item.passed,
                    "parameters": item.parameter_count,
                    "max_score_sum_error": item.max_score_sum_error,
                }
                for item in report.reports
            },
        },
    )
    if not report.passed:
        raise VerificationFailed(detail=f"Shape check failed for {', '.join(report.failures)}.")
    return 0


def compare(args: argparse.Namespace) -> int:
    result = compare_runs(read_per_image_csv(args.first), read_per_image_csv(args.second), alpha=args.alpha)
    _emit({**result.model_dump(), "significant": result.significant})
    return 0


def _add_train_options(parser: argparse.ArgumentParser):
    parser.add_argument("--topology", help="named topology id (U1, UD, UMD, ...)")
    parser.add_argument("--topology-file", type=Path, help="JSON topology spec")
    parser.add_argument("--config", type=Path, help="JSON training config")
    parser.add_argument("--m", type=int, help="filters of the first level")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--patch-size", type=int)
    parser.add_argument("--patch-stride", type=int)
    parser.add_argument("--no-augmentation", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segkit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="warning", choices=["debug", "info", "warning", "error"])
    parser.add_argument("--seed", type=int, help="overrides configured seeds; SEGKIT_SEED overrides this")
    commands = parser.add_subparsers(dest="command", required=True)

    command = commands.add_parser("synth-data", help="write a synthetic dataset and its manifest")
    command.add_argument("--out", type=Path, required=True)
    command.add_argument("--num-images", type=int, default=8)
    command.add_argument("--height", type=int, default=32)
    command.add_argument("--width", type=int, default=32)
    command.add_argument("--num-classes", type=int, default=12)
    command.add_argument("--num-patients", type=int)
    command.set_defaults(handler=synth_data)

    command = commands.add_parser("train", help="train one topology on the three folds")
    command.add_argument("--manifest", type=Path, required=True)
    command.add_argument("--out", type=Path, required=True)
    _add_train_options(command)
    command.set_defaults(handler=train)

    command = commands.add_parser("tune-thresholds", help="re-tune TH thresholds of a run")
    command.add_argument("--run", type=Path, required=True)
    command.add_argument("--manifest", type=Path)
    command.set_defaults(handler=tune_thresholds)

    command = commands.add_parser("predict", help="label one TSR1 image with a trained run")
    command.add_argument("--run", type=Path, required=True)
    command.add_argument("--image", type=Path, required=True)
    command.add_argument("--out", type=Path, required=True)
    command.add_argument("--scores-out", type=Path)
    command.add_argument("--topology")
    command.add_argument("--label", choices=[item.value for item in LabellingCriterion], default="map")
    command.set_defaults(handler=predict)

    command = commands.add_parser("evaluate", help="IoU metrics CSV of a run on its test patients")
    command.add_argument("--run", type=Path, required=True)
    command.add_argument("--manifest", type=Path)
    command.add_argument("--out", type=Path, required=True)
    command.add_argument("--per-image", type=Path)
    command.add_argument("--label", choices=[item.value for item in LabellingCriterion], default="map")
    command.set_defaults(handler=evaluate)

    command = commands.add_parser("ensemble", help="evaluate an ensemble of trained runs")
    command.add_argument("--runs", type=Path, nargs="+", required=True)
    command.add_argument("--manifest", type=Path)
    command.add_argument("--spec", help="roster id (E4..E13) or comma-separated topology ids")
    command.add_argument("--spec-file", type=Path, help="JSON ensemble spec")
    command.add_argument("--mode", default="arith", help="arith, geo or stacking-<id>")
    command.add_argument("--provider", action="append", default=[], metavar="ID=DIR")
    command.add_argument("--out", type=Path, required=True)
    command.add_argument("--label", choices=[item.value for item in LabellingCriterion], default="map")
    command.set_defaults(handler=ensemble)

    command = commands.add_parser("gradcheck", help="finite-difference check of every block type")
    command.add_argument("--case", action="append", default=[], choices=list(GRADIENT_CASES))
    command.set_defaults(handler=gradcheck)

    command = commands.add_parser("shapes", help="shape check of named topologies")
    command.add_argument("--all", action="store_true")
    command.add_argument("--topology", action="append", default=[])
    command.add_argument("--size", type=int, default=SHAPE_SUITE_SIZE)
    command.set_defaults(handler=shapes)

    command = commands.add_parser("compare", help="Wilcoxon signed-rank test on two per-image IoU CSVs")
    command.add_argument("first", type=Path)
    command.add_argument("second", type=Path)
    command.add_argument("--alpha", type=float, default=SIGNIFICANCE_LEVEL)
    command.set_defaults(handler=compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT)
    try:
        return args.handler(args)
    except SegkitError as ex:
        log.debug("Command %s failed", args.command, exc_info=True)
        return base_exception_handler(ex)


if __name__ == "__main__":
    sys.exit(main())
