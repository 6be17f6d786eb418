from importlib import import_module

import numpy as np
import orjson as json
import pytest

from segkit import __version__
from segkit.cli import main
from segkit.cli import suites
from segkit.exceptions.errors import EXIT_CHECK_FAILED, EXIT_DATA, EXIT_FAILURE, EXIT_USAGE
from segkit.formats import load_samples, read_pgm, read_tsr
from segkit.metrics import write_per_image_csv
from segkit.topology import ShapeReport
from segkit.utils.seeding import SEED_ENV_VAR
from tests.fixtures.datasets import NUM_CLASSES
from tests.misc.utils import fake_seed

main_module = import_module("segkit.cli.main")


def run(capsys, *argv: str) -> tuple[int, dict]:
    code = main([str(item) for item in argv])
    captured = capsys.readouterr()
    output = captured.out if code == 0 else captured.err
    return code, json.loads(output) if output.strip() else {}


def test_version(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])

    assert exc_info.value.code == 0
    assert __version__ in capsys.readouterr().out


class TestSynthData:
    def test_writes_manifest(self, capsys, tmp_path):
        code, output = run(capsys, "synth-data", "--out", tmp_path, "--num-images", 3, "--num-classes", 4)

        manifest, samples = load_samples(tmp_path / "manifest.json")
        assert code == 0
        assert output == {"manifest": str(tmp_path / "manifest.json"), "images": 3}
        assert manifest.num_classes == 4
        assert samples[0].image.shape == (32, 32, 2)

    def test_environment_seed_wins(self, capsys, tmp_path, monkeypatch):
        seed = fake_seed()
        run(capsys, "--seed", seed, "synth-data", "--out", tmp_path / "explicit", "--num-images", 2)
        monkeypatch.setenv(SEED_ENV_VAR, str(seed))
        run(capsys, "--seed", seed + 1, "synth-data", "--out", tmp_path / "env", "--num-images", 2)

        explicit = (tmp_path / "explicit" / "images" / "S0001.tsr").read_bytes()
        assert (tmp_path / "env" / "images" / "S0001.tsr").read_bytes() == explicit


class TestRunCommands:
    def test_train(self, capsys, tmp_path, manifest_path):
        code, output = run(
            capsys,
            "--seed",
            5,
            "train",
            "--manifest",
            manifest_path,
            "--out",
            tmp_path,
            "--topology",
            "UMD",
            "--m",
            4,
            "--epochs",
            1,
            "--patch-size",
            32,
            "--patch-stride",
            24,
            "--no-augmentation",
        )

        assert code == 0
        assert output["topology"] == "UMD"
        assert output["seed"] == 5
        assert [fold["best_epoch"] for fold in output["folds"]] == [1, 1, 1]
        assert (tmp_path / "run.json").is_file()

    def test_train_needs_topology(self, capsys, tmp_path, manifest_path):
        code, output = run(capsys, "train", "--manifest", manifest_path, "--out", tmp_path)

        assert code == EXIT_USAGE
        assert output["errors"][0]["source"] == {"parameter": "topology"}

    def test_unknown_topology(self, capsys, tmp_path, manifest_path):
        code, output = run(capsys, "train", "--manifest", manifest_path, "--out", tmp_path, "--topology", "UX")

        assert code == EXIT_USAGE
        assert output["errors"][0]["title"] == "Unknown identifier."

    def test_evaluate(self, capsys, tmp_path, tiny_run_dir):
        code, output = run(
            capsys,
            "evaluate",
            "--run",
            tiny_run_dir,
            "--out",
            tmp_path / "metrics.csv",
            "--per-image",
            tmp_path / "per_image.csv",
            "--label",
            "th",
        )

        assert code == 0
        assert output["labelling"] == "th"
        assert len(output["per_class"]) == NUM_CLASSES
        assert (tmp_path / "metrics.csv").read_text().startswith("fold,image_id,class_id")
        assert (tmp_path / "per_image.csv").is_file()

    def test_tune_thresholds(self, capsys, tiny_run_dir):
        code, output = run(capsys, "tune-thresholds", "--run", tiny_run_dir)

        assert code == 0
        assert len(output["thresholds"]) == 3
        assert all(len(values) == NUM_CLASSES - 1 for values in output["thresholds"])

    def test_predict(self, capsys, tmp_path, tiny_run_dir, dataset_dir):
        code, output = run(
            capsys,
            "predict",
            "--run",
            tiny_run_dir,
            "--image",
            dataset_dir / "images" / "S0000.tsr",
            "--out",
            tmp_path / "labels.pgm",
            "--scores-out",
            tmp_path / "scores.tsr",
            "--topology",
            "UD",
        )

        labels = read_pgm(tmp_path / "labels.pgm")
        scores = read_tsr(tmp_path / "scores.tsr")
        assert code == 0
        assert labels.shape == (32, 32)
        assert np.array_equal(labels, scores.argmax(axis=-1))
        assert output["classes_present"] == sorted(set(labels.ravel().tolist()))

    def test_predict_with_other_topology(self, capsys, tmp_path, tiny_run_dir, dataset_dir):
        image = dataset_dir / "images" / "S0000.tsr"
        argv = ["predict", "--run", tiny_run_dir, "--image", image, "--out", tmp_path / "x.pgm", "--topology", "UMD"]

        code, output = run(capsys, *argv)

        assert code == EXIT_USAGE
        assert output["errors"][0]["exit_code"] == EXIT_USAGE

    def test_missing_run(self, capsys, tmp_path):
        code, output = run(capsys, "evaluate", "--run", tmp_path, "--out", tmp_path / "metrics.csv")

        assert code == EXIT_DATA
        assert output["errors"][0]["title"] == "Missing artifact."


def test_ensemble(capsys, tmp_path, tiny_run_dir, second_run_dir):
    code, output = run(
        capsys,
        "ensemble",
        "--runs",
        tiny_run_dir,
        second_run_dir,
        "--spec",
        "UD,UAD",
        "--mode",
        "geo",
        "--out",
        tmp_path,
    )

    assert code == 0
    assert (output["ensemble"], output["mode"]) == ("custom", "geo")
    for name in ("metrics.csv", "per_image.csv", "report.json", "ensemble.json"):
        assert (tmp_path / name).is_file()


def test_ensemble_with_bad_provider(capsys, tmp_path, tiny_run_dir):
    argv = ["ensemble", "--runs", tiny_run_dir, "--spec", "UD,FCN", "--provider", "FCN", "--out", tmp_path]

    code, output = run(capsys, *argv)

    assert code == EXIT_USAGE
    assert output["errors"][0]["source"] == {"parameter": "provider"}


def test_compare(capsys, tmp_path):
    first = write_per_image_csv({f"S{index}": 0.8 + index / 100 for index in range(6)}, tmp_path / "a.csv")
    second = write_per_image_csv({f"S{index}": 0.5 for index in range(6)}, tmp_path / "b.csv")

    code, output = run(capsys, "compare", first, second)

    assert code == 0
    assert output["n"] == 6
    assert output["p_value"] == pytest.approx(0.03125)
    assert output["significant"] is True


def test_compare_with_too_few_images(capsys, tmp_path):
    first = write_per_image_csv({"a": 0.8, "b": 0.7}, tmp_path / "a.csv")
    second = write_per_image_csv({"a": 0.5, "b": 0.5}, tmp_path / "b.csv")

    code, _ = run(capsys, "compare", first, second)

    assert code == EXIT_DATA


class TestChecks:
    def test_gradcheck(self, capsys):
        code, output = run(capsys, "gradcheck", "--case", "U", "--case", "Head")

        assert code == 0
        assert output["passed"] is True
        assert sorted(output["cases"]) == ["Head", "U"]

    def test_shapes(self, capsys):
        code, output = run(capsys, "shapes", "--topology", "U1", "--size", 32)

        assert code == 0
        assert output["topologies"]["U1"]["passed"] is True

    def test_shapes_needs_a_selection(self, capsys):
        code, _ = run(capsys, "shapes")

        assert code == EXIT_USAGE

    def test_shapes_of_invalid_size(self, capsys):
        code, _ = run(capsys, "shapes", "--topology", "U1", "--size", 40)

        assert code == EXIT_FAILURE


def test_failed_verification(capsys, monkeypatch):
    broken = ShapeReport(topology_id="U1", height=64, width=64, parameter_count=1, checks=[], max_score_sum_error=0.5)
    failing = suites.ShapeSuiteReport(reports=[broken])
    monkeypatch.setattr(main_module, "run_shape_suite", lambda *args, **kwargs: failing)

    code, output = run(capsys, "shapes", "--all")

    assert code == EXIT_CHECK_FAILED
    assert "U1" in output["errors"][0]["detail"]
