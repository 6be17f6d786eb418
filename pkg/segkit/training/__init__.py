"""Training loop, cross-validation folds and run management."""

from .datasets import PatchSet
from .folds import make_folds, select_patients, split_samples
from .history import read_history_csv, write_history_csv
from .inference import infer_scores
from .losses import pixel_accuracy
from .pipeline import (
    LoadedRun,
    evaluate_run,
    evaluate_scores,
    load_run,
    predict_image,
    retune_thresholds,
    score_samples,
    train_run,
)
from .schemas import EpochRecord, FoldPlan, FoldSet, RunConfig, TrainConfig, TrainResult
from .trainer import Trainer

__all__ = [
    "EpochRecord",
    "FoldPlan",
    "FoldSet",
    "LoadedRun",
    "PatchSet",
    "RunConfig",
    "TrainConfig",
    "TrainResult",
    "Trainer",
    "evaluate_run",
    "evaluate_scores",
    "infer_scores",
    "load_run",
    "make_folds",
    "pixel_accuracy",
    "predict_image",
    "read_history_csv",
    "retune_thresholds",
    "score_samples",
    "select_patients",
    "split_samples",
    "train_run",
    "write_history_csv",
]
