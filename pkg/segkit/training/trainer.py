from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Optional

import numpy as np

from segkit.exceptions import EmptyDataset
from segkit.nn.module import Module
from segkit.nn.optimizers import make_optimizer
from segkit.tensor import Tensor, cross_entropy, no_grad
from segkit.training.datasets import PatchSet
from segkit.training.losses import correct_pixels
from segkit.training.schemas import EpochRecord, TrainConfig, TrainResult
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)

ScoresFn = Callable[[Tensor], Tensor]


class Trainer:
    """
    Epoch loop with best-epoch selection by validation pixel accuracy.

    ``scores_fn`` maps an image batch to class scores; it defaults to ``model.scores``. Only parameters of
    ``model`` that require a gradient are optimised.
    """

    def __init__(self, model: Module, config: TrainConfig, scores_fn: Optional[ScoresFn] = None):
        self.model = model
        self.config = config
        self.scores_fn = scores_fn or model.scores
        self.optimizer = make_optimizer(
            config.optimizer,
            [parameter for parameter in model.parameters() if parameter.requires_grad],
            config.learning_rate,
        )

    def _batches(self, size: int, epoch: Optional[int] = None) -> list[np.ndarray]:
        order = np.arange(size)
        if epoch is not None:
            order = make_rng(self.config.seed, Stream.SHUFFLE, epoch).permutation(size)
        return [order[start : start + self.config.batch_size] for start in range(0, size, self.config.batch_size)]

    def train_epoch(self, data: PatchSet, epoch: int) -> tuple[float, float]:
        self.model.train()
        total_loss, correct, pixels = 0.0, 0, 0
        for indices in self._batches(len(data), epoch):
            images, targets = data.batch(
                indices,
                seed=self.config.seed,
                epoch=epoch,
                augmentation=self.config.augmentation,
            )
            self.optimizer.zero_grad()
            scores = self.scores_fn(Tensor(images))
            loss = cross_entropy(scores, targets)
            loss.backward()
            self.optimizer.step()

            total_loss += loss.item() * len(indices)
            correct += correct_pixels(scores.data, targets)
            pixels += targets.size // targets.shape[-1]
            log.debug("Epoch %s batch loss %.6f", epoch, loss.item())

        return total_loss / len(data), correct / pixels

    def evaluate(self, data: PatchSet) -> tuple[float, float]:
        self.model.eval()
        total_loss, correct, pixels = 0.0, 0, 0
        with no_grad():
            for indices in self._batches(len(data)):
                images, targets = data.batch(indices)
                scores = self.scores_fn(Tensor(images))
                total_loss += cross_entropy(scores, targets).item() * len(indices)
                correct += correct_pixels(scores.data, targets)
                pixels += targets.size // targets.shape[-1]

        return total_loss / len(data), correct / pixels

    def fit(self, train: PatchSet, validation: PatchSet) -> TrainResult:
        if not len(train) or not len(validation):
            msg = "Training and validation sets must not be empty."
            raise EmptyDataset(detail=msg)

        history: list[EpochRecord] = []
        best_state = self.model.state_dict()
        best_epoch: Optional[int] = None
        best_accuracy: Optional[float] = None
        for epoch in range(1, self.config.epochs + 1):
            train_loss, train_accuracy = self.train_epoch(train, epoch)
            validation_loss, validation_accuracy = self.evaluate(validation)
            history.append(
                EpochRecord(
                    epoch=epoch,
                    train_loss=train_loss,
                    train_accuracy=train_accuracy,
                    validation_loss=validation_loss,
                    validation_accuracy=validation_accuracy,
                ),
            )
            log.info(
                "Epoch %s/%s: loss=%.6f acc=%.4f val_loss=%.6f val_acc=%.4f",
                epoch,
                self.config.epochs,
                train_loss,
                train_accuracy,
                validation_loss,
                validation_accuracy,
            )
            # first epoch reaching the maximum wins
            if best_accuracy is None or validation_accuracy > best_accuracy:
                best_epoch, best_accuracy = epoch, validation_accuracy
                best_state = self.model.state_dict()

        self.model.load_state_dict(best_state)
        self.model.eval()
        if best_epoch is not None:
            log.info("Best epoch %s with validation accuracy %.4f", best_epoch, best_accuracy)

        return TrainResult(
            history=history,
            best_epoch=best_epoch,
            best_validation_accuracy=best_accuracy,
            state=best_state,
        )
