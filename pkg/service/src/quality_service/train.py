"""Training: regression on scaled labels, then ordinal threshold fitting."""
from __future__ import annotations

import copy
import hashlib
import logging
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch
from torch import nn

from .data import TrainingExample, scale_label, stratified_split, upsample_minority
from .model import ModelConfig, QualityRegressor, ScoringBundle, batch_ids
from .thresholds import Thresholds, fit_thresholds

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 16
    learning_rate: float = 2e-3
    weight_decay: float = 1e-3
    lr_decay_every: int = 15
    threshold_holdout: float = 0.35
    seed: int = 0
    model: ModelConfig = ModelConfig()


def _epoch(model, batches, optimizer=None) -> float:
    loss_fn = nn.MSELoss()
    total = 0.0
    count = 0
    for ids, targets in batches:
        pred = model(ids)
        loss = loss_fn(pred, targets)
        if optimizer is not None:
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        total += float(loss.detach()) * len(targets)
        count += len(targets)
    return total / max(count, 1)


def _batches(examples: Sequence[TrainingExample], config: TrainConfig, rng: random.Random,
             shuffle: bool):
    order = list(range(len(examples)))
    if shuffle:
        rng.shuffle(order)
    for lo in range(0, len(order), config.batch_size):
        chunk = [examples[i] for i in order[lo:lo + config.batch_size]]
        ids = batch_ids([e.text for e in chunk], config.model)
        targets = torch.tensor([scale_label(e.label) for e in chunk], dtype=torch.float32)
        yield ids, targets


@dataclass
class TrainResult:
    bundle: ScoringBundle
    thresholds: Thresholds
    train_examples: int
    validation_loss: float
    wall_seconds: float


def train(examples: Sequence[TrainingExample], config: TrainConfig = TrainConfig(),
          out_dir: str | Path | None = None) -> TrainResult:
    """Fit the regression model and ordinal thresholds from labeled texts.

    The 60/20/20 class-then-language stratified split feeds model training
    (train portion, minority classes upsampled); thresholds are fitted on a
    held-out slice of the training portion the model never saw; validation
    loss is reported for convergence monitoring.
    """
    started = time.monotonic()
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    train_set, val_set, _test_set = stratified_split(examples, seed=config.seed)
    rng.shuffle(train_set)  # split output is class-ordered; mix before slicing
    holdout_n = max(1, int(len(train_set) * config.threshold_holdout))
    fit_slice = train_set[:holdout_n]
    model_slice = upsample_minority(train_set[holdout_n:], seed=config.seed)

    model = QualityRegressor(config.model)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate,
                                 weight_decay=config.weight_decay)
    scheduler = torch.optim.lr_scheduler.StepLR(optimizer, step_size=config.lr_decay_every,
                                                gamma=0.5)
    best_val = float("inf")
    best_state = None
    for epoch in range(config.epochs):
        model.train()
        train_loss = _epoch(model, _batches(model_slice, config, rng, shuffle=True), optimizer)
        scheduler.step()
        model.eval()
        with torch.no_grad():
            val_loss = _epoch(model, _batches(val_set, config, rng, shuffle=False))
        log.info("epoch %d: train mse %.4f, val mse %.4f", epoch + 1, train_loss, val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_state = copy.deepcopy(model.state_dict())
    if best_state is not None:
        model.load_state_dict(best_state)
    val_loss = best_val

    digest = hashlib.sha256()
    for p in model.state_dict().values():
        digest.update(p.numpy().tobytes())
    bundle = ScoringBundle(model, config.model, version=digest.hexdigest()[:12])

    raw_scores = bundle.score([e.text for e in fit_slice])
    thresholds = fit_thresholds(raw_scores, [e.label for e in fit_slice])
    elapsed = time.monotonic() - started
    if out_dir is not None:
        bundle.save(out_dir)
        thresholds.save(Path(out_dir) / "thresholds.json")
    return TrainResult(bundle=bundle, thresholds=thresholds,
                       train_examples=len(model_slice), validation_loss=val_loss,
                       wall_seconds=elapsed)
