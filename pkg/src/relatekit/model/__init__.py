"""Listener-conditioned relevance score predictor and its training machinery."""

from .config import ModelConfig, TrainConfig
from .losses import cbl_weight, class_of, clipped_mse, contrastive_loss, total_loss
from .network import backward_batch, batch_loss_and_grads, forward, forward_batch, init_params
from .optim import AdamState, adam_step, init_adam, lr_at
from .checkpoint import load_checkpoint, save_checkpoint
from .training import (
    TrainingExample,
    build_training_examples,
    denormalize_score,
    normalize_score,
    predict,
    train,
)

__all__ = [
    "AdamState",
    "ModelConfig",
    "TrainConfig",
    "TrainingExample",
    "adam_step",
    "backward_batch",
    "batch_loss_and_grads",
    "build_training_examples",
    "cbl_weight",
    "class_of",
    "clipped_mse",
    "contrastive_loss",
    "denormalize_score",
    "forward",
    "forward_batch",
    "init_adam",
    "init_params",
    "load_checkpoint",
    "lr_at",
    "normalize_score",
    "predict",
    "save_checkpoint",
    "total_loss",
    "train",
]
