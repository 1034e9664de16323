"""Model and training hyperparameter containers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class ModelConfig:
    """Architecture dimensions. F and D are fixed by the feature files.

    num_listeners counts real listeners; the embedding table holds one extra
    reserved row (index 0) for the average listener. None means "derive from
    the training data".
    """

    F: int
    D: int
    C: int = 16
    H: int = 64
    H2: int = 64
    num_listeners: int | None = None
    seed: int = 0

    def validate(self) -> None:
        for name in ("F", "D", "C", "H", "H2"):
            if getattr(self, name) < 1:
                raise ValueError(f"ModelConfig.{name} must be >= 1")
        if self.num_listeners is not None and self.num_listeners < 0:
            raise ValueError("num_listeners must be nonnegative")

    @property
    def input_dim(self) -> int:
        return self.F + self.C + self.D


@dataclass
class TrainConfig:
    """Optimization settings; defaults are the published recipe."""

    tau: float = 0.25
    alpha: float = 0.1
    beta_cbl: float = 0.99
    beta: float = 1.0
    gamma: float = 0.5
    lr0: float = 2.0e-5
    total_steps: int = 15_000
    warmup_steps: int = 4_000
    batch_size: int = 12
    accum_every: int = 2
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    eval_every: int = 500

    def validate(self) -> None:
        if self.tau < 0 or self.alpha < 0:
            raise ValueError("tau and alpha must be nonnegative")
        if not 0.0 < self.beta_cbl < 1.0:
            raise ValueError("beta_cbl must lie in (0, 1)")
        if self.warmup_steps > self.total_steps:
            raise ValueError("warmup_steps cannot exceed total_steps")
        if self.batch_size < 1 or self.accum_every < 1 or self.eval_every < 1:
            raise ValueError("batch_size, accum_every, and eval_every must be >= 1")
