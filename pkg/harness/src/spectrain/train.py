"""Training loop: SGD with momentum 0.9, weight decay 1e-4 and a
piecewise-constant learning-rate schedule compressed from the full-scale
recipe (half the epochs at the base rate, then a quarter each at /10 and
/100).  Augmentation is zero-padding by 4, random crops and horizontal
flips.  Runs are deterministic for a fixed seed on a fixed environment;
a non-finite loss ends the run as a failure instead of crashing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn
from torch.nn import functional as F

from .data import SplitData, load_dataset
from .model import build_trainable
from .specio import HarnessError


def default_schedule(epochs: int, base_lr: float = 0.1) -> tuple[tuple[int, float], ...]:
    """Compress the 80/40/40-of-160 staging onto `epochs` epochs."""
    first = max(1, round(epochs / 2))
    second = (epochs - first + 1) // 2
    third = epochs - first - second
    stages = [(first, base_lr)]
    if second:
        stages.append((second, base_lr / 10))
    if third:
        stages.append((third, base_lr / 100))
    return tuple(stages)


@dataclass
class TrainRunConfig:
    spec_path: str
    dataset: str = "small-images"
    epochs: int = 10
    lr_schedule: tuple[tuple[int, float], ...] = ()
    weight_decay: float = 1e-4
    momentum: float = 0.9
    batch: int = 128
    seed: int = 1
    train_size: int = 2048
    val_size: int = 512
    data_dir: str | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise HarnessError("epochs must be >= 1")
        if not self.lr_schedule:
            self.lr_schedule = default_schedule(self.epochs)
        if sum(n for n, _ in self.lr_schedule) != self.epochs:
            raise HarnessError("lr schedule stages must cover all epochs")


@dataclass
class RunResult:
    template: str
    final_accuracy: float | None
    params: int
    epochs: int
    seed: int
    error: str | None = None


def _epoch_lrs(schedule) -> list[float]:
    out = []
    for n, lr in schedule:
        out.extend([lr] * n)
    return out


def _augment(x: torch.Tensor, gen: torch.Generator) -> torch.Tensor:
    n, c, h, w = x.shape
    padded = F.pad(x, (4, 4, 4, 4))
    dx = torch.randint(0, 9, (n,), generator=gen)
    dy = torch.randint(0, 9, (n,), generator=gen)
    rows = (dy[:, None] + torch.arange(h)[None, :])[:, None, :, None]
    cols = (dx[:, None] + torch.arange(w)[None, :])[:, None, None, :]
    out = padded[torch.arange(n)[:, None, None, None],
                 torch.arange(c)[None, :, None, None], rows, cols]
    flip = torch.rand(n, generator=gen) < 0.5
    out[flip] = out[flip].flip(3)
    return out


@torch.no_grad()
def _accuracy(model: nn.Module, x: torch.Tensor, y: torch.Tensor, batch: int) -> float:
    model.eval()
    correct = 0
    for i in range(0, len(x), batch):
        pred = model(x[i:i + batch]).argmax(dim=1)
        correct += (pred == y[i:i + batch]).sum().item()
    return 100.0 * correct / len(x)


def train_and_eval(config: TrainRunConfig, data: SplitData | None = None,
                   template: str = "base") -> RunResult:
    torch.manual_seed(config.seed)
    if data is None:
        data = load_dataset(config.dataset, config.train_size, config.val_size,
                            config.data_dir)
    model = build_trainable(config.spec_path)
    params = model.parameter_count
    optimizer = torch.optim.SGD(model.parameters(), lr=config.lr_schedule[0][1],
                                momentum=config.momentum,
                                weight_decay=config.weight_decay)
    loss_fn = nn.CrossEntropyLoss()
    gen = torch.Generator().manual_seed(config.seed)
    n = len(data.train_x)
    for epoch, lr in enumerate(_epoch_lrs(config.lr_schedule)):
        for group in optimizer.param_groups:
            group["lr"] = lr
        model.train()
        order = torch.randperm(n, generator=gen)
        for i in range(0, n, config.batch):
            idx = order[i:i + config.batch]
            xb = _augment(data.train_x[idx], gen)
            yb = data.train_y[idx]
            optimizer.zero_grad()
            loss = loss_fn(model(xb), yb)
            if not math.isfinite(loss.item()):
                return RunResult(template, None, params, config.epochs, config.seed,
                                 error=f"diverged (non-finite loss at epoch {epoch + 1})")
            loss.backward()
            optimizer.step()
    accuracy = _accuracy(model, data.val_x, data.val_y, config.batch)
    return RunResult(template, accuracy, params, config.epochs, config.seed)
