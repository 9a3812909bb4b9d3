"""Datasets for desk-scale runs.

cifar10-subset  loads the pickled CIFAR-10 python batches from a local
                directory (they are not downloadable in every environment);
                looks in --data-dir, $SPECTRAIN_DATA, then ./data.
small-images    deterministic synthetic stand-in: ten smoothed class
                patterns plus noise at the same 3x32x32 geometry, learnable
                well above chance within a few epochs.
"""

from __future__ import annotations

import os
import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .specio import HarnessError

DATASETS = ("cifar10-subset", "small-images")


class DatasetUnavailableError(HarnessError):
    pass


@dataclass
class SplitData:
    train_x: torch.Tensor
    train_y: torch.Tensor
    val_x: torch.Tensor
    val_y: torch.Tensor

    @property
    def num_classes(self) -> int:
        return int(self.train_y.max().item()) + 1


def _cifar_dir(data_dir: str | None) -> Path:
    candidates = []
    if data_dir:
        candidates.append(Path(data_dir))
    env = os.environ.get("SPECTRAIN_DATA")
    if env:
        candidates.append(Path(env))
    candidates.append(Path("data"))
    for base in candidates:
        for sub in (base, base / "cifar-10-batches-py"):
            if (sub / "data_batch_1").exists():
                return sub
    raise DatasetUnavailableError(
        "CIFAR-10 batches not found; place cifar-10-batches-py under --data-dir "
        "or $SPECTRAIN_DATA, or use the small-images dataset"
    )


def _load_batch(path: Path):
    with open(path, "rb") as fh:
        raw = pickle.load(fh, encoding="bytes")
    x = raw[b"data"].reshape(-1, 3, 32, 32).astype(np.float32) / 255.0
    y = np.asarray(raw[b"labels"], dtype=np.int64)
    return x, y


def cifar10_subset(train_size: int, val_size: int, data_dir: str | None = None) -> SplitData:
    base = _cifar_dir(data_dir)
    xs, ys = [], []
    for i in (1, 2, 3, 4, 5):
        path = base / f"data_batch_{i}"
        if not path.exists():
            break
        x, y = _load_batch(path)
        xs.append(x)
        ys.append(y)
        if sum(len(a) for a in ys) >= train_size:
            break
    train_x = np.concatenate(xs)[:train_size]
    train_y = np.concatenate(ys)[:train_size]
    val_x, val_y = _load_batch(base / "test_batch")
    mean = train_x.mean(axis=(0, 2, 3), keepdims=True)
    std = train_x.std(axis=(0, 2, 3), keepdims=True) + 1e-7
    train_x = (train_x - mean) / std
    val_x = (val_x[:val_size] - mean) / std
    return SplitData(
        torch.from_numpy(train_x), torch.from_numpy(train_y),
        torch.from_numpy(val_x), torch.from_numpy(val_y[:val_size]),
    )


def small_images(train_size: int, val_size: int, size: int = 32,
                 classes: int = 10, noise: float = 0.6, data_seed: int = 999) -> SplitData:
    gen = torch.Generator().manual_seed(data_seed)
    # smooth per-class templates: random low-frequency fields
    patterns = torch.randn(classes, 3, size, size, generator=gen)
    kernel = torch.ones(3, 1, 5, 5) / 25.0
    patterns = torch.nn.functional.conv2d(patterns, kernel, padding=2, groups=3)
    patterns = patterns / patterns.std()

    def make(n):
        y = torch.arange(n) % classes
        x = patterns[y] + noise * torch.randn(n, 3, size, size, generator=gen)
        perm = torch.randperm(n, generator=gen)
        return x[perm], y[perm]

    train_x, train_y = make(train_size)
    val_x, val_y = make(val_size)
    return SplitData(train_x, train_y, val_x, val_y)


def load_dataset(name: str, train_size: int, val_size: int,
                 data_dir: str | None = None) -> SplitData:
    if name == "cifar10-subset":
        return cifar10_subset(train_size, val_size, data_dir)
    if name == "small-images":
        return small_images(train_size, val_size)
    raise HarnessError(f"unknown dataset {name!r}; expected one of {DATASETS}")
