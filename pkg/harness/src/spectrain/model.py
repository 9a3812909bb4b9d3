"""Instantiate trainable PyTorch models from architecture spec files.

The construction mirrors the primary cost model term for term so parameter
counts agree exactly: convolutions carry a bias, batch-norm layers are
affine only when the spec enables batch_norm (affine-free normalization is
still inserted for optimization stability and contributes zero learnable
parameters), and blocks expand to the documented internal chain with a 1x1
projection whenever input and output widths differ.

One divergence is possible: a depthwise layer whose filter count is not a
multiple of its input width realizes as a grouped convolution with
groups=gcd(in, out), which carries more weights than the analytical
per-channel model.  Base zoo models always match; template variants of
depthwise models may not.
"""

from __future__ import annotations

import math
from pathlib import Path

import torch
from torch import nn

from .specio import HarnessError, Spec, SpecLayer, load_spec


def _norm(width: int, affine: bool) -> nn.Module:
    return nn.BatchNorm2d(width, affine=affine)


class _Block(nn.Module):
    """Residual unit: 1x1 ... kxk (middle, strided) ... 1x1*expansion."""

    def __init__(self, cin: int, layer: SpecLayer, affine: bool):
        super().__init__()
        n = layer.block_internal_layers
        out_width = int(layer.filters * layer.block_expansion)
        widths = [layer.filters] * (n - 1) + [out_width]
        mid = (n + 1) // 2
        stack = []
        prev = cin
        for j, width in enumerate(widths, 1):
            spatial = j == mid
            stack.append(nn.Conv2d(
                prev, width,
                kernel_size=layer.kernel if spatial else 1,
                stride=layer.stride if spatial else 1,
                padding=layer.padding if spatial else 0,
                bias=True,
            ))
            stack.append(_norm(width, affine))
            if j < n:
                stack.append(nn.ReLU(inplace=True))
            prev = width
        self.body = nn.Sequential(*stack)
        self.stride = layer.stride
        if cin != out_width:
            self.shortcut = nn.Sequential(
                nn.Conv2d(cin, out_width, 1, stride=layer.stride, bias=True),
                _norm(out_width, affine),
            )
        else:
            self.shortcut = None
        self.relu = nn.ReLU(inplace=True)

    def forward(self, x):
        y = self.body(x)
        if self.shortcut is not None:
            s = self.shortcut(x)
        elif self.stride > 1:
            s = nn.functional.avg_pool2d(x, self.stride)
        else:
            s = x
        return self.relu(y + s)


class SpecModel(nn.Module):
    def __init__(self, spec: Spec):
        super().__init__()
        affine = spec.batch_norm
        stack = []
        channels = spec.input_size[2]
        classifier = None
        for layer in spec.layers:
            if layer.kind == "conv":
                stack += [
                    nn.Conv2d(channels, layer.filters, layer.kernel,
                              stride=layer.stride, padding=layer.padding, bias=True),
                    _norm(layer.filters, affine),
                    nn.ReLU(inplace=True),
                ]
                channels = layer.filters
            elif layer.kind == "dwconv":
                groups = math.gcd(channels, layer.filters)
                stack += [
                    nn.Conv2d(channels, layer.filters, layer.kernel,
                              stride=layer.stride, padding=layer.padding,
                              groups=groups, bias=True),
                    _norm(layer.filters, affine),
                    nn.ReLU(inplace=True),
                ]
                channels = layer.filters
            elif layer.kind == "pool":
                stack.append(nn.MaxPool2d(layer.kernel, stride=layer.stride,
                                          padding=layer.padding))
            elif layer.kind == "block":
                block = _Block(channels, layer, affine)
                stack.append(block)
                channels = int(layer.filters * layer.block_expansion)
            elif layer.kind == "classifier":
                classifier = nn.Linear(channels, layer.filters)
            else:
                raise HarnessError(f"unsupported layer kind {layer.kind!r}")
        if classifier is None:
            raise HarnessError("spec has no classifier layer")
        self.features = nn.Sequential(*stack)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.classifier = classifier

    def forward(self, x):
        x = self.features(x)
        x = self.pool(x).flatten(1)
        return self.classifier(x)

    @property
    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def build_trainable(spec_path: str | Path) -> SpecModel:
    return SpecModel(load_spec(spec_path))
