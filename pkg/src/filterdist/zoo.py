"""Built-in CIFAR and Tiny-ImageNet description generators for the four
evaluated families.

All families use a 3x3 CIFAR-style stem with no aggressive early
downsampling; the Tiny-ImageNet variants add exactly one extra stride-2
stage to keep spatial budgets comparable.  Every model enables batch_norm
and ends with global average pooling into a single fully-connected
classifier.

Widths follow each family's canonical pyramidal design:

vgg19      16 plain convs [64 x2, 128 x2, 256 x4, 512 x8] with 2x2 pools
resnet50   32-wide stem, then 16 bottleneck blocks (expansion 4) at
           [64 x3, 128 x4, 256 x6, 512 x3]
inception  64-wide stem, then 9 module blocks whose equal internal widths
           are a quarter of the classic concatenated module outputs
mobilenet  32-wide stem, then 13 depthwise-separable pairs; both the
           depthwise and pointwise widths are redistributable units
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .archspec import (
    BLOCK,
    CLASSIFIER,
    CONV,
    DWCONV,
    POOL,
    ArchitectureSpec,
    FilterDistError,
    LayerSpec,
    validate,
)

FAMILIES = ("vgg19", "resnet50", "inception", "mobilenet")
DATASETS = ("cifar10", "cifar100", "tiny-imagenet")

_DATASET_GEOMETRY = {
    "cifar10": (32, 10),
    "cifar100": (32, 100),
    "tiny-imagenet": (64, 200),
}


@dataclass(frozen=True, slots=True)
class ZooModelId:
    family: str
    dataset: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FilterDistError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.dataset not in DATASETS:
            raise FilterDistError(f"unknown dataset {self.dataset!r}; expected one of {DATASETS}")

    @property
    def name(self) -> str:
        return f"{self.family}-{self.dataset}"


def list_models() -> list[ZooModelId]:
    return [ZooModelId(f, d) for f in FAMILIES for d in DATASETS]


def build_model(model_id: ZooModelId) -> ArchitectureSpec:
    size, classes = _DATASET_GEOMETRY[model_id.dataset]
    tiny = model_id.dataset == "tiny-imagenet"
    builder = _BUILDERS[model_id.family]
    arch = builder(model_id.name, size, classes, tiny)
    validate(arch)
    return arch


class _Stack:
    """Tiny helper that hands out consecutive layer ids."""

    def __init__(self):
        self.layers = []

    def conv(self, filters, kernel=3, stride=1):
        self.layers.append(LayerSpec(
            id=len(self.layers) + 1, kind=CONV, filters=filters,
            kernel=kernel, stride=stride, padding=kernel // 2,
        ))

    def dwconv(self, filters, stride=1):
        self.layers.append(LayerSpec(
            id=len(self.layers) + 1, kind=DWCONV, filters=filters,
            kernel=3, stride=stride, padding=1,
        ))

    def pool(self):
        self.layers.append(LayerSpec(
            id=len(self.layers) + 1, kind=POOL, kernel=2, stride=2, padding=0,
        ))

    def block(self, filters, stride=1, internal=3, expansion=4):
        self.layers.append(LayerSpec(
            id=len(self.layers) + 1, kind=BLOCK, filters=filters,
            kernel=3, stride=stride, padding=1,
            block_internal_layers=internal, block_expansion=Fraction(expansion),
        ))

    def classifier(self, classes):
        self.layers.append(LayerSpec(
            id=len(self.layers) + 1, kind=CLASSIFIER, filters=classes,
        ))

    def build(self, name, size, classes) -> ArchitectureSpec:
        return ArchitectureSpec(
            name=name, input_height=size, input_width=size, input_channels=3,
            num_classes=classes, layers=tuple(self.layers), batch_norm=True,
        )


def _vgg19(name, size, classes, tiny):
    s = _Stack()
    for stage, width in enumerate(([64] * 2, [128] * 2, [256] * 4, [512] * 4, [512] * 4)):
        for f in width:
            s.conv(f)
        s.pool()
        if tiny and stage == 0:
            s.pool()
    s.classifier(classes)
    return s.build(name, size, classes)


def _resnet50(name, size, classes, tiny):
    s = _Stack()
    s.conv(32, stride=2 if tiny else 1)
    for width, blocks, stride in ((64, 3, 1), (128, 4, 2), (256, 6, 2), (512, 3, 2)):
        for b in range(blocks):
            s.block(width, stride=stride if b == 0 else 1)
    s.classifier(classes)
    return s.build(name, size, classes)


# equal internal module widths, a quarter of the concatenated GoogLeNet
# module outputs 256/480/512/512/512/528/832/832/1024
_INCEPTION_WIDTHS = (64, 120, 128, 128, 128, 132, 208, 208, 256)


def _inception(name, size, classes, tiny):
    s = _Stack()
    s.conv(64)
    if tiny:
        s.pool()
    for i, f in enumerate(_INCEPTION_WIDTHS):
        s.block(f)
        if i in (1, 6):
            s.pool()
    s.classifier(classes)
    return s.build(name, size, classes)


# (pointwise width, depthwise stride) per separable pair
_MOBILENET_PAIRS = (
    (64, 1), (128, 2), (128, 1), (256, 2), (256, 1), (512, 2),
    (512, 1), (512, 1), (512, 1), (512, 1), (512, 1), (1024, 2), (1024, 1),
)


def _mobilenet(name, size, classes, tiny):
    s = _Stack()
    s.conv(32, stride=2 if tiny else 1)
    prev = 32
    for out, stride in _MOBILENET_PAIRS:
        s.dwconv(prev, stride=stride)
        s.conv(out, kernel=1)
        prev = out
    s.classifier(classes)
    return s.build(name, size, classes)


_BUILDERS = {
    "vgg19": _vgg19,
    "resnet50": _resnet50,
    "inception": _inception,
    "mobilenet": _mobilenet,
}
