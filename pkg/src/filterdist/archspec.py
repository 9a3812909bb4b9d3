"""Architecture data model, JSON file format, validation and filter plans.

An architecture is an ordered stack of layers ending in a single classifier.
Channel counts and spatial sizes of every layer are derived by walking the
stack, so a spec never stores redundant geometry that could drift out of
sync.  All values are immutable; every operation returns a new spec.

Layer kinds
-----------
conv        plain convolution, ``filters`` output channels
dwconv      depthwise-style convolution: per-channel k x k kernels, output
            channels equal ``filters`` regardless of input width
pool        spatial pooling, carries no filters
block       composite unit (residual bottleneck / inception-style module)
            treated as a single redistributable layer.  Internally it is a
            chain of ``block_internal_layers`` convolutions that all use the
            block's filter count, except the last one which is widened by
            ``block_expansion``.  Only the middle internal convolution is
            spatial (k x k, carries the block's stride); the others are 1x1.
            A 1x1 projection shortcut is implied whenever the block's input
            width differs from its output width.
classifier  single fully-connected layer fed by global average pooling,
            always last, ``filters`` equals the class count
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

CONV = "conv"
DWCONV = "dwconv"
POOL = "pool"
BLOCK = "block"
CLASSIFIER = "classifier"

LAYER_KINDS = (CONV, DWCONV, POOL, BLOCK, CLASSIFIER)

# layer kinds that contribute redistributable filter-plan units
PLAN_KINDS = (CONV, DWCONV, BLOCK)


class FilterDistError(Exception):
    """Base class for all domain errors raised by this package."""


class ArchSyntaxError(FilterDistError):
    """Malformed spec text; message carries line/column when known."""


class ArchValidationError(FilterDistError):
    """Structurally well-formed spec that violates an invariant."""


@dataclass(frozen=True, slots=True)
class LayerSpec:
    id: int
    kind: str
    filters: int | None = None
    kernel: int | None = None
    stride: int | None = None
    padding: int | None = None
    block_internal_layers: int | None = None
    block_expansion: Fraction | None = None

    def internal_widths(self) -> list[tuple[int, int, int]]:
        """Internal convolutions of a block as (kernel, width, stride) triples.

        The block's spatial convolution sits in the middle of the chain; the
        expansion applies to the final internal convolution only.
        """
        if self.kind != BLOCK:
            raise ValueError("internal_widths is only defined for block layers")
        n = self.block_internal_layers
        mid = (n + 1) // 2
        out = []
        for j in range(1, n + 1):
            width = self.filters if j < n else int(self.filters * self.block_expansion)
            kernel = self.kernel if j == mid else 1
            stride = self.stride if j == mid else 1
            out.append((kernel, width, stride))
        return out

    def output_channels(self, in_channels: int) -> int:
        if self.kind in (CONV, DWCONV, CLASSIFIER):
            return self.filters
        if self.kind == POOL:
            return in_channels
        return int(self.filters * self.block_expansion)


@dataclass(frozen=True, slots=True)
class ArchitectureSpec:
    name: str
    input_height: int
    input_width: int
    input_channels: int
    num_classes: int
    layers: tuple[LayerSpec, ...]
    batch_norm: bool = False


@dataclass(frozen=True, slots=True)
class FilterPlan:
    """The redistributable units of an architecture, classifier excluded."""

    unit_indices: tuple[int, ...]
    counts: tuple[int, ...]
    depth_D: int
    total_F: int


@dataclass(frozen=True, slots=True)
class LayerGeometry:
    """Derived per-layer geometry: channels in/out and output spatial size."""

    layer: LayerSpec
    in_channels: int
    out_channels: int
    in_height: int
    in_width: int
    out_height: int
    out_width: int


def _out_extent(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def layer_geometry(arch: ArchitectureSpec) -> list[LayerGeometry]:
    """Walk the stack and derive every layer's channel and spatial geometry.

    The classifier is preceded by an implicit global average pool, so its
    input is the previous layer's channel count at 1x1.
    """
    rows = []
    channels = arch.input_channels
    height, width = arch.input_height, arch.input_width
    for layer in arch.layers:
        if layer.kind == CLASSIFIER:
            rows.append(LayerGeometry(layer, channels, layer.filters, 1, 1, 1, 1))
            channels = layer.filters
            continue
        out_c = layer.output_channels(channels)
        if layer.kind == BLOCK:
            # spatial change happens at the block's single spatial conv
            k, s, p = layer.kernel, layer.stride, layer.padding
            out_h = _out_extent(height, k, s, p)
            out_w = _out_extent(width, k, s, p)
        else:
            out_h = _out_extent(height, layer.kernel, layer.stride, layer.padding)
            out_w = _out_extent(width, layer.kernel, layer.stride, layer.padding)
        rows.append(LayerGeometry(layer, channels, out_c, height, width, out_h, out_w))
        channels, height, width = out_c, out_h, out_w
    return rows


def validate(arch: ArchitectureSpec) -> None:
    """Check every architecture invariant; raise ArchValidationError on the first violation."""
    if arch.input_height < 1 or arch.input_width < 1 or arch.input_channels < 1:
        raise ArchValidationError("input dimensions must all be >= 1")
    if arch.num_classes < 1:
        raise ArchValidationError("num_classes must be >= 1")
    if not arch.layers:
        raise ArchValidationError("architecture must contain at least one layer")
    if arch.layers[-1].kind != CLASSIFIER:
        raise ArchValidationError("classifier must be final layer")
    if sum(1 for l in arch.layers if l.kind == CLASSIFIER) != 1:
        raise ArchValidationError("exactly one classifier layer is allowed")
    for pos, layer in enumerate(arch.layers, 1):
        if layer.id != pos:
            raise ArchValidationError(
                f"layer ids must be consecutive starting at 1 (layer at position {pos} has id {layer.id})"
            )
        _validate_layer(layer, arch.num_classes)
    for geo in layer_geometry(arch):
        if geo.out_height < 1 or geo.out_width < 1:
            raise ArchValidationError(
                f"spatial size collapses below 1x1 at layer {geo.layer.id}"
            )


def _validate_layer(layer: LayerSpec, num_classes: int) -> None:
    lid = layer.id
    if layer.kind not in LAYER_KINDS:
        raise ArchValidationError(f"layer {lid}: unknown kind {layer.kind!r}")
    if layer.kind == POOL:
        if layer.filters is not None:
            raise ArchValidationError(f"layer {lid}: pool layers must not carry filters")
    else:
        if layer.filters is None or layer.filters < 1:
            raise ArchValidationError(f"layer {lid}: filters must be >= 1 for {layer.kind} layers")
    if layer.kind == CLASSIFIER:
        if layer.filters != num_classes:
            raise ArchValidationError(
                f"layer {lid}: classifier filters must equal num_classes ({num_classes})"
            )
        for field in ("kernel", "stride", "padding", "block_internal_layers", "block_expansion"):
            if getattr(layer, field) is not None:
                raise ArchValidationError(f"layer {lid}: classifier must not carry {field}")
        return
    if layer.kernel is None or layer.kernel < 1:
        raise ArchValidationError(f"layer {lid}: kernel must be >= 1 for {layer.kind} layers")
    if layer.stride is None or layer.stride < 1:
        raise ArchValidationError(f"layer {lid}: stride must be >= 1")
    if layer.padding is None or layer.padding < 0:
        raise ArchValidationError(f"layer {lid}: padding must be >= 0")
    if layer.kind == BLOCK:
        if layer.block_internal_layers is None or layer.block_internal_layers < 1:
            raise ArchValidationError(f"layer {lid}: block_internal_layers must be >= 1")
        if layer.block_expansion is None or layer.block_expansion <= 0:
            raise ArchValidationError(f"layer {lid}: block_expansion must be positive")
        if (layer.filters * layer.block_expansion).denominator != 1:
            raise ArchValidationError(
                f"layer {lid}: block_expansion must yield an integer output width"
            )
    else:
        if layer.block_internal_layers is not None or layer.block_expansion is not None:
            raise ArchValidationError(
                f"layer {lid}: block fields are only valid on block layers"
            )


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

_TOP_FIELDS = {"name", "input", "num_classes", "batch_norm", "layers"}
_INPUT_FIELDS = {"height", "width", "channels"}
_LAYER_FIELDS = {
    "id", "kind", "filters", "kernel", "stride", "padding",
    "block_internal_layers", "block_expansion",
}


def _expect_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ArchSyntaxError(f"{what} must be an integer, got {value!r}")
    return value


def _expansion_from_json(value, what: str) -> Fraction:
    # accepts 4, 1.5 or "3/2"; stored exactly as a rational
    if isinstance(value, bool):
        raise ArchSyntaxError(f"{what} must be a number or 'p/q' string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ArchSyntaxError(f"{what}: {exc}") from exc
    raise ArchSyntaxError(f"{what} must be a number or 'p/q' string")


def _expansion_to_json(value: Fraction):
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def parse_architecture(text: str) -> ArchitectureSpec:
    """Parse and validate spec-file contents.

    Strict mode: unknown fields anywhere are a syntax error.  Defaults for
    absent layer fields: stride 1, padding kernel//2 for conv-like layers and
    0 for pools, block_expansion 1.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchSyntaxError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ArchSyntaxError("spec file must contain a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise ArchSyntaxError(f"unknown top-level fields: {sorted(unknown)}")
    for req in ("name", "input", "num_classes", "layers"):
        if req not in doc:
            raise ArchSyntaxError(f"missing required field {req!r}")
    if not isinstance(doc["name"], str):
        raise ArchSyntaxError("name must be a string")
    inp = doc["input"]
    if not isinstance(inp, dict):
        raise ArchSyntaxError("input must be an object")
    if set(inp) != _INPUT_FIELDS:
        raise ArchSyntaxError(
            f"input must have exactly fields height/width/channels, got {sorted(inp)}"
        )
    batch_norm = doc.get("batch_norm", False)
    if not isinstance(batch_norm, bool):
        raise ArchSyntaxError("batch_norm must be a boolean")
    if not isinstance(doc["layers"], list):
        raise ArchSyntaxError("layers must be an array")

    layers = []
    for i, obj in enumerate(doc["layers"]):
        if not isinstance(obj, dict):
            raise ArchSyntaxError(f"layer entry {i} must be an object")
        unknown = set(obj) - _LAYER_FIELDS
        if unknown:
            raise ArchSyntaxError(f"layer entry {i}: unknown fields {sorted(unknown)}")
        if "id" not in obj or "kind" not in obj:
            raise ArchSyntaxError(f"layer entry {i}: id and kind are required")
        kind = obj["kind"]
        if not isinstance(kind, str):
            raise ArchSyntaxError(f"layer entry {i}: kind must be a string")
        layers.append(_layer_from_json(obj, i, kind))

    arch = ArchitectureSpec(
        name=doc["name"],
        input_height=_expect_int(inp["height"], "input.height"),
        input_width=_expect_int(inp["width"], "input.width"),
        input_channels=_expect_int(inp["channels"], "input.channels"),
        num_classes=_expect_int(doc["num_classes"], "num_classes"),
        layers=tuple(layers),
        batch_norm=batch_norm,
    )
    validate(arch)
    return arch


def _layer_from_json(obj: dict, i: int, kind: str) -> LayerSpec:
    def opt_int(key):
        return _expect_int(obj[key], f"layer entry {i}: {key}") if key in obj else None

    kernel = opt_int("kernel")
    stride = opt_int("stride")
    padding = opt_int("padding")
    if kind in (CONV, DWCONV, POOL, BLOCK):
        if stride is None:
            stride = 1
        if padding is None and kernel is not None:
            padding = kernel // 2 if kind != POOL else 0
    expansion = None
    if "block_expansion" in obj:
        expansion = _expansion_from_json(obj["block_expansion"], f"layer entry {i}: block_expansion")
    elif kind == BLOCK:
        expansion = Fraction(1)
    return LayerSpec(
        id=_expect_int(obj["id"], f"layer entry {i}: id"),
        kind=kind,
        filters=opt_int("filters"),
        kernel=kernel,
        stride=stride,
        padding=padding,
        block_internal_layers=opt_int("block_internal_layers"),
        block_expansion=expansion,
    )


def serialize_architecture(arch: ArchitectureSpec) -> str:
    """Render a spec to deterministic JSON text; parse() of the result is identity."""
    doc: dict = {
        "name": arch.name,
        "input": {
            "height": arch.input_height,
            "width": arch.input_width,
            "channels": arch.input_channels,
        },
        "num_classes": arch.num_classes,
    }
    if arch.batch_norm:
        doc["batch_norm"] = True
    rows = []
    for layer in arch.layers:
        row: dict = {"id": layer.id, "kind": layer.kind}
        for key in ("filters", "kernel", "stride", "padding", "block_internal_layers"):
            value = getattr(layer, key)
            if value is not None:
                row[key] = value
        if layer.block_expansion is not None:
            row["block_expansion"] = _expansion_to_json(layer.block_expansion)
        rows.append(row)
    doc["layers"] = rows
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# filter plans
# ---------------------------------------------------------------------------

def extract_filter_plan(arch: ArchitectureSpec) -> FilterPlan:
    """List the redistributable units: conv, dwconv and block layers in order.

    Blocks count as a single unit with their nominal filter count; pools and
    the classifier never participate.
    """
    indices, counts = [], []
    for layer in arch.layers:
        if layer.kind in PLAN_KINDS:
            indices.append(layer.id)
            counts.append(layer.filters)
    if not indices:
        raise ArchValidationError("architecture has no redistributable units")
    return FilterPlan(
        unit_indices=tuple(indices),
        counts=tuple(counts),
        depth_D=len(counts),
        total_F=sum(counts),
    )


def apply_filter_plan(arch: ArchitectureSpec, new_counts: Sequence[int]) -> ArchitectureSpec:
    """Rebuild the architecture with the plan units set to ``new_counts``.

    Block layers keep their internal structure: every internal convolution
    takes the new count and the expansion still applies to the final one.
    The classifier is untouched and the result is re-validated.
    """
    plan = extract_filter_plan(arch)
    counts = list(new_counts)
    if len(counts) != plan.depth_D:
        raise ArchValidationError(
            f"expected {plan.depth_D} counts, got {len(counts)}"
        )
    for c in counts:
        if not isinstance(c, int) or isinstance(c, bool) or c < 1:
            raise ArchValidationError(f"filter counts must be integers >= 1, got {c!r}")
    by_id = dict(zip(plan.unit_indices, counts))
    layers = tuple(
        replace(layer, filters=by_id[layer.id]) if layer.id in by_id else layer
        for layer in arch.layers
    )
    out = replace(arch, layers=layers)
    validate(out)
    return out
