"""Analytical parameter, multiply-accumulate and activation-memory model.

Counts are exact integers derived from layer geometry alone; nothing here
touches weights or frameworks.  Conventions:

* convolutions and the classifier carry a bias term; batch-norm affine
  parameters (2 per channel) are counted only when the architecture enables
  batch_norm
* figures are multiply-accumulates (MACs), not "FLOPs": one MAC is one
  multiply plus one add, so FLOPs ~= 2x MACs
* pooling, activation functions and residual additions cost 0 MACs
* activation memory is the analytical feature-map footprint at a given batch
  size; the peak is estimated as the largest input+output pair of any single
  layer, which ignores longer skip lifetimes
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .archspec import (
    BLOCK,
    CLASSIFIER,
    CONV,
    DWCONV,
    ArchitectureSpec,
    FilterDistError,
    LayerGeometry,
    layer_geometry,
)
from .templates import TemplateId, apply_template

BYTES_PER_ELEMENT = 4


@dataclass(frozen=True, slots=True)
class LayerCost:
    layer_id: int
    kind: str
    in_channels: int
    out_channels: int
    out_height: int
    out_width: int
    params: int
    macs: int
    activation_elements: int


@dataclass(frozen=True, slots=True)
class CostReport:
    name: str
    batch: int
    rows: tuple[LayerCost, ...]
    total_params: int
    total_macs: int
    activation_elements_total: int
    activation_elements_peak: int  # largest single layer; activation_memory peaks over pairs
    param_bytes: int
    activation_bytes_per_sample: int


def _affine(width: int, batch_norm: bool) -> int:
    # bias, plus batch-norm scale and shift when enabled
    return width + (2 * width if batch_norm else 0)


def _block_parts(geo: LayerGeometry, batch_norm: bool) -> tuple[int, list[tuple[int, int, int]]]:
    """(params, [(out_h, out_w, macs_per_sample)...]) of a block's internal chain."""
    layer = geo.layer
    params = 0
    macs = []
    prev = geo.in_channels
    h, w = geo.in_height, geo.in_width
    mid = (layer.block_internal_layers + 1) // 2
    for j, (kernel, width, stride) in enumerate(layer.internal_widths(), 1):
        pad = layer.padding if j == mid else kernel // 2
        oh = (h + 2 * pad - kernel) // stride + 1
        ow = (w + 2 * pad - kernel) // stride + 1
        params += kernel * kernel * prev * width + _affine(width, batch_norm)
        macs.append((oh, ow, oh * ow * kernel * kernel * prev * width))
        prev, h, w = width, oh, ow
    if geo.in_channels != geo.out_channels:
        # 1x1 projection shortcut carries the residual to the new width
        params += geo.in_channels * geo.out_channels + _affine(geo.out_channels, batch_norm)
        macs.append((geo.out_height, geo.out_width,
                     geo.out_height * geo.out_width * geo.in_channels * geo.out_channels))
    return params, macs


def _layer_cost(geo: LayerGeometry, batch: int, batch_norm: bool) -> LayerCost:
    layer = geo.layer
    params = 0
    macs_per_sample = 0
    if layer.kind == CONV:
        k = layer.kernel
        params = k * k * geo.in_channels * geo.out_channels + _affine(geo.out_channels, batch_norm)
        macs_per_sample = geo.out_height * geo.out_width * k * k * geo.in_channels * geo.out_channels
    elif layer.kind == DWCONV:
        # per-channel kernels only; no cross-channel mixing
        k = layer.kernel
        params = k * k * geo.out_channels + _affine(geo.out_channels, batch_norm)
        macs_per_sample = geo.out_height * geo.out_width * k * k * geo.out_channels
    elif layer.kind == BLOCK:
        params, parts = _block_parts(geo, batch_norm)
        macs_per_sample = sum(m for _, _, m in parts)
    elif layer.kind == CLASSIFIER:
        params = geo.in_channels * geo.out_channels + geo.out_channels
        macs_per_sample = geo.in_channels * geo.out_channels
    # POOL: zero params, zero MACs by convention
    activation = geo.out_height * geo.out_width * geo.out_channels * batch
    return LayerCost(
        layer_id=layer.id,
        kind=layer.kind,
        in_channels=geo.in_channels,
        out_channels=geo.out_channels,
        out_height=geo.out_height,
        out_width=geo.out_width,
        params=params,
        macs=macs_per_sample * batch,
        activation_elements=activation,
    )


def count_parameters(arch: ArchitectureSpec) -> int:
    geos = layer_geometry(arch)
    return sum(_layer_cost(g, 1, arch.batch_norm).params for g in geos)


def count_macs(arch: ArchitectureSpec, batch: int) -> int:
    if batch < 1:
        raise FilterDistError("batch must be >= 1")
    geos = layer_geometry(arch)
    return sum(_layer_cost(g, batch, arch.batch_norm).macs for g in geos)


def activation_memory(arch: ArchitectureSpec, batch: int,
                      bytes_per_element: int = BYTES_PER_ELEMENT) -> tuple[int, int]:
    """(total bytes over all layers, peak bytes) at the given batch size.

    Peak takes the largest consecutive input+output pair, the input image
    counting as the first producer.
    """
    if batch < 1:
        raise FilterDistError("batch must be >= 1")
    geos = layer_geometry(arch)
    sizes = [arch.input_height * arch.input_width * arch.input_channels * batch]
    sizes += [g.out_height * g.out_width * g.out_channels * batch for g in geos]
    total = sum(sizes[1:])
    peak = max(sizes[i] + sizes[i + 1] for i in range(len(sizes) - 1))
    return total * bytes_per_element, peak * bytes_per_element


def cost_report(arch: ArchitectureSpec, batch: int) -> CostReport:
    """Per-layer cost rows plus exact totals for one architecture."""
    if batch < 1:
        raise FilterDistError("batch must be >= 1")
    geos = layer_geometry(arch)
    rows = tuple(_layer_cost(g, batch, arch.batch_norm) for g in geos)
    total_params = sum(r.params for r in rows)
    total_macs = sum(r.macs for r in rows)
    act_total = sum(r.activation_elements for r in rows)
    act_peak = max(r.activation_elements for r in rows)
    return CostReport(
        name=arch.name,
        batch=batch,
        rows=rows,
        total_params=total_params,
        total_macs=total_macs,
        activation_elements_total=act_total,
        activation_elements_peak=act_peak,
        param_bytes=total_params * BYTES_PER_ELEMENT,
        activation_bytes_per_sample=act_total // batch * BYTES_PER_ELEMENT,
    )


@dataclass(frozen=True, slots=True)
class TemplateComparison:
    template: TemplateId
    params: int | None
    macs: int | None
    activation_total_bytes: int | None
    activation_peak_bytes: int | None
    params_delta_pct: float | None
    macs_delta_pct: float | None
    error: str | None = None


def compare_templates(arch: ArchitectureSpec, templates: Sequence[TemplateId],
                      batch: int) -> list[TemplateComparison]:
    """One comparison row per template, base always first, deltas vs base.

    A template that fails on this architecture annotates its row instead of
    aborting the whole table.
    """
    ordered = [TemplateId.BASE] + [t for t in templates if t is not TemplateId.BASE]
    base_report = cost_report(arch, batch)
    base_act_total, base_act_peak = activation_memory(arch, batch)
    rows = []
    for template in ordered:
        try:
            variant = apply_template(arch, template)
        except FilterDistError as exc:
            rows.append(TemplateComparison(template, None, None, None, None,
                                           None, None, error=str(exc)))
            continue
        params = count_parameters(variant)
        macs = count_macs(variant, batch)
        act_total, act_peak = activation_memory(variant, batch)
        rows.append(TemplateComparison(
            template=template,
            params=params,
            macs=macs,
            activation_total_bytes=act_total,
            activation_peak_bytes=act_peak,
            params_delta_pct=100.0 * (params - base_report.total_params) / base_report.total_params,
            macs_delta_pct=100.0 * (macs - base_report.total_macs) / base_report.total_macs,
        ))
    return rows


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

COMPARISON_CSV_HEADER = ("template,params,macs,activation_total_bytes,"
                         "activation_peak_bytes,params_delta_pct,macs_delta_pct")

REPORT_CSV_HEADER = ("layer_id,kind,in_channels,out_channels,out_height,out_width,"
                     "params,macs,activation_elements")

MAC_NOTE = "MACs are multiply-accumulates; FLOPs ~= 2x MACs"


def render_report_text(report: CostReport) -> str:
    lines = [
        f"architecture: {report.name}   batch: {report.batch}",
        MAC_NOTE,
        "",
        f"{'id':>4} {'kind':<10} {'in':>6} {'out':>6} {'HxW':>9} "
        f"{'params':>12} {'macs':>16} {'act_elems':>12}",
    ]
    for r in report.rows:
        lines.append(
            f"{r.layer_id:>4} {r.kind:<10} {r.in_channels:>6} {r.out_channels:>6} "
            f"{r.out_height:>4}x{r.out_width:<4} {r.params:>12} {r.macs:>16} "
            f"{r.activation_elements:>12}"
        )
    lines += [
        "",
        f"total params:            {report.total_params}  ({report.param_bytes} bytes)",
        f"total macs:              {report.total_macs}",
        f"activation elements:     {report.activation_elements_total}  "
        f"(largest single layer {report.activation_elements_peak})",
        f"activation bytes/sample: {report.activation_bytes_per_sample}",
    ]
    return "\n".join(lines) + "\n"


def render_report_csv(report: CostReport) -> str:
    lines = [REPORT_CSV_HEADER]
    for r in report.rows:
        lines.append(
            f"{r.layer_id},{r.kind},{r.in_channels},{r.out_channels},"
            f"{r.out_height},{r.out_width},{r.params},{r.macs},{r.activation_elements}"
        )
    lines.append(
        f"total,,,,,,{report.total_params},{report.total_macs},{report.activation_elements_total}"
    )
    return "\n".join(lines) + "\n"


def report_as_dict(report: CostReport) -> dict:
    return {
        "name": report.name,
        "batch": report.batch,
        "mac_convention": MAC_NOTE,
        "total_params": report.total_params,
        "total_macs": report.total_macs,
        "activation_elements_total": report.activation_elements_total,
        "activation_elements_peak": report.activation_elements_peak,
        "param_bytes": report.param_bytes,
        "activation_bytes_per_sample": report.activation_bytes_per_sample,
        "rows": [
            {
                "layer_id": r.layer_id,
                "kind": r.kind,
                "in_channels": r.in_channels,
                "out_channels": r.out_channels,
                "out_height": r.out_height,
                "out_width": r.out_width,
                "params": r.params,
                "macs": r.macs,
                "activation_elements": r.activation_elements,
            }
            for r in report.rows
        ],
    }


def render_comparison_text(rows: Sequence[TemplateComparison]) -> str:
    lines = [
        MAC_NOTE,
        f"{'template':<20} {'params':>12} {'macs':>16} {'act_total_B':>14} "
        f"{'act_peak_B':>13} {'params_d%':>10} {'macs_d%':>10}",
    ]
    for r in rows:
        if r.error is not None:
            lines.append(f"{r.template.token:<20} error: {r.error}")
            continue
        lines.append(
            f"{r.template.token:<20} {r.params:>12} {r.macs:>16} "
            f"{r.activation_total_bytes:>14} {r.activation_peak_bytes:>13} "
            f"{r.params_delta_pct:>+10.2f} {r.macs_delta_pct:>+10.2f}"
        )
    return "\n".join(lines) + "\n"


def render_comparison_csv(rows: Sequence[TemplateComparison]) -> str:
    lines = [COMPARISON_CSV_HEADER]
    for r in rows:
        if r.error is not None:
            lines.append(f"{r.template.token},,,,,,")
            continue
        lines.append(
            f"{r.template.token},{r.params},{r.macs},{r.activation_total_bytes},"
            f"{r.activation_peak_bytes},{r.params_delta_pct:.4f},{r.macs_delta_pct:.4f}"
        )
    return "\n".join(lines) + "\n"
