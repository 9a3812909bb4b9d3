"""Reading architecture spec files and talking to the filterdist CLI.

The harness consumes the primary component only through its external
interfaces: the JSON spec format and the command line.  This module holds
the thin JSON reader (files are produced by the primary, so parsing is
deliberately minimal), the width-scaling transform used to shrink models to
desk scale, and subprocess wrappers around `filterdist apply` and
`filterdist report`.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

PLAN_KINDS = ("conv", "dwconv", "block")


class HarnessError(Exception):
    pass


@dataclass
class SpecLayer:
    id: int
    kind: str
    filters: int | None
    kernel: int | None
    stride: int
    padding: int
    block_internal_layers: int | None
    block_expansion: Fraction


@dataclass
class Spec:
    name: str
    input_size: tuple[int, int, int]  # height, width, channels
    num_classes: int
    batch_norm: bool
    layers: list[SpecLayer]


def _expansion(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(str(value))


def load_spec(path: str | Path) -> Spec:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    layers = []
    for obj in doc["layers"]:
        kernel = obj.get("kernel")
        default_pad = 0 if obj["kind"] == "pool" else (kernel // 2 if kernel else 0)
        layers.append(SpecLayer(
            id=obj["id"],
            kind=obj["kind"],
            filters=obj.get("filters"),
            kernel=kernel,
            stride=obj.get("stride", 1),
            padding=obj.get("padding", default_pad),
            block_internal_layers=obj.get("block_internal_layers"),
            block_expansion=_expansion(obj.get("block_expansion", 1)),
        ))
    return Spec(
        name=doc["name"],
        input_size=(doc["input"]["height"], doc["input"]["width"], doc["input"]["channels"]),
        num_classes=doc["num_classes"],
        batch_norm=doc.get("batch_norm", False),
        layers=layers,
    )


def scale_widths(spec_path: str | Path, out_path: str | Path, divisor: int) -> None:
    """Divide every redistributable filter count by `divisor` (floor, min 1).

    Rewrites the JSON document field-for-field so the result stays a valid
    spec file; the classifier and pools are untouched.
    """
    if divisor < 1:
        raise HarnessError("divisor must be >= 1")
    doc = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    for obj in doc["layers"]:
        if obj["kind"] in PLAN_KINDS:
            obj["filters"] = max(1, obj["filters"] // divisor)
    doc["name"] = f"{doc['name']}-w{divisor}"
    Path(out_path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _primary_cmd() -> list[str]:
    exe = shutil.which("filterdist")
    if exe:
        return [exe]
    return [sys.executable, "-m", "filterdist.cli"]


def _run_primary(args: list[str]) -> subprocess.CompletedProcess:
    proc = subprocess.run(_primary_cmd() + args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise HarnessError(
            f"filterdist {' '.join(args)} failed ({proc.returncode}): {proc.stderr.strip()}"
        )
    return proc


def apply_template_file(spec_path: str | Path, template: str, out_path: str | Path) -> None:
    _run_primary(["apply", "--in", str(spec_path), "--template", template, "--out", str(out_path)])


def report_params(spec_path: str | Path) -> int:
    proc = _run_primary(["report", "--in", str(spec_path), "--batch", "1", "--format", "json"])
    return json.loads(proc.stdout)["total_params"]
