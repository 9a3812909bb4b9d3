import json

import pytest

from spectrain.specio import (
    HarnessError,
    apply_template_file,
    load_spec,
    report_params,
    scale_widths,
)


def test_load_spec_fields(specs):
    spec = load_spec(specs["base"])
    assert spec.name == "vgg19-cifar10"
    assert spec.input_size == (32, 32, 3)
    assert spec.num_classes == 10
    assert spec.batch_norm is True
    convs = [l for l in spec.layers if l.kind == "conv"]
    assert len(convs) == 16
    assert convs[0].stride == 1 and convs[0].padding == 1


def test_scale_widths(specs, tmp_path):
    out = tmp_path / "w4.json"
    scale_widths(specs["base"], out, 4)
    doc = json.loads(out.read_text())
    convs = [l["filters"] for l in doc["layers"] if l["kind"] == "conv"]
    assert convs == [16, 16, 32, 32, 64, 64, 64, 64] + [128] * 8
    classifier = [l for l in doc["layers"] if l["kind"] == "classifier"]
    assert classifier[0]["filters"] == 10  # untouched
    load_spec(out)  # still parses


def test_scale_widths_clamps_to_one(toy_spec, tmp_path):
    out = tmp_path / "w999.json"
    scale_widths(toy_spec, out, 999)
    doc = json.loads(out.read_text())
    assert doc["layers"][0]["filters"] == 1


def test_apply_and_report_via_cli(specs, tmp_path):
    out = tmp_path / "uniform.json"
    apply_template_file(specs["base"], "uniform", out)
    doc = json.loads(out.read_text())
    assert all(l["filters"] == 344 for l in doc["layers"] if l["kind"] == "conv")
    assert report_params(out) == 16004610


def test_primary_errors_are_wrapped(specs, tmp_path):
    with pytest.raises(HarnessError, match="filterdist"):
        apply_template_file(specs["base"], "not-a-template", tmp_path / "x.json")
