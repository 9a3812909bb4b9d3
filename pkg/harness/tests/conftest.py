import json
import subprocess

import pytest

from spectrain.specio import _primary_cmd, scale_widths


@pytest.fixture(scope="session")
def specs(tmp_path_factory):
    """Zoo VGG-19 spec plus its width/8 toy-scale variant, via the primary CLI."""
    work = tmp_path_factory.mktemp("specs")
    base = work / "vgg19.json"
    subprocess.run(
        _primary_cmd() + ["zoo", "--model", "vgg19", "--dataset", "cifar10",
                          "--out", str(base)],
        check=True,
    )
    scaled = work / "vgg19_w8.json"
    scale_widths(base, scaled, 8)
    return {"base": base, "scaled": scaled, "dir": work}


@pytest.fixture(scope="session")
def toy_spec(tmp_path_factory):
    path = tmp_path_factory.mktemp("toy") / "toy.json"
    path.write_text(json.dumps({
        "name": "toy",
        "input": {"height": 32, "width": 32, "channels": 3},
        "num_classes": 10,
        "layers": [
            {"id": 1, "kind": "conv", "filters": 8, "kernel": 3},
            {"id": 2, "kind": "classifier", "filters": 10},
        ],
    }))
    return path
