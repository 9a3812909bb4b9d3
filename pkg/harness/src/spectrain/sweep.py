"""Run one training job per template over a base spec and collect a CSV.

Templates are materialized through the primary CLI (`filterdist apply`),
parameter counts come from `filterdist report`, and the base row always
leads.  A failed run records an empty accuracy instead of aborting the
sweep.  Runs execute sequentially by default; --jobs N opts into process
parallelism with per-template seeds derived from the base seed."""

from __future__ import annotations

import dataclasses
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .data import load_dataset
from .specio import apply_template_file, report_params
from .train import RunResult, TrainRunConfig, train_and_eval

ALL_TEMPLATES = ("base", "reverse", "uniform", "quadratic", "negative-quadratic")

CSV_HEADER = "template,accuracy,params,seed"


def _ordered(templates: Sequence[str]) -> list[str]:
    out = ["base"]
    out += [t for t in templates if t != "base"]
    return out


def _one_run(args) -> RunResult:
    template, spec_path, config = args
    data = load_dataset(config.dataset, config.train_size, config.val_size,
                        config.data_dir)
    try:
        result = train_and_eval(config, data=data, template=template)
    except Exception as exc:  # record, never abort the sweep
        return RunResult(template, None, report_params(spec_path),
                         config.epochs, config.seed, error=str(exc))
    # cross-check against the primary's analytical count
    reported = report_params(spec_path)
    if reported != result.params:
        result = dataclasses.replace(
            result,
            error=f"param mismatch: model {result.params} vs report {reported}",
        )
    return dataclasses.replace(result, params=reported)


def sweep_templates(base_spec: str | Path, templates: Sequence[str],
                    config: TrainRunConfig, out_csv: str | Path | None = None,
                    jobs: int = 1) -> list[RunResult]:
    workdir = Path(tempfile.mkdtemp(prefix="spectrain_"))
    tasks = []
    for i, template in enumerate(_ordered(templates)):
        spec_path = workdir / f"{template}.json"
        apply_template_file(base_spec, template, spec_path)
        run_config = dataclasses.replace(
            config,
            spec_path=str(spec_path),
            seed=config.seed if jobs <= 1 else config.seed + i,
        )
        tasks.append((template, str(spec_path), run_config))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_run, tasks))
    else:
        results = [_one_run(t) for t in tasks]

    if out_csv is not None:
        write_results_csv(results, out_csv)
    return results


def write_results_csv(results: Sequence[RunResult], path: str | Path) -> None:
    lines = [CSV_HEADER]
    for r in results:
        accuracy = "" if r.final_accuracy is None else f"{r.final_accuracy:.2f}"
        lines.append(f"{r.template},{accuracy},{r.params},{r.seed}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
