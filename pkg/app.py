"""Command-line front end for functional variable selection.

Subcommands:
1. select   - tune (α, β) on a training split and select predictors on user data
2. tune     - write the full cross-validation surface for user data
3. simulate - Monte Carlo study on the built-in examples (or export one sample)

Exit status: 0 success, 1 unexpected error, 2 usage / parse / argument errors,
3 numerical failures, 4 file system errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import orjson
import pandas as pd
import yaml
from dotenv import load_dotenv

from src.functional import FunctionalDataset
from src.selection import (
    ArgumentError,
    CrossValidator,
    NumericalError,
    SelectionError,
    make_folds,
    run_pipeline,
    search_grid,
)
from src.selection.config_loader import (
    basis_templates,
    load_selection_config,
    load_simulation_config,
    pipeline_config_from_dict,
    resolve_workers,
)
from src.simulation import (
    Example,
    ScenarioSpec,
    decimals_for,
    format_metrics_table,
    generate,
    markdown_summary,
    metrics_table,
    pipeline_config_for,
    run_grid,
)
from src.utils.data_parsers import read_dataset, write_dataset

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_FAILURE = 1

SAMPLE_HINT = "python app.py simulate --example ex2 --export-sample data/sample"

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY

logger = logging.getLogger("mflr")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(payload, option=JSON_OPTIONS) + b"\n")
    return path


def _flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "basis", None) is not None:
        overrides["basis"] = {"family": args.basis}
    if getattr(args, "dmax", None) is not None:
        overrides["d_max"] = args.dmax
    if getattr(args, "folds", None) is not None:
        overrides["folds"] = args.folds
    return overrides


def _load_user_data(config_path: Path, config: Dict[str, Any]) -> FunctionalDataset:
    """Read the ``data`` section; relative paths resolve against the config file."""
    data = config.get("data")
    if not isinstance(data, dict) or "curves" not in data or "responses" not in data:
        raise ArgumentError(f"{config_path}: config needs data.curves and data.responses")
    base = config_path.parent
    curves = [base / str(p) for p in data["curves"]]
    responses = base / str(data["responses"])
    missing = [path for path in [*curves, responses] if not path.exists()]
    if missing:
        raise ArgumentError(
            f"{config_path}: data file not found: {missing[0]} "
            f"(the bundled config expects a sample written by `{SAMPLE_HINT}`)"
        )
    dataset = read_dataset(curves, responses, data.get("intervals"))
    expected_p = data.get("p")
    if expected_p is not None and int(expected_p) != dataset.p:
        raise ArgumentError(f"config declares p={expected_p} but {dataset.p} curve files were given")
    return dataset


def _require_config(args: argparse.Namespace) -> Path:
    if args.config is None:
        raise ArgumentError(f"`{args.command}` needs --config PATH")
    path = Path(args.config)
    if not path.exists():
        raise ArgumentError(f"config file not found: {path}")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_select(args: argparse.Namespace) -> int:
    config_path = _require_config(args)
    config = load_selection_config(config_path, _flag_overrides(args))
    dataset = _load_user_data(config_path, config)
    templates = basis_templates(config, dataset.intervals)
    pipeline = pipeline_config_from_dict(config)

    print(f"🔍 Selecting among {dataset.p} predictors (n={dataset.n}, q={dataset.q})")
    result = run_pipeline(dataset, templates, config=pipeline)

    report = result.to_dict()
    report["n"] = dataset.n
    report["p"] = dataset.p
    report["q"] = dataset.q
    report["basis"] = [t.family.value for t in templates]
    out = _write_json(Path(args.out) / "selection_report.json", report)
    print(f"   ✅ Selected {sorted(result.selected)} (alpha={result.alpha:g}, beta={result.beta:g})")
    print(f"   Report: {out}")
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    config_path = _require_config(args)
    config = load_selection_config(config_path, _flag_overrides(args))
    dataset = _load_user_data(config_path, config)
    templates = basis_templates(config, dataset.intervals)
    pipeline = pipeline_config_from_dict(config)

    print(f"🎯 Cross-validating {len(pipeline.grid)} tuning pairs on n={dataset.n}")
    folds = make_folds(dataset.n, pipeline.folds, pipeline.seed)
    validator = CrossValidator(
        dataset,
        folds,
        pipeline.selection,
        templates=templates,
        d_max=pipeline.d_max,
        variant=pipeline.cv_variant,
        center=pipeline.center_msep,
    )
    surface = search_grid(validator, pipeline.grid, max_workers=pipeline.max_workers)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    surface.to_frame().to_csv(out_dir / "cv_surface.csv", index=False)
    _write_json(
        out_dir / "tuning_summary.json",
        {
            "alpha_hat": surface.alpha_hat,
            "beta_hat": surface.beta_hat,
            "cv_min": surface.cv_min,
            "rows": len(surface.evaluations),
            "failures": surface.failures,
        },
    )
    print(f"   ✅ argmin alpha={surface.alpha_hat:g}, beta={surface.beta_hat:g} (CV {surface.cv_min:.6g})")
    return EXIT_OK


def _export_sample(config: Dict[str, Any], example: Example, directory: Path) -> int:
    scenario = ScenarioSpec(
        example,
        int(config["n"][0]),
        float(config["sigma"][0]),
        seed=int(config["seed"]),
        grid_points=int(config["grid_points"]),
    )
    sample = generate(scenario)
    data = write_dataset(directory, sample.dataset)
    d_max = int(config["examples"].get(example.value, {}).get("d_max", config["d_max"]))
    selection_config = {
        "data": data,
        "basis": dict(config["basis"]),
        "d_max": d_max,
        "folds": int(config["folds"]),
        "seed": int(config["seed"]),
    }
    with (directory / "selection.yaml").open("w", encoding="utf-8") as handle:
        yaml.safe_dump(selection_config, handle, sort_keys=True)
    print(f"📊 Exported {example.value} sample (n={scenario.n}) to {directory}")
    print(f"   True set: {sample.true_set}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    overrides = _flag_overrides(args)
    if args.basis is not None:
        overrides["bases"] = [args.basis]
    if args.example is not None:
        overrides["example"] = args.example
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.n is not None:
        overrides["n"] = args.n
    if args.sigma is not None:
        overrides["sigma"] = args.sigma
    config = load_simulation_config(args.config, overrides)

    try:
        example = Example(str(config["example"]).lower())
    except ValueError:
        raise ArgumentError(f"unknown example {config['example']!r}") from None
    if args.dmax is not None:
        config["examples"] = {**config["examples"], example.value: {"d_max": args.dmax}}

    if args.export_sample is not None:
        sample_config = {**config, "basis": {**config["basis"], "family": str(config["bases"][0])}}
        return _export_sample(sample_config, example, Path(args.export_sample))

    base = pipeline_config_from_dict(config)
    pipeline = pipeline_config_for(example, base, config["examples"])
    replications = int(config["replications"])
    if replications < 1:
        raise ArgumentError(f"--replications must be >= 1, got {replications}")

    results = run_grid(
        example,
        [int(n) for n in config["n"]],
        [float(s) for s in config["sigma"]],
        [str(b) for b in config["bases"]],
        replications,
        seed=int(config["seed"]),
        grid_points=int(config["grid_points"]),
        config=pipeline,
        max_workers=resolve_workers(config),
        verbose=True,
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = metrics_table(results)
    decimals = decimals_for(example.value)
    format_metrics_table(table, decimals).to_csv(out_dir / "metrics.csv", index=False)
    msep_frames = [r.msep_frame() for r in results]
    _concat(msep_frames).to_csv(out_dir / "msep.csv", index=False)
    replication_frames = []
    for r in results:
        frame = r.replications_frame()
        frame.insert(0, "basis", r.basis)
        frame.insert(0, "sigma", r.scenario.sigma)
        frame.insert(0, "n", r.scenario.n)
        replication_frames.append(frame)
    _concat(replication_frames).to_csv(out_dir / "replications.csv", index=False)
    (out_dir / "summary.md").write_text(
        markdown_summary(table, f"Example {example.value[-1]}", decimals), encoding="utf-8"
    )
    failures = sum(len(r.failures) for r in results)
    print(f"\n✅ Study complete: {len(results)} cells, {failures} failed replications")
    print(f"   Outputs in {out_dir}")
    return EXIT_OK


def _concat(frames: List[pd.DataFrame]) -> pd.DataFrame:
    return pd.concat(frames, ignore_index=True)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mflr", description="Variable selection for functional linear regression")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at INFO level")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser, config_required: bool) -> None:
        sub.add_argument("--config", required=config_required, help="YAML config file")
        sub.add_argument("--seed", type=int, help="base seed (overrides config)")
        sub.add_argument("--basis", choices=["fourier", "bspline", "gaussian"], help="basis family for every predictor")
        sub.add_argument("--dmax", type=int, help="largest basis dimension scanned by BIC")
        sub.add_argument("--folds", type=int, help="number of CV folds")
        sub.add_argument("--out", default="outputs", help="output directory")

    common(commands.add_parser("select", help="select predictors on user data"), True)
    common(commands.add_parser("tune", help="write the CV surface for user data"), True)

    simulate = commands.add_parser("simulate", help="Monte Carlo study on a built-in example")
    common(simulate, False)
    simulate.add_argument("--example", choices=[e.value for e in Example], help="ex1, ex2 or ex3")
    simulate.add_argument("--replications", type=int, help="replications per cell")
    simulate.add_argument("--n", type=int, nargs="+", help="sample sizes")
    simulate.add_argument("--sigma", type=float, nargs="+", help="noise levels")
    simulate.add_argument("--export-sample", metavar="DIR", help="write one generated sample and exit")
    return parser


COMMANDS = {"select": cmd_select, "tune": cmd_tune, "simulate": cmd_simulate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ArgumentError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, SelectionError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"❌ cannot read or write {exc.filename or 'a file'}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - last resort, keep the traceback in the log
        logger.exception("unexpected failure in `%s`", args.command)
        print(f"❌ unexpected error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
