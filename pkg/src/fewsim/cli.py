"""Command line interface: simulate, export, fit-fmlm, serve, validate-dataset."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import fmlm as fm
from . import indices as ix
from . import middleware as mw
from .dataset import DatasetError, bundled_dataset_path, load_dataset


def _data_dir(args) -> Path:
    if args.data_dir:
        return Path(args.data_dir)
    return Path(os.environ.get("FEWSIM_DATA_DIR", "fewsim_data"))


def _parse_adjust(spec: str) -> mw.VariableAdjustment:
    parts = spec.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"adjustment {spec!r} must be key:lower:upper:step")
    key, lo, hi, step = parts
    return mw.VariableAdjustment(key, float(lo), float(hi), float(step))


def cmd_simulate(args) -> int:
    dataset = load_dataset(args.dataset)
    store = mw.CaseStore(_data_dir(args))
    manager = mw.JobManager(dataset, store, workers=args.workers)
    config = mw.CaseConfig(args.case, args.climate, args.adjust or [])
    record = manager.submit_case(config)
    print(f"case {args.case}: {record.total} scenarios queued")
    record = manager.wait(args.case, timeout=args.timeout)
    manager.shutdown()
    print(f"case {args.case}: {record.status} ({record.completed}/{record.total})")
    if record.status != "finished":
        if record.failed_scenario:
            print(f"failed scenario: {record.failed_scenario}: {record.error}",
                  file=sys.stderr)
        return 1
    return 0


def cmd_export(args) -> int:
    dataset = load_dataset(args.dataset)
    store = mw.CaseStore(_data_dir(args))
    if args.indices:
        man = store.read_manifest(args.case)
        years = ([args.year] if args.year
                 else list(dataset.horizon.years))
        vectors = []
        for name in man["scenarios"]:
            if not store.has_result(args.case, name):
                continue
            result = store.read_result(args.case, name)
            for year in years:
                vectors.append(ix.compute_indices(result, dataset, year))
        ix.export_indices_csv(vectors, args.out)
    else:
        mw.export_results_csv(store, args.case, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_fit_fmlm(args) -> int:
    dataset = load_dataset(args.dataset)
    crops = dataset.crop_names()
    ordered = [dataset.fmlm_base_crop] + [c for c in crops if c != dataset.fmlm_base_crop]
    predictors = fm.predictor_names(crops)
    panel_path = args.panel or (dataset.path / dataset.fmlm_panel_file)
    panel = fm.load_panel(panel_path, ordered, predictors)
    fit = fm.fmlm_fit(panel, ordered, predictors, max_iter=args.max_iter)
    fm.save_coefficients(fit.coefficients, args.out)
    status = "converged" if fit.converged else "NOT converged"
    print(f"fit {status}: loglik={fit.loglik:.4f} grad_norm={fit.grad_norm:.2e} "
          f"iterations={fit.iterations}")
    if fit.degenerate_crops:
        print(f"degenerate crops: {', '.join(fit.degenerate_crops)}", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .gateway import create_app
    dataset = load_dataset(args.dataset)
    store = mw.CaseStore(_data_dir(args))
    manager = mw.JobManager(dataset, store, workers=args.workers)
    app = create_app(dataset, manager, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_validate_dataset(args) -> int:
    try:
        dataset = load_dataset(args.path)
    except DatasetError as exc:
        print(f"invalid dataset: {exc}", file=sys.stderr)
        return 1
    print(f"dataset {dataset.name!r} is valid: "
          f"{len(dataset.water.sources)} sources, {len(dataset.districts)} districts, "
          f"{len(dataset.crops)} crops, {len(dataset.plants.plants)} plants")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fewsim")
    sub = parser.add_subparsers(dest="command", required=True)
    default_ds = str(bundled_dataset_path())

    p = sub.add_parser("simulate", help="run a scenario case headless")
    p.add_argument("--case", required=True)
    p.add_argument("--climate", required=True)
    p.add_argument("--adjust", action="append", type=_parse_adjust,
                   metavar="KEY:LOWER:UPPER:STEP")
    p.add_argument("--dataset", default=default_ds)
    p.add_argument("--data-dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--timeout", type=float, default=600.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="export results or indices to CSV")
    p.add_argument("--case", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--indices", action="store_true")
    p.add_argument("--year", type=int)
    p.add_argument("--dataset", default=default_ds)
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("fit-fmlm", help="fit crop-share coefficients from a panel")
    p.add_argument("--panel")
    p.add_argument("--out", required=True)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--dataset", default=default_ds)
    p.set_defaults(func=cmd_fit_fmlm)

    p = sub.add_parser("serve", help="run the REST gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--dataset", default=default_ds)
    p.add_argument("--data-dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--static", default=None,
                   help="directory with the built web UI bundle")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate-dataset", help="validate a dataset directory")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate_dataset)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, mw.MiddlewareError, fm.FmlmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
