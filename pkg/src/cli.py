"""Command line entry point: run, sweep, report, schema"""
import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import argparse
import json
from pathlib import Path
from typing import List, Optional

import pandas as pd
from loguru import logger

import config
from analytics.metrics import aggregate, trend_correlation
from analytics.reporting import build_report, plot_sweep
from database.connection import open_session
from errors import ConfigError, SimulationAbort
from experiments.runner import RunRecord, run_experiment, write_outputs
from experiments.spec import ExperimentSpec, load_spec, with_override, with_overrides
from services.run_history import RunHistoryService

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3


def parse_seeds(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(s) for s in text.split(',') if s.strip()]
    except ValueError as e:
        raise ConfigError(f"seeds must be comma-separated integers, got '{text}'") from e


def parse_values(text: str) -> list:
    """Comma-separated JSON scalars: 1,2,3 or 0.5,1.1"""
    values = []
    for piece in text.split(','):
        piece = piece.strip()
        if not piece:
            continue
        try:
            values.append(json.loads(piece))
        except json.JSONDecodeError:
            values.append(piece)
    if not values:
        raise ConfigError("--values needs at least one value")
    return values


def store_runs(records: List[RunRecord], out_dir: Path):
    db = open_session(config.database_url(out_dir))
    try:
        RunHistoryService(db).record_runs(records)
    finally:
        db.close()


def run_command(args) -> int:
    spec = with_overrides(load_spec(args.config), parse_seeds(args.seeds), args.algorithm)
    out_dir = Path(args.out)
    logger.info(f"🚀 Running '{spec.name}' ({spec.algorithm}) over {len(spec.seeds)} seed(s)")
    records = run_experiment(spec, args.workers)
    write_outputs(records, out_dir)
    if not args.no_db:
        store_runs(records, out_dir)
    metrics = aggregate(records)
    logger.success(f"✅ Mean found {metrics.detections_mean[-1]:.2f}, "
                   f"mean RMSE {metrics.rmse_mean:.3f} m, all found in {metrics.all_found_fraction:.0%} of runs")
    return EXIT_OK


def sweep_command(args) -> int:
    base = with_overrides(load_spec(args.config), parse_seeds(args.seeds), args.algorithm)
    values = parse_values(args.values)
    specs = [with_override(base, args.param, value) for value in values]
    out_dir = Path(args.out)
    logger.info(f"🚀 Sweeping {args.param} over {values}")

    rows = []
    for value, spec in zip(values, specs):
        records = run_experiment(spec, args.workers)
        write_outputs(records, out_dir / f"{args.param}={value}")
        if not args.no_db:
            store_runs(records, out_dir)
        metrics = aggregate(records)
        rows.append({
            'value': value,
            'runs': metrics.runs,
            'rmse_mean': metrics.rmse_mean,
            'rmse_ci': metrics.rmse_half_width,
            'steps_to_all_found_mean': metrics.steps_to_all_found_mean,
            'steps_to_all_found_ci': metrics.steps_to_all_found_half_width,
            'all_found_fraction': metrics.all_found_fraction,
        })

    sweep = pd.DataFrame(rows)
    numeric = all(isinstance(v, (int, float)) for v in values)
    if numeric:
        sweep['rmse_spearman'], _ = trend_correlation(values, sweep['rmse_mean'].tolist())
        sweep['steps_spearman'], _ = trend_correlation(values, sweep['steps_to_all_found_mean'].tolist())
        plot_sweep(sweep, args.param, out_dir / 'sweep.svg')
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep.to_csv(out_dir / 'sweep.csv', index=False, float_format='%.10g', lineterminator='\n')
    logger.success(f"✅ Sweep of {len(values)} value(s) written to {out_dir}")
    return EXIT_OK


def algorithm_summary(in_dirs: List[Path]) -> pd.DataFrame:
    """Per-algorithm means from the run history database of every input directory that has one"""
    rows = []
    for in_dir in in_dirs:
        path = in_dir / 'runs.db'
        if not path.exists():
            logger.debug(f"No run history in {in_dir}")
            continue
        db = open_session(f"sqlite:///{path.resolve()}")
        try:
            service = RunHistoryService(db)
            runs = service.get_runs()
            experiments = runs['experiment'].unique().tolist() if not runs.empty else []
            for experiment in experiments:
                for row in service.get_algorithm_summary(experiment):
                    rows.append({'source': in_dir.name, 'experiment': experiment, **row})
        finally:
            db.close()
    return pd.DataFrame(rows)


def report_command(args) -> int:
    in_dirs = [Path(d) for d in args.inputs]
    out_dir = Path(args.out) if args.out else in_dirs[0]
    build_report(in_dirs, out_dir)
    summary = algorithm_summary(in_dirs)
    if not summary.empty:
        summary.to_csv(out_dir / 'algorithms.csv', index=False, float_format='%.10g', lineterminator='\n')
        logger.info(f"Per-algorithm summary of {int(summary['runs'].sum())} stored run(s) written")
    return EXIT_OK


def schema_command(args) -> int:
    print(json.dumps(ExperimentSpec.model_json_schema(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='UAV multi-target search simulator')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    def add_run_options(sub):
        sub.add_argument('--config', required=True, type=Path, help='Experiment JSON document')
        sub.add_argument('--out', default=config.SEARCH_OUTPUT_DIR, help='Output directory')
        sub.add_argument('--seeds', help='Comma-separated seeds overriding the document')
        sub.add_argument('--algorithm', choices=['proposed', 'lawnmower', 'refinement-only'])
        sub.add_argument('--workers', type=int, default=None, help='Parallel seed threads')
        sub.add_argument('--no-db', action='store_true', help='Skip the results database')

    run = commands.add_parser('run', help='Run one experiment')
    add_run_options(run)
    run.set_defaults(handler=run_command)

    sweep = commands.add_parser('sweep', help='Run an experiment once per parameter value')
    add_run_options(sweep)
    sweep.add_argument('--param', required=True, help='Dotted parameter, e.g. planner.tau')
    sweep.add_argument('--values', required=True, help='Comma-separated values')
    sweep.set_defaults(handler=sweep_command)

    report = commands.add_parser('report', help='Aggregate result directories')
    report.add_argument('--in', dest='inputs', nargs='+', required=True, help='Result directories')
    report.add_argument('--out', help='Report directory (defaults to the first input)')
    report.set_defaults(handler=report_command)

    schema = commands.add_parser('schema', help='Print the experiment JSON schema')
    schema.set_defaults(handler=schema_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level='DEBUG' if args.verbose else config.SEARCH_LOG_LEVEL)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        return EXIT_CONFIG
    except SimulationAbort as e:
        logger.error(f"❌ Simulation aborted: {e}")
        return EXIT_ABORT
    except Exception as e:
        logger.error(f"❌ Unexpected error: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
