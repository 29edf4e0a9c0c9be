"""Aggregated CSV tables and SVG charts from per-step results"""
from pathlib import Path
from typing import Dict, List

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np
import pandas as pd
from loguru import logger
from scipy import stats

from analytics.metrics import CONFIDENCE

AGGREGATE_COLUMNS = ['algorithm', 'step', 'runs', 'mean_found', 'ci_half_width']


def detections_table(steps: pd.DataFrame, algorithm: str = 'run') -> pd.DataFrame:
    """Per-step mean |found| across seeds with Student-t half-widths"""
    if steps.empty:
        return pd.DataFrame(columns=AGGREGATE_COLUMNS)
    wide = steps.pivot(index='step', columns='seed', values='n_found').sort_index()
    # early-stopped runs stay flat at their final count
    wide = wide.ffill()
    runs = wide.shape[1]
    mean = wide.mean(axis=1)
    if runs < 2:
        half = pd.Series(np.nan, index=wide.index)
    else:
        half = stats.t.ppf(0.5 + CONFIDENCE / 2, runs - 1) * wide.std(axis=1, ddof=1) / np.sqrt(runs)
    return pd.DataFrame({'algorithm': algorithm, 'step': wide.index, 'runs': runs,
                         'mean_found': mean.values, 'ci_half_width': half.values})


def plot_detections(tables: Dict[str, pd.DataFrame], path: Path, title: str = 'Targets found'):
    """One line per algorithm with a shaded confidence band"""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, table in tables.items():
        ax.plot(table['step'], table['mean_found'], label=label)
        band = table['ci_half_width'].fillna(0.0)
        ax.fill_between(table['step'], table['mean_found'] - band, table['mean_found'] + band, alpha=0.2)
    ax.set_xlabel('step')
    ax.set_ylabel('mean targets found')
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if tables:
        ax.legend()
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format='svg')
    plt.close(fig)


def plot_sweep(sweep: pd.DataFrame, param: str, path: Path):
    """Mean RMSE and steps-to-all-found against the swept value"""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, column in zip(axes, ['rmse', 'steps_to_all_found']):
        ax.errorbar(sweep['value'], sweep[f'{column}_mean'], yerr=sweep[f'{column}_ci'].fillna(0.0),
                    marker='o', capsize=3)
        ax.set_xlabel(param)
        ax.set_ylabel(column.replace('_', ' '))
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format='svg')
    plt.close(fig)


def build_report(in_dirs: List[Path], out_dir: Path) -> pd.DataFrame:
    """Read steps.csv from each result directory, write aggregate.csv and detections.svg"""
    tables = {}
    for directory in in_dirs:
        steps_path = Path(directory) / 'steps.csv'
        if not steps_path.exists():
            logger.warning(f"No steps.csv in {directory}, skipping")
            continue
        steps = pd.read_csv(steps_path)
        label = _label_for(Path(directory))
        if label in tables:
            label = f"{label} ({Path(directory).name})"
        tables[label] = detections_table(steps, label)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    combined = pd.concat(tables.values(), ignore_index=True) if tables else pd.DataFrame(columns=AGGREGATE_COLUMNS)
    combined.to_csv(out_dir / 'aggregate.csv', index=False, float_format='%.10g', lineterminator='\n')
    plot_detections(tables, out_dir / 'detections.svg')
    logger.success(f"✅ Report for {len(tables)} result set(s) written to {out_dir}")
    return combined


def _label_for(directory: Path) -> str:
    summary = directory / 'summary.csv'
    if summary.exists():
        frame = pd.read_csv(summary)
        if not frame.empty and 'algorithm' in frame:
            return str(frame['algorithm'].iloc[0])
    return directory.name
