"""Run history service over the results database"""
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger
from sqlalchemy import func
from sqlalchemy.orm import Session

from analytics.metrics import match_found
from database.models import ExperimentRun, FoundTargetRecord


def _nullable(value):
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else None


class RunHistoryService:
    """Records finished runs and answers summary queries for reports"""

    def __init__(self, db: Session):
        self.db = db

    def record_run(self, record) -> ExperimentRun:
        """Store one RunRecord with its found targets"""
        run = ExperimentRun(
            experiment=record.experiment,
            algorithm=record.algorithm,
            seed=record.seed,
            steps=len(record.rows),
            true_count=int(record.truth.shape[0]),
            found_count=int(record.found_positions.shape[0]),
            rmse=_nullable(record.rmse),
            steps_to_all_found=record.steps_to_all_found,
            min_clearance=_nullable(record.min_clearance),
            timeouts=record.timeouts,
            singular_legs=record.singular_legs,
            avoidance_legs=record.avoidance_legs,
            mean_planning_seconds=record.mean_planning_seconds,
            wall_seconds=record.wall_seconds,
        )
        index, charged = match_found(record.found_positions, record.truth, record.penalty)
        for position, step, i, dist in zip(record.found_positions, record.found_steps, index, charged):
            run.found_targets.append(FoundTargetRecord(
                found_step=int(step),
                x=float(position[0]), y=float(position[1]), z=float(position[2]),
                matched_truth_index=int(i),
                match_dist=float(dist) if i >= 0 else None,
            ))
        self.db.add(run)
        logger.debug(f"Recorded {record.experiment} seed {record.seed}: "
                     f"{run.found_count}/{run.true_count} found")
        return run

    def record_runs(self, records: List) -> int:
        try:
            for record in records:
                self.record_run(record)
            self.db.commit()
        except Exception as e:
            self.db.rollback()
            logger.error(f"❌ Error recording runs: {e}")
            raise
        logger.info(f"Recorded {len(records)} run(s) in the results database")
        return len(records)

    def get_runs(self, experiment: Optional[str] = None) -> pd.DataFrame:
        """Run summaries, oldest first"""
        query = self.db.query(ExperimentRun)
        if experiment is not None:
            query = query.filter(ExperimentRun.experiment == experiment)
        runs = query.order_by(ExperimentRun.created_at.asc(), ExperimentRun.id.asc()).all()
        return pd.DataFrame([
            {
                'experiment': r.experiment,
                'algorithm': r.algorithm,
                'seed': r.seed,
                'steps': r.steps,
                'true_count': r.true_count,
                'found_count': r.found_count,
                'rmse': r.rmse,
                'steps_to_all_found': r.steps_to_all_found,
                'min_clearance': r.min_clearance,
                'singular_legs': r.singular_legs,
                'avoidance_legs': r.avoidance_legs,
                'mean_planning_seconds': r.mean_planning_seconds,
            }
            for r in runs
        ])

    def get_algorithm_summary(self, experiment: str) -> List[Dict]:
        """Per-algorithm means for one experiment"""
        results = self.db.query(
            ExperimentRun.algorithm,
            func.count(ExperimentRun.id).label('runs'),
            func.avg(ExperimentRun.found_count).label('avg_found'),
            func.avg(ExperimentRun.rmse).label('avg_rmse'),
            func.avg(ExperimentRun.steps_to_all_found).label('avg_steps_to_all_found'),
            func.avg(ExperimentRun.mean_planning_seconds).label('avg_planning_seconds'),
            func.min(ExperimentRun.min_clearance).label('min_clearance'),
        ).filter(
            ExperimentRun.experiment == experiment
        ).group_by(
            ExperimentRun.algorithm
        ).order_by(
            ExperimentRun.algorithm
        ).all()

        return [
            {
                'algorithm': r.algorithm,
                'runs': r.runs,
                'avg_found': r.avg_found,
                'avg_rmse': r.avg_rmse,
                'avg_steps_to_all_found': r.avg_steps_to_all_found,
                'avg_planning_seconds': r.avg_planning_seconds,
                'min_clearance': r.min_clearance,
            }
            for r in results
        ]
