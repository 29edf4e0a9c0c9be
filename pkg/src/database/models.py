"""Database models for experiment results"""
from sqlalchemy import Column, Float, ForeignKey, Index, Integer, String, DateTime
from sqlalchemy.orm import declarative_base, relationship
from sqlalchemy.sql import func

Base = declarative_base()


class ExperimentRun(Base):
    """One seed of one experiment"""
    __tablename__ = 'experiment_runs'

    id = Column(Integer, primary_key=True)

    experiment = Column(String(200), nullable=False, index=True)
    algorithm = Column(String(50), nullable=False, index=True)  # 'proposed', 'lawnmower', 'refinement-only'
    seed = Column(Integer, nullable=False)

    # Outcome
    steps = Column(Integer, nullable=False)
    true_count = Column(Integer, nullable=False)
    found_count = Column(Integer, nullable=False)
    rmse = Column(Float)  # None when nothing was found
    steps_to_all_found = Column(Integer)

    # Vehicle audit
    min_clearance = Column(Float)
    timeouts = Column(Integer, default=0)
    singular_legs = Column(Integer, default=0)
    avoidance_legs = Column(Integer, default=0)

    mean_planning_seconds = Column(Float)
    wall_seconds = Column(Float)
    created_at = Column(DateTime, server_default=func.now(), index=True)

    found_targets = relationship('FoundTargetRecord', back_populates='run', cascade='all, delete-orphan')

    __table_args__ = (
        Index('idx_experiment_algorithm', 'experiment', 'algorithm'),
        Index('idx_experiment_seed', 'experiment', 'seed'),
    )

    def __repr__(self):
        return f"<ExperimentRun({self.experiment} {self.algorithm} seed={self.seed} found={self.found_count}/{self.true_count})>"


class FoundTargetRecord(Base):
    """A confirmed target of a run"""
    __tablename__ = 'found_targets'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('experiment_runs.id'), nullable=False, index=True)

    found_step = Column(Integer, nullable=False)
    x = Column(Float, nullable=False)
    y = Column(Float, nullable=False)
    z = Column(Float, nullable=False)
    matched_truth_index = Column(Integer)  # -1 when no true target lies within the penalty radius
    match_dist = Column(Float)

    run = relationship('ExperimentRun', back_populates='found_targets')

    __table_args__ = (
        Index('idx_run_step', 'run_id', 'found_step'),
    )
