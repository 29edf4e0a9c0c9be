"""Database connection and session management"""
from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker
from loguru import logger


def make_engine(url: str) -> Engine:
    if url.startswith('sqlite'):
        return create_engine(url, echo=False)
    # Connection pooling for server databases
    return create_engine(
        url,
        pool_size=5,
        max_overflow=10,
        pool_pre_ping=True,  # Verify connections before using
        echo=False,
    )


def init_database(engine: Engine):
    """Create all result tables"""
    from .models import Base

    logger.debug(f"Creating result tables at {engine.url}")
    Base.metadata.create_all(bind=engine)


def open_session(url: str):
    """Initialised session for a results database"""
    engine = make_engine(url)
    init_database(engine)
    return sessionmaker(autocommit=False, autoflush=False, bind=engine)()
