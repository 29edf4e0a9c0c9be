"""Process-level settings read from the environment"""
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

SEARCH_WORKERS = int(os.getenv('SEARCH_WORKERS', '4'))
SEARCH_LOG_LEVEL = os.getenv('SEARCH_LOG_LEVEL', 'INFO')
SEARCH_OUTPUT_DIR = os.getenv('SEARCH_OUTPUT_DIR', 'results')


def database_url(out_dir: Path) -> str:
    """Results database for an output directory, unless overridden"""
    override: Optional[str] = os.getenv('SEARCH_DATABASE_URL')
    if override:
        return override
    return f"sqlite:///{Path(out_dir).resolve() / 'runs.db'}"
