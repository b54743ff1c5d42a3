"""
Runtime configuration loaded from the environment (.env supported)
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

DEFAULT_FIXTURES_DIR = Path(__file__).parent.parent / "data" / "fixtures"


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def get_threads() -> int:
    """Worker threads used when assembling per-degree matrices"""
    return max(1, _int_env("TTCALC_THREADS", 1))


def get_max_chain_dim() -> int:
    """Largest chain/cochain space the engine agrees to materialize"""
    return max(1, _int_env("TTCALC_MAX_CHAIN_DIM", 1_000_000))


def get_max_degree() -> int:
    """Default top degree D when the CLI is not given one"""
    return max(0, _int_env("TTCALC_MAX_DEGREE", 4))


def get_log_level() -> str:
    return os.getenv("TTCALC_LOG_LEVEL", "WARNING").upper()


def get_fixtures_dir() -> Path:
    """Directory holding the bundled algebra and bimodule documents"""
    override = os.getenv("TTCALC_FIXTURES_DIR")
    return Path(override) if override else DEFAULT_FIXTURES_DIR
