"""Environment-driven settings for cache location, size guard and logging"""
import os
import logging
from functools import lru_cache
from pathlib import Path
from dotenv import load_dotenv
from pydantic import BaseModel, Field

from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.3.0"
DEFAULT_MAX_ROWS = 4096
DEFAULT_CACHE_DIR = os.path.join(os.path.expanduser("~"), ".cache", "kr-twists")


class Settings(BaseModel):
    cache_dir: Path = Field(..., description="Directory holding content-addressed result records")
    max_rows: int = Field(DEFAULT_MAX_ROWS, ge=1, description="Size guard: Koszul rows allowed per complex")
    log_level: str = Field("INFO", description="Logging level name")


def _read_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InvalidInputError(f"Invalid integer in environment variable {name}: {raw!r}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once from the environment (and a .env file if present)"""
    if not load_dotenv():
        logger.debug("No .env file found")
    settings = Settings(
        cache_dir=Path(os.getenv("KR_CACHE_DIR") or DEFAULT_CACHE_DIR),
        max_rows=_read_int("KR_MAX_ROWS", DEFAULT_MAX_ROWS),
        log_level=(os.getenv("KR_LOG_LEVEL") or "INFO").upper(),
    )
    logger.debug(f"Settings loaded: {settings}")
    return settings


def configure_logging(level: str = None) -> None:
    """Install the root handler used by every entry point"""
    logging.basicConfig(
        level=getattr(logging, (level or get_settings().log_level).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s'
    )
