"""Content-addressed store of result records with atomic writes"""
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

from modules.cli.records import JobSpec, ResultRecord

logger = logging.getLogger(__name__)


class ResultCache:
    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, job: JobSpec) -> Path:
        key = job.key()
        return self.directory / key[:2] / f"{key}.json"

    def lookup(self, job: JobSpec) -> Optional[ResultRecord]:
        """Cached record for a job, or None; unreadable entries are ignored and recomputed"""
        path = self.path_for(job)
        if not path.exists():
            logger.info(f"Cache miss for {job.command} {job.source[:40]}")
            return None
        try:
            record = ResultRecord.model_validate_json(path.read_text(encoding="utf-8"))
        except Exception as e:
            logger.warning(f"Ignoring corrupt cache entry {path}: {e}")
            return None
        if record.input_hash != job.key():
            logger.warning(f"Cache entry {path} belongs to another job; ignoring it")
            return None
        logger.info(f"Cache hit for {job.command} {job.source[:40]}")
        return record

    def store(self, job: JobSpec, record: ResultRecord) -> Path:
        """Write to a temporary file in the same directory and rename it into place"""
        path = self.path_for(job)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(record.to_json())
            os.replace(temp, path)
        except Exception as e:
            logger.error(f"Error writing cache entry {path}: {e}")
            if os.path.exists(temp):
                os.unlink(temp)
            raise
        logger.debug(f"Stored {path}")
        return path
