"""Worker Utility"""
import os
import logging

logger = logging.getLogger(__name__)

MAX_WORKERS_LIMIT = 64


def get_workers_from_env(default: int = 1) -> int:
    try:
        workers_str = os.getenv("CRACKLAB_MAX_WORKERS", str(default))
        workers = int(workers_str)
        if 1 <= workers <= MAX_WORKERS_LIMIT:
            return workers
        logger.warning(f"⚠️ CRACKLAB_MAX_WORKERS={workers} 범위 밖, 기본값 {default} 사용")
        return default
    except ValueError:
        logger.warning(f"⚠️ CRACKLAB_MAX_WORKERS 값이 정수가 아닙니다, 기본값 {default} 사용")
        return default
