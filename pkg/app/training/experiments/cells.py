"""
독립 실험 셀 실행
단일 책임: 셀 목록을 순차 또는 프로세스 풀로 실행하고 제출 순서대로 결과 수집
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Sequence, Tuple, TypeVar

logger = logging.getLogger(__name__)

R = TypeVar("R")


def run_cells(fn: Callable[..., R], cells: Sequence[Tuple[Any, ...]], max_workers: int = 1) -> List[R]:
    """
    Args:
        fn: 모듈 수준 함수 (프로세스 풀에서 pickle 가능해야 함)
        cells: fn에 풀어서 넘길 인자 튜플 목록
        max_workers: 프로세스 수 상한 (1이면 순차)

    Returns:
        cells 순서의 결과 목록
    """
    workers = max(1, min(max_workers, len(cells)))
    if workers == 1:
        return [fn(*args) for args in cells]

    logger.info(f"🔄 셀 {len(cells)}개를 프로세스 {workers}개로 실행")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args) for args in cells]
        return [f.result() for f in futures]
