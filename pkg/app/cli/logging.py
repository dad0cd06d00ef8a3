"""
명령 로깅
단일 책임: 하위 명령 시작/종료/소요 시간 로깅
"""
import functools
import logging
import time
from typing import Callable

logger = logging.getLogger(__name__)


def log_command(name: str) -> Callable[[Callable[..., int]], Callable[..., int]]:
    """
    하위 명령 로깅 데코레이터

    Args:
        name: 로그에 표시할 명령 이름

    Returns:
        종료 코드를 돌려주는 함수를 감싸는 데코레이터
    """

    def decorator(fn: Callable[..., int]) -> Callable[..., int]:
        @functools.wraps(fn)
        def wrapper(*args, **kwargs) -> int:
            start_time = time.time()
            logger.info(f"📥 명령 시작: {name}")
            try:
                code = fn(*args, **kwargs)
                process_time = time.time() - start_time
                logger.info(f"📤 명령 완료: {name} → 종료 코드 {code} ({process_time:.3f}초)")
                return code
            except Exception as e:
                process_time = time.time() - start_time
                logger.error(
                    f"❌ 명령 실패: {name} → 오류 발생 ({process_time:.3f}초): {str(e)}",
                    exc_info=True,
                )
                raise

        return wrapper

    return decorator
