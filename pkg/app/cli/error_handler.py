"""
명령 에러 핸들러
단일 책임: 예외 → 종료 코드 매핑 및 stderr 오류 보고
"""
import logging
import sys
from typing import Callable, TextIO

from pydantic import ValidationError

from ..core.exceptions import (
    ConfigError,
    CrackLabError,
    DataFormatError,
    DivergenceError,
    GradientCheckError,
    NumericalError,
    VerificationError,
)
from ..schemas.report import ErrorReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3


class UsageError(CrackLabError, ValueError):
    """명령행 인자 오류"""

    code = "USAGE_ERROR"


def exit_code_for(error: BaseException) -> int:
    """
    예외 → 종료 코드

    0 성공, 1 검증 실패 (및 기타 실행 오류), 2 사용법/설정/데이터 형식 오류, 3 수치 발산
    """
    if isinstance(error, (VerificationError, GradientCheckError)):
        return EXIT_VERIFICATION
    if isinstance(error, (DivergenceError, NumericalError)):
        return EXIT_DIVERGENCE
    if isinstance(error, (UsageError, ConfigError, DataFormatError, ValidationError, ValueError, KeyError)):
        return EXIT_USAGE
    return EXIT_VERIFICATION


def error_report(error: BaseException) -> ErrorReport:
    """예외를 ErrorReport로 변환"""
    exit_code = exit_code_for(error)
    if isinstance(error, ValidationError):
        return ErrorReport(
            error="입력 값 검증 실패",
            code="VALIDATION_ERROR",
            exit_code=exit_code,
            details={"errors": [{"loc": list(e["loc"]), "msg": e["msg"]} for e in error.errors()]},
        )
    if isinstance(error, CrackLabError):
        return ErrorReport(error=error.message, code=error.code, exit_code=exit_code, details=error.details)
    if isinstance(error, (ValueError, KeyError)):
        return ErrorReport(error=str(error), code="USAGE_ERROR", exit_code=exit_code)
    if isinstance(error, OSError):
        return ErrorReport(
            error=str(error),
            code="IO_ERROR",
            exit_code=exit_code,
            details={"error_type": type(error).__name__, "filename": error.filename},
        )
    return ErrorReport(
        error="예상치 못한 오류가 발생했습니다",
        code="INTERNAL_ERROR",
        exit_code=exit_code,
        details={"error_type": type(error).__name__, "message": str(error)},
    )


def run_with_error_handling(command: str, fn: Callable[[], int], stream: TextIO = None) -> int:
    """
    명령 실행 및 예외 처리

    모든 예외를 일관된 ErrorReport(JSON, stderr)와 종료 코드로 바꿉니다.

    Args:
        command: 하위 명령 이름 (로그용)
        fn: 종료 코드를 돌려주는 명령 본체
        stream: 오류 보고 출력 대상 (기본 stderr)

    Returns:
        종료 코드
    """
    stream = stream or sys.stderr
    try:
        return fn()

    except (ConfigError, DataFormatError, UsageError, ValidationError) as e:
        # 입력 오류
        logger.warning(f"⚠️ {command}: 입력 오류: {e}")
        report = error_report(e)

    except VerificationError as e:
        logger.error(f"❌ {command}: 검증 실패: {e}")
        report = error_report(e)

    except NumericalError as e:
        # 발산 / 비유한 값
        logger.error(f"❌ {command}: 수치 오류: {e}")
        report = error_report(e)

    except Exception as e:
        logger.error(f"❌ {command}: 예상치 못한 오류 발생: {e}", exc_info=True)
        report = error_report(e)

    stream.write(report.model_dump_json(indent=2) + "\n")
    return report.exit_code
