"""
예외 계층
단일 책임: 라이브러리 전역에서 사용하는 예외 타입 정의

CLI 에러 핸들러는 이 계층의 `code`를 보고 종료 코드를 결정합니다.
"""
from typing import Any, Dict, Optional


class CrackLabError(Exception):
    """모든 도메인 예외의 기본 클래스"""

    code: str = "CRACKLAB_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details or {}


class ShapeError(CrackLabError, ValueError):
    """텐서/배열 shape 불일치"""

    code = "SHAPE_ERROR"


class NumericalError(CrackLabError, ArithmeticError):
    """연산 결과에 NaN/Inf 발생"""

    code = "NUMERICAL_ERROR"


class DivergenceError(NumericalError):
    """학습 중 손실 발산 (비유한 값)"""

    code = "DIVERGENCE"

    def __init__(self, step: int, message: Optional[str] = None):
        super().__init__(
            message or f"학습 {step}번째 step에서 손실이 발산했습니다",
            details={"step": step},
        )
        self.step = step


class GradientCheckError(NumericalError):
    """유한차분 검사 중 비유한 중간값 발생"""

    code = "GRADCHECK_NONFINITE"

    def __init__(self, index: int, message: Optional[str] = None):
        super().__init__(
            message or f"유한차분 probe {index}번 좌표에서 비유한 값이 발생했습니다",
            details={"index": index},
        )
        self.index = index


class VerificationError(CrackLabError):
    """검증 스위트 실패 (허용 오차 초과)"""

    code = "VERIFICATION_FAILED"


class ConfigError(CrackLabError, ValueError):
    """실행 설정 파일 파싱/검증 실패"""

    code = "CONFIG_ERROR"

    def __init__(self, message: str, line: Optional[int] = None):
        details = {"line": line} if line is not None else {}
        prefix = f"{line}번째 줄: " if line is not None else ""
        super().__init__(prefix + message, details=details)
        self.line = line


class DataFormatError(CrackLabError, ValueError):
    """데이터 파일 형식 오류 (CSV 행, 바이너리 헤더, PGM 등)"""

    code = "DATA_FORMAT_ERROR"

    def __init__(self, message: str, row: Optional[int] = None):
        details = {"row": row} if row is not None else {}
        prefix = f"{row}번째 행: " if row is not None else ""
        super().__init__(prefix + message, details=details)
        self.row = row
