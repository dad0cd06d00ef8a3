"""
종료 코드 매핑과 오류 보고 테스트
"""
import io
import json

import pytest
from pydantic import ValidationError

from app.cli.error_handler import UsageError, exit_code_for, run_with_error_handling
from app.core.exceptions import (
    ConfigError,
    DataFormatError,
    DivergenceError,
    GradientCheckError,
    NumericalError,
    ShapeError,
    VerificationError,
)
from app.core.losses import LossConfig


def _validation_error() -> ValidationError:
    try:
        LossConfig(d=0.9, u=0.5)
    except ValidationError as e:
        return e
    raise AssertionError("검증 오류가 발생하지 않았습니다")


@pytest.mark.parametrize(
    "error,code",
    [
        (VerificationError("x"), 1),
        (GradientCheckError(3), 1),
        (DivergenceError(10), 3),
        (NumericalError("nan"), 3),
        (UsageError("count"), 2),
        (ConfigError("x", line=2), 2),
        (DataFormatError("x", row=4), 2),
        (ShapeError("x"), 2),
        (ValueError("x"), 2),
        (KeyError("x"), 2),
        (OSError("disk"), 1),
        (RuntimeError("boom"), 1),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_validation_error_is_usage():
    assert exit_code_for(_validation_error()) == 2


class TestRunWithErrorHandling:
    def test_success_writes_nothing(self):
        stream = io.StringIO()
        assert run_with_error_handling("train", lambda: 0, stream) == 0
        assert stream.getvalue() == ""

    def test_config_error_report(self):
        def fail() -> int:
            raise ConfigError("알 수 없는 설정 키 'sgd.lr'", line=3)

        stream = io.StringIO()
        assert run_with_error_handling("train", fail, stream) == 2
        report = json.loads(stream.getvalue())
        assert report["code"] == "CONFIG_ERROR"
        assert report["exit_code"] == 2
        assert report["details"] == {"line": 3}
        assert report["error"].startswith("3번째 줄: ")

    def test_divergence_report(self):
        def fail() -> int:
            raise DivergenceError(7)

        stream = io.StringIO()
        assert run_with_error_handling("race", fail, stream) == 3
        assert json.loads(stream.getvalue())["details"] == {"step": 7}

    def test_unexpected_error(self):
        def fail() -> int:
            raise RuntimeError("boom")

        stream = io.StringIO()
        assert run_with_error_handling("eval", fail, stream) == 1
        report = json.loads(stream.getvalue())
        assert report["code"] == "INTERNAL_ERROR"
        assert report["details"]["error_type"] == "RuntimeError"

    def test_io_error(self, tmp_path):
        missing = tmp_path / "nothing.csv"

        def fail() -> int:
            missing.read_text()
            return 0

        stream = io.StringIO()
        assert run_with_error_handling("eval", fail, stream) == 1
        report = json.loads(stream.getvalue())
        assert report["code"] == "IO_ERROR"
        assert report["details"]["error_type"] == "FileNotFoundError"

    def test_validation_error_report(self):
        def fail() -> int:
            raise _validation_error()

        stream = io.StringIO()
        assert run_with_error_handling("train", fail, stream) == 2
        assert json.loads(stream.getvalue())["code"] == "VALIDATION_ERROR"
