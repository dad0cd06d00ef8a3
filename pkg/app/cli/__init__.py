"""
CLI Package
하위 명령, 실행 설정 파서, 에러 핸들러, 명령 로깅, 차트
"""
from .commands import COMMANDS, RunContext, build_parser, run
from .error_handler import EXIT_DIVERGENCE, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, UsageError, exit_code_for
from .runconfig import parse_run_config

__all__ = [
    "COMMANDS",
    "EXIT_DIVERGENCE",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_VERIFICATION",
    "RunContext",
    "UsageError",
    "build_parser",
    "exit_code_for",
    "parse_run_config",
    "run",
]
