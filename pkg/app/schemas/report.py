"""
실행 기록 / 오류 스키마
단일 책임: run_manifest.json과 stderr 오류 보고 데이터 구조 정의
"""
from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ErrorReport(BaseModel):
    """실패한 명령이 stderr로 출력하는 오류 정보"""

    error: str = Field(..., description="에러 메시지")
    code: str = Field(..., description="에러 코드")
    exit_code: int = Field(..., description="프로세스 종료 코드")
    details: Dict[str, Any] = Field(default_factory=dict, description="상세 정보")
    timestamp: datetime = Field(default_factory=datetime.now, description="에러 발생 시간")

    class Config:
        json_schema_extra = {
            "example": {
                "error": "3번째 줄: 알 수 없는 설정 키 'sgd.lr'",
                "code": "CONFIG_ERROR",
                "exit_code": 2,
                "details": {"line": 3},
                "timestamp": "2026-10-19T10:30:00",
            }
        }


class RunManifest(BaseModel):
    """실행 디렉토리마다 하나씩 남는 재현 정보"""

    command: str = Field(..., description="실행한 하위 명령")
    argv: List[str] = Field(default_factory=list, description="명령행 인자")
    config_path: Optional[str] = Field(None, description="실행 설정 파일 경로")
    config: Dict[str, Any] = Field(default_factory=dict, description="해석된 설정 트리")
    seed: int = Field(..., description="사용한 seed")
    version: str = Field(..., description="git describe 형식 버전")
    started_at: datetime = Field(..., description="시작 시각")
    finished_at: Optional[datetime] = Field(None, description="종료 시각")
    output_dir: str = Field(..., description="출력 디렉토리")
    exit_code: Optional[int] = Field(None, description="종료 코드")
