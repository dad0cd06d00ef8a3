"""
프로젝트 설정 파일
환경 변수에서 값을 로드하며, 기본값을 제공합니다.
"""
import os
from dotenv import load_dotenv

from app.core.utils.workers import get_workers_from_env

# .env 파일 로드
load_dotenv()

# 로깅 레벨 (DEBUG, INFO, WARNING, ERROR)
LOG_LEVEL = os.getenv("CRACKLAB_LOG_LEVEL", "INFO").upper()

# 실험 셀 병렬 프로세스 수 상한 (1이면 순차 실행)
MAX_WORKERS = get_workers_from_env(default=1)

# 실행 결과 기본 디렉토리 (--out 미지정 시)
OUTPUT_DIR = os.getenv("CRACKLAB_OUTPUT_DIR", "runs")

# 기본 난수 seed (--seed 미지정 시)
try:
    DEFAULT_SEED = int(os.getenv("CRACKLAB_SEED", "42"))
except ValueError:
    DEFAULT_SEED = 42
