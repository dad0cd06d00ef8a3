"""
Crack Lab - Main Entry Point
명령행 하위 명령 실행 (gradcheck, gen-data, dedup, race, train, ablate, robust, eval, report)
"""
import sys
import logging
from pathlib import Path
from dotenv import load_dotenv

# 프로젝트 루트를 Python 경로에 추가
sys.path.insert(0, str(Path(__file__).parent))

# .env 파일 로드
load_dotenv()

import config  # noqa: E402

# 로깅 설정
logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def main() -> int:
    """메인 실행 함수"""
    from app.cli.commands import run

    try:
        return run()
    except KeyboardInterrupt:
        logger.info("사용자에 의해 중지되었습니다.")
        return 130


if __name__ == "__main__":
    sys.exit(main())
