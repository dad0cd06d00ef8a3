"""
실행 설정 파일 파서
단일 책임: key=value 텍스트를 ExperimentConfig로 변환

형식:
    # 주석과 빈 줄 허용
    seed=7
    sgd.lr0=0.01
    race.losses=ciou,fpiou
"""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union, get_args, get_origin

from pydantic import BaseModel, ValidationError

from ..core.exceptions import ConfigError
from ..schemas.config import ExperimentConfig

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = ("seed",)


def _is_sequence(annotation: Any) -> bool:
    origin = get_origin(annotation)
    if origin in (tuple, list):
        return True
    if origin is Union:
        return any(_is_sequence(arg) for arg in get_args(annotation) if arg is not type(None))
    return False


def _section_model(section: str) -> Optional[type]:
    field = ExperimentConfig.model_fields.get(section)
    if field is None or section in TOP_LEVEL_KEYS:
        return None
    annotation = field.annotation
    if isinstance(annotation, type) and issubclass(annotation, BaseModel):
        return annotation
    return None


def _field_name(model: type, key: str) -> Optional[str]:
    """필드 이름 또는 alias → 필드 이름"""
    for name, info in model.model_fields.items():
        if key == name or key == info.alias:
            return name
    return None


def _convert(raw: str, sequence: bool) -> Any:
    if sequence:
        return [part.strip() for part in raw.split(",") if part.strip()]
    return raw


def parse_lines(lines: Iterable[str]) -> Tuple[Dict[str, Any], Dict[Tuple[str, ...], int]]:
    """
    줄 목록 → (중첩 dict, 키 경로 → 줄 번호)

    Raises:
        ConfigError: 형식 오류, 알 수 없는 키, 중복 키 (줄 번호 포함)
    """
    tree: Dict[str, Any] = {}
    origins: Dict[Tuple[str, ...], int] = {}
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"'key=value' 형식이 아닙니다: {text!r}", line=number)
        key, raw = (part.strip() for part in text.split("=", 1))
        if not key:
            raise ConfigError("키가 비어 있습니다", line=number)

        if key in TOP_LEVEL_KEYS:
            path: Tuple[str, ...] = (key,)
            value: Any = raw
        else:
            section, _, name = key.partition(".")
            model = _section_model(section)
            field = _field_name(model, name) if model is not None and name else None
            if field is None:
                raise ConfigError(f"알 수 없는 설정 키 '{key}'", line=number)
            path = (section, field)
            value = _convert(raw, _is_sequence(model.model_fields[field].annotation))

        if path in origins:
            raise ConfigError(f"'{key}'가 {origins[path]}번째 줄에 이미 있습니다", line=number)
        origins[path] = number
        if len(path) == 1:
            tree[path[0]] = value
        else:
            tree.setdefault(path[0], {})[path[1]] = value
    return tree, origins


def _line_of(loc: Tuple[Any, ...], origins: Dict[Tuple[str, ...], int]) -> Optional[int]:
    for depth in (2, 1):
        key = tuple(str(part) for part in loc[:depth])
        if key in origins:
            return origins[key]
    # model_validator 오류는 섹션 단위로 보고되므로 섹션의 첫 줄
    section_lines = [n for path, n in origins.items() if loc and path[0] == loc[0]]
    return min(section_lines) if section_lines else None


def _log_defaults(cfg: ExperimentConfig, origins: Dict[Tuple[str, ...], int]) -> None:
    for section in ExperimentConfig.model_fields:
        if _section_model(section) is None:
            if (section,) not in origins:
                logger.info(f"설정 기본값 사용: {section}={getattr(cfg, section)}")
            continue
        sub = getattr(cfg, section)
        for name in type(sub).model_fields:
            if (section, name) not in origins:
                logger.info(f"설정 기본값 사용: {section}.{name}={getattr(sub, name)!r}")


def parse_run_config(source: Union[str, Path, Iterable[str]]) -> ExperimentConfig:
    """
    실행 설정 파일 파싱

    없는 키는 스키마 기본값으로 채우고 INFO로 기록합니다.

    Args:
        source: 파일 경로 또는 줄 목록

    Returns:
        ExperimentConfig

    Raises:
        ConfigError: 형식/키/값 오류 (줄 번호 포함)
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"설정 파일을 찾을 수 없습니다: {path}")
        lines = path.read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)

    tree, origins = parse_lines(lines)
    try:
        cfg = ExperimentConfig.model_validate(tree)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first.get("loc", ()))
        key = ".".join(str(part) for part in loc[:2])
        raise ConfigError(f"'{key}' 값이 올바르지 않습니다: {first.get('msg')}", line=_line_of(loc, origins)) from e

    _log_defaults(cfg, origins)
    logger.info(f"✅ 실행 설정 로드: 지정 키 {len(origins)}개")
    return cfg
