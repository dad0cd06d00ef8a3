"""
명령행 하위 명령
단일 책임: 인자 해석, 실행 컨텍스트 구성, 하위 명령 실행, run_manifest.json 기록

종료 코드: 0 성공, 1 검증 실패, 2 사용법/설정/데이터 형식 오류, 3 수치 발산
"""
import argparse
import logging
import subprocess
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional

import config

from .. import __version__
from ..core.utils.io import write_csv, write_json
from ..data.phash import dedup_hashes, hamming, phash64
from ..data.pipeline import CrackDataset, build_dataset
from ..data.storage import load_dataset, save_dataset
from ..metrics.detection import evaluate_detections
from ..metrics.predictions import read_predictions
from ..schemas.config import ExperimentConfig
from ..schemas.report import RunManifest
from ..training.experiments import ExperimentFactory
from .error_handler import EXIT_OK, UsageError, run_with_error_handling
from .gradcheck import DEFAULT_EPS, DEFAULT_INSTANCES, SCOPES, run_gradcheck, verify
from .logging import log_command
from .plots import render_report
from .runconfig import parse_run_config

logger = logging.getLogger(__name__)

RUN_MANIFEST = "run_manifest.json"


@dataclass
class RunContext:
    """하위 명령 하나의 실행 정보"""

    command: str
    args: argparse.Namespace
    cfg: ExperimentConfig
    out_dir: Path
    argv: List[str] = field(default_factory=list)
    started_at: datetime = field(default_factory=datetime.now)

    @property
    def seed(self) -> int:
        return self.cfg.seed


def git_version() -> str:
    """git describe 결과, 실패하면 패키지 버전"""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        version = out.stdout.strip()
        if version:
            return version
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def write_run_manifest(ctx: RunContext, exit_code: int) -> Optional[Path]:
    manifest = RunManifest(
        command=ctx.command,
        argv=ctx.argv,
        config_path=ctx.args.config,
        config=ctx.cfg.model_dump(mode="json", by_alias=True),
        seed=ctx.seed,
        version=git_version(),
        started_at=ctx.started_at,
        finished_at=datetime.now(),
        output_dir=str(ctx.out_dir),
        exit_code=exit_code,
    )
    try:
        return write_json(ctx.out_dir / RUN_MANIFEST, manifest.model_dump(mode="json"))
    except OSError as e:
        logger.warning(f"⚠️ {RUN_MANIFEST} 기록 실패: {e}")
        return None


def _dataset_for(ctx: RunContext) -> CrackDataset:
    data_dir = getattr(ctx.args, "data", None) or ctx.cfg.data.dir
    if data_dir:
        return load_dataset(data_dir)
    data = ctx.cfg.data
    return build_dataset(data.count, data.size, ctx.seed, threshold=data.threshold)


# ----------------------------------------------------------------------
# 하위 명령
# ----------------------------------------------------------------------
@log_command("gradcheck")
def cmd_gradcheck(ctx: RunContext) -> int:
    table = run_gradcheck(ctx.args.scope, ctx.seed, ctx.args.instances, ctx.args.eps)
    write_csv(ctx.out_dir / "gradcheck.csv", table)
    print(table.to_string(index=False))
    verify(table)
    return EXIT_OK


@log_command("gen-data")
def cmd_gen_data(ctx: RunContext) -> int:
    count = ctx.args.count if ctx.args.count is not None else ctx.cfg.data.count
    size = ctx.args.size if ctx.args.size is not None else ctx.cfg.data.size
    if count < 1:
        raise UsageError(f"--count는 1 이상이어야 합니다: {count}")
    dataset = build_dataset(count, size, ctx.seed, threshold=ctx.cfg.data.threshold)
    save_dataset(ctx.out_dir, dataset)
    sizes = "/".join(str(len(dataset.splits[name])) for name in ("train", "val", "test"))
    print(f"gen-data: {len(dataset.samples)}개 저장 (train/val/test {sizes}) → {ctx.out_dir}")
    return EXIT_OK


@log_command("dedup")
def cmd_dedup(ctx: RunContext) -> int:
    dataset = load_dataset(ctx.args.data)
    threshold = ctx.cfg.data.threshold
    ids = [s.sample_id for s in dataset.samples]
    hashes = [phash64(s) for s in dataset.samples]
    result = dedup_hashes(hashes, threshold)
    document = {
        "threshold": threshold,
        "kept": [ids[i] for i in result.kept],
        "dropped": [
            {"sample_id": ids[i], "duplicate_of": ids[j], "distance": hamming(hashes[i], hashes[j])}
            for i, j in sorted(result.dropped.items())
        ],
    }
    write_json(ctx.out_dir / "dedup.json", document)
    print(f"dedup: {len(result.kept)}개 유지, {len(result.dropped)}개 중복 (threshold={threshold})")
    return EXIT_OK


def _experiment_command(kind: str) -> Callable[[RunContext], int]:
    @log_command(kind)
    def command(ctx: RunContext) -> int:
        cfg = ctx.cfg
        if kind == "robust" and ctx.args.kind:
            cfg = cfg.model_copy(update={"robust": cfg.robust.model_copy(update={"kind": ctx.args.kind})})
        experiment = ExperimentFactory.create_experiment(kind, cfg, ctx.out_dir, config.MAX_WORKERS)
        dataset = _dataset_for(ctx) if experiment.needs_data else None
        result = experiment.run(dataset)
        experiment.save_results(result)
        print(result.summary)
        return EXIT_OK

    command.__name__ = f"cmd_{kind}"
    return command


@log_command("eval")
def cmd_eval(ctx: RunContext) -> int:
    dataset = load_dataset(ctx.args.data)
    samples = dataset.subset(ctx.args.split) if ctx.args.split else dataset.samples
    ground_truths = {s.sample_id: s.boxes for s in samples}
    dets = read_predictions(ctx.args.pred, known_ids=dataset.by_id().keys())
    dets = [d for d in dets if d.image_id in ground_truths]
    conf = ctx.args.conf if ctx.args.conf is not None else ctx.cfg.eval.conf_threshold
    report = evaluate_detections(dets, ground_truths, conf_threshold=conf, nms_iou=ctx.cfg.eval.nms_iou)
    document = report.model_dump(mode="json")
    write_json(ctx.out_dir / "report.json", document)
    print(report.model_dump_json(indent=2))
    return EXIT_OK


@log_command("report")
def cmd_report(ctx: RunContext) -> int:
    paths = render_report(ctx.args.run_dir, ctx.out_dir)
    print(f"report: 차트 {len(paths)}개 → {ctx.out_dir}")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunContext], int]] = {
    "gradcheck": cmd_gradcheck,
    "gen-data": cmd_gen_data,
    "dedup": cmd_dedup,
    "race": _experiment_command("race"),
    "train": _experiment_command("train"),
    "ablate": _experiment_command("ablate"),
    "robust": _experiment_command("robust"),
    "eval": cmd_eval,
    "report": cmd_report,
}


# ----------------------------------------------------------------------
# 인자 해석
# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="난수 seed (설정 파일 seed를 덮어씀)")
    common.add_argument("--out", type=str, default=None, help="출력 디렉토리 (기본: $CRACKLAB_OUTPUT_DIR/<명령>)")
    common.add_argument("--config", type=str, default=None, help="key=value 실행 설정 파일")

    parser = argparse.ArgumentParser(prog="cracklab", description="균열 검출 구성 요소 실험 도구")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gradcheck", parents=[common], help="유한차분 gradient 검사")
    p.add_argument("--scope", choices=SCOPES, default="all")
    p.add_argument("--instances", type=int, default=DEFAULT_INSTANCES, help="op당 무작위 인스턴스 수")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)

    p = sub.add_parser("gen-data", parents=[common], help="합성 균열 데이터셋 생성")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--size", type=int, default=None)

    p = sub.add_parser("dedup", parents=[common], help="데이터셋 pHash 중복 검사")
    p.add_argument("--data", required=True, help="데이터셋 디렉토리")

    for kind, help_text in (
        ("race", "box 회귀 수렴 경주"),
        ("train", "소형 검출기 학습"),
        ("ablate", "구성 요소 제거 실험 (8행)"),
        ("robust", "학습 비율 / 증강 강건성 실험"),
    ):
        p = sub.add_parser(kind, parents=[common], help=help_text)
        if kind != "race":
            p.add_argument("--data", default=None, help="기존 데이터셋 디렉토리 (없으면 생성)")
        if kind == "robust":
            p.add_argument("--kind", choices=("subsample", "augment"), default=None)

    p = sub.add_parser("eval", parents=[common], help="예측 CSV 평가")
    p.add_argument("--pred", required=True, help="예측 CSV (image_id,x1,y1,x2,y2,score)")
    p.add_argument("--data", required=True, help="정답 데이터셋 디렉토리")
    p.add_argument("--split", choices=("train", "val", "test"), default=None, help="평가 분할 (기본: 전체)")
    p.add_argument("--conf", type=float, default=None, help="P/R 신뢰도 임계값")

    p = sub.add_parser("report", parents=[common], help="실행 디렉토리 CSV → SVG 차트")
    p.add_argument("--run", dest="run_dir", default=None, help="원본 실행 디렉토리 (기본: --out)")
    return parser


def make_context(args: argparse.Namespace, argv: List[str]) -> RunContext:
    """설정 해석, seed 결정, 출력 디렉토리 생성"""
    if args.config:
        cfg = parse_run_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
    else:
        cfg = ExperimentConfig().with_seed(args.seed if args.seed is not None else config.DEFAULT_SEED)

    if args.command == "report":
        # 원본 디렉토리의 run_manifest.json을 덮어쓰지 않도록 차트는 plots/ 아래에 둠
        source = args.run_dir or args.out
        if not source:
            raise UsageError("report에는 --run 또는 --out 실행 디렉토리가 필요합니다")
        args.run_dir = source
        out_dir = Path(source) / "plots"
    else:
        out_dir = Path(args.out) if args.out else Path(config.OUTPUT_DIR) / args.command
    out_dir.mkdir(parents=True, exist_ok=True)
    return RunContext(command=args.command, args=args, cfg=cfg, out_dir=out_dir, argv=list(argv))


def run(argv: Optional[List[str]] = None) -> int:
    """
    명령행 실행

    Args:
        argv: 인자 목록 (None이면 sys.argv[1:])

    Returns:
        종료 코드
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    holder: Dict[str, RunContext] = {}

    def body() -> int:
        holder["ctx"] = make_context(args, argv)
        return COMMANDS[args.command](holder["ctx"])

    code = run_with_error_handling(args.command, body)
    if "ctx" in holder:
        write_run_manifest(holder["ctx"], code)
    return code
