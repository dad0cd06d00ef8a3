"""
SVG 차트
단일 책임: 실행 디렉토리의 CSV 산출물을 선 그래프로 렌더링

matplotlib Agg 백엔드를 사용하며, 같은 CSV에서는 같은 SVG 바이트가 나오도록
날짜 메타데이터와 해시 salt를 고정합니다.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from ..core.exceptions import DataFormatError  # noqa: E402
from ..training.trainer import ema  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "cracklab"
plt.rcParams["svg.fonttype"] = "none"

SVG_METADATA = {"Date": None, "Creator": None}


def line_chart(
    path: Union[str, Path],
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    title: str,
    xlabel: str,
    ylabel: str,
    ylim: Optional[tuple] = None,
) -> Path:
    """
    여러 계열을 한 축에 그린 SVG 선 그래프 저장

    Args:
        path: 출력 .svg 경로
        x: 공통 x 값
        series: 범례 이름 → y 값
        title, xlabel, ylabel: 축 라벨
        ylim: y 범위 (None이면 자동)

    Returns:
        저장한 경로
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        for label, values in series.items():
            ax.plot(list(x), list(values), label=label, linewidth=1.2)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if ylim is not None:
            ax.set_ylim(*ylim)
        ax.grid(True, alpha=0.3)
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata=SVG_METADATA)
    finally:
        plt.close(fig)
    logger.info(f"💾 차트 저장: {path}")
    return path


def _require(frame: pd.DataFrame, columns: Sequence[str], name: str) -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{name}에 열 {missing}이 없습니다")


def plot_epochs(frame: pd.DataFrame, out_dir: Path) -> List[Path]:
    """epochs.csv → 손실 곡선, 지표 곡선"""
    _require(frame, ("epoch", "loss", "obj", "box", "mask", "precision", "recall", "map50"), "epochs.csv")
    epochs = frame["epoch"]
    paths = [
        line_chart(
            out_dir / "loss.svg", epochs,
            {c: frame[c] for c in ("loss", "obj", "box", "mask")},
            "Training loss", "epoch", "loss",
        ),
        line_chart(
            out_dir / "metrics.svg", epochs,
            {c: frame[c] for c in ("precision", "recall", "map50", "map50_95") if c in frame.columns},
            "Held-out metrics", "epoch", "value", ylim=(0.0, 1.0),
        ),
    ]
    return paths


def plot_steps(frame: pd.DataFrame, out_dir: Path) -> List[Path]:
    """학습 step trace → 원 손실과 지수 이동 평균"""
    _require(frame, ("step", "loss"), "trace.csv")
    values = frame["loss"].tolist()
    return [
        line_chart(
            out_dir / "step_loss.svg", frame["step"],
            {"loss": values, "ema": ema(values)},
            "Step loss", "step", "loss",
        )
    ]


def plot_race(frame: pd.DataFrame, out_dir: Path) -> List[Path]:
    """경주 trace → 손실 종류별 평균 IoU, 평균 손실"""
    _require(frame, ("loss", "step", "loss_value", "mean_iou"), "trace.csv")
    groups = {kind: g.sort_values("step") for kind, g in frame.groupby("loss", sort=True)}
    steps = next(iter(groups.values()))["step"] if groups else []
    return [
        line_chart(
            out_dir / "race_iou.svg", steps,
            {kind: g["mean_iou"] for kind, g in groups.items()},
            "Box regression race", "step", "mean IoU", ylim=(0.0, 1.0),
        ),
        line_chart(
            out_dir / "race_loss.svg", steps,
            {kind: g["loss_value"] for kind, g in groups.items()},
            "Box regression loss", "step", "mean loss",
        ),
    ]


def plot_pr_curve(frame: pd.DataFrame, out_dir: Path) -> List[Path]:
    _require(frame, ("recall", "precision", "interpolated"), "pr_curve.csv")
    return [
        line_chart(
            out_dir / "pr_curve.svg", frame["recall"],
            {"precision": frame["precision"], "envelope": frame["interpolated"]},
            "Precision-recall (IoU 0.5)", "recall", "precision", ylim=(0.0, 1.05),
        )
    ]


def plot_confidence(frame: pd.DataFrame, out_dir: Path) -> List[Path]:
    _require(frame, ("confidence", "precision", "recall", "f1"), "confidence.csv")
    return [
        line_chart(
            out_dir / "confidence.svg", frame["confidence"],
            {c: frame[c] for c in ("precision", "recall", "f1")},
            "Metrics vs confidence", "confidence", "value", ylim=(0.0, 1.05),
        )
    ]


def render_report(run_dir: Union[str, Path], out_dir: Optional[Union[str, Path]] = None) -> List[Path]:
    """
    실행 디렉토리의 알려진 CSV마다 차트 렌더링 (out_dir 기본값은 run_dir)

    trace.csv는 열 구성으로 경주 trace와 학습 step trace를 구분합니다.

    Raises:
        DataFormatError: 그릴 CSV가 하나도 없는 경우
    """
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    paths: List[Path] = []
    if (run_dir / "epochs.csv").is_file():
        paths += plot_epochs(pd.read_csv(run_dir / "epochs.csv"), out_dir)
    if (run_dir / "trace.csv").is_file():
        trace = pd.read_csv(run_dir / "trace.csv")
        paths += plot_race(trace, out_dir) if "mean_iou" in trace.columns else plot_steps(trace, out_dir)
    if (run_dir / "pr_curve.csv").is_file():
        paths += plot_pr_curve(pd.read_csv(run_dir / "pr_curve.csv"), out_dir)
    if (run_dir / "confidence.csv").is_file():
        paths += plot_confidence(pd.read_csv(run_dir / "confidence.csv"), out_dir)
    if not paths:
        raise DataFormatError(f"{run_dir}에 차트를 그릴 CSV(epochs/trace/pr_curve/confidence)가 없습니다")
    logger.info(f"✅ 차트 {len(paths)}개 렌더링: {run_dir}")
    return paths
