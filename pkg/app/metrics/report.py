"""
평가 리포트 스키마
단일 책임: 검출/분할 평가 결과 데이터 구조와 직렬화 형태 정의
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

# 0으로 나누는 경우의 규약 (리포트에 함께 기록)
ZERO_DENOMINATOR_CONVENTIONS = {
    "precision": "TP+FP = 0 이면 0",
    "recall": "TP+FN = 0 이면 0",
    "mdr": "TP+FN = 0 이면 0",
    "fdr": "TP+FP = 0 이면 0",
    "pixel_iou": "두 mask 모두 비어 있으면 1",
    "dice": "두 mask 모두 비어 있으면 1",
}


class EvalReport(BaseModel):
    """검출 + 분할 평가 결과"""

    precision: float = Field(..., ge=0.0, le=1.0, description="정밀도 (conf ≥ conf_threshold, IoU 0.5)")
    recall: float = Field(..., ge=0.0, le=1.0, description="재현율")
    f1: float = Field(..., ge=0.0, le=1.0, description="F1 점수")
    map50: float = Field(..., ge=0.0, le=1.0, description="mAP@0.5")
    map50_95: float = Field(..., ge=0.0, le=1.0, description="mAP@0.5:0.95")
    ap_table: Dict[str, Optional[float]] = Field(default_factory=dict, description="IoU 임계값별 AP")
    confusion_matrix: List[List[int]] = Field(..., description="이미지 단위 [[TP, FN], [FP, TN]]")
    confusion_normalized: List[List[float]] = Field(..., description="행 정규화 혼동 행렬")
    pixel_iou: Optional[float] = Field(None, ge=0.0, le=1.0, description="픽셀 IoU")
    dice: Optional[float] = Field(None, ge=0.0, le=1.0, description="Dice 계수")
    mdr: float = Field(..., ge=0.0, le=1.0, description="미검출률 (1 − R)")
    fdr: float = Field(..., ge=0.0, le=1.0, description="오검출률 (1 − P)")
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    image_count: int = Field(..., ge=0)
    conf_threshold: float = Field(0.25, ge=0.0, le=1.0)
    conventions: Dict[str, str] = Field(default_factory=lambda: dict(ZERO_DENOMINATOR_CONVENTIONS))

    @field_validator("confusion_matrix")
    @classmethod
    def _check_counts(cls, v: List[List[int]]) -> List[List[int]]:
        if len(v) != 2 or any(len(row) != 2 for row in v):
            raise ValueError("confusion_matrix는 2×2여야 합니다")
        if any(c < 0 for row in v for c in row):
            raise ValueError("confusion_matrix 항목은 음이 아닌 정수여야 합니다")
        return v

    def to_row(self) -> Dict[str, Any]:
        """실험 스윕 CSV 한 행 (평탄화)"""
        (tp_img, fn_img), (fp_img, tn_img) = self.confusion_matrix
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "map50": self.map50,
            "map50_95": self.map50_95,
            "pixel_iou": self.pixel_iou,
            "dice": self.dice,
            "mdr": self.mdr,
            "fdr": self.fdr,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "img_tp": tp_img,
            "img_fn": fn_img,
            "img_fp": fp_img,
            "img_tn": tn_img,
        }
