"""
Box 기하 타입
단일 책임: corner 형식 box와 edge 거리 값 타입
"""
from typing import Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Box(BaseModel):
    """축 정렬 box (x1, y1, x2, y2), 양의 폭/높이"""

    model_config = ConfigDict(frozen=True)

    x1: float
    y1: float
    x2: float
    y2: float

    @model_validator(mode="after")
    def _check_extent(self) -> "Box":
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"box는 x1<x2, y1<y2 여야 합니다: ({self.x1}, {self.y1}, {self.x2}, {self.y2})")
        return self

    @classmethod
    def of(cls, coords: Sequence[float]) -> "Box":
        x1, y1, x2, y2 = (float(c) for c in coords)
        return cls(x1=x1, y1=y1, x2=x2, y2=y2)

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def translate(self, dx: float, dy: float = 0.0) -> "Box":
        return Box(x1=self.x1 + dx, y1=self.y1 + dy, x2=self.x2 + dx, y2=self.y2 + dy)

    def scale(self, factor: float) -> "Box":
        return Box(x1=self.x1 * factor, y1=self.y1 * factor, x2=self.x2 * factor, y2=self.y2 * factor)


class EdgeDistances(BaseModel):
    """예측/정답 box의 대응 edge 간 절대 거리"""

    model_config = ConfigDict(frozen=True)

    dw1: float = Field(..., ge=0.0, description="왼쪽 edge 거리")
    dw2: float = Field(..., ge=0.0, description="오른쪽 edge 거리")
    dh1: float = Field(..., ge=0.0, description="위쪽 edge 거리")
    dh2: float = Field(..., ge=0.0, description="아래쪽 edge 거리")

    @property
    def coincident(self) -> bool:
        return self.dw1 == self.dw2 == self.dh1 == self.dh2 == 0.0
