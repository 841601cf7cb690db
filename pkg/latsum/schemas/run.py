"""
Command-line request and report envelopes.
"""
from __future__ import annotations

import math
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from latsum.schemas.base import Point3, SumParams

__all__ = [
    "RunConfig",
    "MethodValue",
    "ComparisonRow",
    "ComparisonReport",
    "RunReport",
    "PI_POINT",
]

PI_POINT: Point3 = (math.pi, math.pi, math.pi)


class RunConfig(BaseModel):
    subcommand: Literal["shells", "sum", "oracle", "compare"]
    method: Optional[Literal["plain", "cesaro", "fourier", "blocks", "greens"]] = None
    methods: list[str] = Field(default_factory=list, description="compare tokens")
    params: Optional[SumParams] = None
    dim: int = Field(3, description="shells only; validated by the table builder")
    kappa: float = Field(0.0, ge=0)
    max_n: Optional[int] = Field(None, ge=0)
    radius: int = Field(200, ge=1, description="node radius of the a = 0 oracle")
    x: Point3 = PI_POINT
    tol: Optional[float] = Field(None, gt=0, description="method default when unset")
    block_tol: float = Field(0.05, gt=0)
    series: bool = False
    output_format: Literal["csv", "json"] = "csv"
    output: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)
    timestamp: bool = True

    @model_validator(mode="after")
    def _method_fields(self):
        if self.subcommand in ("sum", "oracle", "compare") and self.params is None:
            raise ValueError(f"{self.subcommand} requires --a and --s")
        if self.subcommand == "shells" and self.max_n is None:
            raise ValueError("shells requires --max-n")
        if self.subcommand == "sum":
            if self.method is None:
                raise ValueError("sum requires --method")
            if self.method in ("plain", "cesaro", "fourier") and not self.max_n:
                raise ValueError(f"method {self.method} requires --max-n >= 1")
            if self.series and self.method not in ("plain", "cesaro", "fourier"):
                raise ValueError("--series applies to plain, cesaro and fourier only")
        if self.subcommand == "compare" and len(self.methods) < 2:
            raise ValueError("compare needs at least two methods")
        return self


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class MethodValue(BaseModel):
    """One method's estimate of the target value."""
    method: str
    value: float
    detail: dict[str, Any] = Field(default_factory=dict)


class ComparisonRow(BaseModel):
    left: str
    right: str
    left_value: float
    right_value: float
    deviation: float
    within_tol: bool


class ComparisonReport(BaseModel):
    params: SumParams
    tol: float
    values: list[MethodValue]
    rows: list[ComparisonRow]
    passed: bool


class RunReport(BaseModel):
    """JSON envelope written by every sub-command with ``--format json``."""
    subcommand: Literal["shells", "sum", "oracle", "compare"]
    params: dict[str, Any] = Field(default_factory=dict, description="run metadata")
    result: Union[ComparisonReport, dict[str, Any]]
