"""Report data models."""
from typing import Literal

from pydantic import BaseModel, model_validator


class CheckRecord(BaseModel):
    """One verified property: the worst trial's measured value against its bound."""

    check: str
    anchor: str
    status: Literal["pass", "fail"]
    measured: float
    bound: float
    tolerance: float


class Summary(BaseModel):
    total: int
    passed: int
    failed: int


class Report(BaseModel):
    config: dict
    records: list[CheckRecord]
    summary: Summary
    wall_clock: float | None = None

    @model_validator(mode="after")
    def counts_match(self) -> "Report":
        passed = sum(r.status == "pass" for r in self.records)
        expected = (len(self.records), passed, len(self.records) - passed)
        if (self.summary.total, self.summary.passed, self.summary.failed) != expected:
            raise ValueError(f"summary {self.summary} does not match records {expected}")
        return self

    @classmethod
    def build(cls, config: dict, records: list[CheckRecord], wall_clock: float | None = None) -> "Report":
        passed = sum(r.status == "pass" for r in records)
        return cls(
            config=config,
            records=records,
            summary=Summary(total=len(records), passed=passed, failed=len(records) - passed),
            wall_clock=wall_clock,
        )

    @property
    def ok(self) -> bool:
        return self.summary.failed == 0
