"""Run and check records."""

from pydantic import BaseModel, Field

from volimm.models.scenario import Scenario

FORMAT_TAG = "volimm-run/1"


class RunRecord(BaseModel):
    """Outcome of one scenario run, written as record.json."""

    scenario: Scenario
    format_tag: str = FORMAT_TAG
    wall_time_s: float = Field(ge=0.0)
    summary: dict[str, float] = Field(default_factory=dict)
    failure: str | None = None

    @property
    def ok(self) -> bool:
        """True when the run finished without a failure marker."""
        return self.failure is None


class CheckResult(BaseModel):
    """One entry of the invariant suite."""

    name: str
    value: float
    threshold: float
    passed: bool
    detail: str | None = None
