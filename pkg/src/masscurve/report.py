"""Pass/fail condition reports with witness points."""

from __future__ import annotations

from dataclasses import dataclass, field


PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


@dataclass
class CheckResult:
    """Single verdict: a named check, its outcome and the points that decided it."""

    name: str
    verdict: str
    witnesses: list = field(default_factory=list)
    detail: str = ""
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


@dataclass
class ConditionReport:
    """Bundle of CheckResults plus the grid / settings they were computed on."""

    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name, verdict, witnesses=None, detail="", values=None):
        self.checks.append(
            CheckResult(name, verdict, list(witnesses or []), detail, dict(values or {}))
        )

    def __getitem__(self, name) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_pass(self) -> bool:
        return all(c.verdict == PASS for c in self.checks)

    @property
    def any_fail(self) -> bool:
        return any(c.verdict == FAIL for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "verdict": c.verdict,
                    "witnesses": c.witnesses,
                    "detail": c.detail,
                    "values": c.values,
                }
                for c in self.checks
            ],
            "metadata": self.metadata,
        }
