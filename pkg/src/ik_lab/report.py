"""Suite reports: per-check instance/violation counts with replayable examples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = "ik-lab/1"
MAX_EXAMPLES = 5


@dataclass
class CheckResult:
    name: str
    gating: bool = True
    instances: int = 0
    violations: int = 0
    examples: list[dict] = field(default_factory=list)
    note: str | None = None

    def record(self, ok: bool, example=None, weight: int = 1) -> None:
        """Count ``weight`` instances; ``example`` may be a zero-arg callable."""
        self.instances += weight
        if not ok:
            self.violations += weight
            if len(self.examples) < MAX_EXAMPLES and example is not None:
                self.examples.append(example() if callable(example) else example)

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "gating": self.gating,
            "instances": self.instances,
            "violations": self.violations,
            "examples": self.examples,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    suite: str
    bounds: dict = field(default_factory=dict)
    checks: dict[str, CheckResult] = field(default_factory=dict)
    instances: int = 0
    degenerate: int = 0
    info: dict = field(default_factory=dict)

    def check(self, name: str, gating: bool = True, note: str | None = None) -> CheckResult:
        if name not in self.checks:
            self.checks[name] = CheckResult(name, gating, note=note)
        return self.checks[name]

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks.values() if c.gating)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "bounds": self.bounds,
            "instances": self.instances,
            "degenerate": self.degenerate,
            "gating_violations": self.violations,
            "passed": self.passed,
            "info": self.info,
            "checks": {name: c.to_json() for name, c in self.checks.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def merge(suite: str, reports: list[Report]) -> dict:
    return {
        "schema": SCHEMA,
        "suite": suite,
        "passed": all(r.passed for r in reports),
        "gating_violations": sum(r.violations for r in reports),
        "suites": {r.suite: r.to_json() for r in reports},
    }
