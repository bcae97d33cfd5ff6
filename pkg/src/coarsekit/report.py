from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

from .io import dumps


@dataclass
class CheckRecord:
    check: str
    bound_label: str
    measured: float
    bound: float
    passed: bool


@dataclass
class VerificationReport:
    command: str
    records: list[CheckRecord] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    def at_most(self, check: str, label: str, measured: float, bound: float,
                tol: float = 0.0) -> bool:
        ok = bool(measured <= bound + tol)
        self.records.append(CheckRecord(check, label, float(measured), float(bound), ok))
        return ok

    def equal(self, check: str, label: str, measured: float, expected: float) -> bool:
        ok = bool(measured == expected)
        self.records.append(CheckRecord(check, label, float(measured), float(expected), ok))
        return ok

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "status": "pass" if self.passed else "fail",
            "records": [asdict(r) for r in self.records],
            "data": self.data,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())
