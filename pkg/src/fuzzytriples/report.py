"""Itemised pass/fail reports shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    max_deviation: float
    description: str = ""
    id: int | None = None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "description": self.description,
            "pass": bool(self.passed),
            "max_deviation": float(self.max_deviation),
        }
        if self.id is not None:
            d["id"] = self.id
        return d


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, name, deviation, tol, description="", id=None, passed=None) -> Check:
        deviation = float(deviation)
        if passed is None:
            passed = deviation <= tol
        c = Check(name, bool(passed), deviation, description, id)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, key) -> Check:
        for c in self.checks:
            if c.name == key or c.id == key:
                return c
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks], **self.notes}

    def table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=4)
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{c.name:<{width}}  {tag}  {c.max_deviation:.3e}")
        return "\n".join(lines)
