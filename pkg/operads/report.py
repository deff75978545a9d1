from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    witness: Any = None

    def to_json(self) -> dict:
        out = {"rule": self.rule, "message": self.message}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class CheckReport:
    """Outcome of an axiom checker. Empty violation list means pass."""

    subject: str
    violations: list[Violation] = field(default_factory=list)
    # auxiliary data kept for auditability (projection matrices, counts)
    details: dict = field(default_factory=dict)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, rule: str, message: str, witness: Any = None) -> None:
        self.violations.append(Violation(rule, message, witness))

    def rules_failed(self) -> set[str]:
        return {v.rule for v in self.violations}

    def merge(self, other: "CheckReport") -> None:
        self.violations.extend(other.violations)
        self.checked += other.checked

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "checked": self.checked,
            "violations": [v.to_json() for v in self.violations],
            "details": self.details,
        }

    def summary(self) -> str:
        if self.ok:
            return f"✅ {self.subject}: pass ({self.checked} checks)"
        return f"❌ {self.subject}: {len(self.violations)} violation(s) in {self.checked} checks"
