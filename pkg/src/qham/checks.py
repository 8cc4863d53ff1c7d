"""Verdict containers shared by the verifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class IdentityViolation(AssertionError):
    """An identity that must hold by construction failed on a concrete instance."""

    def __init__(self, identity: str, witness: dict | None = None) -> None:
        self.identity = identity
        self.witness = witness or {}
        super().__init__(f"{identity} violated: {self.witness}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: dict | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        out = {"name": self.name, "verdict": self.verdict, "witness": self.witness}
        if self.detail:
            out["detail"] = self.detail
        return out


def scalar_json(x) -> str:
    from .qnum import format_scalar

    return format_scalar(x)
