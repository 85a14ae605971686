"""Validation reports and the exception hierarchy shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class GalcatError(Exception):
    """Base class for all errors raised by galcat."""


class ShapeError(GalcatError, ValueError):
    """Operands do not fit together (mismatched sources, targets, objects)."""


class ValidationError(GalcatError, ValueError):
    """A structural law failed; ``law`` names it and ``witness`` exhibits it."""

    def __init__(self, law: str, witness: Any = None, detail: str = ""):
        self.law = law
        self.witness = witness
        self.detail = detail
        msg = f"{law} violated"
        if witness is not None:
            msg += f" at {witness!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class CrossValidationError(GalcatError):
    """The computed fundamental category disagrees with the test-family equaliser."""

    def __init__(self, level: int, pair: tuple[int, int], detail: str):
        self.level = level
        self.pair = pair
        super().__init__(f"cross-validation mismatch at level {level}, hom {pair}: {detail}")


class GeneratorBoundError(GalcatError):
    """A required test object does not fit under ``generator_bound``."""


class RealizationError(GalcatError):
    """A stage of the realization pipeline failed; ``stage`` is its tag."""

    def __init__(self, stage: str, detail: str):
        self.stage = stage
        super().__init__(f"[{stage}] {detail}")


class WindowExhausted(GalcatError):
    """No witness was found among the enumerated nodes."""


@dataclass(frozen=True)
class Violation:
    law: str
    witness: Any
    detail: str = ""

    def __str__(self) -> str:
        s = f"{self.law}: {self.witness!r}"
        return f"{s} ({self.detail})" if self.detail else s


@dataclass
class ValidationReport:
    """Collects violations. An empty report means the object passed."""

    subject: str = ""
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, witness: Any, detail: str = "") -> None:
        self.violations.append(Violation(law, witness, detail))

    def tick(self, n: int = 1) -> None:
        self.checked += n

    def extend(self, other: ValidationReport, prefix: str = "") -> None:
        self.checked += other.checked
        for v in other.violations:
            law = f"{prefix}{v.law}" if prefix else v.law
            self.violations.append(Violation(law, v.witness, v.detail))

    def raise_if_failed(self) -> None:
        if self.violations:
            v = self.violations[0]
            raise ValidationError(v.law, v.witness, v.detail)

    def lines(self) -> list[str]:
        head = f"{self.subject or 'report'}: {'ok' if self.ok else 'FAILED'} ({self.checked} checks, {len(self.violations)} violations)"
        return [head] + [f"  - {v}" for v in self.violations]

    def __str__(self) -> str:
        return "\n".join(self.lines())
