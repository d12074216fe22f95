from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass
class Diagnostics:
    """An ordered collection of errors and warnings."""

    items: list[Diagnostic] = field(default_factory=list)

    def error(self, message: str, line: int = 0, column: int = 0) -> None:
        self.items.append(Diagnostic("error", line, column, message))

    def warning(self, message: str, line: int = 0, column: int = 0) -> None:
        self.items.append(Diagnostic("warning", line, column, message))

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == "error"]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def extend(self, other: Iterable[Diagnostic]) -> None:
        self.items.extend(other)

    def __iter__(self) -> Iterator[Diagnostic]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def format(self, filename: str = "<input>") -> str:
        return "\n".join(d.format(filename) for d in self.items)


class SpecError(Exception):
    """Raised when a specification cannot be parsed or expanded."""

    def __init__(self, diagnostics: Diagnostics):
        self.diagnostics = diagnostics
        first = diagnostics.errors[0] if diagnostics.errors else None
        text = first.format() if first else "specification error"
        super().__init__(text)

    @classmethod
    def single(cls, message: str, line: int = 0, column: int = 0) -> "SpecError":
        diags = Diagnostics()
        diags.error(message, line, column)
        return cls(diags)


class SpecSyntaxError(SpecError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        diags = Diagnostics()
        diags.error(message, line, column)
        super().__init__(diags)
