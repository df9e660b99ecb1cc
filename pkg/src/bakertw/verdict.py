"""Verifier outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """``ok`` is true iff no violation was recorded.

    Each violation is a ``(kind, witness)`` pair, e.g.
    ``("disjointness", (u, v, shared))``.
    """

    violations: list[tuple[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, kind: str, witness: object) -> None:
        self.violations.append((kind, witness))

    def kinds(self) -> set[str]:
        return {k for k, _ in self.violations}

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{k}: {w}" for k, w in self.violations)
