"""Non-fatal problems reported alongside a translation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .astree import SourceRange


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # untranslatable | missing-attribute | unknown-operator | arity | low-content | fallback
    node_id: Optional[int]
    node_type: Optional[str]
    src: Optional[SourceRange]
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "node_id": self.node_id, "node_type": self.node_type,
                "src": str(self.src) if self.src else None, "message": self.message}
