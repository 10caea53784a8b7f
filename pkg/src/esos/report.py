"""Run reports shared by the embedder pipeline and the harness."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Report:
    scope: dict
    counts: dict
    failures: list = field(default_factory=list)
    timing: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self, include_timing: bool = False) -> dict:
        # timing is excluded by default so identical runs serialize identically
        out = {
            "scope": self.scope,
            "counts": self.counts,
            "failures": self.failures,
            "notes": self.notes,
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def dumps(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_json(include_timing), sort_keys=True)
