"""Verdicts and reports, serialized as deterministic JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List

from . import __version__
from .series import prec_max

PASS = "pass"
FAIL = "fail"
OUTSIDE = "outside-domain"


@dataclass
class Verdict:
    check: str
    status: str
    witness: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "status": self.status, "witness": self.witness}


@dataclass
class Report:
    scenario: str
    verdicts: List[Verdict] = field(default_factory=list)
    seed: int = 0
    precision_cap: int | None = None

    def add(self, check: str, ok: bool | str, **witness) -> Verdict:
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        v = Verdict(check, status, witness)
        self.verdicts.append(v)
        return v

    def extend(self, other: "Report", prefix: str = "") -> None:
        for v in other.verdicts:
            self.verdicts.append(Verdict(prefix + v.check, v.status, v.witness))

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failures(self) -> List[Verdict]:
        return [v for v in self.verdicts if v.status == FAIL]

    def count(self, status: str) -> int:
        return sum(1 for v in self.verdicts if v.status == status)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "summary": {
                "total": len(self.verdicts),
                "pass": self.count(PASS),
                "fail": self.count(FAIL),
                "outside-domain": self.count(OUTSIDE),
            },
            "environment": {
                "precision_cap": self.precision_cap if self.precision_cap is not None else prec_max(),
                "seed": self.seed,
                "version": __version__,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"
