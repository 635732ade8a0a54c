"""Check records shared by the verification modules and the report writer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

PASS = "PASS"
FAIL = "FAIL"
VACUOUS = "VACUOUS"
FINDING = "FINDING"
STATUSES = (PASS, FAIL, VACUOUS, FINDING)


@dataclass
class CheckResult:
    """One verification record.

    ``anchor`` names the mathematical claim being checked in words;
    ``witness`` is a JSON-ready description of a counterexample (FAIL) or of
    a nonzero finding.
    """

    name: str
    anchor: str
    status: str
    witness: Optional[Any] = None
    dims: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError("FAIL records must carry a witness")

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> Dict[str, Any]:
        out = {"name": self.name, "anchor": self.anchor, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        out["dims"] = self.dims
        if self.details:
            out["details"] = self.details
        return out


def form_to_json(psi) -> list:
    """Exact, 1-based serialization of a :class:`SpinorForm`."""
    rows = []
    for (I_, alpha), c in sorted(psi.terms.items()):
        rows.append({"eps": [k + 1 for k in I_], "x": list(alpha), "c": str(c)})
    return rows
