"""JSON verification reports and their plain-text table rendering."""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Optional

from . import __version__
from .results import FAIL, STATUSES, CheckResult

SCHEMA = "symspin-report/1"


def build_report(command: str, config: Dict[str, Any], records: Iterable[CheckResult],
                 artifacts: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Assemble a report; record order is kept exactly as given."""
    records = list(records)
    counts = {s: sum(r.status == s for r in records) for s in STATUSES}
    report = {
        "schema": SCHEMA,
        "tool": {"name": "symspin", "version": __version__},
        "command": command,
        "config": config,
        "records": [r.to_json() for r in records],
        "summary": {"records": len(records), "counts": counts, "ok": counts[FAIL] == 0},
    }
    if artifacts:
        report["artifacts"] = artifacts
    return report


def dumps(report: Dict[str, Any]) -> str:
    """Canonical serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def exit_code(report: Dict[str, Any]) -> int:
    return 0 if report["summary"]["ok"] else 1


def render_table(report: Dict[str, Any], timings: Optional[List[float]] = None) -> str:
    """One line per record: status, name, block dims."""
    recs = report["records"]
    width = max([len(r["name"]) for r in recs] + [4])
    lines = [f"{'status':<8} {'name':<{width}}  dims"]
    for n, r in enumerate(recs):
        dims = ", ".join(f"{k}={v}" for k, v in sorted(r["dims"].items()))
        line = f"{r['status']:<8} {r['name']:<{width}}  {dims}"
        if timings is not None and n < len(timings):
            line += f"  [{timings[n]:.2f}s]"
        lines.append(line)
    c = report["summary"]["counts"]
    lines.append(" ".join(f"{k}={c[k]}" for k in STATUSES))
    return "\n".join(lines)
