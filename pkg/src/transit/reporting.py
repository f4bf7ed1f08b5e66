"""Report structure and deterministic serialisation.

Reports serialise to byte-identical JSON for identical requests: keys are
sorted, rationals render as "p/q" with a fixed-precision decimal twin, and
floats are normalised to twelve significant digits.  The CSV projection is
a flat numeric view (section, name, exact, decimal).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

DECIMAL_DIGITS = 12


def render_value(value: Any) -> Any:
    """Normalise one leaf for JSON output."""
    if isinstance(value, Fraction):
        return {
            "exact": f"{value.numerator}/{value.denominator}"
            if value.denominator != 1
            else str(value.numerator),
            "decimal": _decimal(value),
        }
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return float(f"{value:.{DECIMAL_DIGITS}g}")
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): render_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render_value(v) for v in value]
    return str(value)


def _decimal(value: Fraction) -> str:
    return f"{float(value):.{DECIMAL_DIGITS}g}"


@dataclass
class Report:
    """Structured results of one CLI request.

    `status` follows the exit-code contract: 0 when every asserted
    inequality holds, 1 when at least one failed (a finding).  `findings`
    lists the failed assertions in human-readable form; `provenance` names
    the fixture and its anchor when the input is a shipped instance.
    """

    kind: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    @property
    def status(self) -> int:
        return 1 if self.findings else 0

    def record(self, name: str, holds: bool | None, detail: str = "") -> None:
        if holds is False:
            self.findings.append(f"{name}: {detail}" if detail else name)

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "inputs": render_value(self.inputs),
            "results": render_value(self.results),
            "provenance": render_value(self.provenance),
            "findings": list(self.findings),
            "status": self.status,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("section,name,exact,decimal\n")

        def emit(section: str, name: str, value: Any) -> None:
            if isinstance(value, Fraction):
                exact = render_value(value)
                out.write(f"{section},{name},{exact['exact']},{exact['decimal']}\n")
            elif isinstance(value, bool):
                out.write(f"{section},{name},{value},{int(value)}\n")
            elif isinstance(value, (int, float)):
                out.write(f"{section},{name},,{render_value(float(value))}\n")

        def walk(section: str, node: Any) -> None:
            if isinstance(node, dict):
                for k in sorted(node):
                    walk(f"{section}.{k}" if section else str(k), node[k])
            elif isinstance(node, (list, tuple)):
                for idx, v in enumerate(node):
                    walk(f"{section}[{idx}]", v)
            else:
                head, _, name = section.rpartition(".")
                emit(head or section, name or section, node)

        walk("", self.results)
        out.write(f"status,exit,,{self.status}\n")
        return out.getvalue()

    def render(self, fmt: str = "json") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")
