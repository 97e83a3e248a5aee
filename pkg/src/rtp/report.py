"""Machine-checkable verification reports with per-item numeric defects."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA = "rtp/1"


def _fmt(x: float) -> float:
    # round-trip through 17 significant digits so serialized output is stable
    return float(f"{float(x):.17g}")


@dataclass
class Defect:
    where: str
    value: float

    def to_json(self):
        return {"where": self.where, "value": _fmt(self.value)}


@dataclass
class VerificationReport:
    check: str
    passed: bool
    defects: list[Defect] = field(default_factory=list)
    tol: float = 1e-9
    ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def add(self, where: str, value: float):
        self.defects.append(Defect(where, float(value)))

    def max_defect(self) -> float:
        return max((d.value for d in self.defects), default=0.0)

    def settle(self) -> "VerificationReport":
        """Set pass/fail from the recorded defects against the tolerance."""
        self.passed = self.max_defect() <= self.tol
        return self

    def to_json(self, with_timing: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "check": self.check,
            "pass": bool(self.passed),
            "defects": sorted((d.to_json() for d in self.defects),
                              key=lambda d: d["where"]),
            "tol": _fmt(self.tol),
            # timing is only serialized on request so that equal-seed reruns
            # produce byte-identical reports
            "ms": _fmt(self.ms) if with_timing else 0.0,
        }
        if self.extra:
            out["extra"] = _jsonify(self.extra)
        return out

    def dumps(self, with_timing: bool = False) -> str:
        return json.dumps(self.to_json(with_timing), sort_keys=True)


def _jsonify(x):
    if isinstance(x, dict):
        return {str(k): _jsonify(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    if isinstance(x, float):
        return _fmt(x)
    if isinstance(x, complex):
        return [_fmt(x.real), _fmt(x.imag)]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return str(x)
