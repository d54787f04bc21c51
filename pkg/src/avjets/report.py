from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field


@dataclass
class Finding:
    inputs: str
    expected: str
    actual: str
    residual: str = ""

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "expected": self.expected,
            "actual": self.actual,
            "residual": self.residual,
        }


@dataclass
class CheckReport:
    """Outcome of a verification run; it passes iff no findings were recorded."""

    name: str
    findings: list[Finding] = field(default_factory=list)
    seed: int | None = None
    checked: int = 0
    elapsed: float = 0.0
    info: dict = field(default_factory=dict)
    parts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.findings

    def __bool__(self) -> bool:
        return self.passed

    def fail(self, inputs, expected, actual, residual="") -> None:
        self.findings.append(Finding(str(inputs), str(expected), str(actual), str(residual)))

    def expect_equal(self, inputs, expected, actual, residual=None) -> bool:
        self.checked += 1
        if expected == actual:
            return True
        if residual is None:
            try:
                residual = actual - expected
            except Exception:
                residual = ""
        self.fail(inputs, expected, actual, residual)
        return False

    def expect_true(self, inputs, ok: bool, detail: str = "") -> bool:
        self.checked += 1
        if not ok:
            self.fail(inputs, "true", "false", detail)
        return ok

    def merge(self, other: CheckReport, prefix: str | None = None) -> None:
        tag = prefix if prefix is not None else other.name
        for f in other.findings:
            self.findings.append(Finding(f"[{tag}] {f.inputs}", f.expected, f.actual, f.residual))
        self.checked += other.checked
        self.parts.append({"name": tag, "passed": other.passed, "checked": other.checked})
        if other.info:
            self.info[tag] = other.info

    @contextmanager
    def timed(self):
        start = time.perf_counter()
        try:
            yield self
        finally:
            self.elapsed += time.perf_counter() - start

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "seed": self.seed,
            "checked": self.checked,
            "findings": [f.to_dict() for f in self.findings],
            "info": self.info,
            "parts": self.parts,
        }
        if include_timing:
            out["elapsed_seconds"] = round(self.elapsed, 6)
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True, default=str)

    def to_text(self, max_findings: int = 20) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status} {self.name}: {self.checked} checks, {len(self.findings)} findings"
                 f" (seed={self.seed}, {self.elapsed:.2f}s)"]
        for part in self.parts:
            lines.append(f"  [{'pass' if part['passed'] else 'FAIL'}] {part['name']} ({part['checked']} checks)")
        for key in sorted(self.info):
            lines.append(f"  {key}: {self.info[key]}")
        for f in self.findings[:max_findings]:
            lines.append(f"  - {f.inputs}")
            lines.append(f"      expected: {f.expected}")
            lines.append(f"      actual:   {f.actual}")
            if f.residual:
                lines.append(f"      residual: {f.residual}")
        if len(self.findings) > max_findings:
            lines.append(f"  ... {len(self.findings) - max_findings} more")
        return "\n".join(lines)
