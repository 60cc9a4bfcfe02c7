"""Check records, reports and their text, JSON-lines and database forms.

Records are kept in canonical order (suite, then check name) so that the
same configuration and seed always produce the same bytes.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from django.db import transaction

from .dependency import Verdict
from .models import CheckResult, SuiteRun

logger = logging.getLogger(__name__)

Provenance = CheckResult.Provenance
Outcome = CheckResult.Verdict

PLUMBING = "plumbing"


def plain(value):
    """JSON-ready copy of ``value``: numpy scalars and arrays, enums and complex numbers unwrapped."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if value is None or isinstance(value, str):
        return value
    return str(value)


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    name: str
    anchor: str
    provenance: Provenance
    verdict: Outcome
    observed: float | bool | str | None
    expected: str
    tolerance: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        object.__setattr__(self, "verdict", Outcome(self.verdict))
        object.__setattr__(self, "observed", plain(self.observed))
        object.__setattr__(self, "details", plain(dict(self.details)))
        if self.tolerance is not None:
            object.__setattr__(self, "tolerance", float(self.tolerance))
        if not self.anchor:
            raise ValueError(f"Check {self.suite}/{self.name} has no anchor.")

    @property
    def key(self) -> tuple[str, str]:
        return (self.suite, self.name)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "anchor": self.anchor,
            "provenance": self.provenance.value,
            "verdict": self.verdict.value,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "details": self.details,
        }

    def to_text(self) -> str:
        tolerance = "" if self.tolerance is None else f" tol={self.tolerance:.3g}"
        return (
            f"{self.verdict.value.upper():<12} {self.suite} / {self.name}: observed={_observed(self.observed)} "
            f"expected {self.expected}{tolerance} [{self.provenance.value}: {self.anchor}]"
        )


def _observed(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


@dataclass
class Report:
    command: str
    records: list[CheckRecord] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda record: record.key)
        seen = set()
        for record in self.records:
            if record.key in seen:
                raise ValueError(f"Duplicate check {record.suite}/{record.name}.")
            seen.add(record.key)

    @classmethod
    def merge(cls, command: str, reports, label: str = "") -> Report:
        return cls(command, [record for report in reports for record in report.records], label)

    @property
    def counts(self) -> dict[str, int]:
        counts = {outcome.value: 0 for outcome in Outcome}
        for record in self.records:
            counts[record.verdict.value] += 1
        return counts

    @property
    def exit_status(self) -> int:
        """0 when everything passed, 1 on any failure, 3 when only inconclusive checks remain."""
        counts = self.counts
        if counts[Outcome.FAIL.value]:
            return 1
        if counts[Outcome.INCONCLUSIVE.value]:
            return 3
        return 0

    def summary(self) -> str:
        counts = self.counts
        return (
            f"{counts[Outcome.PASS.value]} passed, {counts[Outcome.FAIL.value]} failed, "
            f"{counts[Outcome.INCONCLUSIVE.value]} inconclusive"
        )

    def to_text(self) -> str:
        lines = []
        current = None
        for record in self.records:
            if record.suite != current:
                current = record.suite
                lines.append(f"== {current} ==")
            lines.append(record.to_text())
        heading = " ".join(part for part in (self.command, self.label) if part)
        lines.append(f"{heading}: {self.summary()}")
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        lines = [json.dumps(record.as_dict(), sort_keys=True) for record in self.records]
        lines.append(
            json.dumps(
                {"command": self.command, "label": self.label, "summary": self.counts, "exit_status": self.exit_status},
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"

    def write(self, text_path: str | Path | None = None, records_path: str | Path | None = None) -> None:
        if text_path:
            Path(text_path).write_text(self.to_text(), encoding="utf-8")
        if records_path:
            Path(records_path).write_text(self.to_jsonl(), encoding="utf-8")

    @transaction.atomic
    def store(self, *, seed: int, digest: str) -> SuiteRun:
        counts = self.counts
        run = SuiteRun(
            command=self.command,
            label=self.label,
            seed=seed,
            config_digest=digest,
            passed=counts[Outcome.PASS.value],
            failed=counts[Outcome.FAIL.value],
            inconclusive=counts[Outcome.INCONCLUSIVE.value],
        )
        run.full_clean()
        run.save()
        CheckResult.objects.bulk_create(
            [
                CheckResult(
                    run=run,
                    suite=record.suite,
                    name=record.name,
                    anchor=record.anchor,
                    provenance=record.provenance,
                    verdict=record.verdict,
                    observed=_numeric(record.observed),
                    expected=record.expected,
                    tolerance=record.tolerance,
                    payload=record.as_dict(),
                )
                for record in self.records
            ]
        )
        logger.info("Stored %s report as run %s (%s)", self.command, run.pk, self.summary())
        return run


def _numeric(value) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class CheckList:
    """Collects the records of one suite or command."""

    def __init__(self, suite: str):
        self.suite = suite
        self.records: list[CheckRecord] = []

    def add(
        self,
        name: str,
        *,
        passed: bool,
        observed,
        expected: str,
        anchor: str,
        provenance: Provenance,
        tolerance: float | None = None,
        details: dict | None = None,
        inconclusive: bool = False,
    ) -> CheckRecord:
        if inconclusive:
            verdict = Outcome.INCONCLUSIVE
        else:
            verdict = Outcome.PASS if passed else Outcome.FAIL
        record = CheckRecord(self.suite, name, anchor, provenance, verdict, observed, expected, tolerance, details or {})
        self.records.append(record)
        if verdict is not Outcome.PASS:
            logger.info("%s / %s: %s (observed %s)", self.suite, name, verdict.value, record.observed)
        return record

    def at_most(self, name: str, observed: float, tolerance: float, **kwargs) -> CheckRecord:
        observed = float(observed)
        return self.add(
            name, passed=observed <= tolerance, observed=observed, expected=f"<= {tolerance:.3g}", tolerance=tolerance, **kwargs
        )

    def above(self, name: str, observed: float, bound: float, **kwargs) -> CheckRecord:
        observed = float(observed)
        return self.add(name, passed=observed > bound, observed=observed, expected=f"> {bound:.3g}", tolerance=bound, **kwargs)

    def close_to(self, name: str, observed: float, target: float, tolerance: float, **kwargs) -> CheckRecord:
        observed = float(observed)
        return self.add(
            name,
            passed=abs(observed - target) <= tolerance,
            observed=observed,
            expected=f"{target:.6g} +- {tolerance:.3g}",
            tolerance=tolerance,
            **kwargs,
        )

    def holds(self, name: str, condition: bool, *, expected: str = "true", **kwargs) -> CheckRecord:
        return self.add(name, passed=bool(condition), observed=bool(condition), expected=expected, **kwargs)

    def probe(self, name: str, probe, expected, **kwargs) -> CheckRecord:
        """Record an independence probe; an inconclusive verdict is never a pass or a failure."""
        details = probe.as_record()
        details.update(kwargs.pop("details", None) or {})
        return self.add(
            name,
            passed=probe.verdict is expected,
            observed=probe.verdict.value,
            expected=expected.value,
            tolerance=probe.threshold,
            details=details,
            inconclusive=probe.verdict is Verdict.INCONCLUSIVE,
            **kwargs,
        )

    def report(self, command: str = "suite", label: str | None = None) -> Report:
        return Report(command, list(self.records), self.suite if label is None else label)
