"""Database models for stored verification reports."""

import re

from django.core.exceptions import ValidationError
from django.db import models

_DIGEST = re.compile(r"^[0-9a-f]{64}$")


class SuiteRun(models.Model):
    """One command invocation whose report was kept with ``--store``."""

    command = models.CharField(max_length=32)
    label = models.CharField(
        max_length=200,
        blank=True,
        help_text="Suite name or input file the command ran on.",
    )
    seed = models.IntegerField(default=0)
    config_digest = models.CharField(max_length=64, help_text="sha256 of the run configuration.")
    passed = models.PositiveIntegerField(default=0)
    failed = models.PositiveIntegerField(default=0)
    inconclusive = models.PositiveIntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at", "-pk"]

    def clean(self):
        if not _DIGEST.match(self.config_digest):
            raise ValidationError("config_digest must be a lowercase sha256 hex digest.")

    def __str__(self) -> str:  # pragma: no cover - trivial
        return f"{self.command} {self.label} ({self.passed}/{self.failed}/{self.inconclusive})"

    @property
    def exit_status(self) -> int:
        if self.failed:
            return 1
        if self.inconclusive:
            return 3
        return 0


class CheckResult(models.Model):
    """A single check of a stored run."""

    class Provenance(models.TextChoices):
        PUBLISHED = "published", "Published"
        DERIVED = "derived", "Derived"
        TRIVIAL = "trivial", "Trivial"

    class Verdict(models.TextChoices):
        PASS = "pass", "Pass"
        FAIL = "fail", "Fail"
        INCONCLUSIVE = "inconclusive", "Inconclusive"

    run = models.ForeignKey(
        SuiteRun,
        related_name="results",
        on_delete=models.CASCADE,
    )
    suite = models.CharField(max_length=64)
    name = models.CharField(max_length=200)
    anchor = models.CharField(max_length=255, help_text='Source phrase of the expected value, or "plumbing".')
    provenance = models.CharField(max_length=16, choices=Provenance.choices)
    verdict = models.CharField(max_length=16, choices=Verdict.choices)
    observed = models.FloatField(null=True, blank=True)
    expected = models.CharField(max_length=255, blank=True)
    tolerance = models.FloatField(null=True, blank=True)
    payload = models.JSONField(default=dict, blank=True)

    class Meta:
        ordering = ["suite", "name"]
        unique_together = ("run", "suite", "name")

    def clean(self):
        if not self.anchor.strip():
            raise ValidationError("Every check names the source of its expected value.")

    def __str__(self) -> str:  # pragma: no cover - trivial
        return f"{self.suite}/{self.name}: {self.verdict}"
