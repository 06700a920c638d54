"""Verification report models."""

from pathlib import Path

from pydantic import BaseModel, Field, computed_field

from ..io.persistence import PydanticPersistence
from .fits import ExponentFit


class CriterionResult(BaseModel):
    """PASS/FAIL of one criterion with the numbers behind it."""

    name: str = Field(description="Criterion name")
    passed: bool = Field(description="Whether the criterion holds")
    detail: str = Field(default="", description="One-line explanation")
    values: dict[str, float] = Field(default_factory=dict, description="Measured quantities")
    skipped: bool = Field(default=False, description="Not applicable to this configuration")


class StartFits(BaseModel):
    """Both exponent fits and the profiled kappa for one starting point."""

    x: list[float] = Field(description="Starting point")
    loglog: ExponentFit | None = Field(default=None, description="Weighted log-log fit")
    ratio: ExponentFit | None = Field(default=None, description="Last doubling ratio")
    kappa: float | None = Field(default=None, description="n^(p/2) P(tau_x > n) / V(x)")


class VerificationReport(BaseModel):
    """Everything `conewalk verify` measured, with provenance."""

    version: str = Field(description="conewalk version")
    config_hash: str = Field(description="SHA-256 of the validated config")
    cone_label: str = Field(description="Cone under test")
    distribution: str = Field(description="Step law under test")
    target_p: int = Field(description="Degree of h; the tail exponent is p/2")
    criteria: list[CriterionResult] = Field(default_factory=list)
    starts: list[StartFits] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def failed(self) -> list[str]:
        return [c.name for c in self.criteria if not c.passed]

    def criterion(self, name: str) -> CriterionResult:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)

    def save(self, path: Path) -> None:
        PydanticPersistence.save_json(self, path, backup=False)

    def summary_lines(self) -> list[str]:
        """Human-readable PASS/FAIL lines."""
        lines = [f"{self.cone_label} under {self.distribution} (p = {self.target_p})"]
        for c in self.criteria:
            status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
            lines.append(f"  [{status}] {c.name}: {c.detail}")
        lines.append("PASSED" if self.passed else f"FAILED: {', '.join(self.failed())}")
        return lines
