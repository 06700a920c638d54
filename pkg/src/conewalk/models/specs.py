"""Cone and step-law specifications as they appear in config files."""

import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils import to_exact
from .enums import DistributionKind, WeylFamily

Coefficient = int | float | str


class ConeSpec(BaseModel):
    """Either a Weyl family with a dimension, or an explicit list of linear forms."""

    model_config = ConfigDict(extra="forbid")

    family: WeylFamily | None = Field(default=None, description="Weyl chamber type A, C or D")
    dimension: int | None = Field(default=None, ge=1, description="Dimension d for a Weyl family")
    forms: list[list[Coefficient]] | None = Field(
        default=None,
        description=(
            "Coefficient vectors of the linear forms. Entries may be integers, decimals, "
            "fraction strings ('1/2') or surd strings ('1+sqrt(2)')."
        ),
    )
    x0: list[float] | None = Field(default=None, description="Interior direction override")
    R: float | None = Field(default=None, gt=0, description="Shift radius override")
    label: str | None = Field(default=None, description="Free-text label used in outputs")

    @field_validator("forms")
    @classmethod
    def _forms_are_exact_numbers(cls, forms: list[list[Coefficient]] | None):
        if forms is None:
            return forms
        if not forms:
            raise ValueError("at least one form is required")
        for row in forms:
            for value in row:
                to_exact(value)
        return forms

    @model_validator(mode="after")
    def _one_description(self) -> Self:
        if (self.family is None) == (self.forms is None):
            raise ValueError("give exactly one of 'family' (with 'dimension') or 'forms'")
        if self.family is not None and self.dimension is None:
            raise ValueError("'dimension' is required with 'family'")
        return self

    @property
    def resolved_dimension(self) -> int:
        if self.forms is not None:
            return len(self.forms[0])
        assert self.dimension is not None
        return self.dimension


class DistributionSpec(BaseModel):
    """A step law by kind, with the parameters that kind needs."""

    model_config = ConfigDict(extra="forbid")

    kind: DistributionKind = Field(description="Registered law")
    q: Coefficient | None = Field(default=None, description="Holding probability, 0 < q < 1")
    a: Coefficient | None = Field(default=None, description="Pareto tail index, a > 2")
    table: dict[str, Coefficient] | None = Field(
        default=None, description="Support value -> probability (exact strings recommended)"
    )

    @model_validator(mode="after")
    def _parameters_match_kind(self) -> Self:
        if self.kind is DistributionKind.LAZY_RADEMACHER:
            if self.q is None:
                raise ValueError("lazy_rademacher needs 'q'")
            q = to_exact(self.q)
            if not 0 < q < 1:
                raise ValueError(f"q must lie in (0, 1), got {self.q}")
        elif self.kind is DistributionKind.PARETO_STD:
            if self.a is None:
                raise ValueError("pareto_std needs 'a'")
            if not to_exact(self.a) > 2:
                raise ValueError(f"a must exceed 2, got {self.a}")
        elif self.kind is DistributionKind.DISCRETE:
            if not self.table:
                raise ValueError("discrete needs a non-empty 'table'")
            for value, prob in self.table.items():
                to_exact(value)
                if not to_exact(prob) > 0:
                    raise ValueError(f"probability of {value} must be positive")
            total = sum((to_exact(p) for p in self.table.values()), to_exact(0))
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not exactly 1")
        return self
