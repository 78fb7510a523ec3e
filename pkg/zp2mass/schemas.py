from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_serializer, model_validator


class Family(str, Enum):
    SO = "so"
    SELF_DUAL = "self-dual"
    EVEN_ONE = "even-one"
    EVEN_PM1 = "even-pm1"
    TYPE2_ONE = "type2-one"
    TYPE2_PM1 = "type2-pm1"

    @property
    def quaternary_only(self) -> bool:
        return self not in (Family.SO, Family.SELF_DUAL)

    @property
    def typed(self) -> bool:
        # families whose members are fixed by a single type {k1, k2}
        return self in (Family.SO, Family.EVEN_ONE, Family.EVEN_PM1)


class MassTerm(BaseModel):
    k1: int
    k2: int
    term: int

    @field_serializer("term")
    def as_decimal(self, v: int) -> str:
        return str(v)


class MassReport(BaseModel):
    family: Family
    p: int
    n: int
    k1: Optional[int] = None
    k2: Optional[int] = None
    value: int
    breakdown: Optional[List[MassTerm]] = None
    diagnostic: Optional[str] = None

    @field_serializer("value")
    def as_decimal(self, v: int) -> str:
        return str(v)

    @model_validator(mode="after")
    def breakdown_sums(self) -> "MassReport":
        if self.breakdown is not None and sum(t.term for t in self.breakdown) != self.value:
            raise ValueError("mass value differs from the sum of its breakdown")
        return self


class RepresentativeOut(BaseModel):
    rows: List[List[int]]
    k1: int
    k2: int
    aut_order: int
    orbit_size: int

    @field_serializer("aut_order", "orbit_size")
    def as_decimal(self, v: int) -> str:
        return str(v)


class CodeOut(BaseModel):
    rows: List[List[int]]
    k1: int
    k2: int


class EnumerationReport(BaseModel):
    mode: Literal["lifts", "oracle", "constructive"]
    family: Optional[Family] = None
    p: int
    n: int
    count: int
    codes: List[CodeOut]

    @field_serializer("count")
    def as_decimal(self, v: int) -> str:
        return str(v)


class ClassificationReport(BaseModel):
    family: Family
    p: int
    n: int
    type: Optional[Dict[str, int]] = None
    representatives: List[RepresentativeOut]
    mass_sum: str  # exact rational, "a" or "a/b"
    expected_mass: int
    certified: bool

    @field_serializer("expected_mass")
    def as_decimal(self, v: int) -> str:
        return str(v)


class CheckResult(BaseModel):
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    ok: bool
    expected: Optional[str] = None
    actual: Optional[str] = None
    seconds: Optional[float] = None


class JobConfig(BaseModel):
    command: Literal["mass", "enumerate", "classify", "verify"]
    p: Optional[int] = Field(default=None, ge=2)
    n: Optional[int] = Field(default=None, ge=0)
    k1: Optional[int] = Field(default=None, ge=0)
    k2: Optional[int] = Field(default=None, ge=0)
    family: Optional[Family] = None
    oracle_max_space: int = Field(gt=0)
    aut_max_n: int = Field(gt=0)
    family_limit: int = Field(gt=0)
    input_path: Optional[str] = None
    output_format: Literal["json", "tsv", "text"] = "text"
    workers: int = Field(default=1, gt=0)
    seed: int = 0

    @model_validator(mode="after")
    def family_fits_command(self) -> "JobConfig":
        if self.family is not None and self.family.quaternary_only and self.p not in (None, 2):
            raise ValueError(f"family {self.family.value} is only defined for p = 2")
        if self.command == "mass" and self.family is None:
            raise ValueError("mass needs --family")
        return self
