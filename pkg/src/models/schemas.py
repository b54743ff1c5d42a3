from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional, Union

from src.models.enums import CheckStatus, FieldType, OutputFormat


# Input documents
class FieldDescriptor(BaseModel):
    type: FieldType = Field(..., description="'Q' for the rationals, 'Fp' for a prime field")
    p: Optional[int] = Field(None, description="Characteristic, required for Fp")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_prime(self) -> "FieldDescriptor":
        if self.type == FieldType.PRIME and self.p is None:
            raise ValueError("Fp field requires 'p'")
        if self.type == FieldType.RATIONAL and self.p is not None:
            raise ValueError("Q field takes no 'p'")
        return self


class AlgebraDocument(BaseModel):
    name: str = Field(..., description="Algebra name")
    field: FieldDescriptor = Field(..., description="Ground field")
    dim: int = Field(..., ge=1, description="Dimension d")
    basis: List[str] = Field(..., description="Basis labels, length d")
    unit: List[str] = Field(..., description="Unit as scalar strings, length d")
    mult: List[List[Union[int, str]]] = Field(..., description="Structure constants [i, j, l, 'coeff']")
    idempotents: Optional[List[List[str]]] = Field(None, description="Pairwise-orthogonal idempotents summing to 1")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_shapes(self) -> "AlgebraDocument":
        if len(self.basis) != self.dim:
            raise ValueError(f"basis has {len(self.basis)} labels, expected {self.dim}")
        if len(self.unit) != self.dim:
            raise ValueError(f"unit has {len(self.unit)} entries, expected {self.dim}")
        for entry in self.mult:
            if len(entry) != 4:
                raise ValueError(f"mult entry {entry} must be [i, j, l, coeff]")
            i, j, l = entry[:3]
            if not all(isinstance(k, int) and 0 <= k < self.dim for k in (i, j, l)):
                raise ValueError(f"mult entry {entry} has an index outside 0..{self.dim - 1}")
        for idem in self.idempotents or []:
            if len(idem) != self.dim:
                raise ValueError(f"idempotent of length {len(idem)}, expected {self.dim}")
        return self


class BimoduleDegree(BaseModel):
    rank: int = Field(..., ge=0, description="Rank r_p of the free module B^{r_p}")
    idempotent: List[List[List[str]]] = Field(..., description="r_p x r_p matrix of B-coefficient arrays")
    differential: Optional[List[List[List[str]]]] = Field(
        None, description="d_p: r_{p-1} x r_p matrix over B (absent in the lowest degree)")
    left_action: List[List[List[List[str]]]] = Field(..., description="One r_p x r_p matrix over B per A-basis element")

    model_config = ConfigDict(extra="forbid")


class BimoduleDocument(BaseModel):
    name: str = Field("bimodule", description="Bimodule name")
    source: Union[str, AlgebraDocument] = Field(..., description="Source algebra A (name or inline document)")
    target: Union[str, AlgebraDocument] = Field(..., description="Target algebra B (name or inline document)")
    degrees: List[int] = Field(..., description="[min, max] degree range")
    modules: List[BimoduleDegree] = Field(..., description="One entry per degree, lowest first")

    model_config = ConfigDict(extra="forbid")

    @field_validator("degrees")
    @classmethod
    def _check_degrees(cls, value: List[int]) -> List[int]:
        if len(value) != 2 or value[0] > value[1]:
            raise ValueError("degrees must be [min, max] with min <= max")
        return value

    @model_validator(mode="after")
    def _check_count(self) -> "BimoduleDocument":
        expected = self.degrees[1] - self.degrees[0] + 1
        if len(self.modules) != expected:
            raise ValueError(f"{len(self.modules)} degree entries given, expected {expected}")
        return self


# Reports
class CheckResult(BaseModel):
    id: str = Field(..., description="Stable identifier such as 'tt.eq1' or 'sbi.exact.n3.hc'")
    status: CheckStatus = Field(..., description="Outcome of the check")
    detail: str = Field("", description="Human-readable summary")
    witness: Optional[str] = Field(None, description="Smallest failing instance, when one exists")


class Report(BaseModel):
    title: str
    checks: List[CheckResult] = []
    data: Dict[str, Any] = {}

    @property
    def ok(self) -> bool:
        return all(c.status != CheckStatus.FAIL for c in self.checks)

    @property
    def inconclusive(self) -> bool:
        return any(c.status == CheckStatus.INCONCLUSIVE for c in self.checks)

    def add(self, check_id: str, passed: bool, detail: str = "", witness: Optional[str] = None) -> CheckResult:
        result = CheckResult(id=check_id, status=CheckStatus.PASS if passed else CheckStatus.FAIL,
                             detail=detail, witness=None if passed else witness)
        self.checks.append(result)
        return result

    def note(self, check_id: str, status: CheckStatus, detail: str = "", witness: Optional[str] = None) -> CheckResult:
        result = CheckResult(id=check_id, status=status, detail=detail, witness=witness)
        self.checks.append(result)
        return result

    def extend(self, other: "Report") -> "Report":
        """Merge another report; checks whose id is already present are skipped"""
        seen = {c.id for c in self.checks}
        self.checks.extend(c for c in other.checks if c.id not in seen)
        self.data.update(other.data)
        return self

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status == CheckStatus.FAIL]

    def get(self, check_id: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.id == check_id:
                return c
        return None


# CLI configuration
class RunConfig(BaseModel):
    command: str = Field(..., description="CLI command name")
    paths: List[str] = Field(default_factory=list, description="Input document paths")
    max_degree: int = Field(4, ge=0, description="Top degree D")
    field: Optional[str] = Field(None, description="Field override, 'Q' or 'Fp:<p>'")
    normalized: bool = Field(False, description="Use the normalized complexes")
    output_format: OutputFormat = Field(OutputFormat.TABLE, description="Rendering format")
    representatives: bool = Field(False, description="Print class representatives")
    max_chain_dim: int = Field(1_000_000, gt=0, description="Largest chain space to materialize")
    output: Optional[str] = Field(None, description="Also write the JSON report to this path")

    model_config = ConfigDict(extra="forbid")
