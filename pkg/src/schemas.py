"""
Pydantic models for certificate and report files.

Roots travel as coefficient arrays over the simple roots; Frobenius twists
and other big integers travel as decimal strings.
"""

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .chevalley import CocharacterWeighting, TorusFactor, Twist
from .rootsys import Root, RootSystemError, build_root_system
from .torus import FAMILIES
from .witnesses import CASE_DIMENSIONS, Factor, VerificationReport, WitnessCertificate

CERTIFICATE_SCHEMA = "epiwit.certificate/1"
REPORT_SCHEMA = "epiwit.report/1"


class CertificateSchemaError(ValueError):
    """A certificate or report file does not match its schema."""


class GroupModel(BaseModel):
    """Simple algebraic group by Dynkin type and rank."""

    type: Literal["A", "B", "C", "D", "E", "F", "G"]
    rank: int = Field(..., ge=1)


class FactorModel(BaseModel):
    """x_root(coefficient · t^(p^twist))."""

    root: List[int]
    coefficient: int = 1
    twist: int = Field(0, ge=0)


class TwistModel(BaseModel):
    p: int = Field(..., ge=2)
    e: int = Field(..., ge=0)
    q: str = Field(..., description="p^e in decimal")

    @model_validator(mode="after")
    def _q_matches(self) -> "TwistModel":
        if self.q != str(self.p**self.e):
            raise ValueError(f"twist q={self.q} is not {self.p}^{self.e}")
        return self


class TorusFactorModel(BaseModel):
    """One A1 factor of the J torus."""

    roots: List[List[int]]
    grading: List[int]
    kind: Literal["root", "folded", "principal", "isogeny", "tensor"] = "root"


class JDataModel(BaseModel):
    factors: List[TorusFactorModel] = Field(..., min_length=1)
    twists: List[TwistModel] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _one_twist_per_factor(self) -> "JDataModel":
        if len(self.factors) != len(self.twists):
            raise ValueError("one twist per J factor required")
        return self


class TorusFamilyModel(BaseModel):
    family: str
    a_list: List[int] = Field(..., min_length=1)

    @field_validator("family")
    @classmethod
    def _known_family(cls, value: str) -> str:
        if value not in FAMILIES:
            raise ValueError(f"unknown torus family {value!r}")
        return value


class CertificateModel(BaseModel):
    """A witness certificate file."""

    schema_id: str = Field(CERTIFICATE_SCHEMA, alias="schema")
    group: GroupModel
    p: int = Field(..., ge=2)
    a: int = Field(..., ge=1)
    case_tag: str
    j_data: JDataModel
    y_data: List[FactorModel] = Field(..., min_length=1)
    z_data: List[List[FactorModel]] = Field(default_factory=list)
    claimed_dim: int = Field(..., ge=2)
    torus_family: TorusFamilyModel
    seed: int = 0
    annotations: Dict[str, Any] = Field(default_factory=dict)
    claimed_weights: List[str] = Field(default_factory=list, description="T_a-weight per group at twist 0")

    model_config = {"populate_by_name": True}

    @field_validator("claimed_weights")
    @classmethod
    def _rational_weights(cls, value: List[str]) -> List[str]:
        for w in value:
            try:
                Fraction(w)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"claimed weight {w!r} is not a rational number") from None
        return value

    @field_validator("case_tag")
    @classmethod
    def _known_case(cls, value: str) -> str:
        if value not in CASE_DIMENSIONS:
            raise ValueError(f"unknown case tag {value!r}")
        return value

    @model_validator(mode="after")
    def _roots_fit_rank(self) -> "CertificateModel":
        rank = self.group.rank
        vectors = [f.root for f in self.y_data] + [f.root for g in self.z_data for f in g]
        for factor in self.j_data.factors:
            vectors.extend(factor.roots)
            if len(factor.grading) != rank:
                raise ValueError(f"grading {factor.grading} does not have rank {rank}")
        for v in vectors:
            if len(v) != rank:
                raise ValueError(f"root {v} does not have rank {rank}")
        return self


class CheckRecordModel(BaseModel):
    name: str
    status: Literal["pass", "fail", "skipped"]
    evidence: Dict[str, Any] = Field(default_factory=dict)
    required: bool = True
    reason: str = ""


class ReportModel(BaseModel):
    """A verification report file."""

    schema_id: str = Field(REPORT_SCHEMA, alias="schema")
    case_tag: str
    group: str
    p: int
    level: Literal["symbolic", "matrix", "all"]
    seed: int
    overall: Literal["pass", "fail"]
    checks: List[CheckRecordModel]

    model_config = {"populate_by_name": True}


class GridRowModel(BaseModel):
    """One cell of the acceptance grid."""

    group: str
    p: int
    kind: Literal["witness", "principal"] = "witness"
    status: Literal["pass", "fail", "redirect", "out_of_scope", "field_guard"]
    case_tag: Optional[str] = None
    claimed_dim: Optional[int] = None
    table_dim: Optional[int] = None
    failing: List[str] = Field(default_factory=list)
    detail: Optional[str] = None
    duration_ms: float = 0.0


# =============================================================================
# Conversions
# =============================================================================


def _factor_dict(f: Factor) -> dict[str, Any]:
    return {"root": list(f.root.coeffs), "coefficient": f.coefficient, "twist": f.twist}


def certificate_to_dict(cert: WitnessCertificate) -> dict[str, Any]:
    cw = cert.j_data
    data = {
        "schema": CERTIFICATE_SCHEMA,
        "group": {"type": cert.type_label, "rank": cert.rank},
        "p": cert.p,
        "a": cert.a,
        "case_tag": cert.case_tag,
        "j_data": {
            "factors": [
                {"roots": [list(r.coeffs) for r in f.roots], "grading": list(f.grading), "kind": f.kind}
                for f in cw.factors
            ],
            "twists": [{"p": t.p, "e": t.e, "q": str(t.value)} for t in cw.twists],
        },
        "y_data": [_factor_dict(f) for f in cert.y_data],
        "z_data": [[_factor_dict(f) for f in group] for group in cert.z_data],
        "claimed_dim": cert.claimed_dim,
        "torus_family": {"family": cert.torus_family, "a_list": list(cert.a_list)},
        "seed": cert.seed,
        "annotations": cert.annotations,
        "claimed_weights": [str(w) for w in cert.claimed_weights],
    }
    return CertificateModel.model_validate(data).model_dump(by_alias=True)


def _factor(model: FactorModel) -> Factor:
    return Factor(Root(tuple(model.root)), model.coefficient, model.twist)


def certificate_from_dict(data: dict[str, Any]) -> WitnessCertificate:
    """
    Raises:
        CertificateSchemaError: If data violates the schema or names roots
            that do not exist in the group
    """
    try:
        model = CertificateModel.model_validate(data)
    except ValidationError as exc:
        raise CertificateSchemaError(f"invalid certificate: {exc}") from exc
    try:
        sys = build_root_system(model.group.type, model.group.rank)
        cw = CocharacterWeighting(
            factors=tuple(
                TorusFactor(tuple(sys.root(r) for r in f.roots), tuple(f.grading), f.kind)
                for f in model.j_data.factors
            ),
            twists=tuple(Twist(t.p, t.e) for t in model.j_data.twists),
        )
        y = tuple(_factor(f) for f in model.y_data)
        z = tuple(tuple(_factor(f) for f in group) for group in model.z_data)
        for f in y + tuple(f for group in z for f in group):
            sys.root(f.root.coeffs)
    except RootSystemError as exc:
        raise CertificateSchemaError(f"invalid certificate: {exc}") from exc
    return WitnessCertificate(
        type_label=model.group.type,
        rank=model.group.rank,
        p=model.p,
        a=model.a,
        case_tag=model.case_tag,
        j_data=cw,
        y_data=y,
        z_data=z,
        claimed_dim=model.claimed_dim,
        torus_family=model.torus_family.family,
        a_list=tuple(model.torus_family.a_list),
        seed=model.seed,
        annotations=model.annotations,
        claimed_weights=tuple(Fraction(w) for w in model.claimed_weights),
    )


def report_to_dict(report: VerificationReport) -> dict[str, Any]:
    data = {"schema": REPORT_SCHEMA, **report.to_dict()}
    return ReportModel.model_validate(data).model_dump(by_alias=True)


def validate_report(data: dict[str, Any]) -> ReportModel:
    """
    Raises:
        CertificateSchemaError: If data is not a report
    """
    try:
        return ReportModel.model_validate(data)
    except ValidationError as exc:
        raise CertificateSchemaError(f"invalid report: {exc}") from exc
