"""Pydantic request/response models for the HTTP service.

These mirror the JSON conventions of :mod:`lndkit.serialize`; the CLI uses
the same documents, so the wire format is identical either way.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class DerivationModel(BaseModel):
    ring: list[str]
    coeffs: list[tuple[str, str]] = Field(
        default_factory=list,
        description="(variable, polynomial) pairs; omitted variables map to 0",
    )


class NilpotencyRequest(BaseModel):
    derivation: DerivationModel
    bound: int = 64


class NilpotencyResponse(BaseModel):
    status: str
    bound: int
    orders: dict[str, int] | None = None


class ExpFlowRequest(BaseModel):
    derivation: DerivationModel
    time: str = Field(description='exact rational, or "t" for symbolic time')
    bound: int = 64


class ExpFlowResponse(BaseModel):
    ring: list[str]
    forward: list[str]
    inverse: list[str] | None = None
    symbolic: bool = False


class ReplicaRequest(BaseModel):
    derivation: DerivationModel
    invariant: str


class ReplicaResponse(BaseModel):
    derivation: DerivationModel


class StepModel(BaseModel):
    derivation: DerivationModel
    time: str = "1"


class WordModel(BaseModel):
    ring: list[str]
    steps: list[StepModel] = Field(default_factory=list)


class WordApplyRequest(BaseModel):
    word: WordModel
    point: list[str]
    bound: int = 64


class WordApplyResponse(BaseModel):
    point: list[str]


class JetRequest(BaseModel):
    word: WordModel
    point: list[str]
    order: int = 1
    bound: int = 64


class JetModel(BaseModel):
    ring: list[str]
    base: list[str]
    order: int
    images: list[str]


class HomFormModel(BaseModel):
    ring: list[str]
    degree: int
    forms: list[str]


class KappaResponse(BaseModel):
    ring: list[str]
    polynomial: str


class RealizeRequest(BaseModel):
    matrix: list[list[str]]
    point: list[str]
    frozen: list[list[str]] = Field(default_factory=list)
    order: int = 1


class MatrixCollectionModel(BaseModel):
    mode: str
    entries: list[list[list[str]]]


class TransportRequest(BaseModel):
    mode: str
    sources: list[list[list[str]]]
    targets: list[list[list[str]]]
    seed: int = 0
    budget: int = 32


class GeneratorModel(BaseModel):
    side: str
    k: int
    l: int


class ReplicaStepModel(BaseModel):
    generator: GeneratorModel
    coeff: str
    time: str


class TransportProblemModel(BaseModel):
    mode: str
    sources: list[list[list[str]]]
    targets: list[list[list[str]]]


class TransportCertificateModel(BaseModel):
    problem: TransportProblemModel
    word: list[ReplicaStepModel]
    verified: bool


class VerifyResponse(BaseModel):
    verified: bool


class InterpolateRequest(BaseModel):
    ring: list[str] | None = None
    points: list[list[str]]
    avoid: list[list[str]] = Field(default_factory=list)
    seed: int = 0
    budget: int = 200


class CurveCertificateModel(BaseModel):
    word: WordModel
    derivation: DerivationModel
    times: list[str]
    parameterization: dict


class GalleryRequest(BaseModel):
    case: str
    p: int | None = None
    q: int | None = None
    m: int | None = None


class ErrorRecord(BaseModel):
    error: str
    message: str
