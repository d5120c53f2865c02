"""Pydantic request/response models for the HTTP service.

Payloads carry feature data as plain JSON floats; Python's float repr is
shortest-round-trip, so values survive the wire bit-exactly and a client
can rebuild byte-identical artifacts from a response.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..core import ClusterModel, LabeledDataset, Normalization
from ..evalbench import EvalReport, EvalRow


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str


class DatasetPayload(BaseModel):
    identities: list[str]
    roles: list[Literal["enrolled", "probe"]]
    vectors: list[list[float]]

    def to_dataset(self) -> LabeledDataset:
        return LabeledDataset(
            vectors=np.array(self.vectors, dtype=np.float64),
            identities=tuple(self.identities),
            roles=tuple(self.roles),
        )

    @classmethod
    def from_dataset(cls, data: LabeledDataset) -> "DatasetPayload":
        return cls(
            identities=list(data.identities),
            roles=list(data.roles),
            vectors=[[float(v) for v in row] for row in data.vectors],
        )


class NormalizationPayload(BaseModel):
    mins: list[float]
    maxs: list[float]


class AssignmentPayload(BaseModel):
    row: int = Field(description="dataset row index of the enrolled template")
    cluster: int


class ModelPayload(BaseModel):
    algorithm: Literal["fcm", "kmeans"]
    dimension: int
    clusters: int
    fuzzifier: float
    epsilon: float
    max_iterations: int
    seed: int
    iterations_run: int
    final_objective: float
    normalization: Optional[NormalizationPayload] = None
    centers: list[list[float]]
    assignments: list[AssignmentPayload]

    def to_model(self) -> tuple[ClusterModel, list[tuple[int, int]]]:
        norm = None
        if self.normalization is not None:
            norm = Normalization(
                mins=np.array(self.normalization.mins, dtype=np.float64),
                maxs=np.array(self.normalization.maxs, dtype=np.float64),
            )
        model = ClusterModel(
            centers=np.array(self.centers, dtype=np.float64),
            fuzzifier=self.fuzzifier,
            epsilon=self.epsilon,
            max_iterations=self.max_iterations,
            final_objective=self.final_objective,
            iterations_run=self.iterations_run,
            seed=self.seed,
            normalization=norm,
            algorithm=self.algorithm,
        )
        return model, [(a.row, a.cluster) for a in self.assignments]

    @classmethod
    def from_model(
        cls, model: ClusterModel, assignments: list[tuple[int, int]]
    ) -> "ModelPayload":
        norm = None
        if model.normalization is not None:
            norm = NormalizationPayload(
                mins=[float(v) for v in model.normalization.mins],
                maxs=[float(v) for v in model.normalization.maxs],
            )
        return cls(
            algorithm=model.algorithm,
            dimension=model.dimension,
            clusters=model.n_clusters,
            fuzzifier=model.fuzzifier,
            epsilon=model.epsilon,
            max_iterations=model.max_iterations,
            seed=model.seed,
            iterations_run=model.iterations_run,
            final_objective=model.final_objective,
            normalization=norm,
            centers=[[float(v) for v in row] for row in model.centers],
            assignments=[AssignmentPayload(row=r, cluster=c) for r, c in assignments],
        )


class SyntheticRequest(BaseModel):
    identities: int = Field(ge=1)
    enrolled_per_id: int = 6
    probes_per_id: int = 3
    dim: int = 27
    identity_spread: float = 1.0
    within_spread: float = 0.1
    seed: int = 0


class ExtractRequest(BaseModel):
    filename: str
    data_base64: str
    hpr_fraction: float = 0.75


class ExtractResponse(BaseModel):
    features: list[float]
    warnings: list[str]


class TrainRequest(BaseModel):
    dataset: DatasetPayload
    algorithm: Literal["fcm", "kmeans"] = "fcm"
    clusters: int = Field(ge=1)
    fuzzifier: float = 2.0
    epsilon: float = 1e-5
    max_iterations: int = 300
    seed: int = 0
    normalize: bool = False


class TrainResponse(BaseModel):
    model_id: str
    model: ModelPayload
    iterations_run: int
    final_objective: float


class RegisterRequest(BaseModel):
    model: ModelPayload
    enrolled: DatasetPayload


class RegisterResponse(BaseModel):
    model_id: str
    clusters: int
    enrolled_count: int


class ModelSummary(BaseModel):
    model_id: str
    algorithm: str
    clusters: int
    dimension: int
    enrolled_count: int


class IdentifyRequest(BaseModel):
    query: list[float]
    top: int = 2
    exhaustive_check: bool = False


class IdentifyResponse(BaseModel):
    ranked_clusters: list[int]
    query_memberships: list[float]
    candidate_count: int
    best_identity: Optional[str]
    best_distance: Optional[float]
    exhaustive_identity: Optional[str] = None
    exhaustive_distance: Optional[float] = None
    exhaustive_agrees: Optional[bool] = None


class EvalRequest(BaseModel):
    dataset: DatasetPayload
    c_values: list[int]
    top: int = 2
    fuzzifier: float = 2.0
    epsilon: float = 1e-5
    max_iterations: int = 300
    seed: int = 0


class EvalRowPayload(BaseModel):
    c: int
    fcm_binmiss: Optional[int] = None
    kmeans_top1_binmiss: Optional[int] = None
    kmeans_top2_binmiss: Optional[int] = None
    fcm_penetration: Optional[float] = None
    kmeans_penetration: Optional[float] = None
    failed: Optional[str] = None

    @classmethod
    def from_row(cls, row: EvalRow) -> "EvalRowPayload":
        return cls(
            c=row.c,
            fcm_binmiss=row.fcm_binmiss,
            kmeans_top1_binmiss=row.kmeans_top1_binmiss,
            kmeans_top2_binmiss=row.kmeans_top2_binmiss,
            fcm_penetration=row.fcm_penetration,
            kmeans_penetration=row.kmeans_penetration,
            failed=row.failed,
        )

    def to_row(self) -> EvalRow:
        return EvalRow(
            c=self.c,
            fcm_binmiss=self.fcm_binmiss,
            kmeans_top1_binmiss=self.kmeans_top1_binmiss,
            kmeans_top2_binmiss=self.kmeans_top2_binmiss,
            fcm_penetration=self.fcm_penetration,
            kmeans_penetration=self.kmeans_penetration,
            failed=self.failed,
        )


class EvalResponse(BaseModel):
    rows: list[EvalRowPayload]
    probes_total: int
    seed: int

    def to_report(self) -> EvalReport:
        return EvalReport(
            rows=tuple(r.to_row() for r in self.rows),
            probes_total=self.probes_total,
            seed=self.seed,
        )
