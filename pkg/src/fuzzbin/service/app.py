"""FastAPI application wrapping the core package.

The service keeps trained indexes in an in-memory registry keyed by a
content hash of the serialized model, so a freshly trained or re-registered
model gets a stable, reproducible id. Identification is read-only over the
registered state and safe under concurrent clients.

Error mapping: usage errors answer 400, data/parse errors 422, numerical
failures 500, all with a structured ``{"code", "message"}`` detail.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import ClusterModel, LabeledDataset, normalize_fit
from ..errors import DataError, FuzzbinError, NumericError, UsageError
from ..evalbench import gen_synthetic, sweep
from ..fcm import fcm_train, hard_assign
from ..identify import exhaustive_identify, identify
from ..kmeans import kmeans_train
from ..modelfile import render_model
from ..sigfeat import extract_features, preprocess
from ..sigfeat.pnm import BinaryImage, decode_image
from . import schemas

SERVICE_NAME = "fuzzbin"


@dataclass(frozen=True)
class LoadedIndex:
    """A registered model with its enrolled templates in model space."""

    model: ClusterModel
    enrolled: LabeledDataset          # normalized when the model requires it
    assignments: tuple[int, ...]      # cluster per enrolled template
    enrolled_rows: tuple[int, ...]    # original dataset row per template


def _http_error(exc: FuzzbinError) -> HTTPException:
    status = {UsageError: 400, DataError: 422, NumericError: 500}
    for klass, code in status.items():
        if isinstance(exc, klass):
            return HTTPException(status_code=code, detail={"code": exc.code, "message": str(exc)})
    return HTTPException(status_code=500, detail={"code": "error", "message": str(exc)})


def _model_space(model: ClusterModel, data: LabeledDataset) -> LabeledDataset:
    if model.normalization is None:
        return data
    return LabeledDataset(
        vectors=model.normalization.apply(data.vectors),
        identities=data.identities,
        roles=data.roles,
    )


def _register(app: FastAPI, payload_model: ClusterModel,
              assignments: list[tuple[int, int]],
              dataset: LabeledDataset) -> tuple[str, LoadedIndex]:
    enrolled_rows = dataset.rows_with_role("enrolled")
    if payload_model.dimension != dataset.dimension:
        raise UsageError(
            f"model is {payload_model.dimension}-D but dataset is {dataset.dimension}-D"
        )
    if [r for r, _ in assignments] != [int(i) for i in enrolled_rows]:
        raise UsageError(
            "model assignments do not match the dataset's enrolled rows; "
            "register the same dataset the model was trained on"
        )
    enrolled = _model_space(payload_model, dataset.subset(enrolled_rows))
    index = LoadedIndex(
        model=payload_model,
        enrolled=enrolled,
        assignments=tuple(c for _, c in assignments),
        enrolled_rows=tuple(int(i) for i in enrolled_rows),
    )
    model_id = hashlib.sha256(
        render_model(payload_model, assignments).encode()
    ).hexdigest()[:16]
    app.state.registry[model_id] = index
    return model_id, index


def create_app() -> FastAPI:
    app = FastAPI(
        title="fuzzbin",
        description="Cluster-binned identification over feature template databases",
        version=__version__,
    )
    app.state.registry = {}

    @app.exception_handler(FuzzbinError)
    async def _fuzzbin_error(_, exc: FuzzbinError):
        err = _http_error(exc)
        return JSONResponse(status_code=err.status_code, content={"detail": err.detail})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", service=SERVICE_NAME, version=__version__)

    @app.post("/datasets/synthetic", response_model=schemas.DatasetPayload)
    def synthetic(req: schemas.SyntheticRequest):
        data = gen_synthetic(
            identities=req.identities,
            enrolled_per_id=req.enrolled_per_id,
            probes_per_id=req.probes_per_id,
            dim=req.dim,
            identity_spread=req.identity_spread,
            within_spread=req.within_spread,
            seed=req.seed,
        )
        return schemas.DatasetPayload.from_dataset(data)

    @app.post("/features/extract", response_model=schemas.ExtractResponse)
    def extract(req: schemas.ExtractRequest):
        try:
            raw = base64.b64decode(req.data_base64, validate=True)
        except (binascii.Error, ValueError):
            raise DataError(f"{req.filename}: payload is not valid base64")
        img = decode_image(raw, source=req.filename)
        if isinstance(img, BinaryImage):
            img = img.to_gray()
        pre = preprocess(img, hpr_fraction=req.hpr_fraction)
        feats = extract_features(pre.binary, pre.thinned, pre.hpr, pre.bbox)
        return schemas.ExtractResponse(
            features=[float(v) for v in feats.values],
            warnings=list(feats.warnings),
        )

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(req: schemas.TrainRequest):
        dataset = req.dataset.to_dataset()
        enrolled = dataset.enrolled_view()
        if enrolled.size == 0:
            raise UsageError("dataset has no enrolled templates to train on")
        norm = normalize_fit(dataset) if req.normalize else None
        train_view = enrolled if norm is None else LabeledDataset(
            vectors=norm.apply(enrolled.vectors),
            identities=enrolled.identities,
            roles=enrolled.roles,
        )
        if req.algorithm == "fcm":
            model, u, _ = fcm_train(
                train_view, req.clusters, m=req.fuzzifier, epsilon=req.epsilon,
                max_iterations=req.max_iterations, seed=req.seed,
            )
            labels = hard_assign(u)
        else:
            model, labels = kmeans_train(
                train_view, req.clusters, seed=req.seed,
                max_iterations=req.max_iterations,
            )
        if norm is not None:
            model = ClusterModel(
                centers=model.centers,
                fuzzifier=model.fuzzifier,
                epsilon=model.epsilon,
                max_iterations=model.max_iterations,
                final_objective=model.final_objective,
                iterations_run=model.iterations_run,
                seed=model.seed,
                normalization=norm,
                algorithm=model.algorithm,
            )
        enrolled_rows = dataset.rows_with_role("enrolled")
        assignments = [(int(r), int(c)) for r, c in zip(enrolled_rows, labels)]
        model_id, _ = _register(app, model, assignments, dataset)
        return schemas.TrainResponse(
            model_id=model_id,
            model=schemas.ModelPayload.from_model(model, assignments),
            iterations_run=model.iterations_run,
            final_objective=model.final_objective,
        )

    @app.post("/models", response_model=schemas.RegisterResponse)
    def register(req: schemas.RegisterRequest):
        model, assignments = req.model.to_model()
        dataset = req.enrolled.to_dataset()
        model_id, index = _register(app, model, assignments, dataset)
        return schemas.RegisterResponse(
            model_id=model_id,
            clusters=model.n_clusters,
            enrolled_count=index.enrolled.size,
        )

    @app.get("/models", response_model=list[schemas.ModelSummary])
    def list_models():
        return [
            schemas.ModelSummary(
                model_id=mid,
                algorithm=ix.model.algorithm,
                clusters=ix.model.n_clusters,
                dimension=ix.model.dimension,
                enrolled_count=ix.enrolled.size,
            )
            for mid, ix in sorted(app.state.registry.items())
        ]

    @app.post("/models/{model_id}/identify", response_model=schemas.IdentifyResponse)
    def identify_query(model_id: str, req: schemas.IdentifyRequest):
        index = app.state.registry.get(model_id)
        if index is None:
            raise HTTPException(
                status_code=404,
                detail={"code": "usage", "message": f"unknown model id {model_id!r}"},
            )
        q = np.asarray(req.query, dtype=np.float64)
        if q.ndim != 1 or q.shape[0] != index.model.dimension:
            raise UsageError(
                f"query must have dimension {index.model.dimension}, got shape {q.shape}"
            )
        if not np.all(np.isfinite(q)):
            raise DataError("query contains non-finite values")
        if index.model.normalization is not None:
            q = index.model.normalization.apply(q)
        result = identify(q, index.model, index.enrolled, index.assignments, t=req.top)
        resp = schemas.IdentifyResponse(
            ranked_clusters=list(result.ranked_clusters),
            query_memberships=[float(g) for g in result.query_memberships],
            candidate_count=result.candidate_count,
            best_identity=result.best_identity,
            best_distance=result.best_distance,
        )
        if req.exhaustive_check:
            ident, dist = exhaustive_identify(q, index.enrolled)
            resp.exhaustive_identity = ident
            resp.exhaustive_distance = dist
            resp.exhaustive_agrees = ident == result.best_identity
        return resp

    @app.post("/evaluate", response_model=schemas.EvalResponse)
    def evaluate(req: schemas.EvalRequest):
        report = sweep(
            req.dataset.to_dataset(),
            c_values=req.c_values,
            t=req.top,
            m=req.fuzzifier,
            epsilon=req.epsilon,
            seed=req.seed,
            max_iterations=req.max_iterations,
        )
        return schemas.EvalResponse(
            rows=[schemas.EvalRowPayload.from_row(r) for r in report.rows],
            probes_total=report.probes_total,
            seed=report.seed,
        )

    return app
