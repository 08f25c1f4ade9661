"""FastAPI service exposing the engine operations.

Run with:  uvicorn lndkit.service.app:app

Domain failures map to HTTP 400 with the machine-readable error record;
malformed request bodies get the usual 422 from validation.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import LndkitError
from . import handlers, schemas

app = FastAPI(
    title="lndkit",
    description=(
        "Exact-arithmetic service for locally nilpotent derivations, "
        "automorphism words, jets, collective matrix transport, and "
        "curve interpolation."
    ),
)


@app.exception_handler(LndkitError)
async def domain_error_handler(request: Request, exc: LndkitError):
    return JSONResponse(status_code=400, content=exc.record())


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/lnd/verify", response_model=schemas.NilpotencyResponse)
def lnd_verify(req: schemas.NilpotencyRequest):
    return handlers.lnd_verify(req.model_dump())


@app.post("/lnd/exp", response_model=schemas.ExpFlowResponse)
def lnd_exp(req: schemas.ExpFlowRequest):
    return handlers.lnd_exp(req.model_dump())


@app.post("/lnd/replica", response_model=schemas.ReplicaResponse)
def lnd_replica(req: schemas.ReplicaRequest):
    return handlers.lnd_replica(req.model_dump())


@app.post("/aut/apply", response_model=schemas.WordApplyResponse)
def aut_apply(req: schemas.WordApplyRequest):
    return handlers.aut_apply(req.model_dump())


@app.post("/aut/jet", response_model=schemas.JetModel)
def aut_jet(req: schemas.JetRequest):
    return handlers.aut_jet(req.model_dump())


@app.post("/jet/psi", response_model=schemas.HomFormModel)
def jet_psi(req: schemas.JetModel):
    return handlers.jet_psi(req.model_dump())


@app.post("/jet/kappa", response_model=schemas.KappaResponse)
def jet_kappa(req: schemas.HomFormModel):
    return handlers.jet_kappa(req.model_dump())


@app.post("/jet/realize", response_model=schemas.WordModel)
def jet_realize(req: schemas.RealizeRequest):
    return handlers.jet_realize(req.model_dump())


@app.post("/matrix/transport", response_model=schemas.TransportCertificateModel)
def matrix_transport(req: schemas.TransportRequest):
    return handlers.matrix_transport(req.model_dump())


@app.post("/matrix/verify", response_model=schemas.VerifyResponse)
def matrix_verify(req: schemas.TransportCertificateModel):
    return handlers.matrix_verify(req.model_dump())


@app.post("/curve/interpolate", response_model=schemas.CurveCertificateModel)
def curve_interpolate(req: schemas.InterpolateRequest):
    return handlers.curve_interpolate(req.model_dump())


@app.post("/gallery")
def gallery(req: schemas.GalleryRequest):
    return handlers.gallery(req.model_dump())
