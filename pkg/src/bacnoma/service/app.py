"""FastAPI application wrapping the solvers and the experiment harness."""

from __future__ import annotations

from dataclasses import replace

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from fastapi.responses import JSONResponse

from ..baseline import pure_noma_delay
from ..errors import ConfigError, InvalidParameterError
from ..experiments import (
    convergence_trace,
    render_sweep_csv,
    render_trace_csv,
    sweep_data_length,
)
from ..hybrid import instance_for_iteration, minimize_delay, solve_p3_instance
from ..model import sample_channels
from .schemas import (
    ConvergenceRequest,
    DumpInstanceRequest,
    InstanceModel,
    InstanceResultModel,
    SingleRequest,
    SolutionModel,
    SolveInstanceRequest,
    SweepRequest,
    solution_to_model,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="bacnoma",
        description="Offloading-delay optimization for hybrid backscatter-NOMA uplinks",
    )

    @app.exception_handler(InvalidParameterError)
    @app.exception_handler(ConfigError)
    async def _domain_error(request, exc):
        # cross-field config rules live in the domain layer, not pydantic
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/api/single", response_model=SolutionModel)
    def single(req: SingleRequest) -> SolutionModel:
        config = req.config.to_domain()
        chan = sample_channels(config, req.seed)
        return solution_to_model(chan, config, minimize_delay(chan, config))

    @app.post("/api/baseline", response_model=SolutionModel)
    def baseline(req: SingleRequest) -> SolutionModel:
        config = req.config.to_domain()
        chan = sample_channels(config, req.seed)
        return solution_to_model(chan, config, pure_noma_delay(chan, config))

    @app.post("/api/sweep", response_class=PlainTextResponse)
    def sweep(req: SweepRequest) -> PlainTextResponse:
        config = req.config.to_domain()
        if req.steps == 1:
            grid = [req.from_bits]
        else:
            step = (req.to_bits - req.from_bits) / (req.steps - 1)
            grid = [req.from_bits + i * step for i in range(req.steps)]
        results = sweep_data_length(config, grid, req.realizations, req.master_seed)
        return PlainTextResponse(render_sweep_csv(results), media_type="text/csv")

    @app.post("/api/convergence", response_class=PlainTextResponse)
    def convergence(req: ConvergenceRequest) -> PlainTextResponse:
        config = req.config.to_domain()
        if req.alpha is not None:
            config = replace(config, si_residual_alpha=req.alpha)
        trace = convergence_trace(config, req.seed)
        return PlainTextResponse(render_trace_csv(trace), media_type="text/csv")

    @app.post("/api/dump-instance", response_model=InstanceModel)
    def dump_instance(req: DumpInstanceRequest) -> InstanceModel:
        config = req.config.to_domain()
        chan = sample_channels(config, req.seed)
        solution = minimize_delay(chan, config)
        try:
            doc = instance_for_iteration(chan, config, solution, req.iteration)
        except InvalidParameterError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return InstanceModel(**doc)

    @app.post("/api/solve-instance", response_model=InstanceResultModel)
    def solve_instance(req: SolveInstanceRequest) -> InstanceResultModel:
        return InstanceResultModel(**solve_p3_instance(req.instance.model_dump()))

    return app


app = create_app()
