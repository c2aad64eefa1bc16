"""HTTP facade over projects, fitting, and adjustment.

Thin by design: every endpoint parses, delegates to the library, and
serializes through the canonical JSON encoder so identical state yields
identical bytes. Domain errors map to stable status codes: bad input
400, missing things 404, cycle attempts 409, failures while fitting
422. The cycle response carries the offending path so a client can
show it.
"""

from __future__ import annotations

import io
import os
from typing import Optional

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from .adjust import PValueEntry, bh_adjust, by_adjust
from .datasets import Dataset, generate_toy_dataset, load_csv, moment_summary
from .errors import (
    CycleError,
    DagcraftError,
    InsufficientRowsError,
    ParseError,
    SingularDesignError,
    SingularSampleCovError,
)
from .graph import CausalGraph
from .report import EFFECTS, VIEWS, dumps_canonical, export_dot
from .resampling import ResamplingPlan, pairwise_r2_pvalues
from .rng import derive_substream
from .session import (
    Project,
    Settings,
    diff_iterations,
    list_projects,
    load_project,
    run_iteration,
    save_project,
)

DATA_DIR_ENV = "DAGCRAFT_DATA_DIR"


class ToySpec(BaseModel):
    n: int = Field(default=2000, ge=3)
    seed: int = 0


class DatasetSpec(BaseModel):
    toy: Optional[ToySpec] = None
    csv: Optional[str] = None


class ProjectCreate(BaseModel):
    dataset: DatasetSpec
    settings: dict = Field(default_factory=dict)
    graph: Optional[dict] = None


class IterationRequest(BaseModel):
    note: str = ""


def _json(payload, status_code: int = 200) -> Response:
    return Response(
        content=dumps_canonical(payload) + "\n",
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, kind: str, message: str, **extra) -> Response:
    return _json({"error": kind, "message": message, **extra}, status_code)


def create_app(data_dir: str | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV, os.path.join(os.getcwd(), "dagcraft-data"))
    app = FastAPI(title="dagcraft", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.data_dir = data_dir
    app.state.projects = {}

    def get_project(project_id: str) -> Project:
        if project_id not in app.state.projects:
            try:
                app.state.projects[project_id] = load_project(project_id, data_dir)
            except FileNotFoundError:
                raise KeyError(project_id)
        return app.state.projects[project_id]

    @app.exception_handler(CycleError)
    async def _cycle(request: Request, exc: CycleError):
        return _error(409, "cycle", str(exc), cycle=list(exc.cycle))

    @app.exception_handler(KeyError)
    async def _missing(request: Request, exc: KeyError):
        return _error(404, "not-found", str(exc.args[0]) if exc.args else "not found")

    @app.exception_handler(SingularDesignError)
    async def _singular(request: Request, exc: SingularDesignError):
        return _error(422, "singular-design", str(exc), child=exc.child)

    @app.exception_handler(SingularSampleCovError)
    async def _singular_cov(request: Request, exc: SingularSampleCovError):
        return _error(422, "singular-sample-cov", str(exc))

    @app.exception_handler(InsufficientRowsError)
    async def _short(request: Request, exc: InsufficientRowsError):
        return _error(422, "insufficient-rows", str(exc))

    @app.exception_handler(ParseError)
    async def _parse(request: Request, exc: ParseError):
        return _error(400, "parse-error", str(exc))

    @app.exception_handler(DagcraftError)
    async def _domain(request: Request, exc: DagcraftError):
        return _error(400, type(exc).__name__, str(exc))

    @app.get("/health")
    async def health():
        return _json({"status": "ok", "version": __version__})

    @app.get("/projects")
    async def index():
        known = set(app.state.projects) | set(list_projects(data_dir))
        rows = []
        for pid in sorted(known):
            project = get_project(pid)
            rows.append(
                {
                    "id": pid,
                    "n": project.dataset.n,
                    "columns": list(project.dataset.names),
                    "iterations": len(project.iterations),
                }
            )
        return _json(rows)

    @app.post("/projects")
    async def create(body: ProjectCreate):
        if (body.dataset.toy is None) == (body.dataset.csv is None):
            return _error(400, "bad-dataset", "provide exactly one of dataset.toy or dataset.csv")
        if body.dataset.toy is not None:
            dataset = generate_toy_dataset(body.dataset.toy.n, body.dataset.toy.seed)
        else:
            dataset = load_csv(io.StringIO(body.dataset.csv))
        settings = Settings.from_dict(body.settings)
        if body.graph is not None:
            graph = CausalGraph.from_dict(body.graph)
        else:
            graph = CausalGraph(frozenset(dataset.names), (), 0)
        project = Project(dataset=dataset, graph=graph, settings=settings)
        app.state.projects[project.id] = project
        save_project(project, data_dir)
        return _json({"id": project.id}, 201)

    @app.get("/projects/{project_id}")
    async def show(project_id: str):
        project = get_project(project_id)
        return _json(
            {
                "id": project.id,
                "settings": project.settings.to_dict(),
                "graph": project.graph.to_dict(),
                "columns": list(project.dataset.names),
                "n": project.dataset.n,
                "iterations": len(project.iterations),
            }
        )

    @app.get("/projects/{project_id}/correlations")
    async def correlations(
        project_id: str,
        reps: int = Query(default=999, ge=1),
        method: str = Query(default="bh", pattern="^(bh|by)$"),
    ):
        project = get_project(project_id)
        summary = moment_summary(project.dataset)
        cache_key = f"{reps}:{method}"
        if cache_key not in project.screening_cache:
            plan = ResamplingPlan(
                reps_outer=reps,
                master_seed=derive_substream(project.settings.master_seed, "screening"),
            )
            raw = pairwise_r2_pvalues(project.dataset, plan)
            entries = [PValueEntry(f"{x},{y}", p) for (x, y), p in raw.items()]
            adjust = bh_adjust if method == "bh" else by_adjust
            result = adjust(entries, project.settings.q)
            table = []
            for (x, y), p in sorted(raw.items()):
                rid = f"{x},{y}"
                table.append(
                    {
                        "x": x,
                        "y": y,
                        "r": summary.pair_corr(x, y),
                        "raw_p": p,
                        "adjusted_p": result.adjusted[rid],
                        "rejected": rid in result.rejected,
                    }
                )
            project.screening_cache[cache_key] = table
            save_project(project, data_dir)
        return _json(
            {
                "columns": list(summary.names),
                "corr": summary.corr.tolist(),
                "method": method,
                "reps": reps,
                "screening": project.screening_cache[cache_key],
            }
        )

    @app.put("/projects/{project_id}/graph")
    async def put_graph(project_id: str, body: dict = Body(...)):
        project = get_project(project_id)
        graph = CausalGraph.from_dict(body)
        project.set_graph(graph)
        save_project(project, data_dir)
        return _json({"graph": project.graph.to_dict()})

    @app.post("/projects/{project_id}/iterations")
    async def iterate(project_id: str, body: IterationRequest | None = None):
        project = get_project(project_id)
        note = body.note if body is not None else ""
        snapshot = run_iteration(project, note=note)
        save_project(project, data_dir)
        return _json(snapshot.to_dict(), 201)

    @app.get("/projects/{project_id}/iterations")
    async def iterations(project_id: str):
        project = get_project(project_id)
        rows = [
            {
                "index": s.index,
                "graph_version": s.graph.version,
                "intersection_p": s.intersection_p,
                "note": s.note,
                "created_at": s.created_at,
            }
            for s in project.iterations
        ]
        return _json(rows)

    @app.get("/projects/{project_id}/iterations/{k}")
    async def iteration(project_id: str, k: int):
        project = get_project(project_id)
        return _json(project.iteration(k).to_dict())

    @app.get("/projects/{project_id}/iterations/{k}/dot")
    async def dot(project_id: str, k: int, view: str = Query(default=EFFECTS)):
        if view not in VIEWS:
            return _error(400, "bad-view", f"view must be one of {list(VIEWS)}")
        project = get_project(project_id)
        snapshot = project.iteration(k)
        text = export_dot(snapshot.graph, snapshot.family, view=view, q=project.settings.q)
        return Response(content=text, media_type="text/vnd.graphviz")

    @app.get("/projects/{project_id}/diff")
    async def diff(
        project_id: str,
        frm: int = Query(alias="from"),
        to: int = Query(),
    ):
        project = get_project(project_id)
        return _json(diff_iterations(project, frm, to))

    return app
