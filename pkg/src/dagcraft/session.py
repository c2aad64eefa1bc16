"""Projects, iteration history, persistence, and diffs.

A project binds one dataset, one working graph, and a settings block.
Each call to ``run_iteration`` fits the current graph, builds the
hypothesis family, runs the FDCR adjustment, and appends an immutable
snapshot. History is append-only: snapshots are frozen and the
iteration list is only exposed as a tuple. Projects persist as JSON
next to a content-addressed copy of their dataset.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .adjust import INTERSECTION_METHODS, WEIGHTED_SIMES, fdcr_adjust
from .datasets import Dataset, load_csv, save_csv
from .errors import OutOfRangeError
from .graph import CausalGraph
from .hypotheses import EquivalenceSpec, HypothesisFamily, build_family
from .report import canonical, dumps_canonical
from .rng import derive_substream
from .scm import ScmFit, fit_scm
from .validation import check_graph_data, check_positive_int, check_probability

DEFAULT_MASTER_SEED = 7


@dataclass(frozen=True)
class Settings:
    """Knobs shared by every iteration of a project."""

    q: float = 0.05
    delta_rho: float = 0.05
    reps: int = 200
    master_seed: int = DEFAULT_MASTER_SEED
    intersection_method: str = WEIGHTED_SIMES

    def __post_init__(self):
        check_probability(self.q, "q")
        if not 0.0 < self.delta_rho < 1.0:
            raise OutOfRangeError(f"delta_rho must be in (0, 1), got {self.delta_rho}")
        check_positive_int(self.reps, "reps")
        if self.intersection_method not in INTERSECTION_METHODS:
            raise OutOfRangeError(
                f"intersection_method must be one of {INTERSECTION_METHODS}"
            )

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "delta_rho": self.delta_rho,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "intersection_method": self.intersection_method,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Settings":
        return cls(**{k: d[k] for k in cls().to_dict() if k in d})


@dataclass(frozen=True)
class IterationSnapshot:
    """One fitted-and-adjusted pass, frozen at creation time.

    ``created_at`` is None for one-shot runs that must be byte
    reproducible; interactive sessions stamp a UTC timestamp. The
    timestamp is the only field exempt from the determinism guarantee.
    """

    index: int
    graph: CausalGraph
    fit: ScmFit
    family: HypothesisFamily
    intersection_p: float
    note: str = ""
    created_at: str | None = None

    def to_dict(self) -> dict:
        payload = {
            "index": self.index,
            "graph": self.graph.to_dict(),
            "fit": self.fit.to_dict(),
            "family": self.family.to_dict(),
            "intersection_p": self.intersection_p,
            "note": self.note,
        }
        if self.created_at is not None:
            payload["created_at"] = self.created_at
        return payload

    @classmethod
    def from_dict(cls, d: dict) -> "IterationSnapshot":
        return cls(
            index=d["index"],
            graph=CausalGraph.from_dict(d["graph"]),
            fit=ScmFit.from_dict(d["fit"]),
            family=HypothesisFamily.from_dict(d["family"]),
            intersection_p=d["intersection_p"],
            note=d.get("note", ""),
            created_at=d.get("created_at"),
        )


@dataclass
class Project:
    dataset: Dataset
    graph: CausalGraph
    settings: Settings = field(default_factory=Settings)
    id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    _iterations: list[IterationSnapshot] = field(default_factory=list, repr=False)
    screening_cache: dict = field(default_factory=dict, repr=False)

    @property
    def iterations(self) -> tuple[IterationSnapshot, ...]:
        return tuple(self._iterations)

    def iteration(self, k: int) -> IterationSnapshot:
        """1-based lookup into the history."""
        if not 1 <= k <= len(self._iterations):
            raise KeyError(f"no iteration {k}")
        return self._iterations[k - 1]

    def set_graph(self, graph: CausalGraph) -> None:
        """Swap in an edited graph, bumping the version past any prior one."""
        check_graph_data(graph, self.dataset)
        if graph.version <= self.graph.version:
            graph = graph.with_version(self.graph.version + 1)
        self.graph = graph


def run_iteration(
    project: Project, note: str = "", record_time: bool = True
) -> IterationSnapshot:
    """Fit, test, adjust, and append one snapshot to the project.

    The iteration seed derives from the master seed and the iteration
    index, so replaying a project from scratch reproduces every snapshot
    exactly; with ``record_time`` False even the serialized bytes match.
    """
    settings = project.settings
    index = len(project.iterations) + 1
    seed = derive_substream(settings.master_seed, f"iteration:{index}")
    graph = project.graph
    fit = fit_scm(graph, project.dataset)
    spec = EquivalenceSpec(
        delta_rho=settings.delta_rho, bootstrap_reps=settings.reps
    )
    family = build_family(
        graph,
        fit,
        project.dataset,
        spec=spec,
        q=settings.q,
        seed=seed,
        iteration=index,
    )
    result = fdcr_adjust(family, settings.q, settings.intersection_method)
    snapshot = IterationSnapshot(
        index=index,
        graph=graph,
        fit=fit,
        family=family,
        intersection_p=result.intersection_p,
        note=note,
        created_at=datetime.now(timezone.utc).isoformat() if record_time else None,
    )
    project._iterations.append(snapshot)
    return snapshot


def diff_iterations(project: Project, frm: int, to: int) -> dict:
    """What changed between two snapshots: graph edits and record moves.

    Floats are compared after rounding to report precision, so a diff
    never flags sub-representable churn. Changed records list their
    before and after raw and adjusted p-values plus rejection flips.
    """
    a = project.iteration(frm)
    b = project.iteration(to)
    a_edges = {(e.parent, e.child): e.belief for e in a.graph.edges}
    b_edges = {(e.parent, e.child): e.belief for e in b.graph.edges}
    added = sorted(set(b_edges) - set(a_edges))
    removed = sorted(set(a_edges) - set(b_edges))
    retuned = [
        {"parent": p, "child": c, "belief_from": a_edges[(p, c)], "belief_to": b_edges[(p, c)]}
        for (p, c) in sorted(set(a_edges) & set(b_edges))
        if a_edges[(p, c)] != b_edges[(p, c)]
    ]

    a_rec = {r.id: r for r in a.family.records}
    b_rec = {r.id: r for r in b.family.records}
    rec_added = sorted(set(b_rec) - set(a_rec))
    rec_removed = sorted(set(a_rec) - set(b_rec))
    changed = []
    for rid in sorted(set(a_rec) & set(b_rec)):
        ra, rb = a_rec[rid], b_rec[rid]
        fields = {}
        for name in ("raw_p", "adjusted_p", "rejected"):
            va, vb = canonical(getattr(ra, name)), canonical(getattr(rb, name))
            if va != vb:
                fields[name] = {"from": va, "to": vb}
        if fields:
            changed.append({"id": rid, **fields})
    return {
        "from": frm,
        "to": to,
        "edges": {
            "added": [{"parent": p, "child": c, "belief": b_edges[(p, c)]} for p, c in added],
            "removed": [{"parent": p, "child": c} for p, c in removed],
            "belief_changed": retuned,
        },
        "records": {
            "added": rec_added,
            "removed": rec_removed,
            "changed": changed,
        },
    }


# --- persistence ---------------------------------------------------------


def _dataset_bytes(data: Dataset) -> bytes:
    buf = io.StringIO()
    save_csv(data, buf)
    return buf.getvalue().encode("utf-8")


def dataset_hash(data: Dataset) -> str:
    return hashlib.sha256(_dataset_bytes(data)).hexdigest()


def save_project(project: Project, data_dir: str) -> str:
    """Write the project JSON and its dataset; returns the JSON path."""
    os.makedirs(os.path.join(data_dir, "datasets"), exist_ok=True)
    os.makedirs(os.path.join(data_dir, "projects"), exist_ok=True)
    digest = dataset_hash(project.dataset)
    ds_path = os.path.join(data_dir, "datasets", f"{digest}.csv")
    if not os.path.exists(ds_path):
        with open(ds_path, "wb") as fh:
            fh.write(_dataset_bytes(project.dataset))
    payload = {
        "id": project.id,
        "settings": project.settings.to_dict(),
        "dataset_hash": digest,
        "graph": project.graph.to_dict(),
        "iterations": [s.to_dict() for s in project.iterations],
        "screening": {k: v for k, v in project.screening_cache.items()},
    }
    path = os.path.join(data_dir, "projects", f"{project.id}.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(payload))
        fh.write("\n")
    return path


def load_project(project_id: str, data_dir: str) -> Project:
    path = os.path.join(data_dir, "projects", f"{project_id}.json")
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    ds_path = os.path.join(data_dir, "datasets", f"{payload['dataset_hash']}.csv")
    dataset = load_csv(ds_path)
    project = Project(
        dataset=dataset,
        graph=CausalGraph.from_dict(payload["graph"]),
        settings=Settings.from_dict(payload["settings"]),
        id=payload["id"],
    )
    for s in payload.get("iterations", ()):
        project._iterations.append(IterationSnapshot.from_dict(s))
    project.screening_cache.update(payload.get("screening", {}))
    return project


def list_projects(data_dir: str) -> list[str]:
    proj_dir = os.path.join(data_dir, "projects")
    if not os.path.isdir(proj_dir):
        return []
    return sorted(
        name[: -len(".json")]
        for name in os.listdir(proj_dir)
        if name.endswith(".json")
    )
