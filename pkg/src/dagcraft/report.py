"""Byte-stable report serialization: canonical JSON and Graphviz DOT.

Two runs with identical inputs must produce identical report bytes, so
every float is rounded to six significant digits before serialization,
JSON keys are sorted, and DOT statements are emitted in sorted order.
Non-finite floats become null rather than leaking NaN into JSON.
"""

from __future__ import annotations

import json
import math

from .graph import CausalGraph
from .hypotheses import HypothesisFamily, HypothesisKind

EFFECTS = "effects"
INDUCED_COV = "induced-cov"
VIEWS = (EFFECTS, INDUCED_COV)

HIGHLIGHT_COLOR = "crimson"


def _round6(x: float):
    if math.isnan(x) or math.isinf(x):
        return None
    return float(format(x, ".6g"))


def canonical(obj):
    """Recursively round floats to 6 significant digits; map NaN to None."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return _round6(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if hasattr(obj, "item"):
        return canonical(obj.item())
    raise TypeError(f"cannot canonicalize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """Canonical JSON text: rounded floats, sorted keys, fixed separators."""
    return json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def _fmt(x) -> str:
    if x is None:
        return "?"
    return format(x, ".6g")


def _quote(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def export_dot(
    graph: CausalGraph,
    family: HypothesisFamily,
    view: str = EFFECTS,
    q: float | None = None,
) -> str:
    """Render one iteration as DOT with estimates and adjusted p-values.

    The effects view draws the DAG with each edge labeled by its slope
    estimate and adjusted p-value. The induced-cov view draws a dashed
    undirected link per covariance equivalence record (variances as
    self-loops) labeled with the induced-minus-sample gap. Any record
    whose adjusted p-value exceeds q is highlighted in color: those are
    the claims the data refuses to back, the talking points for the next
    design round. Statement order is sorted, so output is byte-stable.
    """
    if view not in VIEWS:
        raise ValueError(f"unknown view {view!r}; expected one of {VIEWS}")
    if q is None:
        q = family.q_level
    by_id = {r.id: r for r in family.records}
    lines = ["digraph dagcraft {" if view == EFFECTS else "graph dagcraft {"]
    lines.append('  rankdir=LR;')
    lines.append('  node [shape=box, fontname="Helvetica"];')
    for node in sorted(graph.nodes):
        lines.append(f"  {_quote(node)};")

    if view == EFFECTS:
        for edge in graph.edges:
            record = by_id.get(f"coef:{edge.child}<-{edge.parent}")
            attrs = []
            if record is not None:
                label = f"{_fmt(record.detail.get('estimate'))} ({_fmt(record.adjusted_p)})"
                attrs.append(f'label="{label}"')
                if record.adjusted_p is not None and record.adjusted_p > q:
                    attrs.append(f'color="{HIGHLIGHT_COLOR}"')
                    attrs.append(f'fontcolor="{HIGHLIGHT_COLOR}"')
                    attrs.append("penwidth=2.4")
                    attrs.append('highlight="true"')
            head = f"  {_quote(edge.parent)} -> {_quote(edge.child)}"
            lines.append(head + (" [" + ", ".join(attrs) + "]" if attrs else "") + ";")
    else:
        cov_records = sorted(
            (r for r in family.records if r.kind is HypothesisKind.COV_EQUIVALENCE),
            key=lambda r: r.id,
        )
        for record in cov_records:
            x, y = record.id.removeprefix("cov-eq:").split(",")
            label = f"{_fmt(record.detail.get('gap'))} ({_fmt(record.adjusted_p)})"
            attrs = ["style=dashed", f'label="{label}"']
            if record.adjusted_p is not None and record.adjusted_p > q:
                attrs.append(f'color="{HIGHLIGHT_COLOR}"')
                attrs.append(f'fontcolor="{HIGHLIGHT_COLOR}"')
                attrs.append("penwidth=2.4")
                attrs.append('highlight="true"')
            lines.append(f"  {_quote(x)} -- {_quote(y)} [" + ", ".join(attrs) + "];")

    fit_record = by_id.get("model-fit")
    inter = by_id.get("intersection")
    labels = []
    if fit_record is not None:
        labels.append(
            f"model fit p={_fmt(fit_record.raw_p)} adj={_fmt(fit_record.adjusted_p)}"
        )
    if inter is not None and inter.raw_p is not None:
        labels.append(f"intersection p={_fmt(inter.raw_p)} adj={_fmt(inter.adjusted_p)}")
    if labels:
        joined = "\\n".join(labels)
        lines.append(f'  label="{joined}";')
        lines.append("  labelloc=b;")
    lines.append("}")
    return "\n".join(lines) + "\n"
