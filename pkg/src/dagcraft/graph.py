"""Causal graph data model: nodes, belief-scored edges, acyclicity.

Graphs are value-semantic: every mutation returns a new ``CausalGraph``
with the version bumped, so iteration snapshots can share history and
diffs stay well defined. A belief score of 0 means "causal relation is
not possible" and is represented by the absence of the edge; committing
belief 0 through an editor deletes the edge rather than storing it.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass, field

from .errors import (
    CycleError,
    DuplicateEdgeError,
    OutOfRangeError,
    UnknownEdgeError,
    UnknownNodeError,
)

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")

BELIEF_RANGE = (0, 1, 2, 3)


def belief_to_cost(belief: int) -> float:
    """Map a belief score to the false-discovery cost weight 1/(belief + 0.0001).

    Strong beliefs get small costs, so the weighted step-up procedure
    spends less of its error budget confirming them. Belief 0 yields the
    limiting cost 10000 (edges the expert rules out are normally absent
    from the graph altogether).
    """
    if belief not in BELIEF_RANGE:
        raise OutOfRangeError(f"belief must be one of {BELIEF_RANGE}, got {belief!r}")
    return 1.0 / (belief + 0.0001)


@dataclass(frozen=True, order=True)
class Edge:
    parent: str
    child: str
    belief: int = 1

    def __post_init__(self):
        if self.parent == self.child:
            raise OutOfRangeError(f"self-loop {self.parent!r} not allowed")
        if self.belief not in BELIEF_RANGE:
            raise OutOfRangeError(
                f"belief must be one of {BELIEF_RANGE}, got {self.belief!r}"
            )


@dataclass(frozen=True)
class CausalGraph:
    """Directed acyclic graph over named nodes with belief-scored edges."""

    nodes: frozenset[str] = frozenset()
    edges: tuple[Edge, ...] = ()
    version: int = 0

    def __post_init__(self):
        for name in self.nodes:
            if not _NAME_RE.match(name):
                raise OutOfRangeError(f"invalid node name {name!r}")
        seen = set()
        for e in self.edges:
            if e.parent not in self.nodes:
                raise UnknownNodeError(f"unknown node {e.parent!r}")
            if e.child not in self.nodes:
                raise UnknownNodeError(f"unknown node {e.child!r}")
            if (e.parent, e.child) in seen:
                raise DuplicateEdgeError(f"duplicate edge {e.parent}->{e.child}")
            seen.add((e.parent, e.child))
        cycle = _find_cycle(self.nodes, self.edges)
        if cycle:
            raise CycleError(cycle)
        # normalize edge order so equal graphs compare equal
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    # --- structure queries ---------------------------------------------

    def parents(self, node: str) -> tuple[str, ...]:
        if node not in self.nodes:
            raise UnknownNodeError(f"unknown node {node!r}")
        return tuple(sorted(e.parent for e in self.edges if e.child == node))

    def children(self, node: str) -> tuple[str, ...]:
        if node not in self.nodes:
            raise UnknownNodeError(f"unknown node {node!r}")
        return tuple(sorted(e.child for e in self.edges if e.parent == node))

    def is_endogenous(self, node: str) -> bool:
        return len(self.parents(node)) > 0

    @property
    def endogenous(self) -> tuple[str, ...]:
        return tuple(n for n in sorted(self.nodes) if self.is_endogenous(n))

    @property
    def exogenous(self) -> tuple[str, ...]:
        return tuple(n for n in sorted(self.nodes) if not self.is_endogenous(n))

    def edge(self, parent: str, child: str) -> Edge:
        for e in self.edges:
            if e.parent == parent and e.child == child:
                return e
        raise UnknownEdgeError(f"no edge {parent}->{child}")

    def has_edge(self, parent: str, child: str) -> bool:
        return any(e.parent == parent and e.child == child for e in self.edges)

    # --- mutations (value semantics) -----------------------------------

    def add_node(self, name: str) -> "CausalGraph":
        if name in self.nodes:
            raise DuplicateEdgeError(f"node {name!r} already present")
        return CausalGraph(self.nodes | {name}, self.edges, self.version + 1)

    def remove_node(self, name: str) -> "CausalGraph":
        if name not in self.nodes:
            raise UnknownNodeError(f"unknown node {name!r}")
        kept = tuple(e for e in self.edges if name not in (e.parent, e.child))
        return CausalGraph(self.nodes - {name}, kept, self.version + 1)

    def add_edge(self, edge: Edge) -> "CausalGraph":
        if edge.parent not in self.nodes:
            raise UnknownNodeError(f"unknown node {edge.parent!r}")
        if edge.child not in self.nodes:
            raise UnknownNodeError(f"unknown node {edge.child!r}")
        if self.has_edge(edge.parent, edge.child):
            raise DuplicateEdgeError(f"duplicate edge {edge.parent}->{edge.child}")
        return CausalGraph(self.nodes, self.edges + (edge,), self.version + 1)

    def remove_edge(self, parent: str, child: str) -> "CausalGraph":
        if not self.has_edge(parent, child):
            raise UnknownEdgeError(f"no edge {parent}->{child}")
        kept = tuple(e for e in self.edges if (e.parent, e.child) != (parent, child))
        return CausalGraph(self.nodes, kept, self.version + 1)

    def with_version(self, version: int) -> "CausalGraph":
        return CausalGraph(self.nodes, self.edges, version)

    # --- ordering -------------------------------------------------------

    def topological_order(self) -> list[str]:
        """Node names with every parent before its children.

        Ties are broken lexicographically so the order (and everything
        derived from it: matrices, reports, DOT output) is byte-stable.
        """
        indegree = {n: 0 for n in self.nodes}
        for e in self.edges:
            indegree[e.child] += 1
        ready = [n for n, d in indegree.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            node = heapq.heappop(ready)
            order.append(node)
            for e in self.edges:
                if e.parent == node:
                    indegree[e.child] -= 1
                    if indegree[e.child] == 0:
                        heapq.heappush(ready, e.child)
        assert len(order) == len(self.nodes)
        return order

    # --- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": n} for n in sorted(self.nodes)],
            "edges": [
                {"parent": e.parent, "child": e.child, "belief": e.belief}
                for e in self.edges
            ],
            "version": self.version,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, payload: dict) -> "CausalGraph":
        nodes = frozenset(n["name"] for n in payload.get("nodes", ()))
        edges = tuple(
            Edge(e["parent"], e["child"], int(e.get("belief", 1)))
            for e in payload.get("edges", ())
        )
        return cls(nodes, edges, int(payload.get("version", 0)))

    @classmethod
    def from_json(cls, text: str) -> "CausalGraph":
        return cls.from_dict(json.loads(text))


def _find_cycle(nodes, edges):
    """Return one directed cycle as a node list (closed), or None."""
    children = {n: [] for n in nodes}
    for e in edges:
        children[e.parent].append(e.child)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    stack_path = []

    def visit(node):
        color[node] = GRAY
        stack_path.append(node)
        for nxt in children[node]:
            if color[nxt] == GRAY:
                i = stack_path.index(nxt)
                return stack_path[i:] + [nxt]
            if color[nxt] == WHITE:
                found = visit(nxt)
                if found:
                    return found
        stack_path.pop()
        color[node] = BLACK
        return None

    for n in sorted(nodes):
        if color[n] == WHITE:
            found = visit(n)
            if found:
                return found
    return None
