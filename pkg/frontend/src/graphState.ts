// Editable client-side copy of the project graph. Edits are local until
// committed via PUT; a cycle pre-check keeps obviously bad graphs from
// ever reaching the wire (the server stays the authority).

import type { EdgeJson, GraphJson } from "./types.js";

export const BELIEFS = [0, 1, 2, 3] as const;

export class CycleHintError extends Error {
  readonly path: string[];

  constructor(path: string[]) {
    super(`edge would close a cycle: ${path.join(" -> ")}`);
    this.path = path;
  }
}

function edgeKey(parent: string, child: string): string {
  return `${parent}->${child}`;
}

export class UiGraphState {
  readonly nodes: string[];
  version: number;
  dirty = false;
  private edges = new Map<string, EdgeJson>();

  constructor(nodes: string[], version: number = 0) {
    this.nodes = [...nodes].sort();
    this.version = version;
  }

  static fromGraph(graph: GraphJson): UiGraphState {
    const state = new UiGraphState(
      graph.nodes.map((n) => n.name),
      graph.version,
    );
    for (const e of graph.edges) {
      state.edges.set(edgeKey(e.parent, e.child), { ...e });
    }
    return state;
  }

  edgeList(): EdgeJson[] {
    return [...this.edges.values()].sort((a, b) =>
      a.parent === b.parent
        ? a.child.localeCompare(b.child)
        : a.parent.localeCompare(b.parent),
    );
  }

  belief(parent: string, child: string): number | null {
    const edge = this.edges.get(edgeKey(parent, child));
    return edge ? edge.belief : null;
  }

  /**
   * Walk existing edges from `from` looking for `to`; a hit means adding
   * to->from would close a cycle. Returns the closing path or null.
   */
  findPath(from: string, to: string): string[] | null {
    const children = new Map<string, string[]>();
    for (const e of this.edges.values()) {
      const out = children.get(e.parent) ?? [];
      out.push(e.child);
      children.set(e.parent, out);
    }
    const stack: string[][] = [[from]];
    const seen = new Set<string>([from]);
    while (stack.length > 0) {
      const path = stack.pop()!;
      const tip = path[path.length - 1];
      if (tip === to) return path;
      for (const next of children.get(tip) ?? []) {
        if (!seen.has(next)) {
          seen.add(next);
          stack.push([...path, next]);
        }
      }
    }
    return null;
  }

  /**
   * Set an edge's belief. Belief 0 means "causal relation ruled out" and
   * deletes the edge. Adding an edge that would close a cycle throws
   * CycleHintError with the offending path.
   */
  setBelief(parent: string, child: string, belief: number): void {
    if (!this.nodes.includes(parent)) throw new Error(`unknown node ${parent}`);
    if (!this.nodes.includes(child)) throw new Error(`unknown node ${child}`);
    if (parent === child) throw new Error(`self-loop ${parent} not allowed`);
    if (!(BELIEFS as readonly number[]).includes(belief)) {
      throw new Error(`belief must be one of ${BELIEFS.join(", ")}, got ${belief}`);
    }
    const key = edgeKey(parent, child);
    if (belief === 0) {
      if (this.edges.delete(key)) this.dirty = true;
      return;
    }
    if (!this.edges.has(key)) {
      const path = this.findPath(child, parent);
      if (path) throw new CycleHintError([...path, child]);
    }
    const existing = this.edges.get(key);
    if (existing && existing.belief === belief) return;
    this.edges.set(key, { parent, child, belief });
    this.dirty = true;
  }

  removeEdge(parent: string, child: string): void {
    this.setBelief(parent, child, 0);
  }

  markClean(version: number): void {
    this.version = version;
    this.dirty = false;
  }

  toGraphJson(): GraphJson {
    return {
      nodes: this.nodes.map((name) => ({ name })),
      edges: this.edgeList(),
      version: this.version,
    };
  }
}
