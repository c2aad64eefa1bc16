// View-models for the two graph overlays. The element set and the
// highlight rule mirror the server's DOT export for the same snapshot:
// effects draws one arrow per graph edge labeled from its coefficient
// record, induced-cov draws one dashed link per covariance equivalence
// record (variances as self-loops), and an element is highlighted
// exactly when its adjusted p-value exceeds q.

import { edgeLabel } from "./format.js";
import type { RecordJson, SnapshotJson } from "./types.js";

export interface EffectsEdgeVm {
  parent: string;
  child: string;
  belief: number;
  record: RecordJson | null;
  label: string;
  highlighted: boolean;
}

export interface CovLinkVm {
  x: string;
  y: string;
  record: RecordJson;
  label: string;
  highlighted: boolean;
}

export interface FitSummaryVm {
  modelFit: RecordJson | null;
  intersection: RecordJson | null;
}

export function isHighlighted(adjustedP: number | null, q: number): boolean {
  return adjustedP !== null && adjustedP > q;
}

export function buildEffectsView(
  snapshot: SnapshotJson,
  q: number,
): EffectsEdgeVm[] {
  const byId = new Map(snapshot.family.records.map((r) => [r.id, r]));
  return snapshot.graph.edges.map((edge) => {
    const record = byId.get(`coef:${edge.child}<-${edge.parent}`) ?? null;
    return {
      parent: edge.parent,
      child: edge.child,
      belief: edge.belief,
      record,
      label: record
        ? edgeLabel(record.detail["estimate"], record.adjusted_p)
        : "",
      highlighted: record ? isHighlighted(record.adjusted_p, q) : false,
    };
  });
}

export function buildInducedCovView(
  snapshot: SnapshotJson,
  q: number,
): CovLinkVm[] {
  return snapshot.family.records
    .filter((r) => r.kind === "cov-equivalence")
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((record) => {
      const [x, y] = record.id.slice("cov-eq:".length).split(",");
      return {
        x,
        y,
        record,
        label: edgeLabel(record.detail["gap"], record.adjusted_p),
        highlighted: isHighlighted(record.adjusted_p, q),
      };
    });
}

export function fitSummary(snapshot: SnapshotJson): FitSummaryVm {
  const byId = new Map(snapshot.family.records.map((r) => [r.id, r]));
  return {
    modelFit: byId.get("model-fit") ?? null,
    intersection: byId.get("intersection") ?? null,
  };
}

/**
 * Keys of the highlighted elements, in the server's DOT spelling:
 * `"A" -> "B"` for effects arrows, `"A" -- "B"` for covariance links.
 */
export function highlightKeys(
  vms: (EffectsEdgeVm | CovLinkVm)[],
): Set<string> {
  const keys = new Set<string>();
  for (const vm of vms) {
    if (!vm.highlighted) continue;
    if ("parent" in vm) {
      keys.add(`"${vm.parent}" -> "${vm.child}"`);
    } else {
      keys.add(`"${vm.x}" -- "${vm.y}"`);
    }
  }
  return keys;
}
