// Display formatting. Values arrive from the server already rounded to
// six significant digits; these helpers only choose how to print them.

/**
 * Six-significant-digit display, matching the server's DOT labels for
 * ordinary magnitudes. null (serialized NaN) renders as "?".
 */
export function fmtNum(x: number | null | undefined): string {
  if (x === null || x === undefined) return "?";
  return Number(x.toPrecision(6)).toString();
}

/** Record cost with four decimals: belief 3 reads 0.3333, belief 1 reads 1.0000. */
export function fmtCost(cost: number): string {
  return cost.toFixed(4);
}

/** Edge annotation in the graph views: "estimate (adjusted p)". */
export function edgeLabel(
  estimate: number | null | undefined,
  adjustedP: number | null | undefined,
): string {
  return `${fmtNum(estimate)} (${fmtNum(adjustedP)})`;
}

/** Compact timestamp for the history sidebar. */
export function fmtWhen(createdAt: string | null): string {
  if (!createdAt) return "";
  const d = new Date(createdAt);
  if (Number.isNaN(d.getTime())) return createdAt;
  return d.toISOString().slice(0, 16).replace("T", " ");
}
