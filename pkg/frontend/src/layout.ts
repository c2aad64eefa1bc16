// Longest-path layered layout: exogenous nodes in the left column,
// every child at least one column right of its parents. Plain and
// deterministic; nothing fancier is needed for seven-node graphs.

export interface Point {
  x: number;
  y: number;
}

export function layerNodes(
  nodes: string[],
  edges: { parent: string; child: string }[],
): Map<string, number> {
  const parents = new Map<string, string[]>();
  for (const node of nodes) parents.set(node, []);
  for (const e of edges) parents.get(e.child)?.push(e.parent);

  const layers = new Map<string, number>();
  const resolving = new Set<string>();
  const layerOf = (node: string): number => {
    const known = layers.get(node);
    if (known !== undefined) return known;
    if (resolving.has(node)) return 0;
    resolving.add(node);
    const ps = parents.get(node) ?? [];
    const layer =
      ps.length === 0 ? 0 : 1 + Math.max(...ps.map((p) => layerOf(p)));
    resolving.delete(node);
    layers.set(node, layer);
    return layer;
  };
  for (const node of nodes) layerOf(node);
  return layers;
}

export function positionNodes(
  nodes: string[],
  edges: { parent: string; child: string }[],
  width: number,
  height: number,
  margin: number = 70,
): Map<string, Point> {
  const layers = layerNodes(nodes, edges);
  const maxLayer = Math.max(0, ...layers.values());
  const columns = new Map<number, string[]>();
  for (const node of [...nodes].sort()) {
    const layer = layers.get(node) ?? 0;
    const col = columns.get(layer) ?? [];
    col.push(node);
    columns.set(layer, col);
  }
  const points = new Map<string, Point>();
  for (const [layer, col] of columns) {
    const x =
      maxLayer === 0
        ? width / 2
        : margin + (layer * (width - 2 * margin)) / maxLayer;
    col.forEach((node, i) => {
      const y = (height * (i + 1)) / (col.length + 1);
      points.set(node, { x, y });
    });
  }
  return points;
}
