// SVG rendering of the two graph views. Highlight color matches the
// server's DOT export legend: crimson marks claims the data refuses to
// back at the current q.

import type { Point } from "./layout.js";
import type { CovLinkVm, EffectsEdgeVm } from "./views.js";

export const HIGHLIGHT_COLOR = "crimson";
const EDGE_COLOR = "#555";
const NODE_RADIUS = 46;

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, String(v));
  }
  return node;
}

function trim(from: Point, to: Point, radius: number): [Point, Point] {
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const len = Math.hypot(dx, dy) || 1;
  const ux = dx / len;
  const uy = dy / len;
  return [
    { x: from.x + ux * radius, y: from.y + uy * radius },
    { x: to.x - ux * radius, y: to.y - uy * radius },
  ];
}

function edgeText(
  at: Point,
  text: string,
  color: string,
  dy: number = -6,
): SVGTextElement {
  const t = el("text", {
    x: at.x,
    y: at.y + dy,
    "text-anchor": "middle",
    "font-size": 11,
    fill: color,
  });
  t.textContent = text;
  return t;
}

function addMarkers(svg: SVGSVGElement): void {
  const defs = el("defs");
  for (const [id, color] of [
    ["arrow", EDGE_COLOR],
    ["arrow-hl", HIGHLIGHT_COLOR],
  ] as const) {
    const marker = el("marker", {
      id,
      viewBox: "0 0 10 10",
      refX: 9,
      refY: 5,
      markerWidth: 7,
      markerHeight: 7,
      orient: "auto-start-reverse",
    });
    marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: color }));
    defs.appendChild(marker);
  }
  svg.appendChild(defs);
}

export interface GraphRenderModel {
  positions: Map<string, Point>;
  effects?: EffectsEdgeVm[];
  cov?: CovLinkVm[];
  markedNodes?: Set<string>;
  onEdgeClick?: (parent: string, child: string) => void;
}

export function drawGraph(svg: SVGSVGElement, model: GraphRenderModel): void {
  svg.textContent = "";
  addMarkers(svg);

  for (const vm of model.effects ?? []) {
    const from = model.positions.get(vm.parent);
    const to = model.positions.get(vm.child);
    if (!from || !to) continue;
    const color = vm.highlighted ? HIGHLIGHT_COLOR : EDGE_COLOR;
    const [a, b] = trim(from, to, NODE_RADIUS);
    const line = el("line", {
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      stroke: color,
      "stroke-width": vm.highlighted ? 2.4 : 1.4,
      "marker-end": vm.highlighted ? "url(#arrow-hl)" : "url(#arrow)",
    });
    line.classList.add("edge-line");
    if (model.onEdgeClick) {
      line.addEventListener("click", () =>
        model.onEdgeClick!(vm.parent, vm.child),
      );
    }
    svg.appendChild(line);
    if (vm.label) {
      const mid = { x: (a.x + b.x) / 2, y: (a.y + b.y) / 2 };
      svg.appendChild(edgeText(mid, vm.label, color));
    }
  }

  for (const vm of model.cov ?? []) {
    const color = vm.highlighted ? HIGHLIGHT_COLOR : EDGE_COLOR;
    const width = vm.highlighted ? 2.4 : 1.2;
    if (vm.x === vm.y) {
      const at = model.positions.get(vm.x);
      if (!at) continue;
      const r = 17;
      svg.appendChild(
        el("circle", {
          cx: at.x,
          cy: at.y - NODE_RADIUS - r + 8,
          r,
          fill: "none",
          stroke: color,
          "stroke-width": width,
          "stroke-dasharray": "5 3",
        }),
      );
      svg.appendChild(
        edgeText(
          { x: at.x, y: at.y - NODE_RADIUS - 2 * r },
          vm.label,
          color,
        ),
      );
    } else {
      const from = model.positions.get(vm.x);
      const to = model.positions.get(vm.y);
      if (!from || !to) continue;
      const [a, b] = trim(from, to, NODE_RADIUS - 8);
      svg.appendChild(
        el("line", {
          x1: a.x,
          y1: a.y,
          x2: b.x,
          y2: b.y,
          stroke: color,
          "stroke-width": width,
          "stroke-dasharray": "5 3",
        }),
      );
      const mid = { x: (a.x + b.x) / 2, y: (a.y + b.y) / 2 };
      svg.appendChild(edgeText(mid, vm.label, color));
    }
  }

  for (const [name, at] of model.positions) {
    const marked = model.markedNodes?.has(name) ?? false;
    const w = Math.max(86, name.length * 7 + 16);
    svg.appendChild(
      el("rect", {
        x: at.x - w / 2,
        y: at.y - 15,
        width: w,
        height: 30,
        rx: 5,
        fill: "var(--node-fill, #fff)",
        stroke: marked ? HIGHLIGHT_COLOR : "#333",
        "stroke-width": marked ? 2.4 : 1.2,
      }),
    );
    const label = el("text", {
      x: at.x,
      y: at.y + 4,
      "text-anchor": "middle",
      "font-size": 12,
      fill: marked ? HIGHLIGHT_COLOR : "var(--node-text, #111)",
    });
    label.textContent = name;
    svg.appendChild(label);
  }
}
