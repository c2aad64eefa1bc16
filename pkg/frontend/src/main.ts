// Application wiring: one project open at a time, an editable graph on
// the left of the wire, immutable iteration snapshots coming back.

import { ApiClient, ApiError } from "./api.js";
import { fmtCost, fmtNum, fmtWhen } from "./format.js";
import { CycleHintError, UiGraphState } from "./graphState.js";
import { positionNodes } from "./layout.js";
import { drawGraph } from "./svg.js";
import type {
  DiffJson,
  DotView,
  ProjectDetailJson,
  SnapshotJson,
} from "./types.js";
import {
  buildEffectsView,
  buildInducedCovView,
  fitSummary,
  highlightKeys,
} from "./views.js";

function apiBase(): string {
  const param = new URLSearchParams(location.search).get("api");
  if (param) return param;
  if (location.protocol === "file:") return "http://127.0.0.1:8000";
  return "";
}

const client = new ApiClient(apiBase());

interface AppState {
  projectId: string | null;
  detail: ProjectDetailJson | null;
  graph: UiGraphState | null;
  snapshots: Map<number, SnapshotJson>;
  selected: number | null;
  view: DotView;
  markedNodes: Set<string>;
}

const state: AppState = {
  projectId: null,
  detail: null,
  graph: null,
  snapshots: new Map(),
  selected: null,
  view: "effects",
  markedNodes: new Set(),
};

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function setBanner(text: string, isError: boolean = true): void {
  const banner = byId<HTMLDivElement>("banner");
  banner.textContent = text;
  banner.className = text ? (isError ? "banner error" : "banner info") : "banner";
}

function describeError(err: unknown): string {
  if (err instanceof CycleHintError) {
    return `That edge would close a cycle: ${err.path.join(" → ")}`;
  }
  if (err instanceof ApiError) {
    if (err.kind === "cycle" && err.payload.cycle) {
      return `The server rejected the graph as cyclic: ${err.payload.cycle.join(" → ")}`;
    }
    if (err.kind === "singular-design") {
      return `Fit failed: collinear parents for ${err.payload.child}. ${err.message}`;
    }
    return `${err.kind}: ${err.message}`;
  }
  return String(err);
}

function markFromError(err: unknown): void {
  state.markedNodes = new Set();
  if (err instanceof CycleHintError) {
    for (const node of err.path) state.markedNodes.add(node);
  } else if (err instanceof ApiError) {
    for (const node of err.payload.cycle ?? []) state.markedNodes.add(node);
    if (err.payload.child) state.markedNodes.add(err.payload.child);
  }
}

// --- project lifecycle ---------------------------------------------------

async function refreshProjectList(): Promise<void> {
  const rows = await client.listProjects();
  const select = byId<HTMLSelectElement>("project-select");
  select.textContent = "";
  const blank = document.createElement("option");
  blank.value = "";
  blank.textContent = rows.length ? "choose a project" : "no projects yet";
  select.appendChild(blank);
  for (const row of rows) {
    const opt = document.createElement("option");
    opt.value = row.id;
    opt.textContent = `${row.id} (n=${row.n}, ${row.iterations} iterations)`;
    opt.selected = row.id === state.projectId;
    select.appendChild(opt);
  }
}

async function openProject(id: string): Promise<void> {
  state.projectId = id;
  state.detail = await client.getProject(id);
  state.graph = UiGraphState.fromGraph(state.detail.graph);
  state.snapshots = new Map();
  state.selected = null;
  state.markedNodes = new Set();
  if (state.detail.iterations > 0) {
    await selectIteration(state.detail.iterations);
  }
  setBanner("");
  byId<HTMLDivElement>("correlations").textContent = "";
  renderAll();
}

async function createToyProject(): Promise<void> {
  const n = Number(byId<HTMLInputElement>("toy-n").value) || 2000;
  const seed = Number(byId<HTMLInputElement>("toy-seed").value) || 0;
  const { id } = await client.createToyProject(n, seed);
  await refreshProjectList();
  await openProject(id);
}

async function selectIteration(k: number): Promise<void> {
  if (!state.projectId) return;
  if (!state.snapshots.has(k)) {
    state.snapshots.set(k, await client.getIteration(state.projectId, k));
  }
  state.selected = k;
}

// --- actions -------------------------------------------------------------

async function commitGraph(): Promise<void> {
  if (!state.projectId || !state.graph) return;
  try {
    const { graph } = await client.putGraph(
      state.projectId,
      state.graph.toGraphJson(),
    );
    state.graph = UiGraphState.fromGraph(graph);
    state.markedNodes = new Set();
    setBanner(`Graph saved as version ${graph.version}.`, false);
  } catch (err) {
    markFromError(err);
    setBanner(describeError(err));
  }
  renderAll();
}

async function runIteration(): Promise<void> {
  if (!state.projectId || !state.graph) return;
  if (state.graph.dirty) await commitGraph();
  if (state.graph.dirty) return;
  const note = byId<HTMLInputElement>("note").value;
  setBanner("Fitting…", false);
  try {
    const snapshot = await client.runIteration(state.projectId, note);
    state.snapshots.set(snapshot.index, snapshot);
    state.selected = snapshot.index;
    state.detail = await client.getProject(state.projectId);
    byId<HTMLInputElement>("note").value = "";
    setBanner("");
  } catch (err) {
    markFromError(err);
    setBanner(describeError(err));
  }
  renderAll();
}

async function loadCorrelations(): Promise<void> {
  if (!state.projectId) return;
  const host = byId<HTMLDivElement>("correlations");
  host.textContent = "Screening…";
  try {
    const table = await client.getCorrelations(state.projectId);
    host.textContent = "";
    const grid = document.createElement("table");
    grid.innerHTML =
      "<tr><th>x</th><th>y</th><th>r</th><th>raw p</th><th>adjusted p</th><th></th></tr>";
    for (const row of table.screening) {
      const tr = document.createElement("tr");
      const cells = [
        row.x,
        row.y,
        fmtNum(row.r),
        fmtNum(row.raw_p),
        fmtNum(row.adjusted_p),
        row.rejected ? "associated" : "",
      ];
      for (const text of cells) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      grid.appendChild(tr);
    }
    host.appendChild(grid);
  } catch (err) {
    host.textContent = describeError(err);
  }
}

async function showDot(): Promise<void> {
  if (!state.projectId || state.selected === null) return;
  const text = await client.getDot(state.projectId, state.selected, state.view);
  const pre = byId<HTMLPreElement>("dot-text");
  pre.textContent = text;
  pre.hidden = !pre.hidden;
}

async function showDiff(): Promise<void> {
  if (!state.projectId) return;
  const from = Number(byId<HTMLSelectElement>("diff-from").value);
  const to = Number(byId<HTMLSelectElement>("diff-to").value);
  if (!from || !to) return;
  const diff = await client.getDiff(state.projectId, from, to);
  renderDiff(diff);
}

// --- rendering -----------------------------------------------------------

function selectedSnapshot(): SnapshotJson | null {
  return state.selected !== null
    ? (state.snapshots.get(state.selected) ?? null)
    : null;
}

function renderGraph(): void {
  const svg = byId<SVGSVGElement & HTMLElement>("graph");
  if (!state.graph) {
    svg.textContent = "";
    return;
  }
  const width = svg.clientWidth || 980;
  const height = svg.clientHeight || 560;
  const edges = state.graph.edgeList();
  const positions = positionNodes(state.graph.nodes, edges, width, height);
  const snapshot = selectedSnapshot();
  const q = state.detail?.settings.q ?? 0.05;
  const useSnapshot = snapshot !== null && !state.graph.dirty;

  if (useSnapshot && state.view === "induced-cov") {
    drawGraph(svg, {
      positions,
      cov: buildInducedCovView(snapshot, q),
      markedNodes: state.markedNodes,
    });
  } else if (useSnapshot) {
    drawGraph(svg, {
      positions,
      effects: buildEffectsView(snapshot, q),
      markedNodes: state.markedNodes,
      onEdgeClick: focusEdge,
    });
  } else {
    const plain = edges.map((e) => ({
      parent: e.parent,
      child: e.child,
      belief: e.belief,
      record: null,
      label: `belief ${e.belief}`,
      highlighted: false,
    }));
    drawGraph(svg, {
      positions,
      effects: plain,
      markedNodes: state.markedNodes,
      onEdgeClick: focusEdge,
    });
  }

  const hint = byId<HTMLDivElement>("graph-hint");
  hint.textContent = state.graph.dirty
    ? "Graph edited; run an iteration to refresh the statistics."
    : "";
}

function renderFitSummary(): void {
  const host = byId<HTMLDivElement>("fit-summary");
  const snapshot = selectedSnapshot();
  if (!snapshot || state.graph?.dirty) {
    host.textContent = "";
    return;
  }
  const { modelFit, intersection } = fitSummary(snapshot);
  const parts = [];
  if (modelFit) {
    parts.push(
      `model fit p=${fmtNum(modelFit.raw_p)} adj=${fmtNum(modelFit.adjusted_p)}`,
    );
  }
  if (intersection && intersection.raw_p !== null) {
    parts.push(
      `intersection p=${fmtNum(intersection.raw_p)} adj=${fmtNum(intersection.adjusted_p)}`,
    );
  }
  host.textContent = parts.join("   ·   ");
}

function focusEdge(parent: string, child: string): void {
  const row = document.querySelector(
    `tr[data-edge="${parent}->${child}"]`,
  ) as HTMLTableRowElement | null;
  row?.scrollIntoView({ block: "nearest" });
  row?.classList.add("focus");
  setTimeout(() => row?.classList.remove("focus"), 900);
}

function renderEdgeTable(): void {
  const host = byId<HTMLTableSectionElement>("edge-rows");
  host.textContent = "";
  if (!state.graph) return;
  const snapshot = selectedSnapshot();
  const records = new Map(
    (snapshot?.family.records ?? []).map((r) => [r.id, r]),
  );
  for (const edge of state.graph.edgeList()) {
    const tr = document.createElement("tr");
    tr.dataset.edge = `${edge.parent}->${edge.child}`;

    const name = document.createElement("td");
    name.textContent = `${edge.parent} → ${edge.child}`;
    tr.appendChild(name);

    const beliefTd = document.createElement("td");
    const select = document.createElement("select");
    for (const b of [0, 1, 2, 3]) {
      const opt = document.createElement("option");
      opt.value = String(b);
      opt.textContent = b === 0 ? "0 (remove)" : String(b);
      opt.selected = b === edge.belief;
      select.appendChild(opt);
    }
    select.addEventListener("change", () => {
      try {
        state.graph!.setBelief(edge.parent, edge.child, Number(select.value));
        state.markedNodes = new Set();
        setBanner("");
      } catch (err) {
        markFromError(err);
        setBanner(describeError(err));
        select.value = String(edge.belief);
      }
      renderAll();
    });
    beliefTd.appendChild(select);
    tr.appendChild(beliefTd);

    const record = records.get(`coef:${edge.child}<-${edge.parent}`);
    const costTd = document.createElement("td");
    costTd.textContent =
      record && !state.graph.dirty ? fmtCost(record.cost) : "–";
    tr.appendChild(costTd);

    const statTd = document.createElement("td");
    if (record && !state.graph.dirty) {
      statTd.textContent = `${fmtNum(record.detail["estimate"])} (${fmtNum(record.adjusted_p)})`;
      if (record.adjusted_p !== null && snapshot) {
        const q = state.detail?.settings.q ?? snapshot.family.q_level;
        if (record.adjusted_p > q) statTd.className = "hl";
      }
    } else {
      statTd.textContent = "–";
    }
    tr.appendChild(statTd);

    host.appendChild(tr);
  }

  const addParent = byId<HTMLSelectElement>("add-parent");
  const addChild = byId<HTMLSelectElement>("add-child");
  if (addParent.options.length !== state.graph.nodes.length) {
    for (const sel of [addParent, addChild]) {
      sel.textContent = "";
      for (const node of state.graph.nodes) {
        const opt = document.createElement("option");
        opt.value = node;
        opt.textContent = node;
        sel.appendChild(opt);
      }
    }
  }
}

function renderHistory(): void {
  const host = byId<HTMLUListElement>("history");
  host.textContent = "";
  const count = state.detail?.iterations ?? 0;
  for (let k = count; k >= 1; k--) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    const row = state.snapshots.get(k);
    const when = row?.created_at ? ` · ${fmtWhen(row.created_at)}` : "";
    const note = row?.note ? ` — ${row.note}` : "";
    button.textContent = `iteration ${k}${when}${note}`;
    button.className = k === state.selected ? "current" : "";
    button.addEventListener("click", async () => {
      await selectIteration(k);
      renderAll();
    });
    li.appendChild(button);
    host.appendChild(li);
  }

  for (const id of ["diff-from", "diff-to"]) {
    const select = byId<HTMLSelectElement>(id);
    const prior = select.value;
    select.textContent = "";
    for (let k = 1; k <= count; k++) {
      const opt = document.createElement("option");
      opt.value = String(k);
      opt.textContent = String(k);
      select.appendChild(opt);
    }
    if (prior && Number(prior) <= count) select.value = prior;
    else if (id === "diff-to" && count > 0) select.value = String(count);
  }
}

function renderDiff(diff: DiffJson): void {
  const host = byId<HTMLDivElement>("diff-output");
  host.textContent = "";
  const lines: string[] = [];
  for (const e of diff.edges.added) {
    lines.push(`+ edge ${e.parent} → ${e.child} (belief ${e.belief})`);
  }
  for (const e of diff.edges.removed) {
    lines.push(`− edge ${e.parent} → ${e.child}`);
  }
  for (const e of diff.edges.belief_changed) {
    lines.push(
      `~ belief ${e.parent} → ${e.child}: ${e.belief_from} → ${e.belief_to}`,
    );
  }
  for (const id of diff.records.added) lines.push(`+ record ${id}`);
  for (const id of diff.records.removed) lines.push(`− record ${id}`);
  for (const c of diff.records.changed) {
    const bits: string[] = [];
    if (c.adjusted_p) {
      bits.push(`adj ${fmtNum(c.adjusted_p.from)} → ${fmtNum(c.adjusted_p.to)}`);
    }
    if (c.rejected) {
      bits.push(`rejected ${c.rejected.from} → ${c.rejected.to}`);
    }
    if (c.raw_p && bits.length === 0) {
      bits.push(`raw ${fmtNum(c.raw_p.from)} → ${fmtNum(c.raw_p.to)}`);
    }
    lines.push(`~ record ${c.id}: ${bits.join(", ")}`);
  }
  if (lines.length === 0) lines.push("No differences.");
  for (const text of lines) {
    const div = document.createElement("div");
    div.textContent = text;
    host.appendChild(div);
  }
}

function renderAll(): void {
  renderGraph();
  renderFitSummary();
  renderEdgeTable();
  renderHistory();
  const open = state.projectId !== null;
  byId<HTMLDivElement>("workbench").hidden = !open;
}

// --- boot ----------------------------------------------------------------

function wire(): void {
  byId<HTMLSelectElement>("project-select").addEventListener(
    "change",
    async (ev) => {
      const id = (ev.target as HTMLSelectElement).value;
      if (id) await openProject(id);
    },
  );
  byId<HTMLButtonElement>("toy-create").addEventListener("click", () => {
    createToyProject().catch((err) => setBanner(describeError(err)));
  });
  byId<HTMLButtonElement>("run").addEventListener("click", () => {
    runIteration().catch((err) => setBanner(describeError(err)));
  });
  byId<HTMLButtonElement>("save-graph").addEventListener("click", () => {
    commitGraph().catch((err) => setBanner(describeError(err)));
  });
  byId<HTMLButtonElement>("add-edge").addEventListener("click", () => {
    const parent = byId<HTMLSelectElement>("add-parent").value;
    const child = byId<HTMLSelectElement>("add-child").value;
    const belief = Number(byId<HTMLSelectElement>("add-belief").value);
    try {
      state.graph?.setBelief(parent, child, belief);
      state.markedNodes = new Set();
      setBanner("");
    } catch (err) {
      markFromError(err);
      setBanner(describeError(err));
    }
    renderAll();
  });
  byId<HTMLButtonElement>("load-correlations").addEventListener("click", () => {
    loadCorrelations().catch((err) => setBanner(describeError(err)));
  });
  byId<HTMLButtonElement>("show-dot").addEventListener("click", () => {
    showDot().catch((err) => setBanner(describeError(err)));
  });
  byId<HTMLButtonElement>("show-diff").addEventListener("click", () => {
    showDiff().catch((err) => setBanner(describeError(err)));
  });
  for (const input of document.querySelectorAll<HTMLInputElement>(
    "input[name=view]",
  )) {
    input.addEventListener("change", () => {
      state.view = input.value as DotView;
      byId<HTMLPreElement>("dot-text").hidden = true;
      renderAll();
    });
  }
}

async function boot(): Promise<void> {
  wire();
  try {
    const health = await client.health();
    byId<HTMLSpanElement>("health").textContent =
      `server ${health.version}`;
  } catch {
    byId<HTMLSpanElement>("health").textContent = "server unreachable";
  }
  await refreshProjectList().catch((err) => setBanner(describeError(err)));
}

boot();

// Exposed for the highlight cross-check in the browser console.
export { highlightKeys };
