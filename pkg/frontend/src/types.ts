// Wire types for the dagcraft HTTP API. Field names match the server's
// canonical JSON exactly; nothing here is computed client-side.

export interface NodeJson {
  name: string;
}

export interface EdgeJson {
  parent: string;
  child: string;
  belief: number;
}

export interface GraphJson {
  nodes: NodeJson[];
  edges: EdgeJson[];
  version: number;
}

export type RecordKind =
  | "coefficient"
  | "residual-normality"
  | "cov-equivalence"
  | "model-fit"
  | "intersection";

export interface RecordJson {
  id: string;
  kind: RecordKind;
  raw_p: number | null;
  cost: number;
  adjusted_p: number | null;
  rejected: boolean | null;
  detail: Record<string, number | null>;
}

export interface FamilyJson {
  iteration: number;
  q_level: number;
  records: RecordJson[];
}

export interface SnapshotJson {
  index: number;
  graph: GraphJson;
  fit: unknown;
  family: FamilyJson;
  intersection_p: number;
  note: string;
  created_at?: string;
}

export interface SettingsJson {
  q: number;
  delta_rho: number;
  reps: number;
  master_seed: number;
  intersection_method: string;
}

export interface ProjectSummaryJson {
  id: string;
  n: number;
  columns: string[];
  iterations: number;
}

export interface ProjectDetailJson {
  id: string;
  settings: SettingsJson;
  graph: GraphJson;
  columns: string[];
  n: number;
  iterations: number;
}

export interface IterationRowJson {
  index: number;
  graph_version: number;
  intersection_p: number;
  note: string;
  created_at: string | null;
}

export interface ScreeningRowJson {
  x: string;
  y: string;
  r: number;
  raw_p: number;
  adjusted_p: number;
  rejected: boolean;
}

export interface CorrelationsJson {
  columns: string[];
  corr: number[][];
  method: string;
  reps: number;
  screening: ScreeningRowJson[];
}

export interface DiffEdgesJson {
  added: EdgeJson[];
  removed: { parent: string; child: string }[];
  belief_changed: {
    parent: string;
    child: string;
    belief_from: number;
    belief_to: number;
  }[];
}

export interface DiffRecordChangeJson {
  id: string;
  raw_p?: { from: number | null; to: number | null };
  adjusted_p?: { from: number | null; to: number | null };
  rejected?: { from: boolean | null; to: boolean | null };
}

export interface DiffJson {
  from: number;
  to: number;
  edges: DiffEdgesJson;
  records: {
    added: string[];
    removed: string[];
    changed: DiffRecordChangeJson[];
  };
}

export type DotView = "effects" | "induced-cov";

export interface ErrorJson {
  error: string;
  message: string;
  cycle?: string[];
  child?: string;
}
