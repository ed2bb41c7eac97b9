/** JSON shapes exchanged with the planning service. */

export interface BranchDoc {
  id: string;
  demand: number[];
}

export interface LotBoundsDoc {
  per_size_lo: number[];
  per_size_hi: number[];
  total_lo: number;
  total_hi: number;
}

export interface BranchNormDoc {
  type: "l1" | "l2" | "linf" | "lp";
  p?: number;
}

export interface InstanceDoc {
  sizes: string[];
  branches: BranchDoc[];
  lot_universe?: number[][];
  lot_bounds?: LotBoundsDoc;
  kappa: number;
  m_max: number;
  card_lo: number;
  card_hi: number;
  branch_norm?: BranchNormDoc;
}

/** Overrides a scenario applies on top of the stored instance. */
export interface ScenarioOverrides {
  kappa?: number;
  m_max?: number;
  card_lo?: number;
  card_hi?: number;
}

/** Compute budget for one solve session; at most one field is needed. */
export interface SolveBudget {
  budget_ms?: number;
  max_subsets?: number;
}

export interface SolveRequest extends ScenarioOverrides, SolveBudget {
  instance_id: string;
  k?: number;
}

export interface LotTypeUsage {
  lot_index: number;
  lot: number[];
  branches: number;
  /** multiplier -> branch count, multipliers as decimal strings */
  multipliers: Record<string, number>;
}

export interface IncumbentRecord {
  objective: number;
  total_items: number;
  elapsed_ms: number;
  subsets_visited: number;
  lot_types: LotTypeUsage[];
}

export type SessionStatus =
  | "running"
  | "done"
  | "infeasible"
  | "cancelled"
  | "error";

export interface SessionState {
  session_id: string;
  status: SessionStatus;
  params: Record<string, unknown>;
  incumbents: IncumbentRecord[];
}

export interface PlanDoc {
  assignment: Record<string, { lot: number[]; m: number }>;
  objective: number;
  total_items: number;
  feasible: boolean;
}

export interface FieldError {
  field: string;
  message: string;
}
