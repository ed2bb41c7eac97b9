import type { ApiClient } from "./api.js";
import type {
  IncumbentRecord,
  ScenarioOverrides,
  SessionStatus,
  SolveBudget,
} from "./types.js";

export const DEFAULT_POLL_MS = 250;

/**
 * Card lifecycle: "starting" until the solve session is accepted, then the
 * server's status verbatim.  "stale" means polling failed (dead session or
 * network); the card keeps its last good data and offers a retry.
 */
export type ScenarioStatus = "starting" | "stale" | SessionStatus;

const TERMINAL: ReadonlySet<string> = new Set([
  "done",
  "infeasible",
  "cancelled",
  "error",
]);

export interface Scenario {
  id: string;
  label: string;
  overrides: ScenarioOverrides;
  budget: SolveBudget;
  sessionId: string | null;
  status: ScenarioStatus;
  /** effective solve parameters echoed by the server (kappa, window, ...) */
  params: Record<string, unknown>;
  incumbents: IncumbentRecord[];
  best: IncumbentRecord | null;
  error?: string;
}

export interface StripEntry {
  scenarioId: string;
  label: string;
  kappa: number | null;
  objective: number | null;
  totalItems: number | null;
  status: ScenarioStatus;
}

/**
 * Holds the scenario cards for one instance and keeps them fresh by polling
 * each linked session until it reaches a terminal state.  All solver work
 * happens server-side; this store only mirrors it.
 */
export class ScenarioBoard {
  readonly scenarios: Scenario[] = [];
  private readonly timers = new Map<string, ReturnType<typeof setTimeout>>();
  private readonly listeners = new Set<(board: ScenarioBoard) => void>();
  private seq = 0;

  constructor(
    private readonly api: ApiClient,
    readonly instanceId: string,
    private readonly pollMs: number = DEFAULT_POLL_MS,
  ) {}

  /** Subscribe to card changes; returns the unsubscribe function. */
  onChange(listener: (board: ScenarioBoard) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  getScenario(id: string): Scenario {
    const found = this.scenarios.find((s) => s.id === id);
    if (!found) {
      throw new Error(`unknown scenario ${id}`);
    }
    return found;
  }

  /** Start a solve session and a polling loop behind a new card. */
  async addScenario(
    label: string,
    overrides: ScenarioOverrides = {},
    budget: SolveBudget = {},
  ): Promise<Scenario> {
    const scenario: Scenario = {
      id: `card-${++this.seq}`,
      label,
      overrides,
      budget,
      sessionId: null,
      status: "starting",
      params: {},
      incumbents: [],
      best: null,
    };
    this.scenarios.push(scenario);
    this.emit();
    try {
      const res = await this.api.startSolve({
        instance_id: this.instanceId,
        ...overrides,
        ...budget,
      });
      scenario.sessionId = res.session_id;
      scenario.status = "running";
      this.emit();
      this.schedule(scenario);
    } catch (err) {
      scenario.status = "error";
      scenario.error = messageOf(err);
      this.emit();
    }
    return scenario;
  }

  /** New independent card and session from an existing card's settings. */
  cloneScenario(
    id: string,
    overrides: ScenarioOverrides = {},
    label?: string,
  ): Promise<Scenario> {
    const source = this.getScenario(id);
    return this.addScenario(
      label ?? `${source.label} copy`,
      { ...source.overrides, ...overrides },
      source.budget,
    );
  }

  /**
   * Cooperative cancel: the server keeps the best plan found so far, the
   * card freezes on it (no further polling).
   */
  async cancelScenario(id: string): Promise<Scenario> {
    const scenario = this.getScenario(id);
    if (!scenario.sessionId || TERMINAL.has(scenario.status)) {
      return scenario;
    }
    this.clearTimer(scenario.id);
    try {
      await this.api.cancelSession(scenario.sessionId);
      await this.syncOnce(scenario);
    } catch (err) {
      scenario.status = "stale";
      scenario.error = messageOf(err);
      this.emit();
    }
    return scenario;
  }

  /** Resume polling a stale card. */
  retryScenario(id: string): void {
    const scenario = this.getScenario(id);
    if (scenario.status !== "stale" || !scenario.sessionId) {
      return;
    }
    scenario.status = "running";
    scenario.error = undefined;
    this.emit();
    this.schedule(scenario);
  }

  /** Cards ordered by effective lot-type budget for the comparison strip. */
  comparisonStrip(): StripEntry[] {
    const entries = this.scenarios.map((s) => ({
      scenarioId: s.id,
      label: s.label,
      kappa: effectiveKappa(s),
      objective: s.best ? s.best.objective : null,
      totalItems: s.best ? s.best.total_items : null,
      status: s.status,
    }));
    return entries.sort((a, b) => {
      if (a.kappa !== b.kappa) {
        return (a.kappa ?? Infinity) - (b.kappa ?? Infinity);
      }
      return a.label.localeCompare(b.label);
    });
  }

  /** Stop all polling (page teardown). */
  dispose(): void {
    for (const timer of this.timers.values()) {
      clearTimeout(timer);
    }
    this.timers.clear();
    this.listeners.clear();
  }

  private schedule(scenario: Scenario): void {
    this.clearTimer(scenario.id);
    const timer = setTimeout(() => {
      void this.tick(scenario);
    }, this.pollMs);
    this.timers.set(scenario.id, timer);
  }

  private async tick(scenario: Scenario): Promise<void> {
    try {
      await this.syncOnce(scenario);
    } catch (err) {
      scenario.status = "stale";
      scenario.error = messageOf(err);
      this.emit();
      return;
    }
    if (scenario.status === "running") {
      this.schedule(scenario);
    }
  }

  private async syncOnce(scenario: Scenario): Promise<void> {
    if (!scenario.sessionId) {
      return;
    }
    const state = await this.api.getSession(scenario.sessionId);
    scenario.params = state.params;
    scenario.incumbents = state.incumbents;
    scenario.best = state.incumbents[state.incumbents.length - 1] ?? null;
    scenario.status = state.status;
    if (state.status === "error") {
      scenario.error = String(state.params["error"] ?? "solver error");
    }
    this.emit();
  }

  private clearTimer(id: string): void {
    const timer = this.timers.get(id);
    if (timer !== undefined) {
      clearTimeout(timer);
      this.timers.delete(id);
    }
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this);
    }
  }
}

function effectiveKappa(scenario: Scenario): number | null {
  if (typeof scenario.params["kappa"] === "number") {
    return scenario.params["kappa"];
  }
  return scenario.overrides.kappa ?? null;
}

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
