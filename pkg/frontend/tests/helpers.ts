import type { FetchLike } from "../src/api.js";
import type {
  IncumbentRecord,
  InstanceDoc,
  SessionState,
  SessionStatus,
} from "../src/types.js";

export function makeInstanceDoc(overrides: Partial<InstanceDoc> = {}): InstanceDoc {
  return {
    sizes: ["S", "M", "L"],
    branches: [
      { id: "berlin", demand: [4, 7, 2] },
      { id: "bonn", demand: [1, 3, 5] },
    ],
    lot_universe: [
      [1, 2, 1],
      [0, 1, 2],
    ],
    kappa: 2,
    m_max: 3,
    card_lo: 0,
    card_hi: 100,
    ...overrides,
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function incumbent(
  objective: number,
  totalItems = 10,
  subsetsVisited = 1,
): IncumbentRecord {
  return {
    objective,
    total_items: totalItems,
    elapsed_ms: 5,
    subsets_visited: subsetsVisited,
    lot_types: [
      {
        lot_index: 0,
        lot: [1, 2, 1],
        branches: 2,
        multipliers: { "1": 2 },
      },
    ],
  };
}

export interface SessionScript {
  status: SessionStatus;
  incumbents: IncumbentRecord[];
  params?: Record<string, unknown>;
}

interface ScriptedSession {
  states: SessionState[];
}

export interface LoggedCall {
  method: string;
  path: string;
  body: unknown;
}

/**
 * Scripted stand-in for the solve service.  Each queued script feeds one
 * /solve session; every poll consumes the next state and the last state
 * repeats.  `failNextFetches` simulates a dead service.
 */
export class FakeService {
  readonly log: LoggedCall[] = [];
  failNextFetches = 0;
  private readonly sessions = new Map<string, ScriptedSession>();
  private readonly pending: SessionScript[][] = [];
  private seq = 0;

  queueSolve(states: SessionScript[]): void {
    this.pending.push(states);
  }

  callsTo(method: string, pathPrefix: string): LoggedCall[] {
    return this.log.filter(
      (c) => c.method === method && c.path.startsWith(pathPrefix),
    );
  }

  readonly fetch: FetchLike = async (input, init) => {
    const url = new URL(input);
    const method = init?.method ?? "GET";
    const path = url.pathname;
    this.log.push({
      method,
      path,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    if (this.failNextFetches > 0) {
      this.failNextFetches -= 1;
      throw new TypeError("fetch failed");
    }

    if (method === "POST" && path === "/solve") {
      const id = `s${++this.seq}`;
      const script = this.pending.shift() ?? [
        { status: "running", incumbents: [] },
      ];
      this.sessions.set(id, {
        states: script.map((s) => ({
          session_id: id,
          status: s.status,
          params: s.params ?? {},
          incumbents: s.incumbents,
        })),
      });
      return jsonResponse(200, { session_id: id, status: "running" });
    }

    const match = path.match(/^\/sessions\/([^/]+)(\/cancel)?$/);
    if (match) {
      const record = this.sessions.get(match[1] as string);
      if (!record) {
        return jsonResponse(404, { detail: `unknown session ${match[1]}` });
      }
      if (method === "POST" && match[2]) {
        const current = record.states[0] as SessionState;
        record.states = [{ ...current, status: "cancelled" }];
        return jsonResponse(200, {
          session_id: current.session_id,
          status: "cancelled",
        });
      }
      const state =
        record.states.length > 1
          ? (record.states.shift() as SessionState)
          : (record.states[0] as SessionState);
      return jsonResponse(200, state);
    }

    return jsonResponse(404, { detail: `no route for ${method} ${path}` });
  };
}
