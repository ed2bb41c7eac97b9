import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api.js";
import { ScenarioBoard } from "../src/scenarios.js";
import { FakeService, incumbent } from "./helpers.js";

function makeBoard(service: FakeService): ScenarioBoard {
  const api = new ApiClient("http://service", service.fetch);
  return new ScenarioBoard(api, "inst-1");
}

describe("ScenarioBoard", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("polls every 250 ms and keeps the newest incumbent as best", async () => {
    const service = new FakeService();
    service.queueSolve([
      { status: "running", incumbents: [incumbent(10)] },
      { status: "running", incumbents: [incumbent(10), incumbent(8)] },
      { status: "done", incumbents: [incumbent(10), incumbent(8)] },
    ]);
    const board = makeBoard(service);

    const card = await board.addScenario("first", { kappa: 2 });
    expect(card.status).toBe("running");
    expect(service.callsTo("GET", "/sessions").length).toBe(0);

    await vi.advanceTimersByTimeAsync(250);
    expect(card.best?.objective).toBe(10);
    expect(card.status).toBe("running");

    await vi.advanceTimersByTimeAsync(250);
    expect(card.best?.objective).toBe(8);
    expect(card.incumbents.length).toBe(2);

    await vi.advanceTimersByTimeAsync(250);
    expect(card.status).toBe("done");
    expect(card.best?.objective).toBe(8);

    const polls = service.callsTo("GET", "/sessions").length;
    await vi.advanceTimersByTimeAsync(2000);
    expect(service.callsTo("GET", "/sessions").length).toBe(polls);
    board.dispose();
  });

  it("renders an infeasible session with no plan at all", async () => {
    const service = new FakeService();
    service.queueSolve([{ status: "infeasible", incumbents: [] }]);
    const board = makeBoard(service);

    const card = await board.addScenario("hopeless");
    await vi.advanceTimersByTimeAsync(250);

    expect(card.status).toBe("infeasible");
    expect(card.best).toBeNull();
    expect(board.comparisonStrip()[0]?.objective).toBeNull();
    board.dispose();
  });

  it("cancel freezes the card at its best-so-far incumbent", async () => {
    const service = new FakeService();
    service.queueSolve([
      { status: "running", incumbents: [incumbent(10)] },
      { status: "running", incumbents: [incumbent(10), incumbent(8)] },
    ]);
    const board = makeBoard(service);

    const card = await board.addScenario("slow solve");
    await vi.advanceTimersByTimeAsync(250);
    expect(card.best?.objective).toBe(10);

    await board.cancelScenario(card.id);
    expect(card.status).toBe("cancelled");
    const frozen = card.best?.objective;

    const calls = service.log.length;
    await vi.advanceTimersByTimeAsync(3000);
    expect(service.log.length).toBe(calls);
    expect(card.best?.objective).toBe(frozen);
    board.dispose();
  });

  it("clone launches an independent session with merged overrides", async () => {
    const service = new FakeService();
    service.queueSolve([{ status: "running", incumbents: [] }]);
    service.queueSolve([{ status: "running", incumbents: [] }]);
    const board = makeBoard(service);

    const base = await board.addScenario("base", { kappa: 3 }, { max_subsets: 100 });
    const clone = await board.cloneScenario(base.id, { card_hi: 50 });

    expect(clone.id).not.toBe(base.id);
    expect(clone.sessionId).not.toBe(base.sessionId);
    expect(clone.label).toBe("base copy");
    expect(clone.overrides).toEqual({ kappa: 3, card_hi: 50 });

    const solves = service.callsTo("POST", "/solve");
    expect(solves.length).toBe(2);
    expect(solves[0]?.body).toEqual({
      instance_id: "inst-1",
      kappa: 3,
      max_subsets: 100,
    });
    expect(solves[1]?.body).toEqual({
      instance_id: "inst-1",
      kappa: 3,
      card_hi: 50,
      max_subsets: 100,
    });

    await board.cancelScenario(clone.id);
    expect(clone.status).toBe("cancelled");
    expect(base.status).toBe("running");
    board.dispose();
  });

  it("marks a dead session stale and retry resumes polling", async () => {
    const service = new FakeService();
    service.queueSolve([{ status: "running", incumbents: [incumbent(7)] }]);
    const board = makeBoard(service);

    const card = await board.addScenario("flaky");
    service.failNextFetches = 1;
    await vi.advanceTimersByTimeAsync(250);
    expect(card.status).toBe("stale");
    expect(card.error).toBe("fetch failed");

    const stalled = service.callsTo("GET", "/sessions").length;
    await vi.advanceTimersByTimeAsync(2000);
    expect(service.callsTo("GET", "/sessions").length).toBe(stalled);

    board.retryScenario(card.id);
    expect(card.status).toBe("running");
    await vi.advanceTimersByTimeAsync(250);
    expect(card.status).toBe("running");
    expect(card.best?.objective).toBe(7);
    board.dispose();
  });

  it("reports a failed solve launch as an error card", async () => {
    const service = new FakeService();
    service.failNextFetches = 1;
    const board = makeBoard(service);

    const card = await board.addScenario("wontstart");
    expect(card.status).toBe("error");
    expect(card.error).toBe("fetch failed");

    await vi.advanceTimersByTimeAsync(2000);
    expect(service.callsTo("GET", "/sessions").length).toBe(0);
    board.dispose();
  });

  it("orders the comparison strip by effective lot-type budget", async () => {
    const service = new FakeService();
    service.queueSolve([
      { status: "done", incumbents: [incumbent(40)], params: { kappa: 4 } },
    ]);
    service.queueSolve([
      { status: "done", incumbents: [incumbent(90)], params: { kappa: 1 } },
    ]);
    service.queueSolve([
      { status: "done", incumbents: [incumbent(55)], params: { kappa: 3 } },
    ]);
    const board = makeBoard(service);

    await board.addScenario("four", { kappa: 4 });
    await board.addScenario("one", { kappa: 1 });
    await board.addScenario("three", { kappa: 3 });
    await vi.advanceTimersByTimeAsync(250);

    const strip = board.comparisonStrip();
    expect(strip.map((e) => e.kappa)).toEqual([1, 3, 4]);
    expect(strip.map((e) => e.objective)).toEqual([90, 55, 40]);
    expect(strip.map((e) => e.status)).toEqual(["done", "done", "done"]);
    board.dispose();
  });

  it("notifies listeners on every change and stops after dispose", async () => {
    const service = new FakeService();
    service.queueSolve([{ status: "done", incumbents: [incumbent(1)] }]);
    const board = makeBoard(service);

    let events = 0;
    const off = board.onChange(() => {
      events += 1;
    });
    await board.addScenario("watched");
    expect(events).toBeGreaterThan(0);

    const before = events;
    off();
    await vi.advanceTimersByTimeAsync(250);
    expect(events).toBe(before);
    board.dispose();
  });
});
