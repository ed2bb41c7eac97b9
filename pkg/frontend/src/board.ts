import type { ScenarioBoard, Scenario, StripEntry } from "./scenarios.js";
import type { InstanceDoc, LotTypeUsage } from "./types.js";

/**
 * Renders the scenario cards and the comparison strip into `root` and wires
 * card buttons back to the store.  Pure presentation: every mutation goes
 * through the ScenarioBoard, which talks to the service.
 */
export function mountBoard(
  root: HTMLElement,
  board: ScenarioBoard,
  instance: InstanceDoc,
): () => void {
  const render = () => {
    root.replaceChildren(
      renderStrip(board.comparisonStrip()),
      renderCards(board, instance),
    );
  };
  const onClick = (event: Event) => {
    const target = event.target;
    if (!(target instanceof HTMLElement)) {
      return;
    }
    const button = target.closest<HTMLElement>("[data-action]");
    if (!button || !root.contains(button)) {
      return;
    }
    const id = button.dataset["scenario"];
    if (!id) {
      return;
    }
    switch (button.dataset["action"]) {
      case "cancel":
        void board.cancelScenario(id);
        break;
      case "clone":
        void board.cloneScenario(id);
        break;
      case "retry":
        board.retryScenario(id);
        break;
    }
  };
  root.addEventListener("click", onClick);
  const unsubscribe = board.onChange(render);
  render();
  return () => {
    unsubscribe();
    root.removeEventListener("click", onClick);
  };
}

function renderStrip(entries: StripEntry[]): HTMLElement {
  const section = el("section", { class: "strip" });
  section.append(el("h2", {}, "Objective vs. lot-type budget"));
  const table = el("table", { class: "strip-table" });
  const head = el("tr", {});
  for (const title of ["Scenario", "Lot types allowed", "Objective", "Items", "Status"]) {
    head.append(el("th", {}, title));
  }
  table.append(head);
  for (const entry of entries) {
    const row = el("tr", { "data-strip": entry.scenarioId });
    row.append(
      el("td", {}, entry.label),
      el("td", {}, entry.kappa === null ? "default" : String(entry.kappa)),
      el("td", {}, entry.objective === null ? "no plan yet" : entry.objective.toFixed(3)),
      el("td", {}, entry.totalItems === null ? "" : String(entry.totalItems)),
      el("td", { class: `status status-${entry.status}` }, entry.status),
    );
    table.append(row);
  }
  section.append(table);
  return section;
}

function renderCards(board: ScenarioBoard, instance: InstanceDoc): HTMLElement {
  const grid = el("div", { class: "cards" });
  for (const scenario of board.scenarios) {
    grid.append(renderCard(scenario, instance));
  }
  return grid;
}

function renderCard(scenario: Scenario, instance: InstanceDoc): HTMLElement {
  const card = el("article", { class: "card", "data-card": scenario.id });
  const header = el("header", {});
  header.append(
    el("h3", {}, scenario.label),
    el("span", { class: `status status-${scenario.status}` }, scenario.status),
  );
  card.append(header);

  card.append(el("p", { class: "params" }, describeParams(scenario)));

  if (scenario.error) {
    card.append(el("p", { class: "error" }, scenario.error));
  }

  const best = scenario.best;
  if (best) {
    card.append(
      el(
        "p",
        { class: "best" },
        `objective ${best.objective.toFixed(3)} with ${best.total_items} items ` +
          `(${best.subsets_visited} subsets tried)`,
      ),
    );
    const usage = el("ul", { class: "usage" });
    for (const lt of best.lot_types) {
      usage.append(
        el(
          "li",
          {},
          `${formatLot(lt, instance)} at ${lt.branches} branches, ${formatMultipliers(lt)}`,
        ),
      );
    }
    card.append(usage);
  } else {
    card.append(el("p", { class: "best" }, "no plan yet"));
  }

  const actions = el("div", { class: "actions" });
  if (scenario.status === "running" || scenario.status === "starting") {
    actions.append(
      el("button", { "data-action": "cancel", "data-scenario": scenario.id }, "Cancel"),
    );
  }
  if (scenario.status === "stale") {
    actions.append(
      el("button", { "data-action": "retry", "data-scenario": scenario.id }, "Retry"),
    );
  }
  actions.append(
    el("button", { "data-action": "clone", "data-scenario": scenario.id }, "Clone"),
  );
  card.append(actions);
  return card;
}

function describeParams(scenario: Scenario): string {
  const parts: string[] = [];
  const p = scenario.params;
  if (typeof p["kappa"] === "number") {
    parts.push(`up to ${p["kappa"]} lot types`);
  } else if (scenario.overrides.kappa !== undefined) {
    parts.push(`up to ${scenario.overrides.kappa} lot types`);
  }
  const lo = p["card_lo"] ?? scenario.overrides.card_lo;
  const hi = p["card_hi"] ?? scenario.overrides.card_hi;
  if (typeof lo === "number" && typeof hi === "number") {
    parts.push(`${lo} to ${hi} items`);
  }
  if (typeof p["m_max"] === "number") {
    parts.push(`multiplier up to ${p["m_max"]}`);
  }
  return parts.join(", ") || "instance defaults";
}

function formatLot(usage: LotTypeUsage, instance: InstanceDoc): string {
  const pieces: string[] = [];
  usage.lot.forEach((count, idx) => {
    if (count > 0) {
      pieces.push(`${instance.sizes[idx] ?? `size ${idx}`}×${count}`);
    }
  });
  return `lot #${usage.lot_index} [${pieces.join(" ")}]`;
}

function formatMultipliers(usage: LotTypeUsage): string {
  const entries = Object.entries(usage.multipliers).sort(
    (a, b) => Number(a[0]) - Number(b[0]),
  );
  return entries.map(([m, count]) => `m=${m} ×${count}`).join(", ");
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}
