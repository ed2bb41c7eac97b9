import { ApiClient } from "./api.js";
import { mountBoard } from "./board.js";
import { buildInstanceDoc, type InstanceFormValues } from "./fields.js";
import { submitInstance } from "./form.js";
import { ScenarioBoard } from "./scenarios.js";
import { validateOverrides } from "./validation.js";
import type { FieldError, InstanceDoc, ScenarioOverrides, SolveBudget } from "./types.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? window.location.origin).replace(/\/$/, "");
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function inputValue(id: string): string {
  return byId<HTMLInputElement>(id).value;
}

function optionalInt(id: string): number | undefined {
  const text = inputValue(id).trim();
  return text === "" ? undefined : Number(text);
}

/** Writes each error next to its field; unmatched paths go to the summary. */
function showErrors(form: HTMLElement, errors: FieldError[]): void {
  for (const slot of form.querySelectorAll("[data-error-for]")) {
    slot.textContent = "";
  }
  const summary = form.querySelector("[data-error-summary]");
  if (summary) {
    summary.textContent = "";
  }
  const leftovers: string[] = [];
  for (const error of errors) {
    const slot = findSlot(form, error.field);
    if (slot) {
      slot.textContent = error.message;
    } else {
      leftovers.push(`${error.field}: ${error.message}`);
    }
  }
  if (summary && leftovers.length > 0) {
    summary.textContent = leftovers.join("\n");
  }
}

function findSlot(form: HTMLElement, field: string): Element | null {
  // "branches[3].demand" falls back to the "branches" slot, and so on.
  let path = field;
  for (;;) {
    const slot = form.querySelector(`[data-error-for="${path}"]`);
    if (slot) {
      return slot;
    }
    const cut = Math.max(path.lastIndexOf("."), path.lastIndexOf("["));
    if (cut <= 0) {
      return null;
    }
    path = path.slice(0, cut);
  }
}

function collectInstanceValues(): InstanceFormValues {
  return {
    sizes: inputValue("sizes"),
    perSizeLo: inputValue("per-size-lo"),
    perSizeHi: inputValue("per-size-hi"),
    totalLo: inputValue("total-lo"),
    totalHi: inputValue("total-hi"),
    kappa: inputValue("kappa"),
    mMax: inputValue("m-max"),
    cardLo: inputValue("card-lo"),
    cardHi: inputValue("card-hi"),
    branchesJson: byId<HTMLTextAreaElement>("branches").value,
    branchNorm: byId<HTMLSelectElement>("branch-norm").value,
    normP: inputValue("norm-p"),
  };
}

function main(): void {
  const api = new ApiClient(apiBase());
  const instanceForm = byId<HTMLFormElement>("instance-form");
  const scenarioForm = byId<HTMLFormElement>("scenario-form");
  const scenarioSection = byId<HTMLElement>("scenario-section");
  const boardRoot = byId<HTMLElement>("board");
  let board: ScenarioBoard | null = null;
  let unmount: (() => void) | null = null;

  byId<HTMLInputElement>("branches-file").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) {
      byId<HTMLTextAreaElement>("branches").value = await file.text();
    }
  });

  instanceForm.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const built = buildInstanceDoc(collectInstanceValues());
    if (!built.doc) {
      showErrors(instanceForm, built.errors);
      return;
    }
    let result;
    try {
      result = await submitInstance(api, built.doc);
    } catch (err) {
      showErrors(instanceForm, [
        { field: "$", message: err instanceof Error ? err.message : String(err) },
      ]);
      return;
    }
    showErrors(instanceForm, result.errors);
    if (result.instanceId) {
      byId<HTMLElement>("instance-id").textContent = result.instanceId;
      scenarioSection.hidden = false;
      unmount?.();
      board?.dispose();
      board = new ScenarioBoard(api, result.instanceId);
      unmount = mountBoard(boardRoot, board, built.doc as InstanceDoc);
    }
  });

  scenarioForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (!board) {
      return;
    }
    const overrides: ScenarioOverrides = {};
    const kappa = optionalInt("sc-kappa");
    const mMax = optionalInt("sc-m-max");
    const cardLo = optionalInt("sc-card-lo");
    const cardHi = optionalInt("sc-card-hi");
    if (kappa !== undefined) overrides.kappa = kappa;
    if (mMax !== undefined) overrides.m_max = mMax;
    if (cardLo !== undefined) overrides.card_lo = cardLo;
    if (cardHi !== undefined) overrides.card_hi = cardHi;
    const errors = validateOverrides(overrides);
    showErrors(scenarioForm, errors);
    if (errors.length > 0) {
      return;
    }
    const budget: SolveBudget = {};
    const budgetMs = optionalInt("sc-budget-ms");
    const maxSubsets = optionalInt("sc-max-subsets");
    if (budgetMs !== undefined) budget.budget_ms = budgetMs;
    if (maxSubsets !== undefined) budget.max_subsets = maxSubsets;
    const label =
      inputValue("sc-label").trim() || `scenario ${board.scenarios.length + 1}`;
    void board.addScenario(label, overrides, budget);
  });
}

main();
