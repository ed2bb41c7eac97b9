import type { BranchDoc, FieldError, InstanceDoc } from "./types.js";

/** Raw text values as read from the instance form inputs. */
export interface InstanceFormValues {
  sizes: string;
  perSizeLo: string;
  perSizeHi: string;
  totalLo: string;
  totalHi: string;
  kappa: string;
  mMax: string;
  cardLo: string;
  cardHi: string;
  /** JSON array of {id, demand} objects, pasted or loaded from a file. */
  branchesJson: string;
  branchNorm: string;
  normP: string;
}

export interface BuildResult {
  doc?: InstanceDoc;
  errors: FieldError[];
}

/**
 * Converts raw form text into an instance document, reporting parse
 * problems against the same field paths the validator and server use.
 * Semantic checks (windows, bounds ordering, ...) stay in validateInstance.
 */
export function buildInstanceDoc(values: InstanceFormValues): BuildResult {
  const errors: FieldError[] = [];

  const sizes = splitList(values.sizes);
  if (sizes.length === 0) {
    errors.push({ field: "sizes", message: "list at least one size label" });
  }
  const r = sizes.length;

  const perSizeLo = parseIntList(values.perSizeLo, r, "lot_bounds.per_size_lo", errors);
  const perSizeHi = parseIntList(values.perSizeHi, r, "lot_bounds.per_size_hi", errors);
  const totalLo = parseIntField(values.totalLo, "lot_bounds.total_lo", errors);
  const totalHi = parseIntField(values.totalHi, "lot_bounds.total_hi", errors);
  const kappa = parseIntField(values.kappa, "kappa", errors);
  const mMax = parseIntField(values.mMax, "m_max", errors);
  const cardLo = parseIntField(values.cardLo, "card_lo", errors);
  const cardHi = parseIntField(values.cardHi, "card_hi", errors);

  let branches: BranchDoc[] = [];
  try {
    branches = parseBranches(values.branchesJson);
  } catch (err) {
    errors.push({
      field: "branches",
      message: err instanceof Error ? err.message : String(err),
    });
  }

  if (errors.length > 0) {
    return { errors };
  }

  const doc: InstanceDoc = {
    sizes,
    branches,
    lot_bounds: {
      per_size_lo: perSizeLo as number[],
      per_size_hi: perSizeHi as number[],
      total_lo: totalLo as number,
      total_hi: totalHi as number,
    },
    kappa: kappa as number,
    m_max: mMax as number,
    card_lo: cardLo as number,
    card_hi: cardHi as number,
  };
  const norm = values.branchNorm.trim();
  if (norm && norm !== "l1") {
    doc.branch_norm =
      norm === "lp"
        ? { type: "lp", p: Number(values.normP) }
        : { type: norm as "l2" | "linf" };
  }
  return { doc, errors };
}

/** "S, M, L" or "S M L" → ["S", "M", "L"] */
export function splitList(text: string): string[] {
  return text
    .split(/[\s,;]+/)
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

function parseIntList(
  text: string,
  expected: number,
  field: string,
  errors: FieldError[],
): number[] | null {
  const parts = splitList(text);
  const numbers = parts.map(Number);
  if (numbers.some((n) => !Number.isInteger(n))) {
    errors.push({ field, message: "expected whole numbers" });
    return null;
  }
  if (numbers.length === 1 && expected > 1) {
    return new Array(expected).fill(numbers[0]);
  }
  if (numbers.length !== expected) {
    errors.push({
      field,
      message: `expected ${expected} values (one per size), got ${numbers.length}`,
    });
    return null;
  }
  return numbers;
}

function parseIntField(
  text: string,
  field: string,
  errors: FieldError[],
): number | null {
  const value = Number(text.trim());
  if (text.trim() === "" || !Number.isInteger(value)) {
    errors.push({ field, message: "expected a whole number" });
    return null;
  }
  return value;
}

function parseBranches(text: string): BranchDoc[] {
  if (text.trim() === "") {
    throw new Error("paste or upload branch demands as a JSON array");
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    throw new Error("branch demands are not valid JSON");
  }
  if (!Array.isArray(parsed)) {
    throw new Error("branch demands must be a JSON array of {id, demand}");
  }
  return parsed as BranchDoc[];
}
