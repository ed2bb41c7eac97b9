import type {
  FieldError,
  InstanceDoc,
  ScenarioOverrides,
} from "./types.js";

/**
 * Client-side instance validation mirroring the server's invariants, so a
 * broken document never leaves the browser.  Field names match the paths the
 * server reports in 422 details, letting the form render both sources of
 * error in one place.
 */
export function validateInstance(doc: InstanceDoc): FieldError[] {
  const errors: FieldError[] = [];
  const push = (field: string, message: string) => errors.push({ field, message });

  const sizes = Array.isArray(doc.sizes) ? doc.sizes : [];
  if (sizes.length === 0) {
    push("sizes", "at least one size is required");
  } else if (sizes.some((s) => typeof s !== "string" || s.length === 0)) {
    push("sizes", "sizes must be non-empty strings");
  } else if (new Set(sizes).size !== sizes.length) {
    push("sizes", "sizes must be unique");
  }
  const r = sizes.length;

  const branches = Array.isArray(doc.branches) ? doc.branches : [];
  if (branches.length === 0) {
    push("branches", "at least one branch is required");
  }
  const seenIds = new Set<string>();
  branches.forEach((b, i) => {
    if (!b.id) {
      push(`branches[${i}].id`, "branch id is required");
    } else if (seenIds.has(b.id)) {
      push(`branches[${i}].id`, `duplicate branch id ${b.id}`);
    } else {
      seenIds.add(b.id);
    }
    const demand = Array.isArray(b.demand) ? b.demand : [];
    if (r > 0 && demand.length !== r) {
      push(`branches[${i}].demand`, `demand needs one value per size (${r})`);
    } else if (demand.some((v) => !Number.isFinite(v) || v < 0)) {
      push(`branches[${i}].demand`, "demand values must be finite and >= 0");
    }
  });

  const hasUniverse = doc.lot_universe !== undefined;
  const hasBounds = doc.lot_bounds !== undefined;
  if (hasUniverse === hasBounds) {
    push("lot_universe", "provide exactly one of lot_universe or lot_bounds");
  }
  if (hasUniverse) {
    const seen = new Set<string>();
    (doc.lot_universe ?? []).forEach((lot, j) => {
      if (!Array.isArray(lot) || (r > 0 && lot.length !== r)) {
        push(`lot_universe[${j}]`, `lot needs one count per size (${r})`);
        return;
      }
      if (lot.some((c) => !Number.isInteger(c) || c < 0)) {
        push(`lot_universe[${j}]`, "lot counts must be integers >= 0");
      } else if (lot.reduce((a, b) => a + b, 0) < 1) {
        push(`lot_universe[${j}]`, "a lot must contain at least one item");
      }
      const key = lot.join(",");
      if (seen.has(key)) {
        push(`lot_universe[${j}]`, "duplicate lot-type");
      }
      seen.add(key);
    });
    if ((doc.lot_universe ?? []).length === 0) {
      push("lot_universe", "at least one lot-type is required");
    }
  }
  if (hasBounds && doc.lot_bounds) {
    const b = doc.lot_bounds;
    const okArrays =
      Array.isArray(b.per_size_lo) &&
      Array.isArray(b.per_size_hi) &&
      (r === 0 || (b.per_size_lo.length === r && b.per_size_hi.length === r));
    if (!okArrays) {
      push("lot_bounds", `per-size bounds need one entry per size (${r})`);
    } else if (
      b.per_size_lo.some((v, j) => !Number.isInteger(v) || v < 0 || v > (b.per_size_hi[j] ?? -1))
    ) {
      push("lot_bounds", "need 0 <= lo <= hi for every size");
    }
    if (!Number.isInteger(b.total_lo) || b.total_lo < 1) {
      push("lot_bounds", "total_lo must be an integer >= 1");
    } else if (!Number.isInteger(b.total_hi) || b.total_hi < b.total_lo) {
      push("lot_bounds", "need total_lo <= total_hi");
    }
  }

  if (!Number.isInteger(doc.kappa) || doc.kappa < 1) {
    push("kappa", "kappa must be an integer >= 1");
  }
  if (!Number.isInteger(doc.m_max) || doc.m_max < 1) {
    push("m_max", "m_max must be an integer >= 1");
  }
  errors.push(...validateWindow(doc.card_lo, doc.card_hi));

  const norm = doc.branch_norm;
  if (norm !== undefined) {
    if (!["l1", "l2", "linf", "lp"].includes(norm.type)) {
      push("branch_norm.type", `unknown norm type ${String(norm.type)}`);
    } else if (norm.type === "lp") {
      if (norm.p === undefined || !Number.isFinite(norm.p) || norm.p <= 0) {
        push("branch_norm.p", "lp norm needs a finite p > 0");
      }
    } else if (norm.p !== undefined) {
      push("branch_norm.p", `p is only valid for the lp norm`);
    }
  }
  return errors;
}

/** Item-window check shared by the instance form and scenario overrides. */
export function validateWindow(
  cardLo: number | undefined,
  cardHi: number | undefined,
): FieldError[] {
  const errors: FieldError[] = [];
  if (cardLo === undefined || !Number.isInteger(cardLo) || cardLo < 0) {
    errors.push({ field: "card_lo", message: "card_lo must be an integer >= 0" });
  }
  if (cardHi === undefined || !Number.isInteger(cardHi) || cardHi < 0) {
    errors.push({ field: "card_hi", message: "card_hi must be an integer >= 0" });
  }
  if (
    errors.length === 0 &&
    (cardLo as number) > (cardHi as number)
  ) {
    errors.push({
      field: "card_hi",
      message: `window is inverted: card_lo ${cardLo} > card_hi ${cardHi}`,
    });
  }
  return errors;
}

/** Scenario overrides reuse the instance rules on the fields they touch. */
export function validateOverrides(overrides: ScenarioOverrides): FieldError[] {
  const errors: FieldError[] = [];
  if (overrides.kappa !== undefined && (!Number.isInteger(overrides.kappa) || overrides.kappa < 1)) {
    errors.push({ field: "kappa", message: "kappa must be an integer >= 1" });
  }
  if (overrides.m_max !== undefined && (!Number.isInteger(overrides.m_max) || overrides.m_max < 1)) {
    errors.push({ field: "m_max", message: "m_max must be an integer >= 1" });
  }
  if (overrides.card_lo !== undefined || overrides.card_hi !== undefined) {
    if (overrides.card_lo !== undefined && overrides.card_hi !== undefined) {
      errors.push(...validateWindow(overrides.card_lo, overrides.card_hi));
    } else {
      const v = overrides.card_lo ?? overrides.card_hi;
      if (!Number.isInteger(v) || (v as number) < 0) {
        const field = overrides.card_lo !== undefined ? "card_lo" : "card_hi";
        errors.push({ field, message: `${field} must be an integer >= 0` });
      }
    }
  }
  return errors;
}
