import { ApiClient, ApiError } from "./api.js";
import { validateInstance } from "./validation.js";
import type { FieldError, InstanceDoc } from "./types.js";

export interface SubmitResult {
  instanceId?: string;
  errors: FieldError[];
}

/**
 * Validate locally, then POST the instance.  Invalid documents never reach
 * the network; server-side 422 details come back as the same FieldError
 * shape so the form renders both identically.
 */
export async function submitInstance(
  api: ApiClient,
  doc: InstanceDoc,
): Promise<SubmitResult> {
  const errors = validateInstance(doc);
  if (errors.length > 0) {
    return { errors };
  }
  try {
    const { instance_id } = await api.createInstance(doc);
    return { instanceId: instance_id, errors: [] };
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      return { errors: fieldErrorsFromDetail(err.detail) };
    }
    throw err;
  }
}

/** Normalize the service's 422 detail variants into field errors. */
export function fieldErrorsFromDetail(detail: unknown): FieldError[] {
  if (typeof detail === "string") {
    return [{ field: "$", message: detail }];
  }
  if (Array.isArray(detail)) {
    // FastAPI request-validation errors: [{loc: [...], msg: ...}, ...]
    return detail.map((item) => {
      const rec = item as { loc?: unknown[]; msg?: string };
      const loc = Array.isArray(rec.loc) ? rec.loc.slice(1) : [];
      return {
        field: loc.join(".") || "$",
        message: rec.msg ?? JSON.stringify(item),
      };
    });
  }
  if (detail !== null && typeof detail === "object") {
    const rec = detail as { field?: string; message?: string };
    if (rec.field !== undefined) {
      return [{ field: rec.field, message: rec.message ?? "invalid value" }];
    }
  }
  return [{ field: "$", message: JSON.stringify(detail) }];
}
