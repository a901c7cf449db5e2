/**
 * Workbench view state and its URL serialization.
 *
 * The whole navigable state lives in the query string so a pasted link
 * reproduces the exact view: active field, selected matrix cell, pinned
 * conditions, the artifact id backing each analysis panel, and the
 * correlation threshold slider. encodeView/decodeView are inverses for
 * every normalized state; decodeView also tolerates hand-edited or stale
 * URLs by dropping whatever it cannot read.
 */

import type { FieldDoc } from "./types.js";

export interface ViewState {
  /** Active field document id; empty string when nothing is open. */
  field: string;
  /** Selected matrix cell as a pair of condition ids, or null. */
  cell: [string, string] | null;
  /** Pinned condition ids, at most one per dimension, kept sorted. */
  pins: string[];
  /** Artifact id per analysis stage backing the open panels. */
  artifacts: Record<string, string>;
  /** Correlation threshold slider position. */
  threshold: number;
  /** Whether configuration counts exclude judged-inconsistent pairs. */
  cca: boolean;
}

export const DEFAULT_THRESHOLD = 0.7;

export function defaultView(): ViewState {
  return {
    field: "",
    cell: null,
    pins: [],
    artifacts: {},
    threshold: DEFAULT_THRESHOLD,
    cca: true,
  };
}

/** Normalize to the canonical form produced by decodeView. */
export function normalizeView(state: ViewState): ViewState {
  const artifacts: Record<string, string> = {};
  for (const stage of Object.keys(state.artifacts).sort()) {
    const id = state.artifacts[stage];
    if (id) artifacts[stage] = id;
  }
  return {
    field: state.field,
    cell: state.cell ? [state.cell[0], state.cell[1]] : null,
    pins: [...new Set(state.pins)].sort(),
    artifacts,
    threshold: state.threshold,
    cca: state.cca,
  };
}

export function encodeView(state: ViewState): string {
  const canonical = normalizeView(state);
  const query = new URLSearchParams();
  if (canonical.field) query.set("field", canonical.field);
  if (canonical.cell) query.set("cell", `${canonical.cell[0]}~${canonical.cell[1]}`);
  for (const pin of canonical.pins) query.append("pin", pin);
  for (const [stage, id] of Object.entries(canonical.artifacts)) {
    query.append("artifact", `${stage}:${id}`);
  }
  if (canonical.threshold !== DEFAULT_THRESHOLD) {
    query.set("threshold", String(canonical.threshold));
  }
  if (!canonical.cca) query.set("cca", "false");
  return query.toString();
}

export function decodeView(encoded: string | URLSearchParams): ViewState {
  const query = typeof encoded === "string" ? new URLSearchParams(encoded) : encoded;
  const state = defaultView();
  state.field = query.get("field") ?? "";
  const cell = query.get("cell");
  if (cell && cell.includes("~")) {
    const split = cell.indexOf("~");
    const a = cell.slice(0, split);
    const b = cell.slice(split + 1);
    if (a && b) state.cell = [a, b];
  }
  state.pins = [...new Set(query.getAll("pin").filter((pin) => pin !== ""))].sort();
  for (const entry of query.getAll("artifact")) {
    const split = entry.indexOf(":");
    if (split <= 0 || split === entry.length - 1) continue;
    state.artifacts[entry.slice(0, split)] = entry.slice(split + 1);
  }
  const threshold = query.get("threshold");
  if (threshold !== null) {
    const value = Number(threshold);
    if (Number.isFinite(value) && value >= 0 && value <= 1) state.threshold = value;
  }
  if (query.get("cca") === "false") state.cca = false;
  return state;
}

export interface PinChange {
  ok: boolean;
  state: ViewState;
  /** Set when ok is false: why the pin was rejected client-side. */
  reason?: string;
}

/** Map each condition id to its dimension id. */
export function dimensionIndex(field: FieldDoc): Map<string, string> {
  const index = new Map<string, string>();
  for (const dimension of field.dimensions) {
    for (const condition of dimension.conditions) {
      index.set(condition.id, dimension.id);
    }
  }
  return index;
}

/**
 * Toggle a pin. Unpinning always succeeds; pinning fails client-side when
 * the condition is unknown or its dimension already holds a different pin,
 * so no request is issued for an impossible combination.
 */
export function togglePin(state: ViewState, conditionId: string, field: FieldDoc): PinChange {
  if (state.pins.includes(conditionId)) {
    const next = normalizeView({
      ...state,
      pins: state.pins.filter((pin) => pin !== conditionId),
    });
    return { ok: true, state: next };
  }
  const index = dimensionIndex(field);
  const dimension = index.get(conditionId);
  if (dimension === undefined) {
    return { ok: false, state, reason: `unknown condition ${conditionId}` };
  }
  for (const pin of state.pins) {
    if (index.get(pin) === dimension) {
      return {
        ok: false,
        state,
        reason: `dimension ${dimension} already pinned to ${pin}`,
      };
    }
  }
  return { ok: true, state: normalizeView({ ...state, pins: [...state.pins, conditionId] }) };
}
