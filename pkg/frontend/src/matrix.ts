/**
 * Cross-consistency matrix view model.
 *
 * The full matrix over 14 dimensions would be unreadable in one screen, so
 * the view shows a single dimension pair at a time behind a selector. Every
 * cell is one condition pair exactly as served in the pairs artifact at the
 * current revision: the impact and likelihood strings come straight from
 * pairs.csv, and the verdict overlay comes from the judgment log.
 */

import { parseCsvRecords } from "./csv.js";
import { verdictFor } from "./judgments.js";
import type { FieldDoc, JudgmentRow } from "./types.js";

export interface PairRecord {
  a: string;
  b: string;
  impact: string;
  likelihood: string;
  consistent: boolean;
}

export interface MatrixCell {
  row: string;
  col: string;
  /** Pair values verbatim from the artifact, "" when the pair was skipped. */
  impact: string;
  likelihood: string;
  verdict: string;
  flagged: boolean;
}

export interface MatrixViewModel {
  /** Dimension pair on display. */
  rowDimension: string;
  colDimension: string;
  rows: Array<{ id: string; name: string }>;
  cols: Array<{ id: string; name: string }>;
  cells: MatrixCell[][];
  /** Revision the pairs artifact was computed at. */
  artifactRevision: number;
  /** True when the field has moved past the artifact revision. */
  stale: boolean;
}

export interface DimensionPairOption {
  row: string;
  col: string;
  label: string;
}

/** Selector options: every unordered dimension pair, field order. */
export function dimensionPairOptions(field: FieldDoc): DimensionPairOption[] {
  const options: DimensionPairOption[] = [];
  for (let i = 0; i < field.dimensions.length; i += 1) {
    for (let j = i + 1; j < field.dimensions.length; j += 1) {
      const a = field.dimensions[i]!;
      const b = field.dimensions[j]!;
      options.push({ row: a.id, col: b.id, label: `${a.name} x ${b.name}` });
    }
  }
  return options;
}

export function parsePairsCsv(text: string): PairRecord[] {
  return parseCsvRecords(text).map((record) => ({
    a: record.condition_a ?? "",
    b: record.condition_b ?? "",
    impact: record.impact ?? "",
    likelihood: record.likelihood ?? "",
    consistent: (record.consistent ?? "true") !== "false",
  }));
}

function pairLookup(pairs: readonly PairRecord[]): Map<string, PairRecord> {
  const lookup = new Map<string, PairRecord>();
  for (const pair of pairs) {
    lookup.set(`${pair.a}~${pair.b}`, pair);
    lookup.set(`${pair.b}~${pair.a}`, pair);
  }
  return lookup;
}

export function buildMatrixView(
  field: FieldDoc,
  rowDimension: string,
  colDimension: string,
  pairs: readonly PairRecord[],
  judgments: readonly JudgmentRow[],
  artifactRevision: number,
  fieldRevision: number,
  flagged: (a: string, b: string) => boolean = () => false,
): MatrixViewModel {
  const rowDim = field.dimensions.find((d) => d.id === rowDimension);
  const colDim = field.dimensions.find((d) => d.id === colDimension);
  if (!rowDim || !colDim) {
    throw new Error(`unknown dimension pair ${rowDimension} x ${colDimension}`);
  }
  const lookup = pairLookup(pairs);
  const cells = rowDim.conditions.map((rowCondition) =>
    colDim.conditions.map((colCondition): MatrixCell => {
      const pair = lookup.get(`${rowCondition.id}~${colCondition.id}`);
      return {
        row: rowCondition.id,
        col: colCondition.id,
        impact: pair?.impact ?? "",
        likelihood: pair?.likelihood ?? "",
        verdict: verdictFor(judgments, rowCondition.id, colCondition.id),
        flagged: flagged(rowCondition.id, colCondition.id),
      };
    }),
  );
  return {
    rowDimension,
    colDimension,
    rows: rowDim.conditions.map((c) => ({ id: c.id, name: c.name })),
    cols: colDim.conditions.map((c) => ({ id: c.id, name: c.name })),
    cells,
    artifactRevision,
    stale: artifactRevision < fieldRevision,
  };
}
