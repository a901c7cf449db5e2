/**
 * Shared types for the workbench.
 *
 * These mirror the JSON shapes served by the morphspace HTTP API under
 * /api/v1. The workbench never derives domain numbers itself: every count,
 * correlation, coordinate, and average shown in the UI arrives through one
 * of these shapes and is displayed verbatim. Counts that may exceed the
 * safe-integer range are therefore kept as strings end to end.
 */

export interface ConditionDoc {
  id: string;
  name: string;
}

export interface DimensionDoc {
  id: string;
  name: string;
  conditions: ConditionDoc[];
}

export interface FieldDoc {
  id: string;
  title: string;
  dimensions: DimensionDoc[];
}

export interface FieldSummary {
  id: string;
  title: string;
  revision: number;
  dimensions: number;
}

export interface JudgmentRow {
  condition_a: string;
  condition_b: string;
  verdict: string;
  note?: string;
}

export interface FieldDetail {
  id: string;
  revision: number;
  field: FieldDoc;
  responses: number;
  judgments: JudgmentRow[];
}

export interface JudgmentsPayload {
  revision?: number;
  judgments: JudgmentRow[];
}

export interface JudgmentsResult {
  id: string;
  revision: number;
  judgments: number;
  pairs: number;
  surviving_pairs: number;
}

/** Configuration counts; values are decimal strings, never parsed. */
export interface ExploreResult {
  id: string;
  revision: number;
  pins: string[];
  cca: boolean;
  configurations: string;
  consistent: string;
  pairs: number;
  surviving_pairs: number;
  remaining: Record<string, string>;
}

export interface ArtifactMeta {
  id: string;
  stage: string;
  revision: number;
  seq: number;
  created: string;
  params: Record<string, unknown>;
  summary: Record<string, unknown>;
  stale: boolean;
}

export interface AnalysisResult {
  /** Field id the stage ran on; the artifact id is artifact.id. */
  id: string;
  artifact: ArtifactMeta;
}

export interface ArtifactDetail {
  /** Field id owning the artifact; the artifact id is artifact.id. */
  id: string;
  artifact: ArtifactMeta;
  files: Record<string, string>;
}

export interface ErrorBody {
  code: string;
  message: string;
  path: string;
}
