/**
 * Analysis panel view builders.
 *
 * Each builder turns artifact files fetched from the API into a
 * render-ready structure. Correlations, cluster assignments, centroids,
 * and scenario values are read from the artifact exactly as served; the
 * threshold slider does not filter edges locally but requests a fresh
 * correlation artifact, so the graph on screen is always one the server
 * computed. Artifacts carry a stale flag when the field has changed since
 * they were computed; views surface it as a badge with a rerun affordance.
 */

import { WorkbenchClient } from "./api.js";
import { parseCsvRecords } from "./csv.js";
import type { AnalysisResult, ArtifactDetail, ArtifactMeta } from "./types.js";

export interface GraphView {
  axis: string;
  mode: string;
  threshold: number;
  nodes: string[];
  edges: Array<{ a: string; b: string; weight: number }>;
  empty: boolean;
}

export function buildGraphView(graphJsonText: string): GraphView {
  const data = JSON.parse(graphJsonText) as {
    axis: string;
    mode: string;
    threshold: number;
    nodes: string[];
    edges: Array<{ a: string; b: string; weight: number }>;
  };
  return {
    axis: data.axis,
    mode: data.mode,
    threshold: data.threshold,
    nodes: data.nodes,
    edges: data.edges,
    empty: data.edges.length === 0,
  };
}

export interface ScatterPoint {
  a: string;
  b: string;
  /** Coordinates verbatim from clusters.csv. */
  impact: string;
  likelihood: string;
  cluster: number;
}

export interface LegendEntry {
  cluster: number;
  size: number;
  meanImpact: number;
  meanLikelihood: number;
}

export interface ScatterView {
  k: number;
  seed: number;
  iterations: number;
  inertia: number;
  points: ScatterPoint[];
  /** One entry per cluster in the model, colors keyed by cluster id. */
  legend: LegendEntry[];
}

export function buildScatterView(clustersCsvText: string, modelJsonText: string): ScatterView {
  const model = JSON.parse(modelJsonText) as {
    k: number;
    seed: number;
    iterations: number;
    inertia: number;
    clusters: Array<{
      cluster: number;
      size: number;
      mean_impact: number;
      mean_likelihood: number;
    }>;
  };
  const points = parseCsvRecords(clustersCsvText).map((record) => ({
    a: record.condition_a ?? "",
    b: record.condition_b ?? "",
    impact: record.impact ?? "",
    likelihood: record.likelihood ?? "",
    cluster: Number(record.cluster ?? "0"),
  }));
  return {
    k: model.k,
    seed: model.seed,
    iterations: model.iterations,
    inertia: model.inertia,
    points,
    legend: model.clusters.map((c) => ({
      cluster: c.cluster,
      size: c.size,
      meanImpact: c.mean_impact,
      meanLikelihood: c.mean_likelihood,
    })),
  };
}

export interface ScorecardRow {
  scenario: string;
  dimension: string;
  condition: string;
}

export function buildScorecardView(scorecardCsvText: string): ScorecardRow[] {
  return parseCsvRecords(scorecardCsvText).map((record) => ({
    scenario: record.scenario ?? "",
    dimension: record.dimension ?? "",
    condition: record.condition ?? "",
  }));
}

export interface ScenarioTableRow {
  dimension: string;
  condition: string;
  impact: string;
  likelihood: string;
}

export interface ScenarioTable {
  rows: ScenarioTableRow[];
  /** Trailing average row, values verbatim. */
  averageImpact: string;
  averageLikelihood: string;
}

export function scenarioFileName(index: number): string {
  return `scenario-${index + 1}.csv`;
}

export function buildScenarioTable(scenarioCsvText: string): ScenarioTable {
  const records = parseCsvRecords(scenarioCsvText);
  const rows: ScenarioTableRow[] = [];
  let averageImpact = "";
  let averageLikelihood = "";
  for (const record of records) {
    if (record.dimension === "average") {
      averageImpact = record.impact ?? "";
      averageLikelihood = record.likelihood ?? "";
      continue;
    }
    rows.push({
      dimension: record.dimension ?? "",
      condition: record.condition ?? "",
      impact: record.impact ?? "",
      likelihood: record.likelihood ?? "",
    });
  }
  return { rows, averageImpact, averageLikelihood };
}

/** Badge text for a stale artifact, or null when it is current. */
export function staleBadge(meta: ArtifactMeta, fieldRevision?: number): string | null {
  const stale = fieldRevision === undefined ? meta.stale : meta.revision < fieldRevision;
  if (!stale) return null;
  return `computed at revision ${meta.revision}; field has changed, rerun ${meta.stage}`;
}

/**
 * Drives the analysis panels. Changing the threshold slider never filters
 * the displayed graph in place: it requests a new correlation artifact and
 * hands back the graph the server stored in it.
 */
export class AnalysisController {
  private readonly client: WorkbenchClient;
  private readonly fieldId: string;
  /** Stage runs issued, exposed for contract tests. */
  runCount = 0;

  constructor(client: WorkbenchClient, fieldId: string) {
    this.client = client;
    this.fieldId = fieldId;
  }

  async rerun(stage: string, params: Record<string, unknown> = {}): Promise<AnalysisResult> {
    this.runCount += 1;
    return this.client.runStage(this.fieldId, stage, params);
  }

  async fetchArtifact(artifactId: string): Promise<ArtifactDetail> {
    return this.client.getArtifact(this.fieldId, artifactId);
  }

  async correlationAtThreshold(
    threshold: number,
    params: Record<string, unknown> = {},
  ): Promise<{ artifact: ArtifactMeta; graph: GraphView }> {
    const run = await this.rerun("correlation", { ...params, threshold });
    const detail = await this.fetchArtifact(run.artifact.id);
    const graphText = detail.files["graph.json"];
    if (graphText === undefined) {
      throw new Error(`correlation artifact ${run.artifact.id} has no graph.json`);
    }
    return { artifact: detail.artifact, graph: buildGraphView(graphText) };
  }

  async scatterFor(artifactId: string): Promise<{ artifact: ArtifactMeta; scatter: ScatterView }> {
    const detail = await this.fetchArtifact(artifactId);
    const clusters = detail.files["clusters.csv"];
    const model = detail.files["cluster_model.json"];
    if (clusters === undefined || model === undefined) {
      throw new Error(`artifact ${artifactId} is not a clusters artifact`);
    }
    return { artifact: detail.artifact, scatter: buildScatterView(clusters, model) };
  }
}
