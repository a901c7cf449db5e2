import { describe, expect, it } from "vitest";

import {
  AnalysisController,
  buildGraphView,
  buildScatterView,
  buildScenarioTable,
  buildScorecardView,
  scenarioFileName,
  staleBadge,
} from "../src/analysis.js";
import { WorkbenchClient } from "../src/api.js";
import type { ArtifactMeta } from "../src/types.js";
import { stubFetch } from "./helpers.js";

function meta(overrides: Partial<ArtifactMeta> = {}): ArtifactMeta {
  return {
    id: "correlation-r2-00112233",
    stage: "correlation",
    revision: 2,
    seq: 1,
    created: "2026-08-14T00:00:00Z",
    params: {},
    summary: {},
    stale: false,
    ...overrides,
  };
}

const GRAPH_JSON = JSON.stringify({
  axis: "combined",
  mode: "signed-abs",
  threshold: 0.7,
  nodes: ["a", "b", "c"],
  edges: [
    { a: "a", b: "b", weight: 0.82 },
    { a: "b", b: "c", weight: -0.75 },
  ],
});

const EMPTY_GRAPH_JSON = JSON.stringify({
  axis: "combined",
  mode: "signed-abs",
  threshold: 1.0,
  nodes: ["a", "b", "c"],
  edges: [],
});

const MODEL_JSON = JSON.stringify({
  k: 4,
  seed: 42,
  iterations: 32,
  inertia: 8.522173642,
  centroids: [
    [0.3, 0.49],
    [0.47, 0.66],
    [0.57, 0.43],
    [0.77, 0.53],
  ],
  clusters: [
    { cluster: 0, size: 197, mean_impact: 0.301, mean_likelihood: 0.491 },
    { cluster: 1, size: 269, mean_impact: 0.468, mean_likelihood: 0.655 },
    { cluster: 2, size: 222, mean_impact: 0.571, mean_likelihood: 0.427 },
    { cluster: 3, size: 293, mean_impact: 0.767, mean_likelihood: 0.526 },
  ],
});

const CLUSTERS_CSV = [
  "condition_a,condition_b,impact,likelihood,cluster",
  "agi,misuse,0.6200,0.5300,3",
  "agi,arms-race,0.8100,0.4900,2",
  "slow-takeoff,cooperation,0.3000,0.7000,1",
].join("\n");

const SCORECARD_CSV = [
  "scenario,dimension,condition",
  "Scenario 1,alpha,a1",
  "Scenario 1,beta,b2",
  "Scenario 2,alpha,a2",
  "Scenario 2,beta,b1",
].join("\n");

const SCENARIO_1_CSV = [
  "dimension,condition,impact,likelihood",
  "alpha,a1,0.5000,0.6000",
  "beta,b2,0.7000,0.4000",
  "average,,0.6000,0.5000",
].join("\n");

const SCENARIO_2_CSV = [
  "dimension,condition,impact,likelihood",
  "alpha,a2,0.1000,0.9000",
  "beta,b1,0.3000,0.7000",
  "average,,0.2000,0.8000",
].join("\n");

describe("graph view", () => {
  it("exposes the served nodes and edges", () => {
    const view = buildGraphView(GRAPH_JSON);
    expect(view.nodes).toEqual(["a", "b", "c"]);
    expect(view.edges).toEqual([
      { a: "a", b: "b", weight: 0.82 },
      { a: "b", b: "c", weight: -0.75 },
    ]);
    expect(view.threshold).toBe(0.7);
    expect(view.empty).toBe(false);
  });

  it("renders an empty graph at threshold 1.0", () => {
    const view = buildGraphView(EMPTY_GRAPH_JSON);
    expect(view.empty).toBe(true);
    expect(view.edges).toEqual([]);
    expect(view.nodes).toHaveLength(3);
  });
});

describe("scatter view", () => {
  it("has one legend entry per cluster in the model: k=4 gives 4", () => {
    const view = buildScatterView(CLUSTERS_CSV, MODEL_JSON);
    expect(view.k).toBe(4);
    expect(view.legend).toHaveLength(4);
    expect(view.legend.map((entry) => entry.cluster)).toEqual([0, 1, 2, 3]);
    expect(view.legend[3]?.size).toBe(293);
  });

  it("keeps point coordinates as the served strings", () => {
    const view = buildScatterView(CLUSTERS_CSV, MODEL_JSON);
    expect(view.points).toHaveLength(3);
    expect(view.points[0]).toEqual({
      a: "agi",
      b: "misuse",
      impact: "0.6200",
      likelihood: "0.5300",
      cluster: 3,
    });
  });
});

describe("scorecard and scenario tables", () => {
  it("lists scorecard rows verbatim", () => {
    const rows = buildScorecardView(SCORECARD_CSV);
    expect(rows).toHaveLength(4);
    expect(rows[0]).toEqual({ scenario: "Scenario 1", dimension: "alpha", condition: "a1" });
  });

  it("splits the scenario table from its trailing average row", () => {
    const table = buildScenarioTable(SCENARIO_1_CSV);
    expect(table.rows).toEqual([
      { dimension: "alpha", condition: "a1", impact: "0.5000", likelihood: "0.6000" },
      { dimension: "beta", condition: "b2", impact: "0.7000", likelihood: "0.4000" },
    ]);
    expect(table.averageImpact).toBe("0.6000");
    expect(table.averageLikelihood).toBe("0.5000");
  });

  it("agrees with the scenario tables of the same artifact", () => {
    const scorecard = buildScorecardView(SCORECARD_CSV);
    const scenarioTexts = [SCENARIO_1_CSV, SCENARIO_2_CSV];
    const names = [...new Set(scorecard.map((row) => row.scenario))];
    expect(names).toHaveLength(scenarioTexts.length);
    names.forEach((name, index) => {
      const fromScorecard = scorecard
        .filter((row) => row.scenario === name)
        .map((row) => `${row.dimension}~${row.condition}`);
      const fromTable = buildScenarioTable(scenarioTexts[index]!).rows.map(
        (row) => `${row.dimension}~${row.condition}`,
      );
      expect(fromScorecard).toEqual(fromTable);
    });
  });

  it("names scenario files by one-based index", () => {
    expect(scenarioFileName(0)).toBe("scenario-1.csv");
    expect(scenarioFileName(3)).toBe("scenario-4.csv");
  });
});

describe("stale badges", () => {
  it("is silent for a current artifact", () => {
    expect(staleBadge(meta({ stale: false }))).toBeNull();
    expect(staleBadge(meta({ revision: 3 }), 3)).toBeNull();
  });

  it("names the stage to rerun when stale", () => {
    const badge = staleBadge(meta({ stale: true, stage: "clusters" }));
    expect(badge).toContain("rerun clusters");
    expect(badge).toContain("revision 2");
  });

  it("prefers a live field revision over the stored flag", () => {
    const badge = staleBadge(meta({ stale: false, revision: 2 }), 5);
    expect(badge).not.toBeNull();
    expect(staleBadge(meta({ stale: true, revision: 5 }), 5)).toBeNull();
  });
});

describe("threshold slider drives the api", () => {
  it("requests a fresh correlation artifact and renders its stored graph", async () => {
    const stub = stubFetch({
      // the run response carries the field id at top level; the artifact id
      // is inside artifact.id, which is what the follow-up fetch must use
      "POST /api/v1/fields/ai-risk/analysis/correlation": (request) => {
        expect(request.body).toEqual({ threshold: 1.0 });
        return {
          status: 201,
          body: { id: "ai-risk", artifact: meta({ id: "correlation-r2-ffffffff" }) },
        };
      },
      "GET /api/v1/fields/ai-risk/artifacts/correlation-r2-ffffffff": () => ({
        status: 200,
        body: {
          id: "ai-risk",
          artifact: meta({ id: "correlation-r2-ffffffff" }),
          files: { "graph.json": EMPTY_GRAPH_JSON, "matrix.csv": "entity\n" },
        },
      }),
    });
    const controller = new AnalysisController(new WorkbenchClient("", stub.fetch), "ai-risk");
    const { graph } = await controller.correlationAtThreshold(1.0);
    expect(stub.ofMethod("POST")).toHaveLength(1);
    expect(graph.empty).toBe(true);
    expect(graph.threshold).toBe(1.0);
  });

  it("fails loudly when the artifact lacks a graph file", async () => {
    const stub = stubFetch({
      POST: () => ({ status: 201, body: { id: "ai-risk", artifact: meta() } }),
      GET: () => ({ status: 200, body: { id: "ai-risk", artifact: meta(), files: {} } }),
    });
    const controller = new AnalysisController(new WorkbenchClient("", stub.fetch), "ai-risk");
    await expect(controller.correlationAtThreshold(0.7)).rejects.toThrow("graph.json");
  });

  it("loads cluster artifacts for the scatter view", async () => {
    const stub = stubFetch({
      GET: () => ({
        status: 200,
        body: {
          id: "ai-risk",
          artifact: meta({ stage: "clusters", id: "clusters-r2-aa" }),
          files: { "clusters.csv": CLUSTERS_CSV, "cluster_model.json": MODEL_JSON },
        },
      }),
    });
    const controller = new AnalysisController(new WorkbenchClient("", stub.fetch), "ai-risk");
    const { scatter } = await controller.scatterFor("clusters-r2-aa");
    expect(scatter.legend).toHaveLength(4);
    expect(scatter.points[1]?.cluster).toBe(2);
  });
});
