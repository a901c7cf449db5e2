/**
 * Workbench entry point: wires the view models to the DOM.
 *
 * All domain numbers on screen come from API responses relayed by the view
 * modules; this file only lays out panels, routes events, and keeps the
 * query string in sync with the view state so any screen can be shared by
 * URL. Logic lives in the imported modules, which is where the tests point.
 */

import { WorkbenchClient } from "./api.js";
import {
  AnalysisController,
  buildScenarioTable,
  buildScorecardView,
  scenarioFileName,
  staleBadge,
  type GraphView,
  type ScatterView,
} from "./analysis.js";
import { PinExplorer, type ExplorerView } from "./explorer.js";
import { formatThreshold, groupDigits } from "./format.js";
import { CcaEditor, INCONSISTENT } from "./judgments.js";
import {
  buildMatrixView,
  dimensionPairOptions,
  parsePairsCsv,
  type PairRecord,
} from "./matrix.js";
import { decodeView, defaultView, encodeView, type ViewState } from "./state.js";
import type { ArtifactMeta, FieldDetail } from "./types.js";

type Child = Node | string;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "text") {
      node.textContent = value;
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

class WorkbenchApp {
  private readonly client: WorkbenchClient;
  private readonly root: HTMLElement;
  private state: ViewState;
  private detail: FieldDetail | null = null;
  private explorer: PinExplorer | null = null;
  private editor: CcaEditor | null = null;
  private analysis: AnalysisController | null = null;
  private pairRecords: PairRecord[] = [];
  private pairsMeta: ArtifactMeta | null = null;
  private graph: GraphView | null = null;
  private graphMeta: ArtifactMeta | null = null;
  private scatter: ScatterView | null = null;
  private scatterMeta: ArtifactMeta | null = null;
  private scorecardFiles: Record<string, string> | null = null;
  private scorecardMeta: ArtifactMeta | null = null;
  private notice = "";

  constructor(root: HTMLElement) {
    this.client = new WorkbenchClient("");
    this.root = root;
    this.state = decodeView(window.location.search.replace(/^\?/, ""));
    window.addEventListener("popstate", () => {
      this.state = decodeView(window.location.search.replace(/^\?/, ""));
      void this.openField(this.state.field);
    });
  }

  async start(): Promise<void> {
    if (this.state.field) {
      await this.openField(this.state.field);
    } else {
      const fields = await this.client.listFields();
      if (fields.length > 0 && fields[0]) {
        this.state.field = fields[0].id;
        await this.openField(this.state.field);
      } else {
        this.render();
      }
    }
  }

  private syncUrl(): void {
    const encoded = encodeView(this.state);
    const target = encoded ? `?${encoded}` : window.location.pathname;
    window.history.replaceState(null, "", target);
  }

  private async openField(fieldId: string): Promise<void> {
    if (!fieldId) {
      this.render();
      return;
    }
    try {
      this.detail = await this.client.getField(fieldId);
    } catch (error) {
      this.notice = error instanceof Error ? error.message : String(error);
      this.render();
      return;
    }
    this.state.field = fieldId;
    this.explorer = new PinExplorer(this.client, this.detail.field, this.state);
    this.editor = new CcaEditor(this.client, fieldId);
    this.analysis = new AnalysisController(this.client, fieldId);
    await this.editor.load();
    const explorerView = await this.explorer.refresh();
    this.editor.seedCounts(explorerView.pairs, explorerView.survivingPairs);
    await this.restoreArtifacts();
    this.syncUrl();
    this.render();
  }

  private async restoreArtifacts(): Promise<void> {
    if (!this.analysis) return;
    const wanted = this.state.artifacts;
    if (wanted.pairs) await this.loadPairs(wanted.pairs).catch(() => undefined);
    if (wanted.correlation) {
      await this.loadGraph(wanted.correlation).catch(() => undefined);
    }
    if (wanted.clusters) await this.loadScatter(wanted.clusters).catch(() => undefined);
    if (wanted.scenarios) {
      await this.loadScorecard(wanted.scenarios).catch(() => undefined);
    }
  }

  private async loadPairs(artifactId: string): Promise<void> {
    if (!this.analysis) return;
    const detail = await this.analysis.fetchArtifact(artifactId);
    const text = detail.files["pairs.csv"];
    if (text === undefined) throw new Error("not a pairs artifact");
    this.pairRecords = parsePairsCsv(text);
    this.pairsMeta = detail.artifact;
    this.state.artifacts = { ...this.state.artifacts, pairs: artifactId };
  }

  private async loadGraph(artifactId: string): Promise<void> {
    if (!this.analysis) return;
    const detail = await this.analysis.fetchArtifact(artifactId);
    const text = detail.files["graph.json"];
    if (text === undefined) throw new Error("not a correlation artifact");
    this.graph = {
      ...JSON.parse(text),
      empty: (JSON.parse(text) as { edges: unknown[] }).edges.length === 0,
    } as GraphView;
    this.graphMeta = detail.artifact;
    this.state.artifacts = { ...this.state.artifacts, correlation: artifactId };
  }

  private async loadScatter(artifactId: string): Promise<void> {
    if (!this.analysis) return;
    const result = await this.analysis.scatterFor(artifactId);
    this.scatter = result.scatter;
    this.scatterMeta = result.artifact;
    this.state.artifacts = { ...this.state.artifacts, clusters: artifactId };
  }

  private async loadScorecard(artifactId: string): Promise<void> {
    if (!this.analysis) return;
    const detail = await this.analysis.fetchArtifact(artifactId);
    if (detail.files["scorecard.csv"] === undefined) {
      throw new Error("not a scenarios artifact");
    }
    this.scorecardFiles = detail.files;
    this.scorecardMeta = detail.artifact;
    this.state.artifacts = { ...this.state.artifacts, scenarios: artifactId };
  }

  private async runStage(stage: string, params: Record<string, unknown>): Promise<void> {
    if (!this.analysis) return;
    try {
      const run = await this.analysis.rerun(stage, params);
      const artifactId = run.artifact.id;
      if (stage === "pairs") await this.loadPairs(artifactId);
      if (stage === "correlation") await this.loadGraph(artifactId);
      if (stage === "clusters") await this.loadScatter(artifactId);
      if (stage === "scenarios") await this.loadScorecard(artifactId);
      this.notice = "";
    } catch (error) {
      this.notice = error instanceof Error ? error.message : String(error);
    }
    this.syncUrl();
    this.render();
  }

  private render(): void {
    this.root.replaceChildren();
    this.root.append(this.renderHeader());
    if (this.notice) {
      this.root.append(el("p", { class: "notice", text: this.notice }));
    }
    if (!this.detail || !this.explorer || !this.editor) return;
    this.root.append(this.renderExplorer(this.explorer.view()));
    this.root.append(this.renderMatrix());
    this.root.append(this.renderAnalysis());
  }

  private renderHeader(): HTMLElement {
    const title = this.detail ? `${this.detail.field.title} (rev ${this.detail.revision})` : "no field open";
    return el("header", {}, [
      el("h1", { text: "Morphospace workbench" }),
      el("p", { text: title }),
    ]);
  }

  private renderExplorer(view: ExplorerView): HTMLElement {
    const panel = el("section", { class: "explorer" }, [
      el("h2", { text: "Pin explorer" }),
    ]);
    if (view.banner) {
      panel.append(el("p", { class: "banner", text: view.banner }));
    } else {
      panel.append(
        el("p", {
          text:
            `${groupDigits(view.consistent)} of ${groupDigits(view.configurations)}` +
            ` configurations / surviving pairs ${view.survivingPairs} of ${view.pairs}`,
        }),
      );
    }
    const ccaToggle = el("input", { type: "checkbox" }) as HTMLInputElement;
    ccaToggle.checked = view.cca;
    ccaToggle.addEventListener("change", () => {
      void this.explorer?.setCca(ccaToggle.checked).then(() => {
        this.state = this.explorer ? this.explorer.viewState : this.state;
        this.syncUrl();
        this.render();
      });
    });
    panel.append(el("label", {}, [ccaToggle, " exclude judged-inconsistent pairs"]));
    for (const dimension of view.dimensions) {
      const group = el("div", { class: "dimension" }, [
        el("h3", { text: dimension.name }),
      ]);
      for (const condition of dimension.conditions) {
        const label = condition.remaining
          ? `${condition.name} (${groupDigits(condition.remaining)})`
          : condition.name;
        const button = el("button", { text: label });
        if (condition.pinned) button.classList.add("pinned");
        button.disabled = condition.disabled;
        button.addEventListener("click", () => {
          void this.explorer?.toggle(condition.id).then(() => {
            this.state = this.explorer ? this.explorer.viewState : this.state;
            this.syncUrl();
            this.render();
          });
        });
        group.append(button);
      }
      panel.append(group);
    }
    return panel;
  }

  private renderMatrix(): HTMLElement {
    const panel = el("section", { class: "matrix" }, [
      el("h2", { text: "Cross-consistency matrix" }),
    ]);
    if (!this.detail || !this.editor) return panel;
    const survivors = this.editor.survivingPairs;
    if (survivors !== null && this.editor.totalPairs !== null) {
      panel.append(
        el("p", { text: `surviving pairs ${survivors} of ${this.editor.totalPairs}` }),
      );
    }
    const runPairs = el("button", { text: "compute pairs" });
    runPairs.addEventListener("click", () => void this.runStage("pairs", {}));
    panel.append(runPairs);
    if (this.pairRecords.length === 0 || !this.pairsMeta) {
      panel.append(el("p", { text: "no pairs artifact loaded" }));
      return panel;
    }
    const badge = staleBadge(this.pairsMeta, this.detail.revision);
    if (badge) panel.append(el("p", { class: "stale", text: badge }));
    const options = dimensionPairOptions(this.detail.field);
    const selector = el("select") as HTMLSelectElement;
    for (const option of options) {
      const item = el("option", {
        value: `${option.row}~${option.col}`,
        text: option.label,
      });
      selector.append(item);
    }
    const first = options[0];
    const current: [string, string] | null =
      this.state.cell && this.state.cell[0] && this.state.cell[1]
        ? this.state.cell
        : first
          ? [first.row, first.col]
          : null;
    if (!current) return panel;
    const asDimensionPair = this.resolveDimensionPair(current);
    selector.value = `${asDimensionPair[0]}~${asDimensionPair[1]}`;
    selector.addEventListener("change", () => {
      const [row, col] = selector.value.split("~");
      if (row && col) {
        this.state.cell = [row, col];
        this.syncUrl();
        this.render();
      }
    });
    panel.append(selector);
    const view = buildMatrixView(
      this.detail.field,
      asDimensionPair[0],
      asDimensionPair[1],
      this.pairRecords,
      [...this.editor.judgments],
      this.pairsMeta.revision,
      this.detail.revision,
      (a, b) => this.editor?.isFlagged(a, b) ?? false,
    );
    const table = el("table");
    const head = el("tr", {}, [el("th")]);
    for (const col of view.cols) head.append(el("th", { text: col.name }));
    table.append(head);
    view.cells.forEach((rowCells, rowIndex) => {
      const row = el("tr", {}, [el("th", { text: view.rows[rowIndex]?.name ?? "" })]);
      for (const cell of rowCells) {
        const text = cell.impact ? `${cell.impact} / ${cell.likelihood}` : "-";
        const cellNode = el("td", { text });
        if (cell.verdict === INCONSISTENT) cellNode.classList.add("inconsistent");
        if (cell.flagged) {
          cellNode.classList.add("conflict");
          cellNode.title = "edited elsewhere; refresh to continue";
        }
        cellNode.addEventListener("click", () => {
          void this.editor?.toggle(cell.row, cell.col).then((result) => {
            if (!result.ok && result.conflict) this.notice = result.conflict.message;
            this.render();
          });
        });
        row.append(cellNode);
      }
      table.append(row);
    });
    panel.append(table);
    return panel;
  }

  /** Map a stored cell (condition or dimension ids) onto a dimension pair. */
  private resolveDimensionPair(cell: [string, string]): [string, string] {
    if (!this.detail) return cell;
    const byDimension = new Set(this.detail.field.dimensions.map((d) => d.id));
    if (byDimension.has(cell[0]) && byDimension.has(cell[1])) return cell;
    const index = new Map<string, string>();
    for (const dimension of this.detail.field.dimensions) {
      for (const condition of dimension.conditions) index.set(condition.id, dimension.id);
    }
    const row = index.get(cell[0]);
    const col = index.get(cell[1]);
    if (row && col && row !== col) return [row, col];
    const fallback = dimensionPairOptions(this.detail.field)[0];
    return fallback ? [fallback.row, fallback.col] : cell;
  }

  private renderAnalysis(): HTMLElement {
    const panel = el("section", { class: "analysis" }, [
      el("h2", { text: "Analysis" }),
    ]);
    if (!this.detail) return panel;
    const slider = el("input", {
      type: "range",
      min: "0",
      max: "1",
      step: "0.05",
      value: String(this.state.threshold),
    }) as HTMLInputElement;
    const sliderLabel = el("span", { text: formatThreshold(this.state.threshold) });
    slider.addEventListener("change", () => {
      this.state.threshold = Number(slider.value);
      sliderLabel.textContent = formatThreshold(this.state.threshold);
      void this.runStage("correlation", { threshold: this.state.threshold });
    });
    panel.append(el("div", {}, ["threshold ", slider, sliderLabel]));
    if (this.graph && this.graphMeta) {
      const badge = staleBadge(this.graphMeta, this.detail.revision);
      if (badge) panel.append(el("p", { class: "stale", text: badge }));
      panel.append(
        el("p", {
          text: this.graph.empty
            ? `no correlations above ${this.graph.threshold}`
            : `${this.graph.nodes.length} nodes, ${this.graph.edges.length} edges at threshold ${this.graph.threshold}`,
        }),
      );
      const list = el("ul");
      for (const edge of this.graph.edges.slice(0, 50)) {
        list.append(el("li", { text: `${edge.a} - ${edge.b}: ${edge.weight}` }));
      }
      panel.append(list);
    }
    const runClusters = el("button", { text: "cluster pairs" });
    runClusters.addEventListener("click", () => void this.runStage("clusters", {}));
    panel.append(runClusters);
    if (this.scatter && this.scatterMeta) {
      const badge = staleBadge(this.scatterMeta, this.detail.revision);
      if (badge) panel.append(el("p", { class: "stale", text: badge }));
      const legend = el("ul", { class: "legend" });
      for (const entry of this.scatter.legend) {
        legend.append(
          el("li", {
            class: `cluster-${entry.cluster}`,
            text: `cluster ${entry.cluster}: ${entry.size} pairs`,
          }),
        );
      }
      panel.append(legend);
      panel.append(
        el("p", {
          text: `k=${this.scatter.k} seed=${this.scatter.seed} iterations=${this.scatter.iterations} inertia=${this.scatter.inertia}`,
        }),
      );
    }
    const runScenarios = el("button", { text: "derive scenarios" });
    runScenarios.addEventListener("click", () => void this.runStage("scenarios", {}));
    panel.append(runScenarios);
    if (this.scorecardFiles && this.scorecardMeta) {
      const badge = staleBadge(this.scorecardMeta, this.detail.revision);
      if (badge) panel.append(el("p", { class: "stale", text: badge }));
      const scorecardText = this.scorecardFiles["scorecard.csv"] ?? "";
      const rows = buildScorecardView(scorecardText);
      const table = el("table", { class: "scorecard" });
      table.append(
        el("tr", {}, [el("th", { text: "scenario" }), el("th", { text: "dimension" }), el("th", { text: "condition" })]),
      );
      for (const row of rows) {
        table.append(
          el("tr", {}, [
            el("td", { text: row.scenario }),
            el("td", { text: row.dimension }),
            el("td", { text: row.condition }),
          ]),
        );
      }
      panel.append(table);
      const scenarios = [...new Set(rows.map((row) => row.scenario))];
      scenarios.forEach((name, index) => {
        const text = this.scorecardFiles?.[scenarioFileName(index)];
        if (text === undefined) return;
        const scenarioTable = buildScenarioTable(text);
        panel.append(
          el("p", {
            text: `${name}: impact ${scenarioTable.averageImpact}, likelihood ${scenarioTable.averageLikelihood}`,
          }),
        );
      });
    }
    return panel;
  }
}

const root = document.getElementById("app");
if (root) {
  const app = new WorkbenchApp(root);
  void app.start();
}
