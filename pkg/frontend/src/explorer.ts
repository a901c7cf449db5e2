/**
 * Pin explorer presenter.
 *
 * Holds the pin set plus the latest explore response and projects them into
 * a render-ready view. The counts on screen are exactly the strings the
 * explore endpoint returned: the presenter never multiplies dimension sizes
 * or subtracts exclusions itself. Conditions whose remaining count is "0"
 * are disabled because pinning them cannot yield any configuration.
 */

import { ApiError, WorkbenchClient } from "./api.js";
import { togglePin, type ViewState } from "./state.js";
import type { ExploreResult, FieldDoc } from "./types.js";

export interface ExplorerCondition {
  id: string;
  name: string;
  /** Count string served for this condition, "" until a response arrives. */
  remaining: string;
  pinned: boolean;
  disabled: boolean;
}

export interface ExplorerDimension {
  id: string;
  name: string;
  conditions: ExplorerCondition[];
}

export interface ExplorerView {
  /** Whole-field configuration total, verbatim from the server. */
  configurations: string;
  /** Count under the current pins and CCA flag, verbatim from the server. */
  consistent: string;
  pairs: number;
  survivingPairs: number;
  cca: boolean;
  pins: string[];
  dimensions: ExplorerDimension[];
  /** Set when the last request failed; shown instead of stale counts. */
  banner: string | null;
}

export function buildExplorerView(
  field: FieldDoc,
  pins: readonly string[],
  result: ExploreResult | null,
  banner: string | null = null,
): ExplorerView {
  const remaining = result?.remaining ?? {};
  const dimensions = field.dimensions.map((dimension) => ({
    id: dimension.id,
    name: dimension.name,
    conditions: dimension.conditions.map((condition) => {
      const count = remaining[condition.id] ?? "";
      const pinned = pins.includes(condition.id);
      return {
        id: condition.id,
        name: condition.name,
        remaining: count,
        pinned,
        disabled: !pinned && count === "0",
      };
    }),
  }));
  return {
    configurations: result?.configurations ?? "",
    consistent: result?.consistent ?? "",
    pairs: result?.pairs ?? 0,
    survivingPairs: result?.surviving_pairs ?? 0,
    cca: result?.cca ?? true,
    pins: [...pins],
    dimensions,
    banner,
  };
}

export class PinExplorer {
  private readonly client: WorkbenchClient;
  private readonly field: FieldDoc;
  private state: ViewState;
  private result: ExploreResult | null = null;
  private banner: string | null = null;
  /** Requests issued, exposed for contract tests. */
  requestCount = 0;

  constructor(client: WorkbenchClient, field: FieldDoc, state: ViewState) {
    this.client = client;
    this.field = field;
    this.state = state;
  }

  get viewState(): ViewState {
    return this.state;
  }

  view(): ExplorerView {
    return buildExplorerView(this.field, this.state.pins, this.result, this.banner);
  }

  async refresh(): Promise<ExplorerView> {
    this.requestCount += 1;
    try {
      this.result = await this.client.explore(this.state.field, this.state.pins, this.state.cca);
      this.banner = null;
    } catch (error) {
      this.result = null;
      if (error instanceof ApiError && error.code === "too-large") {
        // server refused to enumerate; point at the batch tool instead
        this.banner = error.message;
      } else if (error instanceof ApiError) {
        this.banner = `${error.code}: ${error.message}`;
      } else {
        throw error;
      }
    }
    return this.view();
  }

  /**
   * Toggle a pin and refetch counts. A second pin in an already-pinned
   * dimension is rejected locally: the state is unchanged and no request
   * is sent.
   */
  async toggle(conditionId: string): Promise<ExplorerView> {
    const change = togglePin(this.state, conditionId, this.field);
    if (!change.ok) {
      this.banner = change.reason ?? "pin rejected";
      return this.view();
    }
    this.state = change.state;
    return this.refresh();
  }

  async setCca(cca: boolean): Promise<ExplorerView> {
    this.state = { ...this.state, cca };
    return this.refresh();
  }
}
