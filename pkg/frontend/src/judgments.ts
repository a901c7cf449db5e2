/**
 * Cross-consistency judgment editor.
 *
 * Wraps the judgment log for one field. A cell toggle flips the verdict of
 * that condition pair, updates the local log optimistically, and issues
 * exactly one write; the surviving-pair count shown afterwards is the one
 * the server reported, never a locally decremented copy. A revision
 * conflict flags the cell and asks for a refresh instead of overwriting
 * someone else's log.
 */

import { ApiError, WorkbenchClient } from "./api.js";
import type { JudgmentRow } from "./types.js";

export const CONSISTENT = "consistent";
export const INCONSISTENT = "inconsistent";

export interface ToggleResult {
  ok: boolean;
  verdict: string;
  /** Survivor count reported by the server after the write, if it succeeded. */
  survivingPairs: number | null;
  /** How many fewer pairs survive than before, per server numbers. */
  survivorDelta: number | null;
  /** Set on a revision conflict: the cell to flag plus a refresh prompt. */
  conflict: { pair: [string, string]; message: string } | null;
}

export function pairKey(a: string, b: string): string {
  return [a, b].sort().join("~");
}

/** Last verdict wins; pairs without a row count as consistent. */
export function verdictFor(log: readonly JudgmentRow[], a: string, b: string): string {
  const key = pairKey(a, b);
  let verdict = CONSISTENT;
  for (const row of log) {
    if (pairKey(row.condition_a, row.condition_b) === key) {
      verdict = row.verdict.toLowerCase();
    }
  }
  return verdict;
}

/** Replace the pair's rows with a single row carrying the given verdict. */
export function withVerdict(
  log: readonly JudgmentRow[],
  a: string,
  b: string,
  verdict: string,
  note?: string,
): JudgmentRow[] {
  const key = pairKey(a, b);
  const kept = log.filter((row) => pairKey(row.condition_a, row.condition_b) !== key);
  const row: JudgmentRow = { condition_a: a, condition_b: b, verdict };
  if (note !== undefined) row.note = note;
  kept.push(row);
  return kept;
}

export class CcaEditor {
  private readonly client: WorkbenchClient;
  private readonly fieldId: string;
  private log: JudgmentRow[] = [];
  private revision = 0;
  private survivors: number | null = null;
  private pairs: number | null = null;
  private readonly flaggedCells = new Set<string>();
  /** Writes issued, exposed for contract tests. */
  writeCount = 0;

  constructor(client: WorkbenchClient, fieldId: string) {
    this.client = client;
    this.fieldId = fieldId;
  }

  get judgments(): readonly JudgmentRow[] {
    return this.log;
  }

  get currentRevision(): number {
    return this.revision;
  }

  get survivingPairs(): number | null {
    return this.survivors;
  }

  get totalPairs(): number | null {
    return this.pairs;
  }

  isFlagged(a: string, b: string): boolean {
    return this.flaggedCells.has(pairKey(a, b));
  }

  /** Seed the survivor count from a server response such as explore. */
  seedCounts(pairs: number, survivingPairs: number): void {
    this.pairs = pairs;
    this.survivors = survivingPairs;
  }

  async load(): Promise<void> {
    const result = await this.client.getJudgments(this.fieldId);
    this.log = result.judgments;
    this.revision = result.revision;
    this.flaggedCells.clear();
  }

  verdict(a: string, b: string): string {
    return verdictFor(this.log, a, b);
  }

  /**
   * Flip the verdict for one pair with a single write. On success the local
   * log, revision, and survivor count follow the server response; on a
   * revision conflict the optimistic edit is rolled back and the cell is
   * flagged until the caller reloads.
   */
  async toggle(a: string, b: string, note?: string): Promise<ToggleResult> {
    const current = verdictFor(this.log, a, b);
    const flipped = current === INCONSISTENT ? CONSISTENT : INCONSISTENT;
    const previousLog = this.log;
    const previousSurvivors = this.survivors;
    this.log = withVerdict(this.log, a, b, flipped, note);
    this.writeCount += 1;
    try {
      const result = await this.client.putJudgments(this.fieldId, this.log, this.revision);
      this.revision = result.revision;
      this.pairs = result.pairs;
      this.survivors = result.surviving_pairs;
      this.flaggedCells.delete(pairKey(a, b));
      const delta =
        previousSurvivors === null ? null : previousSurvivors - result.surviving_pairs;
      return {
        ok: true,
        verdict: flipped,
        survivingPairs: result.surviving_pairs,
        survivorDelta: delta,
        conflict: null,
      };
    } catch (error) {
      this.log = previousLog;
      this.survivors = previousSurvivors;
      if (error instanceof ApiError && error.code === "revision-conflict") {
        this.flaggedCells.add(pairKey(a, b));
        return {
          ok: false,
          verdict: current,
          survivingPairs: null,
          survivorDelta: null,
          conflict: {
            pair: [a, b],
            message: `${error.message}; refresh to pick up the latest judgments`,
          },
        };
      }
      throw error;
    }
  }
}
