import { describe, expect, it } from "vitest";

import {
  buildMatrixView,
  dimensionPairOptions,
  parsePairsCsv,
} from "../src/matrix.js";
import { parseCsv, parseCsvRecords } from "../src/csv.js";
import type { FieldDoc, JudgmentRow } from "../src/types.js";

const FIELD: FieldDoc = {
  id: "tiny",
  title: "Tiny",
  dimensions: [
    {
      id: "alpha",
      name: "Alpha",
      conditions: [
        { id: "a1", name: "A one" },
        { id: "a2", name: "A two" },
      ],
    },
    {
      id: "beta",
      name: "Beta",
      conditions: [
        { id: "b1", name: "B one" },
        { id: "b2", name: "B two" },
        { id: "b3", name: "B three" },
      ],
    },
    {
      id: "gamma",
      name: "Gamma",
      conditions: [
        { id: "g1", name: "G one" },
        { id: "g2", name: "G two" },
      ],
    },
  ],
};

const PAIRS_CSV = [
  "condition_a,condition_b,impact,likelihood,consistent",
  "a1,b1,0.6150,0.4725,true",
  "a1,b2,0.5000,0.5100,true",
  "a1,b3,0.7300,0.2250,false",
  "a2,b1,0.4400,0.6000,true",
  "a2,b2,0.3850,0.7150,true",
  "a2,b3,0.9000,0.1000,true",
  "a1,g1,0.1111,0.2222,true",
].join("\n");

describe("csv parsing", () => {
  it("splits rows and keeps values as exact strings", () => {
    const rows = parseCsv("x,y\n1.2300,0.0040\n");
    expect(rows).toEqual([
      ["x", "y"],
      ["1.2300", "0.0040"],
    ]);
  });

  it("handles quoted fields with commas and doubled quotes", () => {
    const rows = parseCsv('name,note\n"last, first","says ""hi"""\n');
    expect(rows[1]).toEqual(["last, first", 'says "hi"']);
  });

  it("handles crlf endings and empty trailing fields", () => {
    const rows = parseCsv("a,b\r\n1,\r\n");
    expect(rows).toEqual([
      ["a", "b"],
      ["1", ""],
    ]);
  });

  it("maps records by header", () => {
    const records = parseCsvRecords("dimension,condition\nalpha,a1\n");
    expect(records).toEqual([{ dimension: "alpha", condition: "a1" }]);
  });

  it("returns nothing for an empty file", () => {
    expect(parseCsvRecords("")).toEqual([]);
  });
});

describe("pairs artifact parsing", () => {
  it("keeps the served four-decimal strings untouched", () => {
    const pairs = parsePairsCsv(PAIRS_CSV);
    expect(pairs).toHaveLength(7);
    expect(pairs[0]).toEqual({
      a: "a1",
      b: "b1",
      impact: "0.6150",
      likelihood: "0.4725",
      consistent: true,
    });
    expect(pairs[2]?.consistent).toBe(false);
  });
});

describe("matrix view", () => {
  it("renders one dimension pair at a time with the served cell values", () => {
    const view = buildMatrixView(FIELD, "alpha", "beta", parsePairsCsv(PAIRS_CSV), [], 2, 2);
    expect(view.rows.map((r) => r.id)).toEqual(["a1", "a2"]);
    expect(view.cols.map((c) => c.id)).toEqual(["b1", "b2", "b3"]);
    expect(view.cells).toHaveLength(2);
    expect(view.cells[0]).toHaveLength(3);
    expect(view.cells[0]?.[0]?.impact).toBe("0.6150");
    expect(view.cells[0]?.[0]?.likelihood).toBe("0.4725");
    expect(view.cells[1]?.[2]?.impact).toBe("0.9000");
    // the gamma pair is not part of this table
    const shown = view.cells.flat().map((cell) => `${cell.row}~${cell.col}`);
    expect(shown).not.toContain("a1~g1");
  });

  it("finds pairs regardless of the stored order", () => {
    const view = buildMatrixView(FIELD, "beta", "alpha", parsePairsCsv(PAIRS_CSV), [], 2, 2);
    expect(view.cells[0]?.[0]?.impact).toBe("0.6150");
    expect(view.rows.map((r) => r.id)).toEqual(["b1", "b2", "b3"]);
  });

  it("leaves cells blank for pairs the artifact does not carry", () => {
    const view = buildMatrixView(FIELD, "alpha", "gamma", parsePairsCsv(PAIRS_CSV), [], 2, 2);
    expect(view.cells[0]?.[0]?.impact).toBe("0.1111");
    expect(view.cells[0]?.[1]?.impact).toBe("");
    expect(view.cells[1]?.[0]?.impact).toBe("");
  });

  it("overlays verdicts from the judgment log", () => {
    const log: JudgmentRow[] = [
      { condition_a: "b1", condition_b: "a1", verdict: "inconsistent" },
    ];
    const view = buildMatrixView(FIELD, "alpha", "beta", parsePairsCsv(PAIRS_CSV), log, 2, 2);
    expect(view.cells[0]?.[0]?.verdict).toBe("inconsistent");
    expect(view.cells[0]?.[1]?.verdict).toBe("consistent");
  });

  it("marks flagged cells through the callback", () => {
    const view = buildMatrixView(
      FIELD,
      "alpha",
      "beta",
      parsePairsCsv(PAIRS_CSV),
      [],
      2,
      2,
      (a, b) => a === "a2" && b === "b2",
    );
    expect(view.cells[1]?.[1]?.flagged).toBe(true);
    expect(view.cells[0]?.[1]?.flagged).toBe(false);
  });

  it("flags staleness when the field moved past the artifact revision", () => {
    const current = buildMatrixView(FIELD, "alpha", "beta", [], [], 3, 3);
    const stale = buildMatrixView(FIELD, "alpha", "beta", [], [], 2, 3);
    expect(current.stale).toBe(false);
    expect(stale.stale).toBe(true);
    expect(stale.artifactRevision).toBe(2);
  });

  it("rejects unknown dimensions", () => {
    expect(() => buildMatrixView(FIELD, "alpha", "nope", [], [], 1, 1)).toThrow("nope");
  });
});

describe("dimension pair selector", () => {
  it("offers every unordered pair in field order", () => {
    const options = dimensionPairOptions(FIELD);
    expect(options.map((o) => `${o.row}~${o.col}`)).toEqual([
      "alpha~beta",
      "alpha~gamma",
      "beta~gamma",
    ]);
    expect(options[0]?.label).toBe("Alpha x Beta");
  });

  it("is empty for a single-dimension field", () => {
    const single: FieldDoc = {
      id: "s",
      title: "S",
      dimensions: [FIELD.dimensions[0]!],
    };
    expect(dimensionPairOptions(single)).toEqual([]);
  });
});
