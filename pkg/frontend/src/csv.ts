/**
 * Minimal CSV reader for artifact files served by the API.
 *
 * Handles the quoting subset the server's writer emits (RFC 4180 quotes and
 * doubled quotes). Field values are returned as the exact strings from the
 * file; callers that show numbers render these strings untouched.
 */

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let value = "";
  let quoted = false;
  let sawAny = false;
  for (let i = 0; i < text.length; i += 1) {
    const ch = text[i];
    if (quoted) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          value += '"';
          i += 1;
        } else {
          quoted = false;
        }
      } else {
        value += ch;
      }
      continue;
    }
    if (ch === '"') {
      quoted = true;
      sawAny = true;
    } else if (ch === ",") {
      row.push(value);
      value = "";
      sawAny = true;
    } else if (ch === "\n" || ch === "\r") {
      if (ch === "\r" && text[i + 1] === "\n") i += 1;
      if (sawAny || value !== "") {
        row.push(value);
        rows.push(row);
      }
      row = [];
      value = "";
      sawAny = false;
    } else {
      value += ch;
      sawAny = true;
    }
  }
  if (sawAny || value !== "") {
    row.push(value);
    rows.push(row);
  }
  return rows;
}

/** Parse a CSV with a header row into records keyed by column name. */
export function parseCsvRecords(text: string): Array<Record<string, string>> {
  const rows = parseCsv(text);
  if (rows.length === 0) return [];
  const header = rows[0] ?? [];
  return rows.slice(1).map((cells) => {
    const record: Record<string, string> = {};
    header.forEach((column, index) => {
      record[column] = cells[index] ?? "";
    });
    return record;
  });
}
