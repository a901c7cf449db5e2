/**
 * Display-only formatting helpers.
 *
 * Counts arrive from the API as decimal strings and stay strings; grouping
 * digits for readability is the only transformation applied, so what the
 * user sees is always the served value.
 */

/** Insert thousands separators into a decimal string: "15116544" -> "15,116,544". */
export function groupDigits(count: string): string {
  if (!/^-?\d+$/.test(count)) return count;
  const negative = count.startsWith("-");
  const digits = negative ? count.slice(1) : count;
  const grouped = digits.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return negative ? `-${grouped}` : grouped;
}

/** Render a slider position with a stable number of decimals. */
export function formatThreshold(value: number): string {
  return value.toFixed(2);
}
