/** Query-result tables rendered as pies: first column groups, rows weigh. */

import { NEUTRAL } from "./colors.js";
import type { PieModel, PieSector, ResultTable } from "./types.js";

/** Largest-remainder split into two-decimal percents that sum to 100. */
export function splitPercents(weights: number[]): number[] {
  if (!weights.length) return [];
  const total = weights.reduce((a, b) => a + b, 0);
  const safe = total > 0 ? weights : weights.map(() => 1);
  const sum = total > 0 ? total : weights.length;
  const raw = safe.map((w) => (w / sum) * 10000);
  const cents = raw.map(Math.floor);
  const left = 10000 - cents.reduce((a, b) => a + b, 0);
  const order = raw
    .map((r, i) => ({ rem: r - cents[i], i }))
    .sort((a, b) => b.rem - a.rem || a.i - b.i);
  for (let k = 0; k < left; k++) cents[order[k].i] += 1;
  return cents.map((c) => c / 100);
}

export function tableToPie(table: ResultTable): PieModel {
  const counts = new Map<string, number>();
  for (const row of table.rows) {
    counts.set(row[0], (counts.get(row[0]) ?? 0) + 1);
  }
  const keys = [...counts.keys()].sort();
  const percents = splitPercents(keys.map((k) => counts.get(k)!));
  const children: PieSector[] = keys.map((key, i) => ({
    id: `ind:${key}`,
    label: key,
    kind: "Individual",
    percent: percents[i],
    color: NEUTRAL,
    expandable: true,
    children: [],
    source_iri: key,
  }));
  return {
    root: {
      id: "cls:Thing",
      label: "Thing",
      kind: "Class",
      percent: 100,
      color: NEUTRAL,
      expandable: children.length > 0,
      children,
      source_iri: "Thing",
    },
    focus_tags: [],
    revision: table.revision,
    empty: children.length === 0,
  };
}
