/** Side-by-side comparison of runs: metric rows, run columns, baseline deltas. */

import type { ComparisonResults, RunRecord, SingleResults } from "./types.js";

export const TABLE_METRICS = [
  "total_effort",
  "duration",
  "defects_coded",
  "defects_found_inspection",
  "defects_after_inspection",
  "defects_found_test",
  "defects_remaining",
] as const;

export type TableMetric = (typeof TABLE_METRICS)[number];

export interface TableColumn {
  key: string; // unique: runId or runId:variant
  label: string;
  values: Record<string, number>;
}

export interface FlaggedRun {
  id: string;
  label: string;
  state: string;
  error: string | null;
}

export interface TableModel {
  columns: TableColumn[];
  baselineKey: string | null;
  /** deltas[columnKey][metric] = column - baseline; zero for the baseline itself */
  deltas: Record<string, Record<string, number>> | null;
  flagged: FlaggedRun[];
  loading: FlaggedRun[];
}

function columnsOf(record: RunRecord, label: string): TableColumn[] {
  const results = record.results;
  if (!results) {
    return [];
  }
  if (results.kind === "comparison") {
    return (results as ComparisonResults).rows.map((row) => ({
      key: `${record.id}:${row.variant}`,
      label: `${label} / ${row.variant}`,
      values: Object.fromEntries(
        TABLE_METRICS.map((metric) => [metric, row.metrics[metric]?.mean ?? NaN]),
      ),
    }));
  }
  if (results.kind === "single") {
    return [
      {
        key: record.id,
        label,
        values: Object.fromEntries(
          TABLE_METRICS.map((metric) => [metric, (results as SingleResults).metrics[metric]?.mean ?? NaN]),
        ),
      },
    ];
  }
  return []; // sweeps are charted, not tabulated
}

export function buildTableModel(
  records: Array<{ record: RunRecord; label: string }>,
  baselineRunId: string | null,
): TableModel {
  const columns: TableColumn[] = [];
  const flagged: FlaggedRun[] = [];
  const loading: FlaggedRun[] = [];
  for (const { record, label } of records) {
    if (record.state === "done") {
      columns.push(...columnsOf(record, label));
    } else if (record.state === "failed") {
      flagged.push({ id: record.id, label, state: record.state, error: record.error });
    } else {
      loading.push({ id: record.id, label, state: record.state, error: null });
    }
  }
  let baselineKey: string | null = null;
  if (baselineRunId) {
    baselineKey = columns.find((c) => c.key === baselineRunId || c.key.startsWith(`${baselineRunId}:`))?.key ?? null;
  }
  let deltas: TableModel["deltas"] = null;
  if (baselineKey) {
    const base = columns.find((c) => c.key === baselineKey)!;
    deltas = Object.fromEntries(
      columns.map((col) => [
        col.key,
        Object.fromEntries(
          TABLE_METRICS.map((metric) => [metric, col.values[metric]! - base.values[metric]!]),
        ),
      ]),
    );
  }
  return { columns, baselineKey, deltas, flagged, loading };
}

const escapeHtml = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function formatValue(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

function formatDelta(value: number): string {
  if (value === 0) {
    return "±0";
  }
  const sign = value > 0 ? "+" : "−";
  return `${sign}${formatValue(Math.abs(value))}`;
}

export function renderComparisonTable(model: TableModel): string {
  const parts: string[] = ['<table class="comparison">'];
  parts.push("<thead><tr><th>metric</th>");
  for (const col of model.columns) {
    const marker = col.key === model.baselineKey ? " (baseline)" : "";
    parts.push(`<th>${escapeHtml(col.label)}${marker}</th>`);
  }
  parts.push("</tr></thead><tbody>");
  for (const metric of TABLE_METRICS) {
    parts.push(`<tr><td>${metric}</td>`);
    for (const col of model.columns) {
      const value = col.values[metric]!;
      let cell = formatValue(value);
      if (model.deltas) {
        cell += ` <span class="delta">${formatDelta(model.deltas[col.key]![metric]!)}</span>`;
      }
      parts.push(`<td>${cell}</td>`);
    }
    parts.push("</tr>");
  }
  parts.push("</tbody></table>");
  for (const run of model.loading) {
    parts.push(`<p class="loading">run ${escapeHtml(run.label)} is ${run.state}…</p>`);
  }
  for (const run of model.flagged) {
    parts.push(
      `<p class="failed">run ${escapeHtml(run.label)} failed: ${escapeHtml(run.error ?? "unknown")}</p>`,
    );
  }
  return parts.join("");
}

/** Quick check the cockpit surfaces: does the effort ordering match the
 * expectation that skipping inspections costs the most? */
export function effortOrdering(results: ComparisonResults): {
  none: number;
  all: number;
  threshold: number;
  inspectionsPay: boolean;
} {
  const mean = (variant: string) =>
    results.rows.find((row) => row.variant === variant)?.metrics.total_effort?.mean ?? NaN;
  const none = mean("no_inspections");
  const all = mean("all_inspected");
  const threshold = mean("density_threshold");
  return { none, all, threshold, inspectionsPay: none > all && none > threshold };
}
