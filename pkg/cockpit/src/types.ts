/** Wire types mirroring the run service JSON. */

export type StudyKind = "single" | "comparison" | "sweep";
export type RunState = "pending" | "running" | "done" | "failed";

export interface MetricStats {
  mean: number;
  std: number;
  min: number;
  max: number;
}

export interface AggregateDict {
  replications: number;
  metrics: Record<string, MetricStats>;
}

export interface ComparisonRowDict extends AggregateDict {
  variant: string;
  policy_kind: string;
}

export interface ComparisonResults {
  kind: "comparison";
  seed: number;
  replications: number;
  total_size_loc: number;
  rows: ComparisonRowDict[];
}

export interface SweepPointDict extends AggregateDict {
  team_size: number;
  defects_found: number;
  defects_missed: number;
  total_effort: number;
  duration: number;
}

export interface SweepResults {
  kind: "sweep";
  seed: number;
  replications: number;
  points: SweepPointDict[];
}

export interface SingleResults extends AggregateDict {
  kind: "single";
}

export type StudyResults = ComparisonResults | SweepResults | SingleResults;

export interface RunSummary {
  id: string;
  study: StudyKind;
  label: string | null;
  state: RunState;
  submitted_at: number;
  finished_at: number | null;
}

export interface RunRecord extends RunSummary {
  started_at: number | null;
  error: string | null;
  scenario: ScenarioDict;
  sweep_sizes: number[] | null;
  results: StudyResults | null;
}

export interface Preset {
  name: string;
  description: string;
  study: StudyKind;
  scenario: ScenarioDict;
}

export interface PolicyDict {
  kind: "none" | "all" | "density_threshold" | "size_threshold";
  threshold: number | null;
  team_size: number | null;
}

export interface ScenarioDict {
  items: Array<{ id: string; size_loc: number; complexity: number }>;
  persons: Array<Record<string, unknown> & { id: string }>;
  calibration: Record<string, unknown>;
  policy: PolicyDict;
  switches: { inspection_on: boolean; design_on: boolean; test_on: boolean };
  seed: number;
  replications: number;
}

export interface SubmitRequest {
  scenario: ScenarioDict;
  study: StudyKind;
  label?: string | null;
  sweep_sizes?: number[] | null;
}
