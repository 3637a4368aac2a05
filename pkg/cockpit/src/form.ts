/** Scenario form state: preset + user edits -> a valid submission payload.
 *
 * The form only exposes the what-if knobs (policy, team size, threshold,
 * replications, seed, study); rosters and calibration ride along from the
 * preset untouched, so every displayed number remains traceable to the
 * service.
 */

import type { Preset, PolicyDict, ScenarioDict, StudyKind, SubmitRequest } from "./types.js";

export interface FormState {
  presetName: string;
  study: StudyKind;
  label: string;
  policyKind: PolicyDict["kind"];
  threshold: number | null;
  teamSize: number;
  replications: number;
  seed: number;
}

export type FormErrors = Partial<Record<keyof FormState, string>>;

export function formFromPreset(preset: Preset): FormState {
  const scenario = preset.scenario;
  return {
    presetName: preset.name,
    study: preset.study,
    label: preset.name,
    policyKind: scenario.policy.kind,
    threshold: scenario.policy.threshold,
    teamSize: scenario.policy.team_size ?? 3,
    replications: scenario.replications,
    seed: scenario.seed,
  };
}

export function validateForm(form: FormState, scenario: ScenarioDict): FormErrors {
  const errors: FormErrors = {};
  if (!Number.isInteger(form.teamSize) || form.teamSize < 1) {
    errors.teamSize = "team size must be an integer of at least 1";
  } else if (form.policyKind !== "none" && form.teamSize >= scenario.persons.length) {
    errors.teamSize = `team of ${form.teamSize} plus the author needs more than ${scenario.persons.length} persons`;
  }
  const needsThreshold =
    form.policyKind === "density_threshold" || form.policyKind === "size_threshold";
  if (needsThreshold && (form.threshold === null || !(form.threshold > 0))) {
    errors.threshold = "threshold must be positive";
  }
  if (!Number.isInteger(form.replications) || form.replications < 1) {
    errors.replications = "replications must be an integer of at least 1";
  }
  if (!Number.isInteger(form.seed) || form.seed < 0) {
    errors.seed = "seed must be a non-negative integer";
  }
  if (form.label.trim().length === 0) {
    errors.label = "label must not be empty";
  }
  return errors;
}

/** Apply the edits to a copy of the preset scenario; never mutates input. */
export function buildSubmission(preset: Preset, form: FormState): SubmitRequest {
  const errors = validateForm(form, preset.scenario);
  if (Object.keys(errors).length > 0) {
    throw new Error(`form has errors: ${JSON.stringify(errors)}`);
  }
  const scenario: ScenarioDict = structuredClone(preset.scenario);
  scenario.policy = {
    kind: form.policyKind,
    threshold: form.threshold,
    team_size: form.teamSize,
  };
  scenario.replications = form.replications;
  scenario.seed = form.seed;
  return {
    scenario,
    study: form.study,
    label: form.label,
  };
}
