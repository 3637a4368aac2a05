/** Browser bootstrap: form on the left, run list and views on the right. */

import { CockpitApi } from "./api.js";
import { renderSweepChart, sweepSeriesFromCsv } from "./charts.js";
import { buildSubmission, formFromPreset, validateForm, type FormState } from "./form.js";
import { pollUntilSettled } from "./poll.js";
import { WhatIfSession } from "./session.js";
import { buildTableModel, renderComparisonTable } from "./table.js";
import type { Preset, RunRecord } from "./types.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";

const api = new CockpitApi(SERVICE_URL);
const session = new WhatIfSession(window.localStorage);
const records = new Map<string, RunRecord>();

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

async function refreshViews(): Promise<void> {
  const list = document.getElementById("runs")!;
  list.innerHTML = "";
  for (const entry of session.list()) {
    const record = records.get(entry.id);
    const item = el("li", {}, `${entry.label} — ${record?.state ?? "…"}`);
    if (record?.state === "done") {
      const pin = el("button", {}, session.baseline === entry.id ? "baseline ✓" : "pin baseline");
      pin.onclick = () => {
        session.pinBaseline(record);
        void refreshViews();
      };
      item.append(" ", pin);
    }
    list.append(item);
  }

  const tableHost = document.getElementById("comparison")!;
  const tabular = session
    .list()
    .map((entry) => ({ record: records.get(entry.id), label: entry.label }))
    .filter((row): row is { record: RunRecord; label: string } => row.record !== undefined)
    .filter((row) => row.record.study !== "sweep");
  tableHost.innerHTML = tabular.length
    ? renderComparisonTable(buildTableModel(tabular, session.baseline))
    : "<p>No comparable runs yet.</p>";

  const chartHost = document.getElementById("sweep")!;
  chartHost.innerHTML = "";
  for (const entry of session.list()) {
    const record = records.get(entry.id);
    if (record?.study === "sweep" && record.state === "done") {
      const csv = await api.fetchResultsCsv(record.id);
      const panel = el("div");
      panel.append(el("h3", {}, entry.label));
      panel.insertAdjacentHTML("beforeend", renderSweepChart(sweepSeriesFromCsv(csv)));
      chartHost.append(panel);
    }
  }
}

function readForm(form: FormState): FormState {
  const value = (id: string) => (document.getElementById(id) as HTMLInputElement).value;
  return {
    ...form,
    study: value("study") as FormState["study"],
    label: value("label"),
    policyKind: value("policy") as FormState["policyKind"],
    threshold: value("threshold") === "" ? null : Number(value("threshold")),
    teamSize: Number(value("team-size")),
    replications: Number(value("replications")),
    seed: Number(value("seed")),
  };
}

function renderForm(preset: Preset): void {
  const host = document.getElementById("form")!;
  host.innerHTML = "";
  const state = formFromPreset(preset);
  const row = (labelText: string, input: HTMLElement) => {
    const wrap = el("label");
    wrap.append(el("span", {}, labelText), input);
    host.append(wrap);
  };
  row(
    "study",
    Object.assign(el("select", { id: "study" }), {
      innerHTML: ["single", "comparison", "sweep"]
        .map((kind) => `<option ${kind === state.study ? "selected" : ""}>${kind}</option>`)
        .join(""),
    }),
  );
  row("label", el("input", { id: "label", value: `${state.label}-${Date.now() % 10_000}` }));
  row(
    "policy",
    Object.assign(el("select", { id: "policy" }), {
      innerHTML: ["none", "all", "density_threshold", "size_threshold"]
        .map((kind) => `<option ${kind === state.policyKind ? "selected" : ""}>${kind}</option>`)
        .join(""),
    }),
  );
  row("threshold", el("input", { id: "threshold", value: String(state.threshold ?? "") }));
  row("team size", el("input", { id: "team-size", value: String(state.teamSize) }));
  row("replications", el("input", { id: "replications", value: String(state.replications) }));
  row("seed", el("input", { id: "seed", value: String(state.seed) }));
  const errors = el("p", { id: "form-errors", class: "failed" });
  const submit = el("button", {}, `submit ${preset.name}`);
  submit.onclick = async () => {
    const edited = readForm(state);
    const problems = validateForm(edited, preset.scenario);
    if (Object.keys(problems).length > 0) {
      errors.textContent = Object.entries(problems)
        .map(([field, message]) => `${field}: ${message}`)
        .join("; ");
      return;
    }
    errors.textContent = "";
    try {
      const id = await api.submitRun(buildSubmission(preset, edited));
      session.addRun(id, edited.label);
      void refreshViews();
      const settled = await pollUntilSettled(api, id, {
        onUpdate: (record) => {
          records.set(id, record);
          void refreshViews();
        },
      });
      records.set(id, settled);
      void refreshViews();
    } catch (error) {
      errors.textContent = String(error);
    }
  };
  host.append(submit, errors);
}

async function bootstrap(): Promise<void> {
  const presetHost = document.getElementById("presets")!;
  try {
    const presets = await api.listPresets();
    for (const preset of presets) {
      const button = el("button", {}, preset.name);
      button.title = preset.description;
      button.onclick = () => renderForm(preset);
      presetHost.append(button);
    }
    if (presets[0]) {
      renderForm(presets[0]);
    }
  } catch (error) {
    presetHost.textContent = `service unreachable at ${SERVICE_URL}: ${String(error)}`;
  }
  void refreshViews();
}

void bootstrap();
