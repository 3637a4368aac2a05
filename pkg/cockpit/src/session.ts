/** Client-local what-if session: labeled runs and a pinned baseline.
 *
 * The session is bookkeeping only; the service stays the single source of
 * run truth. State survives reloads through an injectable string store
 * (browser localStorage in production, a plain map in tests).
 */

import type { RunRecord } from "./types.js";

export interface SessionEntry {
  id: string;
  label: string;
}

export interface StringStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_KEY = "inspectsim-session";

export class WhatIfSession {
  private entries: SessionEntry[] = [];
  private baselineId: string | null = null;

  constructor(private readonly storage?: StringStore) {
    if (storage) {
      const raw = storage.getItem(STORAGE_KEY);
      if (raw) {
        try {
          const parsed = JSON.parse(raw) as { entries: SessionEntry[]; baselineId: string | null };
          this.entries = parsed.entries ?? [];
          this.baselineId = parsed.baselineId ?? null;
        } catch {
          // corrupt storage: start clean
        }
      }
    }
  }

  list(): SessionEntry[] {
    return [...this.entries];
  }

  get baseline(): string | null {
    return this.baselineId;
  }

  addRun(id: string, label: string): void {
    if (this.entries.some((entry) => entry.label === label)) {
      throw new Error(`label ${label} already used in this session`);
    }
    if (this.entries.some((entry) => entry.id === id)) {
      throw new Error(`run ${id} already in this session`);
    }
    this.entries.push({ id, label });
    this.persist();
  }

  relabel(id: string, label: string): void {
    if (this.entries.some((entry) => entry.label === label && entry.id !== id)) {
      throw new Error(`label ${label} already used in this session`);
    }
    const entry = this.entries.find((candidate) => candidate.id === id);
    if (!entry) {
      throw new Error(`run ${id} not in this session`);
    }
    entry.label = label;
    this.persist();
  }

  /** Only settled-successful runs may anchor the deltas. */
  pinBaseline(record: RunRecord): void {
    if (record.state !== "done") {
      throw new Error(`cannot pin ${record.state} run as baseline`);
    }
    if (!this.entries.some((entry) => entry.id === record.id)) {
      throw new Error(`run ${record.id} not in this session`);
    }
    this.baselineId = record.id;
    this.persist();
  }

  clearBaseline(): void {
    this.baselineId = null;
    this.persist();
  }

  remove(id: string): void {
    this.entries = this.entries.filter((entry) => entry.id !== id);
    if (this.baselineId === id) {
      this.baselineId = null;
    }
    this.persist();
  }

  private persist(): void {
    this.storage?.setItem(
      STORAGE_KEY,
      JSON.stringify({ entries: this.entries, baselineId: this.baselineId }),
    );
  }
}
