/** Poll a submitted run until it settles (done or failed). */

import type { CockpitApi } from "./api.js";
import type { RunRecord } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (record: RunRecord) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class PollTimeoutError extends Error {
  constructor(readonly runId: string, readonly lastState: string) {
    super(`run ${runId} still ${lastState} at timeout`);
  }
}

export async function pollUntilSettled(
  api: CockpitApi,
  runId: string,
  options: PollOptions = {},
): Promise<RunRecord> {
  const intervalMs = options.intervalMs ?? 500;
  const timeoutMs = options.timeoutMs ?? 120_000;
  const sleep = options.sleep ?? defaultSleep;
  const deadline = Date.now() + timeoutMs;
  let record = await api.getRun(runId);
  for (;;) {
    options.onUpdate?.(record);
    if (record.state === "done" || record.state === "failed") {
      return record;
    }
    if (Date.now() >= deadline) {
      throw new PollTimeoutError(runId, record.state);
    }
    await sleep(intervalMs);
    record = await api.getRun(runId);
  }
}
