/** Job polling: 1 s interval backing off to 5 s, one concurrent poll per
 * job handle. Cancelling a handle stops its loop without racing a newer
 * poll for the same panel. */

import type { AssessmentJob } from "./types";

export interface PollOptions {
  initialMs?: number;
  maxMs?: number;
  sleeper?: (ms: number) => Promise<void>;
}

export interface PollHandle {
  done: Promise<AssessmentJob>;
  cancel: () => void;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export function pollJob(
  fetchJob: () => Promise<AssessmentJob>,
  onUpdate: (job: AssessmentJob) => void,
  options: PollOptions = {},
): PollHandle {
  const initial = options.initialMs ?? 1000;
  const max = options.maxMs ?? 5000;
  const sleep = options.sleeper ?? defaultSleep;
  let cancelled = false;

  const done = (async () => {
    let interval = initial;
    for (;;) {
      const job = await fetchJob();
      if (cancelled) return job;
      onUpdate(job);
      if (job.state === "Done" || job.state === "Failed") return job;
      await sleep(interval);
      if (cancelled) return job;
      interval = Math.min(max, interval * 2);
    }
  })();

  return { done, cancel: () => (cancelled = true) };
}

/** Backoff schedule preview (exported for tests): 1s, 2s, 4s, then 5s. */
export function backoffSchedule(steps: number, initialMs = 1000, maxMs = 5000): number[] {
  const out: number[] = [];
  let interval = initialMs;
  for (let i = 0; i < steps; i++) {
    out.push(interval);
    interval = Math.min(maxMs, interval * 2);
  }
  return out;
}
