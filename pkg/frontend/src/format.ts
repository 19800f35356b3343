/** Pure HTML builders: all strings, no document access, unit-testable.
 * Every number rendered here comes from a service response verbatim. */

import type {
  AssessmentJob,
  MetricsRow,
  RetrievedChunk,
  ReviewSummaryCell,
  SuitabilityReport,
} from "./types";
import { INTERACTION_CLASSES, REVIEW_METRICS } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const FLAG_CLASS: Record<string, string> = {
  Suitable: "flag-suitable",
  Risky: "flag-risky",
  NA: "flag-na",
};

/** The eight risk flags in canonical order; render only from a Valid report. */
export function renderFlags(report: SuitabilityReport): string {
  if (report.status !== "Valid" || report.checks === null) {
    throw new Error("flags can only be rendered from a Valid report");
  }
  const flags = INTERACTION_CLASSES.map((cls) => {
    const check = report.checks![cls];
    const label = check.result === "NA" ? "N/A" : check.result;
    return (
      `<span class="flag ${FLAG_CLASS[check.result]}" data-class="${cls}" ` +
      `data-result="${check.result}">${cls}: ${label}</span>`
    );
  });
  return `<div class="flags">${flags.join("")}</div>`;
}

export function renderScoreGauge(score: number): string {
  const clamped = Math.max(0, Math.min(100, score));
  return (
    `<div class="score-gauge" data-score="${score}">` +
    `<div class="score-fill" style="width:${clamped}%"></div>` +
    `<span class="score-label">${score}/100</span></div>`
  );
}

export function renderReasons(report: SuitabilityReport): string {
  const items = INTERACTION_CLASSES.map((cls) => {
    const check = report.checks![cls];
    return (
      `<details class="reason" data-class="${cls}"><summary>${cls}</summary>` +
      `<p>${escapeHtml(check.reason || "(no reason given)")}</p></details>`
    );
  });
  const overall = report.overall
    ? `<details class="reason" data-class="Overall"><summary>Overall</summary>` +
      `<p>${escapeHtml(report.overall.reason)}</p></details>`
    : "";
  return `<div class="reasons">${items.join("")}${overall}</div>`;
}

export function renderContextDrawer(chunks: RetrievedChunk[]): string {
  const rows = chunks
    .map((chunk) => {
      const sim = chunk.similarity === null ? "n/a" : String(chunk.similarity);
      return (
        `<li class="context-chunk" data-chunk-id="${escapeHtml(chunk.chunk_id)}">` +
        `<span class="chunk-section">[${escapeHtml(chunk.section ?? "?")}]</span> ` +
        `<span class="chunk-sim">similarity ${sim}</span>` +
        `<p class="chunk-text">${escapeHtml(chunk.text ?? "")}</p></li>`
      );
    })
    .join("");
  return (
    `<details class="context-drawer"><summary>Retrieved SmPC context ` +
    `(${chunks.length})</summary><ul>${rows}</ul></details>`
  );
}

export function renderInvalidReport(report: SuitabilityReport): string {
  return (
    `<div class="invalid-report">` +
    `<p class="failure-reason">Model output rejected: ` +
    `${escapeHtml(report.failure_reason ?? "unknown")}</p>` +
    `<pre class="raw-response">${escapeHtml(report.raw_response)}</pre></div>`
  );
}

export function renderJobPanel(job: AssessmentJob): string {
  const header =
    `<p class="job-state" data-state="${job.state}">` +
    `${job.model_id} / ${job.rag_enabled ? "RAG" : "no-RAG"}: ${job.state}</p>`;
  if (job.state === "Failed") {
    return (
      header +
      `<p class="job-error">${escapeHtml(job.error ?? "unknown error")}</p>` +
      `<button class="retry" data-action="retry">Retry</button>`
    );
  }
  if (job.state !== "Done" || !job.report) {
    return header + `<p class="job-wait">Waiting for the model…</p>`;
  }
  const report = job.report;
  if (report.status === "Invalid") {
    return header + renderInvalidReport(report);
  }
  const drawer = job.rag_enabled ? renderContextDrawer(job.retrieved_chunks ?? []) : "";
  return (
    header +
    renderFlags(report) +
    renderScoreGauge(report.overall!.score) +
    renderReasons(report) +
    drawer
  );
}

/** Mean bars per (model, rag) cell; values rendered verbatim. */
export function renderSummaryBars(cells: ReviewSummaryCell[]): string {
  const metrics = [...REVIEW_METRICS, "overall"] as const;
  const groups = cells
    .map((cell) => {
      const bars = metrics
        .map((metric) => {
          const value = cell[metric];
          const width = (Number(value) / 5) * 100;
          return (
            `<div class="bar-row" data-metric="${metric}" data-value="${value}">` +
            `<span class="bar-label">${metric.toUpperCase()}</span>` +
            `<div class="bar" style="width:${width}%"></div>` +
            `<span class="bar-value">${value}</span></div>`
          );
        })
        .join("");
      return (
        `<div class="summary-cell" data-model="${escapeHtml(cell.model)}" ` +
        `data-rag="${cell.rag}">` +
        `<h4>${escapeHtml(cell.model)} (${cell.rag ? "RAG" : "no-RAG"}), ` +
        `${cell.review_count} review(s)</h4>${bars}</div>`
      );
    })
    .join("");
  return `<div class="summary-bars">${groups}</div>`;
}

export function renderMetricsTable(rows: MetricsRow[]): string {
  if (rows.length === 0) return `<p class="metrics-empty">No scored assessments yet.</p>`;
  const body = rows
    .map(
      (row) =>
        `<tr data-class="${row.class}"><td>${escapeHtml(row.model)}</td>` +
        `<td>${row.rag ? "RAG" : "no-RAG"}</td><td>${row.class}</td>` +
        `<td>${row.accuracy}</td><td>${row.precision}</td>` +
        `<td>${row.recall}</td><td>${row.f1}</td><td>${row.support}</td></tr>`,
    )
    .join("");
  return (
    `<table class="metrics-table"><thead><tr><th>model</th><th>setting</th>` +
    `<th>class</th><th>accuracy</th><th>precision</th><th>recall</th>` +
    `<th>F1</th><th>support</th></tr></thead><tbody>${body}</tbody></table>`
  );
}
