// @vitest-environment jsdom
/** Review aggregation display: the rendered per-model mean bars must equal
 * the independent spreadsheet oracle for the 12-profile review fixture, and
 * every RAG cell must be at least its no-RAG counterpart. */

import { readFileSync } from "node:fs";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { createApp, type ConsoleApp } from "../src/app";
import { REPO_ROOT, startService, type ServiceHandle } from "./server";

const PORT = 18972;
const METRICS = ["msa", "did", "psda", "pss", "ga", "overall"] as const;

let service: ServiceHandle;
let app: ConsoleApp;

function loadShell(): void {
  const html = readFileSync(path.join(REPO_ROOT, "frontend", "index.html"), "utf-8");
  document.documentElement.innerHTML = html.replace(/<script[\s\S]*?<\/script>/g, "");
}

interface OracleRow {
  model: string;
  rag: boolean;
  values: Record<string, number>;
  count: number;
}

function loadOracle(): OracleRow[] {
  const text = readFileSync(
    path.join(REPO_ROOT, "fixtures", "golden", "review_summary_golden.csv"),
    "utf-8",
  ).trim();
  const [header, ...lines] = text.split("\n");
  const columns = header.split(",");
  return lines.map((line) => {
    const parts = line.split(",");
    const get = (name: string) => parts[columns.indexOf(name)];
    const values: Record<string, number> = {};
    for (const metric of METRICS) values[metric] = Number(get(metric));
    return {
      model: get("model"),
      rag: get("rag") === "true",
      values,
      count: Number(get("review_count")),
    };
  });
}

beforeAll(async () => {
  service = await startService({ port: PORT, withReviews: true });
  loadShell();
  app = createApp(document, new ApiClient(service.base, (url, init) => fetch(url, init)));
  await app.init();
});

afterAll(() => service?.stop());

describe("review summary display", () => {
  it("renders one bar group per (model, rag) cell of the fixture set", () => {
    const cells = document.querySelectorAll(".summary-cell");
    expect(cells).toHaveLength(4);
  });

  it("matches the spreadsheet oracle exactly", () => {
    for (const row of loadOracle()) {
      const cell = document.querySelector(
        `.summary-cell[data-model="${row.model}"][data-rag="${row.rag}"]`,
      );
      expect(cell, `${row.model} rag=${row.rag}`).not.toBeNull();
      for (const metric of METRICS) {
        const displayed = Number(
          cell!.querySelector(`[data-metric="${metric}"]`)!.getAttribute("data-value"),
        );
        expect(displayed, `${row.model} rag=${row.rag} ${metric}`).toBeCloseTo(
          row.values[metric],
          9,
        );
      }
      expect(cell!.textContent).toContain(`${row.count} review(s)`);
    }
  });

  it("shows RAG cells at or above the no-RAG cells", () => {
    const oracle = loadOracle();
    for (const model of ["gpt-sim", "llama-sim"]) {
      const norag = oracle.find((r) => r.model === model && !r.rag)!;
      const rag = oracle.find((r) => r.model === model && r.rag)!;
      for (const metric of METRICS) {
        const cellFor = (flag: boolean) =>
          document.querySelector(`.summary-cell[data-model="${model}"][data-rag="${flag}"]`)!;
        const displayed = (flag: boolean) =>
          Number(cellFor(flag).querySelector(`[data-metric="${metric}"]`)!.getAttribute("data-value"));
        expect(displayed(true), `${model} ${metric}`).toBeGreaterThanOrEqual(displayed(false));
        // displayed values equal oracle ones (guards against client recompute)
        expect(displayed(true)).toBeCloseTo(rag.values[metric], 9);
        expect(displayed(false)).toBeCloseTo(norag.values[metric], 9);
      }
    }
  });

  it("refreshes bars when the model filter changes", async () => {
    const filter = document.getElementById("summary-model-filter") as HTMLSelectElement;
    filter.value = "gpt-sim";
    filter.dispatchEvent(new Event("change", { bubbles: true }));
    const deadline = Date.now() + 5000;
    while (Date.now() < deadline) {
      const cells = document.querySelectorAll(".summary-cell");
      if (
        cells.length === 2 &&
        Array.from(cells).every((c) => c.getAttribute("data-model") === "gpt-sim")
      ) {
        return;
      }
      await new Promise((r) => setTimeout(r, 50));
    }
    throw new Error("filtered summary did not render");
  });
});
