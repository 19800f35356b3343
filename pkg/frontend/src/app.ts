/** Console orchestrator: the only module that touches the DOM.
 *
 * Reads form values, calls the API client and the pure render helpers, and
 * writes results back. No clinical logic lives here; every validation is
 * also enforced server-side.
 */

import { ApiClient, ApiError, OfflineError } from "./api";
import {
  renderJobPanel,
  renderMetricsTable,
  renderSummaryBars,
} from "./format";
import { pollJob, type PollHandle, type PollOptions } from "./polling";
import type {
  AssessmentJob,
  Diagnosis,
  Measurement,
  MedicationCourse,
  PatientProfile,
  Violation,
} from "./types";
import { GRADING_LEGEND } from "./types";
import { validateProfile } from "./validation";

export interface AppOptions {
  poll?: PollOptions;
}

type PanelKey = "norag" | "rag";

export class ConsoleApp {
  private polls: Partial<Record<PanelKey, PollHandle>> = {};
  private lastDone: Partial<Record<PanelKey, AssessmentJob>> = {};
  private knownPatients = new Set<string>();

  constructor(
    private readonly doc: Document,
    private readonly api: ApiClient,
    private readonly options: AppOptions = {},
  ) {}

  // -- tiny DOM helpers -----------------------------------------------------

  private el<T extends HTMLElement>(id: string): T {
    const found = this.doc.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  private input(id: string): HTMLInputElement {
    return this.el<HTMLInputElement>(id);
  }

  private select(id: string): HTMLSelectElement {
    return this.el<HTMLSelectElement>(id);
  }

  private textarea(id: string): HTMLTextAreaElement {
    return this.el<HTMLTextAreaElement>(id);
  }

  // -- lifecycle ----------------------------------------------------------------

  async init(): Promise<void> {
    this.el("grading-legend").textContent = `Grading: ${GRADING_LEGEND}`;
    for (const id of ["rv-msa", "rv-did", "rv-psda", "rv-pss", "rv-ga"]) {
      const select = this.select(id);
      select.innerHTML = [5, 4, 3, 2, 1]
        .map((v) => `<option value="${v}">${v}</option>`)
        .join("");
    }

    this.el("save-patient").addEventListener("click", () => void this.savePatient());
    this.el("verify-patient").addEventListener("click", () => void this.verifyPatient());
    this.el("run-norag").addEventListener("click", () => void this.runAssessment(false));
    this.el("run-rag").addEventListener("click", () => void this.runAssessment(true));
    this.el("submit-review").addEventListener("click", () => void this.submitReview());
    this.select("pf-gender").addEventListener("change", () => this.applyGenderRules());
    this.input("pf-age").addEventListener("input", () => this.validateInline());
    this.textarea("pf-courses").addEventListener("input", () => this.validateInline());
    this.select("patient-select").addEventListener("change", () => void this.loadSelectedPatient());
    this.select("summary-model-filter").addEventListener("change", () => void this.refreshSummary());

    await this.refreshCatalogs();
    await this.refreshPatients();
    await this.refreshSummary();
    this.applyGenderRules();
  }

  private online(ok: boolean): void {
    this.el("offline-banner").classList.toggle("visible", !ok);
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    try {
      const result = await work();
      this.online(true);
      return result;
    } catch (err) {
      if (err instanceof OfflineError) {
        this.online(false);
        return undefined;
      }
      throw err;
    }
  }

  // -- catalogs ------------------------------------------------------------------

  private async refreshCatalogs(): Promise<void> {
    await this.guard(async () => {
      const medications = await this.api.listMedications();
      this.select("medication-select").innerHTML = medications
        .map((m) => `<option value="${m.id}">${m.name}${m.indexed ? "" : " (not indexed)"}</option>`)
        .join("");
      const models = await this.api.listModels();
      const options = models.map((m) => `<option value="${m.id}">${m.id}</option>`);
      this.select("model-select").innerHTML = options.join("");
      this.select("summary-model-filter").innerHTML =
        `<option value="">(all models)</option>` + options.join("");
    });
  }

  private async refreshPatients(): Promise<void> {
    await this.guard(async () => {
      const patients = await this.api.listPatients();
      this.knownPatients = new Set(patients.map((p) => p.id));
      const current = this.select("patient-select").value;
      this.select("patient-select").innerHTML =
        `<option value="">(new patient)</option>` +
        patients
          .map((p) => `<option value="${p.id}">${p.id} — ${p.synthetic_name}</option>`)
          .join("");
      this.select("patient-select").value = current;
    });
  }

  private async loadSelectedPatient(): Promise<void> {
    const id = this.select("patient-select").value;
    if (!id) return;
    await this.guard(async () => {
      this.fillForm(await this.api.getPatient(id));
    });
  }

  // -- patient form ----------------------------------------------------------------

  fillForm(profile: PatientProfile): void {
    this.input("pf-id").value = profile.id;
    this.input("pf-name").value = profile.synthetic_name;
    this.input("pf-age").value = String(profile.age);
    this.select("pf-gender").value = profile.gender;
    this.input("pf-race").value = profile.race;
    this.input("pf-blood").value = profile.blood_type;
    this.input("pf-allergies").value = profile.allergies.join(", ");
    this.input("pf-comorbidities").value = profile.comorbidities.join(", ");
    this.input("pf-surgical").value = profile.surgical_history.join(", ");
    this.textarea("pf-diagnoses").value = profile.diagnoses
      .map((d) => `${d.code}|${d.label}`)
      .join("\n");
    this.textarea("pf-courses").value = profile.medication_courses
      .map((c) =>
        [c.drug_name, c.dose_value, c.dose_unit, c.schedule, c.start, c.end]
          .filter((part) => part !== undefined)
          .join("|"),
      )
      .join("\n");
    this.textarea("pf-labs").value = profile.lab_results
      .map((m) => `${m.name}|${m.value}|${m.unit}|${m.taken_at}`)
      .join("\n");
    this.textarea("pf-vitals").value = profile.vitals
      .map((m) => `${m.name}|${m.value}|${m.unit}|${m.taken_at}`)
      .join("\n");
    if (profile.admission) {
      this.select("pf-urgency").value = profile.admission.urgency;
      this.input("pf-admitted").value = profile.admission.admitted_at;
    }
    this.select("pf-pregnancy").value = profile.pregnancy_status;
    this.select("pf-lactation").value = profile.lactation_status;
    this.setVerifiedBadge(profile.verified);
    this.applyGenderRules();
  }

  collectProfile(): PatientProfile {
    const splitCsv = (value: string) =>
      value.split(",").map((s) => s.trim()).filter(Boolean);
    const lines = (value: string) =>
      value.split("\n").map((s) => s.trim()).filter(Boolean);

    const diagnoses: Diagnosis[] = lines(this.textarea("pf-diagnoses").value).map((line) => {
      const [code = "", label = ""] = line.split("|");
      return { code: code.trim(), label: label.trim() };
    });
    const courses: MedicationCourse[] = lines(this.textarea("pf-courses").value).map((line) => {
      const [drug = "", dose = "", unit = "", schedule = "", start = "", end] = line.split("|");
      const course: MedicationCourse = {
        drug_name: drug.trim(),
        dose_value: Number.parseFloat(dose),
        dose_unit: unit.trim(),
        schedule: schedule.trim(),
        start: start.trim(),
      };
      if (end !== undefined && end.trim()) course.end = end.trim();
      return course;
    });
    const measurements = (raw: string): Measurement[] =>
      lines(raw).map((line) => {
        const [name = "", value = "", unit = "", takenAt = ""] = line.split("|");
        return {
          name: name.trim(),
          value: Number.parseFloat(value),
          unit: unit.trim(),
          taken_at: takenAt.trim(),
        };
      });

    const gender = this.select("pf-gender").value as PatientProfile["gender"];
    return {
      id: this.input("pf-id").value.trim(),
      synthetic_name: this.input("pf-name").value.trim(),
      age: Number.parseInt(this.input("pf-age").value, 10),
      gender,
      race: this.input("pf-race").value.trim(),
      blood_type: this.input("pf-blood").value.trim(),
      allergies: splitCsv(this.input("pf-allergies").value),
      diagnoses,
      comorbidities: splitCsv(this.input("pf-comorbidities").value),
      medication_courses: courses,
      lab_results: measurements(this.textarea("pf-labs").value),
      vitals: measurements(this.textarea("pf-vitals").value),
      admission: {
        urgency: this.select("pf-urgency").value as NonNullable<
          PatientProfile["admission"]
        >["urgency"],
        admitted_at: this.input("pf-admitted").value.trim(),
      },
      pregnancy_status: this.select("pf-pregnancy").value as PatientProfile["pregnancy_status"],
      lactation_status: this.select("pf-lactation").value as PatientProfile["lactation_status"],
      surgical_history: splitCsv(this.input("pf-surgical").value),
      verified: this.el("verify-badge").classList.contains("verified"),
    };
  }

  /** Male patients: pregnancy/lactation are not applicable; fix the values
   * and disable the inputs, showing the N/A note. */
  applyGenderRules(): void {
    const male = this.select("pf-gender").value === "male";
    const pregnancy = this.select("pf-pregnancy");
    const lactation = this.select("pf-lactation");
    if (male) {
      pregnancy.value = "not_pregnant";
      lactation.value = "not_lactating";
    }
    pregnancy.disabled = male;
    lactation.disabled = male;
    this.el("pf-pregnancy-na").classList.toggle("visible", male);
    this.el("pf-lactation-na").classList.toggle("visible", male);
    this.validateInline();
  }

  validateInline(): Violation[] {
    const violations = validateProfile(this.collectProfile());
    this.renderViolations(violations);
    return violations;
  }

  private renderViolations(violations: Violation[]): void {
    for (const node of Array.from(this.doc.querySelectorAll(".field-error"))) {
      node.textContent = "";
    }
    const list = this.el("patient-errors");
    list.innerHTML = "";
    for (const violation of violations) {
      const root = violation.field.split(".")[0].replace(/\[\d+\]/, "");
      const slot = this.doc.querySelector(`[data-error-for="${root}"]`);
      if (slot) slot.textContent = violation.message;
      const item = this.doc.createElement("li");
      item.textContent = `${violation.field}: ${violation.message}`;
      list.appendChild(item);
    }
  }

  private setVerifiedBadge(verified: boolean): void {
    const badge = this.el("verify-badge");
    badge.textContent = verified ? "verified" : "unverified";
    badge.classList.toggle("verified", verified);
    badge.classList.toggle("unverified", !verified);
  }

  async savePatient(): Promise<void> {
    const profile = this.collectProfile();
    const violations = this.validateInline();
    if (violations.length > 0) return;
    await this.guard(async () => {
      try {
        // saving never sets verified; only the explicit verify action does
        if (this.knownPatients.has(profile.id)) {
          await this.api.updatePatient(profile);
        } else {
          await this.api.createPatient({ ...profile, verified: false });
          this.setVerifiedBadge(false);
        }
      } catch (err) {
        if (err instanceof ApiError) {
          this.renderViolations(err.violations);
          return;
        }
        throw err;
      }
      await this.refreshPatients();
      this.select("patient-select").value = profile.id;
    });
  }

  async verifyPatient(): Promise<void> {
    const id = this.input("pf-id").value.trim();
    if (!id) return;
    await this.guard(async () => {
      const profile = await this.api.verifyPatient(id);
      this.fillForm(profile);
    });
  }

  // -- assessments --------------------------------------------------------------

  async runAssessment(rag: boolean): Promise<AssessmentJob | undefined> {
    const key: PanelKey = rag ? "rag" : "norag";
    const panel = this.el(`panel-${key}`);
    const patientId = this.input("pf-id").value.trim();
    const request = {
      patient_id: patientId,
      medication_id: this.select("medication-select").value,
      model_id: this.select("model-select").value,
      rag,
    };
    this.polls[key]?.cancel();
    return await this.guard(async () => {
      let jobId: string;
      try {
        jobId = await this.api.startAssessment(request);
      } catch (err) {
        if (err instanceof ApiError) {
          panel.innerHTML = `<p class="job-error">${err.code}: ${err.message}</p>`;
          return undefined as unknown as AssessmentJob;
        }
        throw err;
      }
      const handle = pollJob(
        () => this.api.getAssessment(jobId),
        (job) => this.renderPanel(key, job),
        this.options.poll,
      );
      this.polls[key] = handle;
      const job = await handle.done;
      if (job.state === "Done") this.lastDone[key] = job;
      return job;
    });
  }

  private renderPanel(key: PanelKey, job: AssessmentJob): void {
    const panel = this.el(`panel-${key}`);
    panel.innerHTML = renderJobPanel(job);
    const retry = panel.querySelector('[data-action="retry"]');
    retry?.addEventListener("click", () => void this.runAssessment(key === "rag"));
  }

  // -- reviews and summary ------------------------------------------------------------

  async submitReview(): Promise<void> {
    const key = this.select("review-target").value as PanelKey;
    const job = this.lastDone[key];
    const status = this.el("review-status");
    if (!job) {
      status.textContent = "Run an assessment before reviewing it.";
      return;
    }
    const review = {
      reviewer_id: this.input("review-reviewer").value.trim() || "console",
      patient_id: job.patient_id,
      model_id: job.model_id,
      rag_enabled: job.rag_enabled,
      msa: Number(this.select("rv-msa").value),
      did: Number(this.select("rv-did").value),
      psda: Number(this.select("rv-psda").value),
      pss: Number(this.select("rv-pss").value),
      ga: Number(this.select("rv-ga").value),
    };
    await this.guard(async () => {
      try {
        await this.api.submitReview(review);
      } catch (err) {
        if (err instanceof ApiError) {
          status.textContent = `Rejected: ${err.code}`;
          return;
        }
        throw err;
      }
      status.textContent = "Review recorded.";
      await this.refreshSummary();
    });
  }

  async refreshSummary(): Promise<void> {
    const model = this.select("summary-model-filter").value || undefined;
    await this.guard(async () => {
      const cells = await this.api.reviewSummary(model);
      this.el("summary-bars").innerHTML = renderSummaryBars(cells);
      const rows = await this.api.metrics(model);
      this.el("metrics-table").innerHTML = renderMetricsTable(rows);
    });
  }
}

export function createApp(doc: Document, api: ApiClient, options: AppOptions = {}): ConsoleApp {
  return new ConsoleApp(doc, api, options);
}
