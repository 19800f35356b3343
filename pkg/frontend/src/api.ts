/** Typed client for the service HTTP API. The fetch implementation is
 * injected so tests and non-browser hosts can supply their own. */

import type {
  AssessmentJob,
  MedicationInfo,
  MetricsRow,
  PatientProfile,
  ReviewSubmission,
  ReviewSummaryCell,
  Violation,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: unknown = null,
  ) {
    super(message);
  }

  get violations(): Violation[] {
    return Array.isArray(this.details) ? (this.details as Violation[]) : [];
  }
}

/** Service unreachable (network failure, not an HTTP error). */
export class OfflineError extends Error {}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
    private readonly token: string | null = null,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new OfflineError(`service unreachable: ${String(err)}`);
    }
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      const code = payload?.code ?? "HttpError";
      const message = payload?.message ?? `HTTP ${response.status}`;
      throw new ApiError(response.status, code, message, payload?.details ?? null);
    }
    return payload as T;
  }

  createPatient(profile: PatientProfile): Promise<{ id: string }> {
    return this.request("POST", "/patients", profile);
  }

  updatePatient(profile: PatientProfile): Promise<PatientProfile> {
    return this.request("PUT", `/patients/${encodeURIComponent(profile.id)}`, profile);
  }

  verifyPatient(id: string): Promise<PatientProfile> {
    return this.request("POST", `/patients/${encodeURIComponent(id)}/verify`);
  }

  getPatient(id: string): Promise<PatientProfile> {
    return this.request("GET", `/patients/${encodeURIComponent(id)}`);
  }

  async listPatients(): Promise<PatientProfile[]> {
    const body = await this.request<{ patients: PatientProfile[] }>("GET", "/patients");
    return body.patients;
  }

  async listMedications(): Promise<MedicationInfo[]> {
    const body = await this.request<{ medications: MedicationInfo[] }>("GET", "/medications");
    return body.medications;
  }

  async listModels(): Promise<{ id: string; kind: string }[]> {
    const body = await this.request<{ models: { id: string; kind: string }[] }>("GET", "/models");
    return body.models;
  }

  async startAssessment(args: {
    patient_id: string;
    medication_id: string;
    model_id: string;
    rag: boolean;
  }): Promise<string> {
    const body = await this.request<{ job_id: string }>("POST", "/assessments", args);
    return body.job_id;
  }

  getAssessment(jobId: string): Promise<AssessmentJob> {
    return this.request("GET", `/assessments/${encodeURIComponent(jobId)}`);
  }

  submitReview(review: ReviewSubmission): Promise<{ id: string }> {
    return this.request("POST", "/reviews", review);
  }

  async reviewSummary(model?: string, rag?: boolean): Promise<ReviewSummaryCell[]> {
    const params = new URLSearchParams();
    if (model) params.set("model", model);
    if (rag !== undefined) params.set("rag", String(rag));
    const query = params.toString();
    const body = await this.request<{ cells: ReviewSummaryCell[] }>(
      "GET",
      `/reviews/summary${query ? `?${query}` : ""}`,
    );
    return body.cells;
  }

  async metrics(model?: string, rag?: boolean): Promise<MetricsRow[]> {
    const params = new URLSearchParams();
    if (model) params.set("model", model);
    if (rag !== undefined) params.set("rag", String(rag));
    const query = params.toString();
    const body = await this.request<{ rows: MetricsRow[] }>(
      "GET",
      `/metrics${query ? `?${query}` : ""}`,
    );
    return body.rows;
  }
}
