/** Wire types mirroring the service JSON. No independent domain state. */

export type Gender = "male" | "female";
export type Urgency = "elective" | "urgent" | "emergency";
export type PregnancyStatus = "pregnant" | "not_pregnant" | "unknown";
export type LactationStatus = "lactating" | "not_lactating" | "unknown";
export type ResultLabel = "Suitable" | "Risky" | "NA";

export const INTERACTION_CLASSES = [
  "Age",
  "Comorbidities",
  "Contraindications",
  "Dose",
  "Genetics",
  "Lactation",
  "Pregnancy",
  "Warnings",
] as const;
export type InteractionClass = (typeof INTERACTION_CLASSES)[number];

export const REVIEW_METRICS = ["msa", "did", "psda", "pss", "ga"] as const;
export type ReviewMetric = (typeof REVIEW_METRICS)[number];

export const GRADING_LEGEND =
  "5: Excellent; 4: Very Good; 3: Good; 2: Average; 1: Poor";

export interface Diagnosis {
  code: string;
  label: string;
}

export interface Measurement {
  name: string;
  value: number;
  unit: string;
  taken_at: string;
}

export interface MedicationCourse {
  drug_name: string;
  dose_value: number;
  dose_unit: string;
  schedule: string;
  start: string;
  end?: string;
}

export interface Admission {
  urgency: Urgency;
  admitted_at: string;
  discharged_at?: string;
}

export interface PatientProfile {
  id: string;
  synthetic_name: string;
  age: number;
  gender: Gender;
  race: string;
  blood_type: string;
  allergies: string[];
  diagnoses: Diagnosis[];
  comorbidities: string[];
  medication_courses: MedicationCourse[];
  lab_results: Measurement[];
  vitals: Measurement[];
  admission?: Admission;
  pregnancy_status: PregnancyStatus;
  lactation_status: LactationStatus;
  surgical_history: string[];
  verified: boolean;
}

export interface Violation {
  field: string;
  message: string;
}

export interface CheckResult {
  result: ResultLabel;
  reason: string;
}

export interface SuitabilityReport {
  id: string;
  patient_id: string;
  medication_id: string;
  model_id: string;
  rag_enabled: boolean;
  checks: Record<string, CheckResult> | null;
  overall: { score: number; reason: string } | null;
  retrieved_chunk_ids: string[];
  raw_response: string;
  created_at: string;
  status: "Valid" | "Invalid";
  failure_reason: string | null;
}

export interface RetrievedChunk {
  chunk_id: string;
  section: string | null;
  text: string | null;
  similarity: number | null;
}

export type JobState = "Pending" | "Running" | "Done" | "Failed";

export interface AssessmentJob {
  job_id: string;
  patient_id: string;
  medication_id: string;
  model_id: string;
  rag_enabled: boolean;
  state: JobState;
  report_id: string | null;
  error: string | null;
  report?: SuitabilityReport;
  retrieved_chunks?: RetrievedChunk[];
}

export interface MedicationInfo {
  id: string;
  name: string;
  smpc_doc_id: string;
  smpc_available: boolean;
  indexed: boolean;
}

export interface ReviewSubmission {
  reviewer_id: string;
  patient_id: string;
  model_id: string;
  rag_enabled: boolean;
  msa: number;
  did: number;
  psda: number;
  pss: number;
  ga: number;
  notes?: string;
}

export interface ReviewSummaryCell {
  model: string;
  rag: boolean;
  msa: number;
  did: number;
  psda: number;
  pss: number;
  ga: number;
  overall: number;
  review_count: number;
}

export interface MetricsRow {
  model: string;
  rag: boolean;
  class: string;
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
  support: number;
  invalid_count: number;
}
