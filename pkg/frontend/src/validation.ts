/** Client-side mirror of the server's profile invariants.
 *
 * Purely advisory: everything here is re-checked server-side, and the form
 * surfaces the server's 422 violation list the same way. */

import type { PatientProfile, Violation } from "./types";

const GENDERS = ["male", "female"];
const URGENCIES = ["elective", "urgent", "emergency"];
const PREGNANCY = ["pregnant", "not_pregnant", "unknown"];
const LACTATION = ["lactating", "not_lactating", "unknown"];

export function validateProfile(profile: PatientProfile): Violation[] {
  const violations: Violation[] = [];

  if (!Number.isInteger(profile.age)) {
    violations.push({ field: "age", message: "age must be an integer" });
  } else if (profile.age < 0 || profile.age > 150) {
    violations.push({ field: "age", message: "age must be between 0 and 150" });
  }

  if (!GENDERS.includes(profile.gender)) {
    violations.push({ field: "gender", message: "gender must be one of: male, female" });
  }

  if (profile.admission && !URGENCIES.includes(profile.admission.urgency)) {
    violations.push({
      field: "admission.urgency",
      message: "urgency must be one of: elective, urgent, emergency",
    });
  }

  if (!PREGNANCY.includes(profile.pregnancy_status)) {
    violations.push({ field: "pregnancy_status", message: "unrecognized pregnancy_status value" });
  }
  if (!LACTATION.includes(profile.lactation_status)) {
    violations.push({ field: "lactation_status", message: "unrecognized lactation_status value" });
  }

  if (profile.gender === "male") {
    if (profile.pregnancy_status !== "not_pregnant") {
      violations.push({
        field: "pregnancy_status",
        message: "pregnancy_status inconsistent with gender",
      });
    }
    if (profile.lactation_status !== "not_lactating") {
      violations.push({
        field: "lactation_status",
        message: "lactation_status inconsistent with gender",
      });
    }
  }

  profile.medication_courses.forEach((course, i) => {
    const prefix = `medication_courses[${i}]`;
    if (!course.drug_name.trim()) {
      violations.push({ field: `${prefix}.drug_name`, message: "drug_name must be non-empty" });
    }
    if (!Number.isFinite(course.dose_value)) {
      violations.push({ field: `${prefix}.dose_value`, message: "dose_value must be a number" });
    } else if (course.dose_value <= 0) {
      violations.push({ field: `${prefix}.dose_value`, message: "dose_value must be positive" });
    }
    if (!isIsoDate(course.start)) {
      violations.push({ field: `${prefix}.start`, message: "start must be an ISO date" });
    }
    if (course.end !== undefined) {
      if (!isIsoDate(course.end)) {
        violations.push({ field: `${prefix}.end`, message: "end must be an ISO date" });
      } else if (isIsoDate(course.start) && course.end < course.start) {
        violations.push({ field: `${prefix}.end`, message: "course end precedes start" });
      }
    }
  });

  return violations;
}

function isIsoDate(value: string): boolean {
  return /^\d{4}-\d{2}-\d{2}$/.test(value) && !Number.isNaN(Date.parse(value));
}
