#!/usr/bin/env python3
"""Author the 25 patient profile fixtures.

Profiles are table-driven rather than randomized so every ground-truth rule
in make_truth.py has known triggers. Regenerating overwrites
fixtures/profiles/*.json byte-identically.
"""
from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT_DIR = ROOT / "fixtures" / "profiles"

# (id, name, age, gender, race, blood, pregnancy, lactation, comorbidities,
#  allergies, current_meds, past_meds, labs, vitals, urgency, surgical)
# current_meds: (drug, dose_value, unit, schedule, start)
# past_meds add an end date.
PROFILES = [
    ("p001", "Margaret Hale", 78, "female", "white", "A+", "not_pregnant", "not_lactating",
     ["atrial fibrillation", "rheumatic heart disease", "hypertension"],
     ["penicillin"],
     [("Warfarin", 5.0, "mg", "once daily", "2024-01-12"),
      ("Lisinopril", 10.0, "mg", "once daily", "2023-06-01")],
     [("Digoxin", 125.0, "microgram", "once daily", "2022-03-01", "2023-05-20")],
     [("INR", 2.4, "ratio"), ("eGFR", 55.0, "mL/min"), ("potassium", 4.2, "mmol/L")],
     [("heart rate", 88.0, "bpm"), ("systolic blood pressure", 142.0, "mmHg")],
     "urgent", ["mitral valve repair"]),
    ("p002", "Thomas Wren", 67, "male", "white", "O+", "not_pregnant", "not_lactating",
     ["type 2 diabetes", "obesity", "hypertension"],
     [],
     [("Metformin", 1000.0, "mg", "twice daily", "2021-09-15"),
      ("Lisinopril", 20.0, "mg", "once daily", "2022-02-10")],
     [],
     [("eGFR", 48.0, "mL/min"), ("HbA1c", 7.9, "%")],
     [("systolic blood pressure", 151.0, "mmHg"), ("heart rate", 76.0, "bpm")],
     "elective", []),
    ("p003", "Aisha Diallo", 29, "female", "black", "B+", "pregnant", "not_lactating",
     ["hypothyroidism"],
     [],
     [("Levothyroxine", 100.0, "microgram", "once daily", "2023-11-02")],
     [],
     [("TSH", 3.1, "mIU/L"), ("eGFR", 110.0, "mL/min")],
     [("heart rate", 82.0, "bpm"), ("systolic blood pressure", 118.0, "mmHg")],
     "elective", []),
    ("p004", "Chen Wei", 54, "male", "asian", "AB+", "not_pregnant", "not_lactating",
     ["peptic ulcer disease", "gastro-oesophageal reflux disease", "CYP2C19 poor metaboliser"],
     ["aspirin"],
     [("Omeprazole", 20.0, "mg", "once daily", "2024-02-20")],
     [],
     [("eGFR", 88.0, "mL/min"), ("haemoglobin", 13.1, "g/dL")],
     [("heart rate", 71.0, "bpm")],
     "elective", []),
    ("p005", "Rosa Alvarez", 83, "female", "hispanic", "A-", "not_pregnant", "not_lactating",
     ["heart failure", "chronic kidney disease", "type 2 diabetes"],
     ["sulfonamides"],
     [("Metformin", 500.0, "mg", "twice daily", "2020-05-05"),
      ("Furosemide", 40.0, "mg", "once daily", "2023-01-15")],
     [],
     [("eGFR", 28.0, "mL/min"), ("potassium", 5.1, "mmol/L"), ("BNP", 820.0, "pg/mL")],
     [("systolic blood pressure", 104.0, "mmHg"), ("heart rate", 95.0, "bpm")],
     "emergency", []),
    ("p006", "John Okafor", 45, "male", "black", "O-", "not_pregnant", "not_lactating",
     ["hypertension"],
     [],
     [("Lisinopril", 10.0, "mg", "once daily", "2023-08-01")],
     [],
     [("eGFR", 92.0, "mL/min"), ("potassium", 4.0, "mmol/L")],
     [("systolic blood pressure", 138.0, "mmHg")],
     "elective", []),
    ("p007", "Elsie Morgan", 71, "female", "white", "B-", "not_pregnant", "not_lactating",
     ["osteoporosis", "gastro-oesophageal reflux disease"],
     [],
     [("Omeprazole", 20.0, "mg", "once daily", "2022-10-10"),
      ("Colecalciferol", 800.0, "IU", "once daily", "2022-10-10")],
     [],
     [("eGFR", 61.0, "mL/min"), ("calcium", 2.3, "mmol/L")],
     [("heart rate", 68.0, "bpm")],
     "elective", ["wrist fracture fixation"]),
    ("p008", "David Lindqvist", 58, "male", "white", "A+", "not_pregnant", "not_lactating",
     ["atrial fibrillation", "type 2 diabetes"],
     [],
     [("Warfarin", 6.0, "mg", "once daily", "2023-04-18"),
      ("Metformin", 850.0, "mg", "twice daily", "2019-07-22"),
      ("Amiodarone", 200.0, "mg", "once daily", "2023-04-25")],
     [],
     [("INR", 3.8, "ratio"), ("eGFR", 72.0, "mL/min"), ("HbA1c", 7.1, "%")],
     [("heart rate", 64.0, "bpm")],
     "urgent", []),
    ("p009", "Fatima Noor", 34, "female", "middle eastern", "O+", "not_pregnant", "lactating",
     ["postpartum thyroiditis", "hypothyroidism"],
     [],
     [("Levothyroxine", 75.0, "microgram", "once daily", "2024-03-30")],
     [],
     [("TSH", 6.2, "mIU/L")],
     [("heart rate", 74.0, "bpm")],
     "elective", ["caesarean section"]),
    ("p010", "George Papas", 88, "male", "white", "AB-", "not_pregnant", "not_lactating",
     ["heart failure", "chronic kidney disease", "anaemia"],
     ["penicillin"],
     [("Warfarin", 3.0, "mg", "once daily", "2022-12-01"),
      ("Lisinopril", 5.0, "mg", "once daily", "2021-02-14"),
      ("Omeprazole", 20.0, "mg", "once daily", "2023-09-09")],
     [],
     [("eGFR", 25.0, "mL/min"), ("INR", 2.9, "ratio"), ("haemoglobin", 9.8, "g/dL")],
     [("systolic blood pressure", 108.0, "mmHg"), ("heart rate", 91.0, "bpm")],
     "emergency", ["coronary artery bypass graft"]),
    ("p011", "Hannah Price", 26, "female", "white", "O+", "pregnant", "not_lactating",
     ["gestational hypertension"],
     [],
     [("Labetalol", 100.0, "mg", "twice daily", "2024-04-02")],
     [],
     [("eGFR", 105.0, "mL/min"), ("urine protein", 0.2, "g/L")],
     [("systolic blood pressure", 146.0, "mmHg")],
     "urgent", []),
    ("p012", "Ivan Petrov", 61, "male", "white", "B+", "not_pregnant", "not_lactating",
     ["alcohol use disorder", "alcoholic liver disease", "gastritis"],
     [],
     [("Omeprazole", 20.0, "mg", "once daily", "2024-01-05"),
      ("Thiamine", 100.0, "mg", "once daily", "2024-01-05")],
     [],
     [("ALT", 94.0, "U/L"), ("eGFR", 66.0, "mL/min")],
     [("heart rate", 84.0, "bpm")],
     "urgent", []),
    ("p013", "Janet Mbeki", 49, "female", "black", "A+", "not_pregnant", "not_lactating",
     ["hyperthyroidism", "thyrotoxicosis"],
     [],
     [("Carbimazole", 20.0, "mg", "once daily", "2024-02-01")],
     [],
     [("TSH", 0.05, "mIU/L"), ("free T4", 32.0, "pmol/L")],
     [("heart rate", 104.0, "bpm")],
     "elective", []),
    ("p014", "Kenji Tanaka", 73, "male", "asian", "O+", "not_pregnant", "not_lactating",
     ["type 2 diabetes", "peripheral neuropathy", "vitamin B12 deficiency"],
     [],
     [("Metformin", 1000.0, "mg", "twice daily", "2017-03-11")],
     [],
     [("eGFR", 52.0, "mL/min"), ("vitamin B12", 142.0, "ng/L"), ("HbA1c", 7.4, "%")],
     [("heart rate", 69.0, "bpm")],
     "elective", []),
    ("p015", "Laura Schmidt", 31, "female", "white", "A-", "not_pregnant", "lactating",
     ["postnatal depression"],
     [],
     [("Sertraline", 50.0, "mg", "once daily", "2024-05-01")],
     [],
     [("eGFR", 101.0, "mL/min")],
     [("heart rate", 72.0, "bpm")],
     "elective", []),
    ("p016", "Mohammed Farah", 69, "male", "black", "B+", "not_pregnant", "not_lactating",
     ["sepsis", "pneumonia", "type 2 diabetes"],
     ["penicillin"],
     [("Metformin", 500.0, "mg", "twice daily", "2018-06-30"),
      ("Insulin glargine", 18.0, "unit", "once daily", "2023-11-20")],
     [],
     [("eGFR", 41.0, "mL/min"), ("lactate", 2.8, "mmol/L"), ("CRP", 180.0, "mg/L")],
     [("temperature", 38.6, "C"), ("heart rate", 110.0, "bpm")],
     "emergency", []),
    ("p017", "Nancy O'Brien", 77, "female", "white", "O-", "not_pregnant", "not_lactating",
     ["atrial fibrillation", "osteoporosis", "hypothyroidism"],
     ["sulfonamides"],
     [("Warfarin", 4.0, "mg", "once daily", "2021-08-19"),
      ("Levothyroxine", 125.0, "microgram", "once daily", "2015-01-26"),
      ("Omeprazole", 20.0, "mg", "once daily", "2022-07-07")],
     [],
     [("INR", 2.1, "ratio"), ("eGFR", 58.0, "mL/min"), ("TSH", 2.8, "mIU/L")],
     [("heart rate", 78.0, "bpm")],
     "elective", ["hip replacement"]),
    ("p018", "Omar Haddad", 52, "male", "middle eastern", "A+", "not_pregnant", "not_lactating",
     ["recent myocardial infarction", "coronary artery disease"],
     [],
     [("Aspirin", 75.0, "mg", "once daily", "2024-05-28"),
      ("Atorvastatin", 80.0, "mg", "once daily", "2024-05-28")],
     [],
     [("troponin", 890.0, "ng/L"), ("eGFR", 81.0, "mL/min")],
     [("heart rate", 58.0, "bpm"), ("systolic blood pressure", 122.0, "mmHg")],
     "urgent", ["percutaneous coronary intervention"]),
    ("p019", "Priya Sharma", 42, "female", "asian", "B-", "pregnant", "not_lactating",
     ["type 2 diabetes"],
     [],
     [("Insulin aspart", 8.0, "unit", "three times daily", "2024-02-14")],
     [("Metformin", 500.0, "mg", "twice daily", "2021-01-10", "2024-02-13")],
     [("eGFR", 98.0, "mL/min"), ("HbA1c", 6.4, "%")],
     [("systolic blood pressure", 124.0, "mmHg")],
     "elective", []),
    ("p020", "Quentin Dupont", 64, "male", "white", "O+", "not_pregnant", "not_lactating",
     ["chronic kidney disease", "hypertension"],
     [],
     [("Amlodipine", 10.0, "mg", "once daily", "2022-04-04")],
     [],
     [("eGFR", 22.0, "mL/min"), ("potassium", 4.9, "mmol/L"), ("creatinine", 260.0, "umol/L")],
     [("systolic blood pressure", 149.0, "mmHg")],
     "urgent", []),
    ("p021", "Ruth Goldberg", 80, "female", "white", "AB+", "not_pregnant", "not_lactating",
     ["heart failure", "atrial fibrillation", "chronic kidney disease"],
     ["penicillin", "sulfonamides"],
     [("Warfarin", 7.0, "mg", "once daily", "2020-10-31"),
      ("Spironolactone", 25.0, "mg", "once daily", "2023-03-03"),
      ("Lisinopril", 10.0, "mg", "once daily", "2023-03-03")],
     [],
     [("eGFR", 34.0, "mL/min"), ("potassium", 5.4, "mmol/L"), ("INR", 2.6, "ratio")],
     [("heart rate", 87.0, "bpm"), ("systolic blood pressure", 112.0, "mmHg")],
     "emergency", []),
    ("p022", "Samuel Adeyemi", 38, "male", "black", "A+", "not_pregnant", "not_lactating",
     ["deep vein thrombosis", "CYP2C9 variant carrier"],
     [],
     [("Warfarin", 5.0, "mg", "once daily", "2024-04-22")],
     [],
     [("INR", 3.2, "ratio"), ("eGFR", 96.0, "mL/min")],
     [("heart rate", 75.0, "bpm")],
     "elective", []),
    ("p023", "Teresa Romano", 57, "female", "white", "O+", "not_pregnant", "not_lactating",
     ["hypothyroidism", "type 2 diabetes", "obesity"],
     [],
     [("Levothyroxine", 100.0, "microgram", "once daily", "2019-09-01"),
      ("Metformin", 500.0, "mg", "three times daily", "2020-06-18")],
     [],
     [("TSH", 2.5, "mIU/L"), ("eGFR", 75.0, "mL/min"), ("HbA1c", 7.0, "%")],
     [("heart rate", 70.0, "bpm")],
     "elective", []),
    ("p024", "Umar Khan", 70, "male", "asian", "B+", "not_pregnant", "not_lactating",
     ["gastro-oesophageal reflux disease", "CYP2C19 ultra-rapid metaboliser", "Helicobacter pylori infection"],
     [],
     [("Omeprazole", 20.0, "mg", "once daily", "2024-03-12")],
     [],
     [("eGFR", 63.0, "mL/min")],
     [("heart rate", 77.0, "bpm")],
     "elective", []),
    ("p025", "Vera Kovacs", 66, "female", "white", "A+", "not_pregnant", "not_lactating",
     ["hypertension", "chronic migraine"],
     [],
     [("Lisinopril", 20.0, "mg", "once daily", "2021-11-11"),
      ("Ibuprofen", 400.0, "mg", "as required", "2023-02-02")],
     [],
     [("eGFR", 67.0, "mL/min"), ("potassium", 4.4, "mmol/L")],
     [("systolic blood pressure", 144.0, "mmHg")],
     "elective", []),
    # Extra profile used by the console walkthrough and its scripted test;
    # not part of the 25-profile experiment cohort.
    ("ui-demo", "Walter Demo", 72, "male", "white", "O+", "not_pregnant", "not_lactating",
     ["atrial fibrillation", "hypertension"],
     ["penicillin"],
     [("Lisinopril", 10.0, "mg", "once daily", "2022-08-08")],
     [],
     [("INR", 1.1, "ratio"), ("eGFR", 64.0, "mL/min")],
     [("heart rate", 80.0, "bpm")],
     "elective", []),
]

ADMISSION_TIMES = {
    "elective": "2024-06-03T09:00:00",
    "urgent": "2024-06-03T14:30:00",
    "emergency": "2024-06-03T02:15:00",
}

DIAGNOSIS_CODES = {
    "atrial fibrillation": "I48",
    "rheumatic heart disease": "I09",
    "hypertension": "I10",
    "type 2 diabetes": "E11",
    "obesity": "E66",
    "heart failure": "I50",
    "chronic kidney disease": "N18",
    "peptic ulcer disease": "K27",
    "gastro-oesophageal reflux disease": "K21",
    "osteoporosis": "M81",
    "hypothyroidism": "E03",
    "hyperthyroidism": "E05",
    "thyrotoxicosis": "E05.9",
    "sepsis": "A41",
    "pneumonia": "J18",
    "anaemia": "D64",
    "alcohol use disorder": "F10",
    "alcoholic liver disease": "K70",
    "gastritis": "K29",
    "gestational hypertension": "O13",
    "postpartum thyroiditis": "O90.5",
    "postnatal depression": "F53",
    "peripheral neuropathy": "G62",
    "vitamin B12 deficiency": "E53.8",
    "recent myocardial infarction": "I21",
    "coronary artery disease": "I25",
    "deep vein thrombosis": "I82",
    "chronic migraine": "G43",
    "Helicobacter pylori infection": "B96.81",
    "CYP2C19 poor metaboliser": "Z99.9",
    "CYP2C19 ultra-rapid metaboliser": "Z99.9",
    "CYP2C9 variant carrier": "Z99.9",
}


def expand(row) -> dict:
    (pid, name, age, gender, race, blood, preg, lact, comorbs, allergies,
     current, past, labs, vitals, urgency, surgical) = row
    courses = []
    for drug, dose, unit, schedule, start in current:
        courses.append(
            {"drug_name": drug, "dose_value": dose, "dose_unit": unit,
             "schedule": schedule, "start": start}
        )
    for drug, dose, unit, schedule, start, end in past:
        courses.append(
            {"drug_name": drug, "dose_value": dose, "dose_unit": unit,
             "schedule": schedule, "start": start, "end": end}
        )
    return {
        "id": pid,
        "synthetic_name": name,
        "age": age,
        "gender": gender,
        "race": race,
        "blood_type": blood,
        "allergies": allergies,
        "diagnoses": [
            {"code": DIAGNOSIS_CODES[c], "label": c} for c in comorbs
        ],
        "comorbidities": comorbs,
        "medication_courses": courses,
        "lab_results": [
            {"name": n, "value": v, "unit": u, "taken_at": "2024-06-02T08:00:00"}
            for n, v, u in labs
        ],
        "vitals": [
            {"name": n, "value": v, "unit": u, "taken_at": "2024-06-03T06:00:00"}
            for n, v, u in vitals
        ],
        "admission": {"urgency": urgency, "admitted_at": ADMISSION_TIMES[urgency]},
        "pregnancy_status": preg,
        "lactation_status": lact,
        "surgical_history": surgical,
        "verified": True,
    }


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for row in PROFILES:
        profile = expand(row)
        path = OUT_DIR / f"{profile['id']}.json"
        path.write_text(json.dumps(profile, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(PROFILES)} profiles to {OUT_DIR}")


if __name__ == "__main__":
    main()
