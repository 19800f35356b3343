#!/usr/bin/env python3
"""Curate the ground-truth labels from the SmPC fixture content.

Each rule below encodes a statement from one of the five SmPC fixtures
(contraindication sections, warnings, dosing limits, pregnancy and
lactation guidance, pharmacogenetics). Output is frozen into
fixtures/truth/ground_truth.json; the evaluation harness never sees these
rules, only the resulting labels.
"""
from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
PROFILE_DIR = ROOT / "fixtures" / "profiles"
OUT_PATH = ROOT / "fixtures" / "truth" / "ground_truth.json"

MEDICATIONS = ["warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"]

CLASSES = [
    "Age", "Comorbidities", "Contraindications", "Dose",
    "Genetics", "Lactation", "Pregnancy", "Warnings",
]


def lab(profile: dict, name: str) -> float | None:
    for entry in profile["lab_results"]:
        if entry["name"] == name:
            return entry["value"]
    return None


def comorb(profile: dict, *needles: str) -> bool:
    joined = " | ".join(c.lower() for c in profile["comorbidities"])
    return any(n in joined for n in needles)


def current_drugs(profile: dict) -> set[str]:
    return {
        c["drug_name"].lower()
        for c in profile["medication_courses"]
        if "end" not in c
    }


def label_age(profile: dict, med: str) -> str:
    age = profile["age"]
    if med == "warfarin":
        return "Risky" if age >= 75 else "Suitable"
    if med == "metformin":
        return "Risky" if age >= 80 else "Suitable"
    if med == "levothyroxine":
        return "Risky" if age >= 70 else "Suitable"
    if med == "lisinopril":
        return "Risky" if age >= 80 else "Suitable"
    if med == "omeprazole":
        return "Risky" if age >= 75 and comorb(profile, "osteoporosis") else "Suitable"
    raise ValueError(med)


def label_comorbidities(profile: dict, med: str) -> str:
    if med == "warfarin":
        risky = comorb(profile, "peptic ulcer", "heart failure", "sepsis", "chronic kidney disease")
    elif med == "metformin":
        risky = comorb(profile, "heart failure", "sepsis", "alcohol", "chronic kidney disease")
    elif med == "levothyroxine":
        risky = comorb(profile, "coronary artery disease", "atrial fibrillation", "osteoporosis")
    elif med == "lisinopril":
        risky = comorb(profile, "chronic kidney disease", "renal artery stenosis")
    elif med == "omeprazole":
        risky = comorb(profile, "osteoporosis")
    else:
        raise ValueError(med)
    return "Risky" if risky else "Suitable"


def label_contraindications(profile: dict, med: str) -> str:
    pregnant = profile["pregnancy_status"] == "pregnant"
    egfr = lab(profile, "eGFR")
    if med == "warfarin":
        risky = pregnant or comorb(
            profile, "haemorrhagic stroke", "active bleeding", "peptic ulcer"
        )
    elif med == "metformin":
        risky = (egfr is not None and egfr < 30) or comorb(profile, "sepsis", "alcohol")
    elif med == "levothyroxine":
        risky = comorb(profile, "thyrotoxicosis", "recent myocardial infarction")
    elif med == "lisinopril":
        risky = pregnant or comorb(profile, "angioedema")
    elif med == "omeprazole":
        risky = "omeprazole" in {a.lower() for a in profile["allergies"]}
    else:
        raise ValueError(med)
    return "Risky" if risky else "Suitable"


def label_dose(profile: dict, med: str) -> str:
    age = profile["age"]
    egfr = lab(profile, "eGFR")
    if med == "warfarin":
        return "Risky" if age >= 75 else "Suitable"
    if med == "metformin":
        return "Risky" if egfr is not None and egfr < 60 else "Suitable"
    if med == "levothyroxine":
        return "Risky" if age >= 70 or comorb(profile, "coronary artery disease") else "Suitable"
    if med == "lisinopril":
        return "Risky" if (egfr is not None and egfr < 30) or age >= 80 else "Suitable"
    if med == "omeprazole":
        return "Risky" if comorb(profile, "liver disease") else "Suitable"
    raise ValueError(med)


def label_genetics(profile: dict, med: str) -> str:
    if med == "warfarin" and comorb(profile, "cyp2c9"):
        return "Risky"
    if med == "omeprazole" and comorb(profile, "cyp2c19"):
        return "Risky"
    return "Suitable"


def label_lactation(profile: dict, med: str) -> str:
    if profile["gender"] == "male":
        return "NA"
    if profile["lactation_status"] != "lactating":
        return "Suitable"
    # Per the fixture SmPCs only lisinopril advises against breast-feeding.
    return "Risky" if med == "lisinopril" else "Suitable"


def label_pregnancy(profile: dict, med: str) -> str:
    if profile["gender"] == "male":
        return "NA"
    if profile["pregnancy_status"] == "pregnant":
        return "Suitable" if med in ("levothyroxine", "omeprazole") else "Risky"
    if profile["pregnancy_status"] == "unknown" and profile["age"] < 55:
        return "Risky" if med in ("warfarin", "lisinopril") else "Suitable"
    return "Suitable"


def label_warnings(profile: dict, med: str) -> str:
    drugs = current_drugs(profile)
    if med == "warfarin":
        interacting = {"amiodarone", "metronidazole", "trimethoprim", "omeprazole",
                       "ibuprofen", "aspirin", "levothyroxine"}
        risky = bool(drugs & interacting)
    elif med == "metformin":
        risky = "cimetidine" in drugs or comorb(profile, "anaemia", "neuropathy", "b12")
    elif med == "levothyroxine":
        risky = bool(drugs & {"omeprazole", "warfarin", "calcium carbonate"})
    elif med == "lisinopril":
        risky = bool(drugs & {"spironolactone", "trimethoprim", "lithium", "ibuprofen"})
    elif med == "omeprazole":
        risky = bool(drugs & {"clopidogrel", "warfarin", "levothyroxine"})
    else:
        raise ValueError(med)
    return "Risky" if risky else "Suitable"


LABELERS = {
    "Age": label_age,
    "Comorbidities": label_comorbidities,
    "Contraindications": label_contraindications,
    "Dose": label_dose,
    "Genetics": label_genetics,
    "Lactation": label_lactation,
    "Pregnancy": label_pregnancy,
    "Warnings": label_warnings,
}


def main() -> None:
    records = []
    for path in sorted(PROFILE_DIR.glob("*.json")):
        profile = json.loads(path.read_text(encoding="utf-8"))
        for med in MEDICATIONS:
            for cls in CLASSES:
                records.append(
                    {
                        "patient_id": profile["id"],
                        "medication_id": med,
                        "class": cls,
                        "label": LABELERS[cls](profile, med),
                    }
                )
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    counts = {"Suitable": 0, "Risky": 0, "NA": 0}
    for r in records:
        counts[r["label"]] += 1
    print(f"wrote {len(records)} truth entries to {OUT_PATH}: {counts}")


if __name__ == "__main__":
    main()
