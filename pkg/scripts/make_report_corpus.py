#!/usr/bin/env python3
"""Author the malformed-output corpus for the report parser.

Every case's expected outcome is assigned here by construction, by applying
the output-schema rules manually; the corpus is never produced by running
the parser itself. Frozen into fixtures/report_corpus/cases.json.
"""
from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT_PATH = ROOT / "fixtures" / "report_corpus" / "cases.json"

CLASSES = [
    "Age", "Dose", "Comorbidities", "Contraindications",
    "Pregnancy", "Lactation", "Warnings", "Genetics",
]
CANONICAL = [
    "Age", "Comorbidities", "Contraindications", "Dose",
    "Genetics", "Lactation", "Pregnancy", "Warnings",
]


def base_body(**overrides) -> dict:
    body = {cls: {"result": "Suitable", "reason": f"{cls.lower()} ok"} for cls in CLASSES}
    body["Overall Suitability"] = {"score": 90, "reason": "fine"}
    body.update(overrides)
    return body


def dumps(body: dict) -> str:
    return json.dumps(body, indent=2)


def case(name: str, raw: str, status: str, reason: str | None = None, **extra) -> dict:
    entry = {"name": name, "raw": raw, "status": status}
    if reason is not None:
        entry["reason"] = reason
    entry.update(extra)
    return entry


def main() -> None:
    cases: list[dict] = []

    # --- inputs that must parse Valid -------------------------------------
    plain = dumps(base_body())
    cases.append(case("plain_object", plain, "Valid", score=90))
    cases.append(case("fenced_json", f"```json\n{plain}\n```", "Valid", score=90))
    cases.append(
        case("prose_wrapped", f"Here is my assessment: {plain} Hope this helps.", "Valid", score=90)
    )
    cases.append(case("leading_line", f"Assessment complete.\n{plain}", "Valid", score=90))

    lower_keys = {k.lower(): v for k, v in base_body().items()}
    cases.append(case("lowercase_keys", dumps(lower_keys), "Valid", score=90))

    spaced_keys = {f"  {k} ": v for k, v in base_body().items()}
    cases.append(case("whitespace_keys", dumps(spaced_keys), "Valid", score=90))

    lower_results = base_body()
    for cls in CLASSES:
        lower_results[cls] = {"result": "suitable", "reason": "ok"}
    cases.append(case("lowercase_results", dumps(lower_results), "Valid", score=90))

    risky = base_body(Age={"result": "RISKY", "reason": "old age"})
    cases.append(case("uppercase_risky", dumps(risky), "Valid", score=90, age_result="Risky"))

    for variant in ("N/A", "na", "NA", "Not Applicable", "n/a"):
        body = base_body(Pregnancy={"result": variant, "reason": ""})
        cases.append(
            case(
                f"na_variant_{variant.replace('/', '_').replace(' ', '_')}",
                dumps(body),
                "Valid",
                score=90,
                pregnancy_result="NA",
            )
        )

    body = base_body()
    overall = body.pop("Overall Suitability")
    body["OverallSuitability"] = overall
    cases.append(case("overall_key_variant", dumps(body), "Valid", score=90))

    body = base_body()
    overall = body.pop("Overall Suitability")
    body["overall suitability"] = overall
    cases.append(case("overall_key_lower", dumps(body), "Valid", score=90))

    cases.append(
        case(
            "score_numeric_string",
            dumps(base_body(**{"Overall Suitability": {"score": "85", "reason": "ok"}})),
            "Valid",
            score=85,
        )
    )
    cases.append(
        case(
            "score_float",
            dumps(base_body(**{"Overall Suitability": {"score": 85.0, "reason": "ok"}})),
            "Valid",
            score=85,
        )
    )
    cases.append(
        case("score_zero", dumps(base_body(**{"Overall Suitability": {"score": 0, "reason": "bad"}})), "Valid", score=0)
    )
    cases.append(
        case("score_hundred", dumps(base_body(**{"Overall Suitability": {"score": 100, "reason": "good"}})), "Valid", score=100)
    )

    extra_key = base_body(Notes="model chatter")
    cases.append(case("extra_top_level_key", dumps(extra_key), "Valid", score=90))

    brace_reason = base_body(Age={"result": "Suitable", "reason": "see {SmPC 4.2} for details"})
    cases.append(case("brace_inside_string", dumps(brace_reason), "Valid", score=90))

    quote_reason = base_body(Dose={"result": "Suitable", "reason": 'within the \\"usual\\" range'})
    cases.append(case("escaped_quote_in_string", dumps(json.loads(dumps(quote_reason))), "Valid", score=90))

    missing_reason = base_body(Warnings={"result": "Suitable"})
    cases.append(case("missing_reason_key", dumps(missing_reason), "Valid", score=90))

    inner_case_keys = base_body(Age={"Result": "Suitable", "REASON": "ok"})
    cases.append(case("inner_key_case", dumps(inner_case_keys), "Valid", score=90))

    # --- missing classes ----------------------------------------------------
    for cls in CLASSES:
        body = base_body()
        del body[cls]
        cases.append(case(f"missing_{cls.lower()}", dumps(body), "Invalid", f"MissingClass({cls})"))

    body = base_body()
    del body["Overall Suitability"]
    cases.append(case("missing_overall", dumps(body), "Invalid", "MissingClass(Overall Suitability)"))

    # --- bad scores --------------------------------------------------------
    for name, score in (("score_150", 150), ("score_negative", -5)):
        body = base_body(**{"Overall Suitability": {"score": score, "reason": "x"}})
        cases.append(case(name, dumps(body), "Invalid", "ScoreOutOfRange"))
    body = base_body(**{"Overall Suitability": {"score": "abc", "reason": "x"}})
    cases.append(case("score_non_numeric", dumps(body), "Invalid", "ScoreOutOfRange"))
    body = base_body(**{"Overall Suitability": {"score": None, "reason": "x"}})
    cases.append(case("score_null", dumps(body), "Invalid", "ScoreOutOfRange"))
    body = base_body(**{"Overall Suitability": {"reason": "score forgotten"}})
    cases.append(case("score_missing", dumps(body), "Invalid", "ScoreOutOfRange"))
    body = base_body(**{"Overall Suitability": "great"})
    cases.append(case("overall_not_object", dumps(body), "Invalid", "ScoreOutOfRange"))

    # --- bad result values --------------------------------------------------
    body = base_body(Dose={"result": "maybe", "reason": "uncertain"})
    cases.append(case("unknown_result_word", dumps(body), "Invalid", "UnknownResultValue(maybe)"))
    body = base_body(Genetics={"result": 42, "reason": "number"})
    cases.append(case("numeric_result", dumps(body), "Invalid", "UnknownResultValue(42)"))
    body = base_body(Lactation={"result": None, "reason": "null"})
    cases.append(case("null_result", dumps(body), "Invalid", "UnknownResultValue(null)"))
    body = base_body(Age="Suitable")
    cases.append(case("check_not_object", dumps(body), "Invalid", "UnknownResultValue(Suitable)"))
    body = base_body(Warnings={"reason": "forgot the result"})
    cases.append(
        case(
            "check_missing_result",
            dumps(body),
            "Invalid",
            'UnknownResultValue({"reason": "forgot the result"})',
        )
    )

    # --- duplicates --------------------------------------------------------
    body = base_body()
    body[" age "] = {"result": "Risky", "reason": "duplicate"}
    cases.append(case("duplicate_normalized_key", dumps(body), "Invalid", "DuplicateClass"))

    plain_no_ws = json.dumps(base_body())
    raw_dup = plain_no_ws[:-1] + ', "Age": {"result": "Risky", "reason": "again"}}'
    cases.append(case("duplicate_raw_key", raw_dup, "Invalid", "DuplicateClass"))

    body = base_body()
    body["OverallSuitability"] = {"score": 50, "reason": "second overall"}
    cases.append(case("duplicate_overall", dumps(body), "Invalid", "DuplicateClass"))

    # --- nothing parseable ----------------------------------------------------
    cases.append(case("empty_string", "", "Invalid", "NoJsonFound"))
    cases.append(case("whitespace_only", "   \n\t  ", "Invalid", "NoJsonFound"))
    cases.append(case("prose_only", "I cannot answer that request.", "Invalid", "NoJsonFound"))
    cases.append(case("bare_array", "[1, 2, 3]", "Invalid", "NoJsonFound"))
    cases.append(case("unquoted_keys", "{Age: Suitable}", "Invalid", "NoJsonFound"))
    cases.append(case("binary_garbage", chr(0) + chr(1) + "{" + chr(2), "Invalid", "NoJsonFound"))
    cases.append(case("truncated_in_string", '{"Age": {"result": "Suit', "Invalid", "NoJsonFound"))

    # Truncation after the first inner object closes: the balance scan
    # recovers that inner object, which then lacks every class key.
    truncated_late = '{"Age": {"result": "Suitable", "reason": "ok"}, "Dose": {"result"'
    cases.append(case("truncated_after_inner", truncated_late, "Invalid", "MissingClass(Age)"))

    # Broken outer object followed by a complete but schema-poor object.
    cases.append(case("second_brace_rescued", '{oops {"a": 1}', "Invalid", "MissingClass(Age)"))

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(cases, indent=2) + "\n", encoding="utf-8")
    valid = sum(1 for c in cases if c["status"] == "Valid")
    print(f"wrote {len(cases)} cases ({valid} Valid, {len(cases) - valid} Invalid) to {OUT_PATH}")


if __name__ == "__main__":
    main()
