"""SmPC document parsing and retrieval-sized chunking.

Input is plain text with ``## <Section Title>`` headers. Titles are matched
after lowercasing and stripping non-letters, so "## Clinical Particulars"
and "## CLINICAL-PARTICULARS" both open the clinical section. Unknown
headers (typically numbered subsections like "## 4.3 Contraindications")
fold into the enclosing section as ordinary text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

from .errors import RxGuardError


class EmptyDocument(RxGuardError):
    """Source contained no non-whitespace content."""


class InvalidParams(RxGuardError):
    """Chunking parameters violate 0 <= overlap < window."""


class SectionKind(str, Enum):
    NAME_OF_PRODUCT = "NameOfProduct"
    COMPOSITION = "Composition"
    PHARMACEUTICAL_FORM = "PharmaceuticalForm"
    CLINICAL_PARTICULARS = "ClinicalParticulars"
    PHARMACOLOGICAL_PROPERTIES = "PharmacologicalProperties"
    PHARMACEUTICAL_PARTICULARS = "PharmaceuticalParticulars"


_CANONICAL_TITLES = {kind.value.lower(): kind for kind in SectionKind}

_HEADER_RE = re.compile(r"^##\s*(?P<title>.+?)\s*$")

# Control characters stripped during cleaning (keep \n for header splitting;
# it is collapsed with the other whitespace afterwards).
_CONTROL_RE = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")


def _match_section(title: str) -> SectionKind | None:
    letters = re.sub(r"[^a-z]", "", title.lower())
    return _CANONICAL_TITLES.get(letters)


def _clean(text: str) -> str:
    text = _CONTROL_RE.sub("", text)
    return re.sub(r"\s+", " ", text).strip()


@dataclass(frozen=True)
class SmPCDocument:
    doc_id: str
    medication_name: str
    sections: Mapping[SectionKind, str]

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "medication_name": self.medication_name,
            "sections": {kind.value: text for kind, text in self.sections.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SmPCDocument":
        return cls(
            doc_id=d["doc_id"],
            medication_name=d["medication_name"],
            sections={SectionKind(k): v for k, v in d["sections"].items()},
        )


@dataclass(frozen=True)
class Chunk:
    """A retrieval-sized fragment of one section.

    ``char_start``/``char_end`` index into the cleaned section text;
    ``text == section_text[char_start:char_end]``.
    """

    chunk_id: str
    doc_id: str
    section: SectionKind
    ordinal: int
    text: str
    char_start: int
    char_end: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "section": self.section.value,
            "ordinal": self.ordinal,
            "text": self.text,
            "char_start": self.char_start,
            "char_end": self.char_end,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Chunk":
        return cls(
            chunk_id=d["chunk_id"],
            doc_id=d["doc_id"],
            section=SectionKind(d["section"]),
            ordinal=d["ordinal"],
            text=d["text"],
            char_start=d["char_start"],
            char_end=d["char_end"],
        )


def chunk_id_for(doc_id: str, section: SectionKind, ordinal: int) -> str:
    """Deterministic chunk id; the zero-padded ordinal makes lexicographic
    order match ordinal order within a section."""
    return f"{doc_id}:{section.value}:{ordinal:04d}"


def parse_smpc(source: str, *, doc_id: str, medication_name: str) -> SmPCDocument:
    """Split a plain-text SmPC into its canonical sections.

    Text before the first recognized header is attached to NameOfProduct.
    Repeated headers for the same section append to it. Raises
    :class:`EmptyDocument` when the source holds no non-whitespace content.
    """
    if not source.strip():
        raise EmptyDocument("document contains no content")

    pieces: dict[SectionKind, list[str]] = {}
    current = SectionKind.NAME_OF_PRODUCT
    order: list[SectionKind] = []

    for line in source.splitlines():
        header = _HEADER_RE.match(line)
        kind = _match_section(header.group("title")) if header else None
        if kind is not None:
            current = kind
            if current not in pieces:
                pieces[current] = []
                order.append(current)
            continue
        if current not in pieces:
            pieces[current] = []
            order.append(current)
        pieces[current].append(line)

    sections: dict[SectionKind, str] = {}
    for kind in order:
        text = _clean("\n".join(pieces[kind]))
        if text:
            sections[kind] = text

    if not sections:
        raise EmptyDocument("document contains only headers with no body text")
    return SmPCDocument(doc_id=doc_id, medication_name=medication_name, sections=sections)


def chunk_document(doc: SmPCDocument, window: int = 1000, overlap: int = 200) -> list[Chunk]:
    """Cut each section into overlapping windows of at most ``window`` chars.

    Window starts advance by ``window - overlap``. A window that does not
    reach the section end has its cut pulled back to a whitespace boundary
    so words are never split; the pullback is bounded by the overlap so
    consecutive windows always keep full coverage of the section. A window
    with no usable boundary keeps the hard cut.
    """
    if window <= 0 or overlap < 0 or overlap >= window:
        raise InvalidParams(f"need 0 <= overlap < window, got window={window} overlap={overlap}")

    step = window - overlap
    chunks: list[Chunk] = []
    for section, text in doc.sections.items():
        length = len(text)
        start = 0
        ordinal = 0
        while True:
            hard_end = start + window
            if hard_end >= length:
                end = length
            else:
                end = _pull_back_to_whitespace(text, start, hard_end, step)
            chunks.append(
                Chunk(
                    chunk_id=chunk_id_for(doc.doc_id, section, ordinal),
                    doc_id=doc.doc_id,
                    section=section,
                    ordinal=ordinal,
                    text=text[start:end],
                    char_start=start,
                    char_end=end,
                )
            )
            if hard_end >= length:
                break
            start += step
            ordinal += 1
    return chunks


def _pull_back_to_whitespace(text: str, start: int, hard_end: int, step: int) -> int:
    """Largest cut position in (start + step, hard_end] that does not split a
    word; hard_end if the whole range is inside one word."""
    end = hard_end
    floor = start + step
    while end > floor:
        if text[end - 1].isspace() or text[end].isspace():
            return end
        end -= 1
    return hard_end
