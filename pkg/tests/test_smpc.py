from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from rxguard.smpc import (
    Chunk,
    EmptyDocument,
    InvalidParams,
    SectionKind,
    SmPCDocument,
    chunk_document,
    chunk_id_for,
    parse_smpc,
)


class TestParse:
    def test_headers_open_sections(self):
        doc = parse_smpc(
            "## Composition\nactive stuff\n## Clinical Particulars\ndosing text",
            doc_id="d1",
            medication_name="Drug",
        )
        assert set(doc.sections) == {SectionKind.COMPOSITION, SectionKind.CLINICAL_PARTICULARS}
        assert doc.sections[SectionKind.COMPOSITION] == "active stuff"

    def test_whitespace_only_raises(self):
        with pytest.raises(EmptyDocument):
            parse_smpc("   \n \t \n", doc_id="d1", medication_name="Drug")

    def test_preamble_goes_to_name_of_product(self):
        doc = parse_smpc(
            "Drug 5 mg tablets.\n## Composition\nstuff",
            doc_id="d1",
            medication_name="Drug",
        )
        assert doc.sections[SectionKind.NAME_OF_PRODUCT] == "Drug 5 mg tablets."

    def test_header_matching_ignores_case_and_punctuation(self):
        doc = parse_smpc(
            "## CLINICAL-PARTICULARS!\ntext here", doc_id="d", medication_name="D"
        )
        assert SectionKind.CLINICAL_PARTICULARS in doc.sections

    def test_unknown_headers_fold_into_current_section(self):
        doc = parse_smpc(
            "## Clinical Particulars\nintro\n## 4.3 Contraindications\ndo not use",
            doc_id="d",
            medication_name="D",
        )
        text = doc.sections[SectionKind.CLINICAL_PARTICULARS]
        assert "do not use" in text
        assert "4.3 Contraindications" in text
        assert len(doc.sections) == 1

    def test_cleaning_collapses_whitespace_and_strips_controls(self):
        doc = parse_smpc(
            "## Composition\n  a\tlot   of\n\nspace\x07 here", doc_id="d", medication_name="D"
        )
        assert doc.sections[SectionKind.COMPOSITION] == "a lot of space here"

    def test_repeated_header_appends(self):
        doc = parse_smpc(
            "## Composition\nfirst part\n## Composition\nsecond part",
            doc_id="d",
            medication_name="D",
        )
        assert doc.sections[SectionKind.COMPOSITION] == "first part second part"

    def test_warfarin_fixture_sections(self, corpus):
        doc = corpus["docs"]["warfarin"]
        assert SectionKind.CLINICAL_PARTICULARS in doc.sections
        clinical = doc.sections[SectionKind.CLINICAL_PARTICULARS]
        assert "contraindicated in pregnancy" in clinical.lower()
        assert SectionKind.NAME_OF_PRODUCT in doc.sections
        assert len(doc.sections) == 6

    def test_round_trip(self):
        doc = parse_smpc(
            "intro\n## Composition\nstuff", doc_id="d1", medication_name="Drug"
        )
        assert SmPCDocument.from_dict(doc.to_dict()) == doc


def _doc_with_section(text: str) -> SmPCDocument:
    return SmPCDocument(
        doc_id="d", medication_name="D", sections={SectionKind.CLINICAL_PARTICULARS: text}
    )


class TestChunking:
    def test_exact_window_arithmetic(self):
        # 2500 chars of clean 5-char words: every boundary is whitespace.
        text = ("word " * 500)[:2500]
        chunks = chunk_document(_doc_with_section(text), window=1000, overlap=200)
        assert [(c.char_start, c.char_end) for c in chunks] == [(0, 1000), (800, 1800), (1600, 2500)]

    def test_short_section_single_chunk(self):
        text = "x" * 400
        chunks = chunk_document(_doc_with_section(text), window=1000, overlap=200)
        assert [(c.char_start, c.char_end) for c in chunks] == [(0, 400)]

    def test_exactly_window_sized_section(self):
        text = "y" * 1000
        chunks = chunk_document(_doc_with_section(text), window=1000, overlap=200)
        assert [(c.char_start, c.char_end) for c in chunks] == [(0, 1000)]

    def test_overlap_ge_window_rejected(self):
        with pytest.raises(InvalidParams):
            chunk_document(_doc_with_section("abc"), window=100, overlap=100)
        with pytest.raises(InvalidParams):
            chunk_document(_doc_with_section("abc"), window=100, overlap=150)

    def test_words_never_split(self):
        text = "alpha beta gamma " * 200  # long enough for several windows
        chunks = chunk_document(_doc_with_section(text), window=100, overlap=20)
        for chunk in chunks[:-1]:
            end = chunk.char_end
            if end < len(text):
                assert text[end - 1].isspace() or text[end].isspace()

    def test_window_without_whitespace_keeps_hard_cut(self):
        text = "z" * 1500
        chunks = chunk_document(_doc_with_section(text), window=1000, overlap=200)
        assert [(c.char_start, c.char_end) for c in chunks] == [(0, 1000), (800, 1500)]

    def test_chunk_ids_deterministic_and_ordered(self):
        text = "word " * 500
        a = chunk_document(_doc_with_section(text))
        b = chunk_document(_doc_with_section(text))
        assert [c.chunk_id for c in a] == [c.chunk_id for c in b]
        assert [c.text for c in a] == [c.text for c in b]
        ids = [c.chunk_id for c in a]
        assert ids == sorted(ids)
        assert ids[0] == chunk_id_for("d", SectionKind.CLINICAL_PARTICULARS, 0)

    def test_text_matches_char_range(self):
        text = "the quick brown fox jumps over the lazy dog " * 60
        for chunk in chunk_document(_doc_with_section(text), window=300, overlap=60):
            assert chunk.text == text[chunk.char_start : chunk.char_end]
            assert 0 < len(chunk.text) <= 300

    @settings(max_examples=200, deadline=None)
    @given(
        text=st.text(
            alphabet=st.sampled_from("abcdefg (),.\n\t"), min_size=1, max_size=3000
        ).filter(lambda t: t.strip()),
        window=st.integers(20, 400),
        overlap=st.integers(0, 100),
    )
    def test_coverage_property(self, text, window, overlap):
        if overlap >= window:
            return
        cleaned_doc = SmPCDocument(
            doc_id="d", medication_name="D",
            sections={SectionKind.COMPOSITION: text},
        )
        chunks = chunk_document(cleaned_doc, window=window, overlap=overlap)
        # cover of [0, len(text)) with no gap and no oversized chunk;
        # consecutive windows strictly overlap whenever overlap > 0
        assert chunks[0].char_start == 0
        assert chunks[-1].char_end == len(text)
        for prev, nxt in zip(chunks, chunks[1:]):
            if overlap > 0:
                assert nxt.char_start < prev.char_end
            else:
                assert nxt.char_start <= prev.char_end
        for chunk in chunks:
            assert 0 < chunk.char_end - chunk.char_start <= window

    def test_fixture_coverage(self, corpus):
        for doc in corpus["docs"].values():
            chunks = chunk_document(doc)
            by_section: dict[SectionKind, list[Chunk]] = {}
            for c in chunks:
                by_section.setdefault(c.section, []).append(c)
            for section, section_chunks in by_section.items():
                section_chunks.sort(key=lambda c: c.ordinal)
                assert [c.ordinal for c in section_chunks] == list(range(len(section_chunks)))
                assert section_chunks[0].char_start == 0
                assert section_chunks[-1].char_end == len(doc.sections[section])
                for prev, nxt in zip(section_chunks, section_chunks[1:]):
                    assert nxt.char_start < prev.char_end
