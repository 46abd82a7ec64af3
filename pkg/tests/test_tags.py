import random

import pytest

from texterial.core import Intensity
from texterial.errors import EmptyCompletion, MisalignedRange
from texterial.tags import (
    MARKER_KINDS,
    Tag,
    bracket_count,
    emit_marked,
    mark_lines,
    parse_marked,
    strip_model_artifacts,
)


class TestBracketCount:
    @pytest.mark.parametrize("i,expected", [
        (0.0, 1),
        (0.1, 1),
        (0.3, 2),
        (0.5, 3),
        (0.75, 4),
        (0.9, 4),
        (1.0, 4),
    ])
    def test_mapping(self, i, expected):
        assert bracket_count(Intensity(i)) == expected

    def test_monotone_and_image(self):
        levels = [bracket_count(Intensity(i / 100)) for i in range(101)]
        assert levels == sorted(levels)
        assert set(levels) == {1, 2, 3, 4}


class TestEmitMarked:
    def test_level_one(self):
        out = emit_marked("the old house", 4, 7, "stretch", 1)
        assert out == "the <stretch>old</stretch> house"

    def test_level_four(self):
        out = emit_marked("the old house", 4, 7, "stretch", 4)
        assert out == "the <<<<stretch>>>>old<<<</stretch>>>> house"

    def test_overlap_is_always_single_bracket(self):
        out = emit_marked("one\nline two\nthree", 4, 12, "overlap", 3)
        assert out == "one\n<overlap>line two</overlap>\nthree"

    def test_misaligned_range_rejected(self):
        with pytest.raises(MisalignedRange):
            emit_marked("the old house", 5, 7, "stretch", 1)
        with pytest.raises(MisalignedRange):
            emit_marked("the old house", 4, 6, "stretch", 1)
        with pytest.raises(MisalignedRange):
            emit_marked("the old house", 3, 7, "stretch", 1)

    def test_literal_angle_bracket_escaped(self):
        out = emit_marked("a < b always", 0, 1, "pinch", 1)
        assert out == "<pinch>a</pinch> \\< b always"


def test_mark_lines_tags_selected_rows():
    out = mark_lines(["one", "two", "three"], {1})
    assert out == "one\n<overlap>two</overlap>\nthree"


def test_mark_lines_round_trips_through_parse():
    rng = random.Random(31337)
    words = ["pond", "reed", "clay", "text", "fern"]
    for _ in range(100):
        lines = [" ".join(rng.choice(words) for _ in range(rng.randint(1, 5)))
                 for _ in range(rng.randint(1, 4))]
        tagged_rows = {i for i in range(len(lines)) if rng.random() < 0.5}
        parsed = parse_marked(mark_lines(lines, tagged_rows))
        assert parsed.plain == "\n".join(lines)
        assert {parsed.plain[t.start:t.end] for t in parsed.tags} == {
            lines[i] for i in tagged_rows}
        assert all(t.kind == "overlap" and t.level == 1 for t in parsed.tags)


class TestParseMarked:
    def test_round_trip_simple(self):
        marked = emit_marked("the old house", 4, 7, "squash", 2)
        parsed = parse_marked(marked)
        assert parsed.plain == "the old house"
        assert parsed.tags == (Tag("squash", 4, 7, 2),)
        assert parsed.warnings == ()

    def test_plain_text_unchanged(self):
        parsed = parse_marked("no markers here")
        assert parsed.plain == "no markers here"
        assert parsed.tags == ()

    def test_unclosed_marker_becomes_literal(self):
        parsed = parse_marked("<stretch>a")
        assert parsed.plain == "<stretch>a"
        assert parsed.tags == ()
        assert any("UnbalancedMarker" in w for w in parsed.warnings)

    def test_mismatched_bracket_counts_are_literal(self):
        parsed = parse_marked("<<stretch>a<</stretch>>")
        assert "<<stretch>" in parsed.plain
        assert parsed.tags == ()

    def test_round_trip_randomized(self):
        rng = random.Random(1234)
        vocab = ["old", "house", "rain", "fern", "слово", "idea", "quiet", "town"]
        for _ in range(300):
            n = rng.randint(1, 12)
            words = [rng.choice(vocab) for _ in range(n)]
            text = " ".join(words)
            wi = rng.randrange(n)
            wj = rng.randint(wi, n - 1)
            start = len(" ".join(words[:wi])) + (1 if wi else 0)
            end = len(" ".join(words[:wj + 1]))
            kind = rng.choice([k for k in MARKER_KINDS if k != "overlap"])
            level = rng.randint(1, 4)
            marked = emit_marked(text, start, end, kind, level)
            parsed = parse_marked(marked)
            assert parsed.plain == text
            assert parsed.tags == (Tag(kind, start, end, level),)
            assert parsed.warnings == ()


class TestStripModelArtifacts:
    def test_bold_removed(self):
        assert strip_model_artifacts("**bold** text") == "bold text"

    def test_marker_removed(self):
        assert strip_model_artifacts("<overlap>kept line</overlap>") == "kept line"

    def test_clean_prose_unchanged(self):
        prose = "Nothing odd here.\n\nJust two paragraphs."
        assert strip_model_artifacts(prose) == prose

    def test_code_fences_removed(self):
        assert strip_model_artifacts("```json\n{\"a\": 1}\n```") == '{"a": 1}'

    def test_blank_run_collapse(self):
        # runs of more than two blank lines collapse to one
        assert strip_model_artifacts("a\n\n\n\n\nb") == "a\n\nb"
        assert strip_model_artifacts("a\n\n\n\nb") == "a\n\nb"
        # one or two blank lines are left alone
        assert strip_model_artifacts("a\n\n\nb") == "a\n\n\nb"
        assert strip_model_artifacts("a\n\nb") == "a\n\nb"

    def test_empty_result_raises(self):
        with pytest.raises(EmptyCompletion):
            strip_model_artifacts("** **")
        with pytest.raises(EmptyCompletion):
            strip_model_artifacts("   \n\n  ")

    def test_idempotent_randomized(self):
        rng = random.Random(5150)
        pieces = ["plain", "**bold**", "<stretch>", "</stretch>", "```", "\n\n\n", "*", "text", "_x_"]
        for _ in range(200):
            raw = " ".join(rng.choice(pieces) for _ in range(rng.randint(1, 10)))
            try:
                once = strip_model_artifacts(raw)
            except EmptyCompletion:
                continue
            assert strip_model_artifacts(once) == once
