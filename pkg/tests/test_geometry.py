import random

import pytest

from texterial.config import GeometryConfig
from texterial.errors import DegenerateSplit, NoCollision, NoTarget
from texterial.geometry import (
    Box,
    CollisionKind,
    FernExtent,
    classify_collision,
    layout_text,
    pinch_influence,
    press_extent,
    rip_split_index,
    smudge_extent,
    two_finger_scope,
    water_targets,
)

CFG = GeometryConfig()


def mk_layout(text, x=0.0, y=0.0, width=320.0):
    return layout_text(text, x, y, width)


class TestLayout:
    def test_single_line_word_boxes(self):
        lay = mk_layout("ab cd", width=320)
        assert [w.start for w in lay.words] == [0, 3]
        assert lay.words[0].box == Box(0, 0, 16, 16)
        assert lay.words[1].box == Box(24, 0, 16, 16)
        assert len(lay.lines) == 1

    def test_wrap_at_width(self):
        # 5 columns = 40 units: "aa bb" fits, "cc" wraps
        lay = mk_layout("aa bb cc", width=40)
        assert len(lay.lines) == 2
        assert lay.lines[0].start == 0 and lay.lines[0].end == 5
        assert lay.lines[1].start == 6 and lay.lines[1].end == 8
        assert lay.words[2].box.y == 16.0

    def test_newlines_force_breaks(self):
        lay = mk_layout("one\n\ntwo", width=320)
        assert len(lay.lines) == 3
        assert lay.line_texts() == ["one", "", "two"]

    def test_line_slices_reconstruct_words(self):
        text = "the quick brown fox jumps over the lazy dog"
        lay = mk_layout(text, width=80)
        for w in lay.words:
            assert text[w.start:w.end] == text[w.start:w.end].strip()
        for ln in lay.lines:
            assert "\n" not in text[ln.start:ln.end]


class TestClassifyCollision:
    def _layouts(self, a_box, b_box, a_text="aaaa aaaa", b_text="bbbb bbbb"):
        la = layout_text(a_text, a_box[0], a_box[1], a_box[2])
        lb = layout_text(b_text, b_box[0], b_box[1], b_box[2])
        return la, lb

    def test_disjoint_boxes_raise(self):
        # (0,0,100,100) vs (200,200,100,100): disjoint
        a = layout_text("aaaa " * 12, 0, 0, 100)
        b = layout_text("bbbb " * 12, 200, 200, 100)
        assert a.box.h >= 80  # tall enough to be square-ish
        with pytest.raises(NoCollision):
            classify_collision(a, b, (5, 5))

    def test_identical_boxes_full_blend(self):
        a = layout_text("aaaa " * 12, 0, 0, 100)
        b = layout_text("bbbb " * 12, 0, 0, 100)
        res = classify_collision(a, b, (0, 10))
        assert res.kind is CollisionKind.FULL_BLEND
        assert res.intensity.value == 1.0

    def test_half_vertical_overlap_intensity(self):
        # Hand-derived: 100x100 blocks, 50-unit vertical offset
        # intersection 100*50 = 5000, min area 10000 -> 0.5
        text = "aaaaaaaaaaa " * 6  # 6 lines of 12 chars at width 100 (12 cols)
        a = layout_text(text.strip(), 0, 0, 100)
        b = layout_text(text.strip(), 0, 50, 100)
        assert a.box.h == 96.0  # 6 rows
        res = classify_collision(a, b, (0, 30))
        inter = a.box.intersect(b.box)
        assert res.intensity.value == pytest.approx(inter.area / a.box.area)
        assert res.kind is CollisionKind.VERTICAL_TOP_BOTTOM

    def test_vertical_direction_by_centers(self):
        a = layout_text("aaaa " * 12, 0, 60, 100)
        b = layout_text("bbbb " * 12, 0, 0, 100)
        res = classify_collision(a, b, (0, 10))
        assert res.kind is CollisionKind.VERTICAL_BOTTOM_TOP

    def test_horizontal_insert_with_anchor(self):
        a = layout_text("new bit", 90, 20, 80)
        b = layout_text("first line text\nsecond line here\nthird line words", 0, 0, 160)
        res = classify_collision(a, b, (30, 2))
        assert res.kind is CollisionKind.HORIZONTAL_INSERT
        assert res.insert_position is not None and 0.0 <= res.insert_position <= 1.0
        assert res.anchor_line in b.line_texts()

    def test_intensity_symmetric_under_swap(self):
        a = layout_text("aaaa " * 12, 0, 0, 100)
        b = layout_text("bbbb " * 18, 0, 40, 120)
        r1 = classify_collision(a, b, (0, 10))
        r2 = classify_collision(b, a, (0, 10))
        assert r1.intensity.value == pytest.approx(r2.intensity.value)

    def test_overlap_lines_within_line_counts(self):
        a = layout_text("aaaa " * 12, 0, 30, 100)
        b = layout_text("bbbb " * 12, 0, 0, 100)
        res = classify_collision(a, b, (0, -10))
        assert all(0 <= r < len(a.lines) for r in res.overlap_lines_a)
        assert all(0 <= r < len(b.lines) for r in res.overlap_lines_b)


class TestPinchInfluence:
    def test_influence_formula(self):
        # word "hi" centered at (8, 8); pinch center 10 units below
        lay = mk_layout("hi")
        (start, end), intensity = pinch_influence((8, 18), 40.0, 20.0, lay)
        assert (start, end) == (0, 2)
        assert intensity.value == pytest.approx(0.5)

    def test_no_word_in_reach(self):
        lay = mk_layout("hi")
        with pytest.raises(NoTarget):
            pinch_influence((500, 500), 40.0, 20.0, lay)

    def test_zero_contraction_zero_intensity(self):
        lay = mk_layout("hi")
        _, intensity = pinch_influence((8, 8), 40.0, 40.0, lay)
        assert intensity.value == 0.0

    def test_threshold_excludes_far_words(self):
        # influence = 1 - d/R must exceed 0.25: d < 0.75 * 40 = 30
        lay = mk_layout("hi")
        (s, e), _ = pinch_influence((8, 8 + 29), 40.0, 10.0, lay)
        assert (s, e) == (0, 2)
        with pytest.raises(NoTarget):
            pinch_influence((8, 8 + 31), 40.0, 10.0, lay)


class TestPressExtent:
    def test_disc_covering_middle_words(self):
        # words: aa(0,2) bb(3,5) cc(6,8) dd(9,11); boxes 16 wide, gaps 8
        lay = mk_layout("aa bb cc dd")
        start, end = press_extent((44, 8), 14.0, lay)
        assert (start, end) == (3, 8)  # "bb cc"

    def test_disc_in_margin(self):
        lay = mk_layout("aa bb")
        with pytest.raises(NoTarget):
            press_extent((300, 300), 10.0, lay)

    def test_disc_straddling_line_break(self):
        # Hand-built: width 40 = 5 cols; "alpha"(0,5) row 0, "beta"(6,10) row 1
        lay = mk_layout("alpha beta", width=40)
        assert len(lay.lines) == 2
        start, end = press_extent((16, 16), 6.0, lay)
        assert (start, end) == (0, 10)
        assert lay.text[start:end] == "alpha beta"


class TestTwoFingerScope:
    def test_bracketing_one_sentence(self):
        text = "First part here. Second part there."
        lay = mk_layout(text)
        # bracket "Second part there." : chars 17..35 -> x 136..280
        start, end = two_finger_scope((132, -2), (290, 18), lay)
        assert lay.text[start:end] == "Second part there."

    def test_full_block_scope(self):
        lay = mk_layout("tiny text")
        start, end = two_finger_scope((-10, -10), (400, 40), lay)
        assert (start, end) == (0, 9)

    def test_degenerate_box_between_words(self):
        lay = mk_layout("aa bb")
        # box between the two words (x 16.5..23.5) never overlaps a word box
        with pytest.raises(NoTarget):
            two_finger_scope((17, 2), (23, 14), lay)

    def test_identical_points_rejected(self):
        lay = mk_layout("aa bb")
        with pytest.raises(ValueError):
            two_finger_scope((5, 5), (5, 5), lay)


class TestRipSplitIndex:
    def test_between_sentences(self):
        lay = mk_layout("First. Second.")
        k = rip_split_index([(20, 8), (40, 8)], lay)
        assert k == 7
        assert lay.text[:k] == "First. "
        assert lay.text[k:] == "Second."

    def test_single_word_degenerate(self):
        lay = mk_layout("Hello")
        with pytest.raises(DegenerateSplit):
            rip_split_index([(2, 2), (30, 14)], lay)

    def test_path_missing_block(self):
        lay = mk_layout("First. Second.")
        with pytest.raises(NoTarget):
            rip_split_index([(500, 500), (600, 600)], lay)

    def test_three_line_block_nearest_line(self):
        # Hand-derived: three sentences on rows 0/1/2 (y centers 8, 24, 40).
        # Interior boundaries at 15 (row 1, y 24) and 37 (row 2, y 40);
        # a tear across row 1 (y=24) picks 15.
        text = "One ends here.\nTwo sits among lines.\nThree closes it."
        lay = mk_layout(text)
        assert len(lay.lines) == 3
        k = rip_split_index([(10, 24), (150, 24)], lay)
        assert k == 15
        assert text[k:].startswith("Two")

    def test_no_sentence_boundary_uses_word_boundary(self):
        lay = mk_layout("just some plain words")
        k = rip_split_index([(40, 8), (60, 8)], lay)
        assert k in [w.start for w in lay.words[1:]]
        assert lay.text[:k] + lay.text[k:] == lay.text

    def test_partition_property_randomized(self):
        rng = random.Random(20240811)
        vocab = ["clay", "fern", "idea", "text", "grows", "slowly.", "turns!", "asks?"]
        for _ in range(100):
            n = rng.randint(2, 30)
            text = " ".join(rng.choice(vocab) for _ in range(n))
            lay = mk_layout(text, width=rng.choice([80, 160, 320]))
            path = [(rng.uniform(0, 300), rng.uniform(0, lay.box.h)) for _ in range(3)]
            try:
                k = rip_split_index(path, lay)
            except (DegenerateSplit, NoTarget):
                continue
            assert 0 < k < len(text)
            assert text[:k] + text[k:] == text
            assert text[:k].strip() and text[k:].strip()


class TestSmudgeExtent:
    def test_path_retracing_one_word(self):
        lay = mk_layout("alpha beta gamma", width=320)
        # beta occupies x 48..80, baseline y=16; retrace it closely
        (s, e), intensity = smudge_extent([(50, 15), (78, 15)], lay)
        assert lay.text[s:e] == "beta"
        assert 0 < intensity.value < 0.2

    def test_full_width_sweep_max_intensity(self):
        lay = mk_layout("alpha beta gamma", width=100)
        (s, e), intensity = smudge_extent([(0, 8), (100, 8)], lay)
        assert intensity.value == 1.0

    def test_l_shaped_path_catches_two_words(self):
        # Hand-checked: aa center (8,8), bb center (32,8) at width 320;
        # L path passes within brush radius (18) of both centers.
        lay = mk_layout("aa bb ccccc", width=320)
        (s, e), _ = smudge_extent([(8, 24), (8, 10), (32, 10)], lay)
        assert lay.text[s:e] == "aa bb"

    def test_no_words_near_path(self):
        lay = mk_layout("aa", width=320)
        with pytest.raises(NoTarget):
            smudge_extent([(200, 200), (220, 220)], lay)


class TestWaterTargets:
    FERNS = [
        FernExtent("f1", 0, 60, 300),
        FernExtent("f2", 100, 160, 300),
        FernExtent("f3", 400, 460, 300),
    ]

    def test_stroke_above_one_fern(self):
        assert water_targets([(10, 100), (50, 100)], self.FERNS) == ["f1"]

    def test_stroke_below_all_ferns(self):
        assert water_targets([(10, 350), (500, 350)], self.FERNS) == []

    def test_wide_stroke_above_two_of_three(self):
        # Hand-checked interval overlap: x 0..200 covers f1 and f2 only
        assert water_targets([(0, 100), (200, 100)], self.FERNS) == ["f1", "f2"]

    def test_empty_stroke_rejected(self):
        with pytest.raises(ValueError):
            water_targets([], self.FERNS)


def test_operations_are_pure_same_inputs_same_outputs():
    rng = random.Random(7)
    for _ in range(25):
        words = " ".join("w" * rng.randint(1, 8) for _ in range(rng.randint(1, 20)))
        lay = mk_layout(words, width=rng.choice([60, 120, 240]))
        center = (rng.uniform(0, 200), rng.uniform(0, 60))
        try:
            first = press_extent(center, 25.0, lay)
            again = press_extent(center, 25.0, lay)
            assert first == again
        except NoTarget:
            with pytest.raises(NoTarget):
                press_extent(center, 25.0, lay)


def test_ranges_word_aligned():
    rng = random.Random(99)
    for _ in range(50):
        text = " ".join(rng.choice(["ab", "cde", "fg", "hijk"]) for _ in range(rng.randint(2, 15)))
        lay = mk_layout(text, width=rng.choice([64, 120]))
        try:
            s, e = press_extent((rng.uniform(0, 120), rng.uniform(0, 48)), 30.0, lay)
        except NoTarget:
            continue
        assert 0 <= s < e <= len(text)
        assert not text[s].isspace() and not text[e - 1].isspace()
        assert s == 0 or text[s - 1].isspace()
        assert e == len(text) or text[e].isspace()
