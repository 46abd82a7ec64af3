from texterial.diffing import SpanKind, word_diff


def spans_of(old, new):
    return [(new[s.start:s.end], s.kind) for s in word_diff(old, new).spans]


def test_pure_insertion():
    assert spans_of("the cat sat", "the black cat sat") == [("black", SpanKind.INSERTED)]


def test_identical_texts_empty_diff():
    assert word_diff("same words here", "same words here").spans == ()


def test_full_rewrite_one_replaced_span():
    diff = word_diff("alpha beta gamma", "delta epsilon")
    assert [(s.start, s.end, s.kind) for s in diff.spans] == [(0, 13, SpanKind.REPLACED)]


def test_substitution_marks_replaced():
    assert spans_of("the old house", "the new house") == [("new", SpanKind.REPLACED)]


def test_pure_deletion_has_no_span():
    assert word_diff("the very old house", "the old house").spans == ()


def test_adjacent_changes_coalesce():
    assert spans_of("a b c d", "a x y d") == [("x y", SpanKind.REPLACED)]


def test_insertion_at_end():
    assert spans_of("tell me", "tell me more now") == [("more now", SpanKind.INSERTED)]


def test_spans_disjoint_and_ordered():
    diff = word_diff("one two three four five", "one TWO three FOUR five extra")
    spans = diff.spans
    assert all(a.end <= b.start for a, b in zip(spans, spans[1:]))
    assert [s.kind for s in spans] == [SpanKind.REPLACED, SpanKind.REPLACED, SpanKind.INSERTED]


def test_to_dict_shape():
    d = word_diff("a", "a b").to_dict()
    assert d == {"spans": [{"start": 2, "end": 3, "kind": "inserted"}]}


def test_spans_word_aligned_randomized():
    import random
    rng = random.Random(808)
    vocab = ["cat", "sat", "mat", "flat", "bat", "rat"]
    for _ in range(200):
        old = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
        new = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
        for span in word_diff(old, new).spans:
            assert 0 <= span.start < span.end <= len(new)
            assert not new[span.start].isspace()
            assert not new[span.end - 1].isspace()
            assert span.start == 0 or new[span.start - 1].isspace()
            assert span.end == len(new) or new[span.end].isspace()
