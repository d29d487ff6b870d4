"""Metric fixtures with hand counts, plus symmetry and purity properties."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from casetag.errors import AlignmentError, InputError
from casetag.metrics import PrfScore, Span, bio_decode, char_f1, span_f1


# -- char_f1 -------------------------------------------------------------------

def test_char_f1_identical_is_perfect():
    score = char_f1(["Alan ran"], ["Alan ran"])
    assert (score.tp, score.fp, score.fn) == (1, 0, 0)
    assert score.precision == score.recall == score.f1 == 1.0


def test_char_f1_all_lower_prediction():
    score = char_f1(["Alan"], ["alan"])
    assert (score.tp, score.fp, score.fn) == (0, 0, 1)
    assert score.f1 == 0.0


def test_char_f1_hand_count():
    score = char_f1(["Al An"], ["al An"])
    assert (score.tp, score.fp, score.fn) == (1, 0, 1)
    assert score.precision == 1.0
    assert score.recall == 0.5
    assert round(100 * score.f1, 1) == 66.7


def test_char_f1_ignores_non_alphabetic_positions():
    score = char_f1(["A1 B!"], ["A1 b!"])
    assert (score.tp, score.fp, score.fn) == (1, 0, 1)


def test_char_f1_alignment_error_carries_position():
    with pytest.raises(AlignmentError) as err:
        char_f1(["abcd"], ["abxd"])
    assert "column 3" in str(err.value)
    with pytest.raises(AlignmentError):
        char_f1(["ab"], ["abc"])


def test_char_f1_swapping_swaps_precision_recall():
    gold, pred = ["AbC dEf", "Gh"], ["abC DEf", "gH"]
    fwd = char_f1(gold, pred)
    rev = char_f1(pred, gold)
    assert fwd.precision == rev.recall and fwd.recall == rev.precision
    assert fwd.tp == rev.tp and fwd.fp == rev.fn and fwd.fn == rev.fp


@given(st.lists(st.text(alphabet="aAbB xY.7", min_size=0, max_size=12), max_size=4))
def test_char_f1_self_comparison_perfect_or_empty(lines):
    score = char_f1(lines, list(lines))
    assert score.fp == 0 and score.fn == 0
    if any(ch.isupper() for line in lines for ch in line):
        assert score.f1 == 1.0


def test_block_format():
    block = PrfScore(tp=1, fp=1, fn=1).block()
    assert block.splitlines() == [
        "precision=50.0", "recall=50.0", "f1=50.0", "tp=1", "fp=1", "fn=1"]


def test_zero_over_zero_scores_are_zero():
    score = PrfScore(tp=0, fp=0, fn=0)
    assert score.precision == 0.0 and score.recall == 0.0 and score.f1 == 0.0


# -- bio_decode -------------------------------------------------------------------

def test_bio_decode_basic_span():
    assert bio_decode(["B-PER", "I-PER", "O"]) == [Span(0, 2, "PER")]


def test_bio_decode_repairs_orphan_inside():
    assert bio_decode(["O", "I-LOC"]) == [Span(1, 2, "LOC")]
    assert bio_decode(["I-ORG"]) == [Span(0, 1, "ORG")]
    assert bio_decode(["B-PER", "I-ORG"]) == [Span(0, 1, "PER"), Span(1, 2, "ORG")]


def test_bio_decode_adjacent_b_tags():
    assert bio_decode(["B-PER", "B-ORG", "I-ORG"]) == [Span(0, 1, "PER"), Span(1, 3, "ORG")]


def test_bio_decode_rejects_malformed():
    for bad in ("X-PER", "B", "I-", "B+PER", "o"):
        with pytest.raises(InputError):
            bio_decode([bad])


@given(st.lists(st.sampled_from(["O", "B-PER", "I-PER", "B-LOC", "I-LOC"]), max_size=12))
def test_bio_decode_spans_sorted_disjoint_in_range(tags):
    spans = bio_decode(tags)
    for s in spans:
        assert 0 <= s.start < s.end <= len(tags)
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.start


# -- span_f1 -------------------------------------------------------------------

def test_span_f1_identical_sets():
    spans = [[Span(0, 1, "PER")], [Span(2, 4, "ORG")]]
    score = span_f1(spans, [list(s) for s in spans])
    assert score.f1 == 1.0


def test_span_f1_exact_match_only():
    score = span_f1([[Span(0, 3, "PER")]], [[Span(0, 2, "PER")]])
    assert (score.tp, score.fp, score.fn) == (0, 1, 1)
    assert score.f1 == 0.0


def test_span_f1_hand_count_two_sentences():
    gold = [[Span(0, 1, "PER")], [Span(2, 4, "ORG")]]
    pred = [[Span(0, 1, "PER")], [Span(2, 3, "ORG")]]
    score = span_f1(gold, pred)
    assert (score.tp, score.fp, score.fn) == (1, 1, 1)
    assert score.block().splitlines()[:3] == ["precision=50.0", "recall=50.0", "f1=50.0"]


def test_span_f1_gold_matches_at_most_once():
    gold = [[Span(0, 1, "PER")]]
    pred = [[Span(0, 1, "PER"), Span(0, 1, "PER")]]
    score = span_f1(gold, pred)
    assert (score.tp, score.fp, score.fn) == (1, 1, 0)


@given(st.permutations([Span(0, 1, "PER"), Span(1, 3, "LOC"), Span(4, 5, "ORG")]))
def test_span_f1_order_invariant(perm):
    gold = [[Span(0, 1, "PER"), Span(4, 5, "ORG")]]
    base = span_f1(gold, [[Span(0, 1, "PER"), Span(1, 3, "LOC"), Span(4, 5, "ORG")]])
    shuffled = span_f1(gold, [list(perm)])
    assert (base.tp, base.fp, base.fn) == (shuffled.tp, shuffled.fp, shuffled.fn)
