import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hymn_data import HYMN2_ANNOTATOR1
from phrasegram.grammar import Grammar, NonTerminal, Terminal, expand
from phrasegram.induction import Algorithm, induce
from phrasegram.segmentation import (
    AnnotatedSequence,
    Annotation,
    Occurrence,
    Phrase,
    essen_group_phrases,
    extract_annotation,
    has_repeated_pattern,
    load_dataset,
    write_dataset,
)
from phrasegram.viewpoints import NoteEvent

a, b, c, d, x = (Terminal(ch) for ch in "abcdx")
N = NonTerminal


def ann(layout):
    return Annotation(tuple(Phrase(k, tuple(Occurrence(*o) for o in v)) for k, v in layout.items()))


def test_extract_repeated_rule():
    g = Grammar.from_mapping({0: [N(1), N(1)], 1: [a, b, c]})
    assert extract_annotation(g, 6) == ann({"1": [(0, 2), (3, 5)]})


def test_extract_ignores_top_level_terminals():
    assert extract_annotation(Grammar.from_mapping({0: [a, b, c]}), 3) == Annotation()


def test_extract_with_terminal_between():
    g = Grammar.from_mapping({0: [N(1), x, N(2)], 1: [a, b], 2: [c, d]})
    # N1 covers 0-1, x sits at 2, N2 covers 3-4.
    assert extract_annotation(g, 5) == ann({"1": [(0, 1)], "2": [(3, 4)]})


def test_extract_drops_single_event_rules():
    g = Grammar.from_mapping({0: [N(1), N(2), N(2)], 1: [a], 2: [b, c]})
    result = extract_annotation(g, 5)
    assert result == ann({"2": [(1, 2), (3, 4)]})
    assert result.dropped == 1


def test_extract_checks_length():
    with pytest.raises(ValueError):
        extract_annotation(Grammar.from_mapping({0: [a, b]}), 3)


def test_extract_propagates_dangling_rule():
    with pytest.raises(KeyError):
        extract_annotation(Grammar.from_mapping({0: [N(4)]}), 1)


def _ev(seq, start=0):
    return [NoteEvent(start + i, p, dur) for i, (p, dur) in enumerate(seq)]


def _lines(*shapes):
    out, t = [], 0
    for shape in shapes:
        out.append(_ev(shape, t))
        t += len(shape)
    return out


L1 = [(60, 1), (62, 1), (64, 2)]
L2 = [(67, 1), (65, 1), (64, 1), (62, 1)]


def test_essen_grouping():
    seq = essen_group_phrases(_lines(L1, L2, L1), id="t1")
    assert seq.ground_truth == ann({"A": [(0, 2), (7, 9)], "B": [(3, 6)]})
    assert has_repeated_pattern(seq.ground_truth)
    assert len(seq.events) == 10


def test_essen_single_line():
    seq = essen_group_phrases(_lines(L1))
    assert seq.ground_truth == ann({"A": [(0, 2)]})
    assert not has_repeated_pattern(seq.ground_truth)


def test_essen_duration_mismatch_splits_phrases():
    other = [(60, 1), (62, 1), (64, 1)]
    seq = essen_group_phrases(_lines(L1, other))
    assert len(seq.ground_truth) == 2


def test_essen_onsets_do_not_matter():
    # Same pitch+duration content at different positions still groups together.
    seq = essen_group_phrases(_lines(L1, L2, L2, L1))
    assert [len(p.occurrences) for p in seq.ground_truth] == [2, 2]


def test_essen_rejects_empty_input():
    with pytest.raises(ValueError):
        essen_group_phrases([])


@given(st.lists(st.sampled_from([L1, L2, L1[:2], L2[1:]]), min_size=1, max_size=8))
def test_essen_occurrences_tile_sequence(shapes):
    seq = essen_group_phrases(_lines(*shapes))
    occs = sorted(o for p in seq.ground_truth for o in p.occurrences)
    rebuilt = [e for o in occs for e in seq.events[o.start:o.end + 1]]
    assert rebuilt == list(seq.events)
    again = essen_group_phrases(_lines(*shapes))
    assert [p.label for p in again.ground_truth] == [p.label for p in seq.ground_truth]


def test_has_repeated_pattern_empty():
    assert not has_repeated_pattern(Annotation())


def test_occurrence_invariants():
    with pytest.raises(ValueError):
        Occurrence(3, 3)
    with pytest.raises(ValueError):
        Occurrence(-1, 2)
    assert len(Occurrence(2, 5)) == 4


def test_annotation_rejects_overlap_and_duplicate_labels():
    with pytest.raises(ValueError):
        ann({"A": [(0, 3)], "B": [(3, 5)]})
    with pytest.raises(ValueError):
        Annotation((Phrase("A", (Occurrence(0, 1),)), Phrase("A", (Occurrence(2, 3),))))


def test_hymn2_annotator1_loads():
    gt = Annotation.from_json(HYMN2_ANNOTATOR1)
    assert len(gt) == 6
    assert gt.phrase("A").occurrences == (Occurrence(0, 7), Occurrence(53, 62))
    assert gt.phrase("B").occurrences == (Occurrence(8, 17), Occurrence(26, 35))
    assert [p.label for p in gt if p.is_pattern] == ["A", "B"]


@given(st.lists(st.integers(0, 2), max_size=40), st.sampled_from(list(Algorithm)))
def test_extracted_annotations_are_disjoint_and_bounded(seq, algo):
    g = induce(algo, seq)
    result = extract_annotation(g, len(seq))
    covered = sum(len(o) for p in result for o in p.occurrences)
    assert covered <= len(seq)
    # survives a JSON round trip of the grammar
    assert extract_annotation(Grammar.from_json(g.to_json()), len(seq)) == result
    for p in result:
        spans = {tuple(seq[o.start:o.end + 1]) for o in p.occurrences}
        assert len(spans) == 1


def test_dataset_roundtrip(tmp_path):
    seq = essen_group_phrases(_lines(L1, L2, L1), id="tune-7")
    path = tmp_path / "d.jsonl"
    write_dataset(path, [seq])
    assert load_dataset(path) == [seq]
    record = json.loads(path.read_text())
    assert set(record) == {"id", "events", "annotation"}
    assert record["events"][0] == {"onset": 0.0, "pitch": 60, "duration": 1.0}


def test_dataset_accepts_line_grouped_records(tmp_path):
    path = tmp_path / "essen.jsonl"
    lines = [[e.to_json() for e in line] for line in _lines(L1, L1)]
    path.write_text(json.dumps({"id": "e1", "lines": lines}) + "\n")
    (seq,) = load_dataset(path)
    assert seq.ground_truth == ann({"A": [(0, 2), (3, 5)]})


def test_dataset_reports_bad_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "x", "events": [{"onset": 0, "pitch": 60, "duration": 1}], '
                    '"annotation": [{"label": "A", "occurrences": [[0, 4]]}]}\n')
    with pytest.raises(ValueError, match="bad.jsonl:1"):
        load_dataset(path)


def test_annotated_sequence_rejects_polyphony():
    with pytest.raises(ValueError):
        AnnotatedSequence.from_json({"id": "p", "events": [
            {"onset": 0, "pitch": 60, "duration": 1}, {"onset": 0, "pitch": 64, "duration": 1}]})
