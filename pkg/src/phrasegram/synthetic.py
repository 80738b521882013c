"""Generated melodies with known phrase structure, for tests and demos."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from .segmentation import AnnotatedSequence, Annotation, Occurrence, Phrase
from .viewpoints import NoteEvent

DURATIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))

Note = Tuple[int, Fraction]


def _events(notes: Sequence[Note]) -> List[NoteEvent]:
    out, onset = [], Fraction(0)
    for pitch, duration in notes:
        out.append(NoteEvent(onset, pitch, duration))
        onset += duration
    return out


def build_sequence(seq_id: str, segments: Sequence[Tuple[str, Sequence[Note]]]) -> AnnotatedSequence:
    """Concatenate labelled segments; segments labelled ``""`` are left unannotated."""
    notes: List[Note] = []
    spans: dict = {}
    for label, seg in segments:
        if label:
            spans.setdefault(label, []).append(Occurrence(len(notes), len(notes) + len(seg) - 1))
        notes.extend(seg)
    phrases = tuple(Phrase(label, tuple(occ)) for label, occ in spans.items())
    return AnnotatedSequence(seq_id, tuple(_events(notes)), Annotation(phrases))


def recoverable_tunes() -> List[AnnotatedSequence]:
    """Three tunes whose annotated phrases are exactly what grammar induction
    over durations can find: repeated phrases use disjoint duration sets, are
    at least four events long, and never repeat next to the same neighbour."""
    d = DURATIONS
    x = [(60, d[3]), (62, d[1]), (64, d[1]), (65, d[5])]
    y = [(67, d[0]), (69, d[2]), (71, d[4])]
    w = [(55, d[1]), (57, d[3]), (59, d[5]), (60, d[1]), (62, d[5])]
    return [
        build_sequence("t1", [("A", x), ("A", x)]),
        build_sequence("t2", [("A", x), ("", y), ("A", x)]),
        build_sequence("t3", [("A", w), ("B", y + [(72, d[6])]), ("B", y + [(72, d[6])]), ("A", w)]),
    ]


def planted_repeat_corpus(
    count: int = 50,
    seed: int = 0,
    motif_length: Tuple[int, int] = (8, 14),
    noise_length: Tuple[int, int] = (3, 8),
) -> List[AnnotatedSequence]:
    """Sequences of the form ``noise M noise M noise`` with a random motif ``M``.

    Motif notes come from a wide pitch range, noise notes from a narrow
    disjoint one, so the only long repeat is the planted motif. The ground
    truth marks the two motif occurrences.
    """
    rng = random.Random(seed)

    def notes(n, pitches):
        return [(rng.choice(pitches), rng.choice(DURATIONS)) for _ in range(n)]

    motif_pitches = list(range(60, 84))
    noise_pitches = list(range(40, 46))
    corpus = []
    for i in range(count):
        motif = notes(rng.randint(*motif_length), motif_pitches)
        segments = [("", notes(rng.randint(*noise_length), noise_pitches)), ("M", motif),
                    ("", notes(rng.randint(*noise_length), noise_pitches)), ("M", motif),
                    ("", notes(rng.randint(*noise_length), noise_pitches))]
        corpus.append(build_sequence(f"planted-{i:03d}", segments))
    return corpus
