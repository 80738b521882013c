"""Phrase annotations: data model, grammar extraction, Essen line grouping.

Also holds the canonical dataset codec (JSONL, one annotated sequence per
line) since every dataset record is an ``AnnotatedSequence``.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .grammar import Grammar, expansion_lengths
from .viewpoints import NoteEvent, check_monophonic


@dataclass(frozen=True, order=True)
class Occurrence:
    """Inclusive index range ``[start, end]`` into a sequence."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"occurrence needs 0 <= start < end, got [{self.start}, {self.end}]")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "Occurrence") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class Phrase:
    label: str
    occurrences: Tuple[Occurrence, ...]

    def __post_init__(self):
        occs = tuple(sorted(set(self.occurrences)))
        if not occs:
            raise ValueError(f"phrase {self.label!r} has no occurrences")
        object.__setattr__(self, "occurrences", occs)
        object.__setattr__(self, "label", str(self.label))

    @property
    def is_pattern(self) -> bool:
        return len(self.occurrences) >= 2


@dataclass(frozen=True)
class Annotation:
    """A set of labelled phrases whose occurrences never overlap.

    ``dropped`` counts grammar phrases discarded during extraction because
    they covered a single event; it is bookkeeping only and does not take
    part in equality.
    """

    phrases: Tuple[Phrase, ...] = ()
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        phrases = tuple(self.phrases)
        labels = [p.label for p in phrases]
        if len(set(labels)) != len(labels):
            raise ValueError("phrase labels must be unique")
        spans = sorted(o for p in phrases for o in p.occurrences)
        for a, b in zip(spans, spans[1:]):
            if a.overlaps(b):
                raise ValueError(f"occurrences [{a.start}, {a.end}] and [{b.start}, {b.end}] overlap")
        object.__setattr__(self, "phrases", phrases)

    def __len__(self) -> int:
        return len(self.phrases)

    def __iter__(self) -> Iterator[Phrase]:
        return iter(self.phrases)

    def phrase(self, label: str) -> Phrase:
        for p in self.phrases:
            if p.label == label:
                return p
        raise KeyError(label)

    def check_bounds(self, length: int) -> None:
        for p in self.phrases:
            for o in p.occurrences:
                if o.end >= length:
                    raise ValueError(f"phrase {p.label!r} occurrence [{o.start}, {o.end}] exceeds length {length}")

    @classmethod
    def from_json(cls, obj: Sequence[dict]) -> "Annotation":
        return cls(
            tuple(
                Phrase(str(p["label"]), tuple(Occurrence(int(a), int(b)) for a, b in p["occurrences"]))
                for p in obj
            )
        )

    def to_json(self) -> List[dict]:
        return [
            {"label": p.label, "occurrences": [[o.start, o.end] for o in p.occurrences]}
            for p in self.phrases
        ]

    def __eq__(self, other):
        if not isinstance(other, Annotation):
            return NotImplemented
        return _canonical(self) == _canonical(other)

    def __hash__(self):
        return hash(_canonical(self))


def _canonical(a: Annotation):
    return frozenset((p.label, p.occurrences) for p in a.phrases)


def has_repeated_pattern(annotation: Annotation) -> bool:
    return any(p.is_pattern for p in annotation.phrases)


@dataclass(frozen=True)
class AnnotatedSequence:
    id: str
    events: Tuple[NoteEvent, ...]
    ground_truth: Annotation

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        self.ground_truth.check_bounds(len(self.events))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "events": [e.to_json() for e in self.events],
            "annotation": self.ground_truth.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotatedSequence":
        if "lines" in obj:
            lines = [[NoteEvent.from_json(e) for e in line] for line in obj["lines"]]
            return essen_group_phrases(lines, id=str(obj["id"]))
        events = tuple(NoteEvent.from_json(e) for e in obj["events"])
        check_monophonic(events)
        return cls(str(obj["id"]), events, Annotation.from_json(obj.get("annotation", [])))


def extract_annotation(g: Grammar, sequence_length: Optional[int] = None) -> Annotation:
    """Phrases induced by the non-terminals on the start rule's right side.

    Each top-level non-terminal contributes one occurrence spanning its
    expansion; repeated non-terminals share a phrase labelled by the rule id.
    Top-level terminals are skipped, and so are non-terminals that expand to
    a single event.
    """
    lengths = expansion_lengths(g)
    spans: Dict[int, List[Occurrence]] = {}
    dropped = set()
    i = 0
    for sym in g.start_rule.rhs:
        if sym.kind == "t":
            i += 1
            continue
        n = lengths[sym.id]
        if n >= 2:
            spans.setdefault(sym.id, []).append(Occurrence(i, i + n - 1))
        else:
            dropped.add(sym.id)
        i += n
    if sequence_length is not None and i != sequence_length:
        raise ValueError(f"grammar expands to {i} events, expected {sequence_length}")
    phrases = tuple(Phrase(str(nid), tuple(occ)) for nid, occ in spans.items())
    return Annotation(phrases, dropped=len(dropped))


def _letter_labels() -> Iterator[str]:
    """A, B, ..., Z, AA, AB, ..."""
    letters = string.ascii_uppercase
    width = 1
    while True:
        for idx in range(len(letters) ** width):
            label = ""
            for _ in range(width):
                idx, r = divmod(idx, len(letters))
                label = letters[r] + label
            yield label
        width += 1


def essen_group_phrases(lines: Sequence[Sequence[NoteEvent]], id: str = "") -> AnnotatedSequence:
    """Turn line-broken tune text into an annotated sequence.

    Every line is one phrase occurrence. Lines whose (pitch, duration) series
    are identical share a phrase; labels are assigned in order of first
    appearance.
    """
    if not lines:
        raise ValueError("a tune needs at least one line")
    events: List[NoteEvent] = []
    groups: Dict[tuple, List[Occurrence]] = {}
    for line in lines:
        if not line:
            raise ValueError("empty line in tune")
        key = tuple((e.pitch, e.duration) for e in line)
        start = len(events)
        events.extend(line)
        groups.setdefault(key, []).append(Occurrence(start, len(events) - 1))
    check_monophonic(events)
    labels = _letter_labels()
    phrases = tuple(Phrase(next(labels), tuple(occ)) for occ in groups.values())
    return AnnotatedSequence(id, tuple(events), Annotation(phrases))


# -- dataset files ---------------------------------------------------------


def load_dataset(path: Union[str, Path]) -> List[AnnotatedSequence]:
    """Read a JSONL dataset; records may be canonical or line-grouped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(AnnotatedSequence.from_json(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_dataset(path: Union[str, Path], sequences: Iterable[AnnotatedSequence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in sequences:
            fh.write(json.dumps(seq.to_json()) + "\n")
