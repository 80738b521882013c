"""Note events, viewpoint functions, and viewpoint combinations (VCIs).

Five viewpoints are defined in a fixed ordinal order:
pitch (1), duration (2), ioi (3), pitchC (4), pitchI (5).
A viewpoint combination is a non-empty subset of them; its VCI is the 1-based
position of the subset when all 31 subsets are listed by size and then
lexicographically by ordinal. For example VCI-2 is {duration}, VCI-12 is
{duration, pitchI} and VCI-31 is all five.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from ._rational import Number, as_rational, to_json_number

FeatureValue = Optional[Number]
FeatureVector = Tuple[FeatureValue, ...]


@dataclass(frozen=True)
class NoteEvent:
    onset: Number
    pitch: int
    duration: Number

    def __post_init__(self):
        object.__setattr__(self, "onset", as_rational(self.onset))
        object.__setattr__(self, "duration", as_rational(self.duration))
        if isinstance(self.pitch, bool) or not isinstance(self.pitch, int):
            raise TypeError(f"pitch must be an int, got {self.pitch!r}")
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside MIDI range 0-127")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.onset < 0:
            raise ValueError(f"onset must be non-negative, got {self.onset}")

    @classmethod
    def from_json(cls, obj) -> "NoteEvent":
        return cls(as_rational(obj["onset"]), int(obj["pitch"]), as_rational(obj["duration"]))

    def to_json(self) -> dict:
        return {
            "onset": to_json_number(Fraction(self.onset)),
            "pitch": self.pitch,
            "duration": to_json_number(Fraction(self.duration)),
        }


def check_monophonic(events: Sequence[NoteEvent]) -> None:
    for prev, cur in zip(events, events[1:]):
        if cur.onset <= prev.onset:
            raise ValueError(f"onsets must strictly increase ({prev.onset} then {cur.onset})")


class Viewpoint(enum.IntEnum):
    PITCH = 1
    DURATION = 2
    IOI = 3
    PITCH_CONTOUR = 4
    PITCH_INTERVAL = 5

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def binary(self) -> bool:
        return self >= Viewpoint.IOI

    @classmethod
    def parse(cls, name: str) -> "Viewpoint":
        for vp, label in _LABELS.items():
            if name == label or name.lower() == label.lower():
                return vp
        raise ValueError(f"unknown viewpoint {name!r}")


_LABELS = {
    Viewpoint.PITCH: "pitch",
    Viewpoint.DURATION: "duration",
    Viewpoint.IOI: "ioi",
    Viewpoint.PITCH_CONTOUR: "pitchC",
    Viewpoint.PITCH_INTERVAL: "pitchI",
}


def vp_pitch(e: NoteEvent) -> int:
    return e.pitch


def vp_duration(e: NoteEvent) -> Number:
    return e.duration


def vp_ioi(prev: Optional[NoteEvent], e: NoteEvent) -> Optional[Number]:
    """Inter-onset interval: time elapsed since the previous onset."""
    if prev is None:
        return None
    return e.onset - prev.onset


def vp_ioi_duration_difference(prev: Optional[NoteEvent], e: NoteEvent) -> Optional[Number]:
    """Alternative ioi reading: difference of consecutive durations."""
    if prev is None:
        return None
    return e.duration - prev.duration


def vp_pitch_contour(prev: Optional[NoteEvent], e: NoteEvent) -> Optional[int]:
    if prev is None:
        return None
    return (e.pitch > prev.pitch) - (e.pitch < prev.pitch)


def vp_pitch_interval(prev: Optional[NoteEvent], e: NoteEvent) -> Optional[int]:
    if prev is None:
        return None
    return e.pitch - prev.pitch


# Short aliases matching the viewpoint labels.
vp_pitchC = vp_pitch_contour
vp_pitchI = vp_pitch_interval


@dataclass(frozen=True)
class ViewpointCombination:
    members: Tuple[Viewpoint, ...]

    def __post_init__(self):
        members = tuple(sorted(set(Viewpoint(m) for m in self.members)))
        if not members:
            raise ValueError("a viewpoint combination needs at least one viewpoint")
        object.__setattr__(self, "members", members)

    @property
    def vci(self) -> int:
        return combination_to_vci(self)

    @property
    def width(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ", ".join(m.label for m in self.members) + "}"


@lru_cache(maxsize=None)
def _enumeration() -> Tuple[Tuple[Viewpoint, ...], ...]:
    ordered = sorted(Viewpoint)
    subsets = []
    for size in range(1, len(ordered) + 1):
        subsets.extend(combinations(ordered, size))
    return tuple(subsets)


def vci_to_combination(vci: int) -> ViewpointCombination:
    subsets = _enumeration()
    if isinstance(vci, bool) or not isinstance(vci, int) or not 1 <= vci <= len(subsets):
        raise ValueError(f"VCI must be an integer in 1..{len(subsets)}, got {vci!r}")
    return ViewpointCombination(subsets[vci - 1])


def combination_to_vci(combination: Union[ViewpointCombination, Sequence[Viewpoint]]) -> int:
    members = combination.members if isinstance(combination, ViewpointCombination) else tuple(sorted(set(combination)))
    return _enumeration().index(tuple(members)) + 1


ALL_VCIS = tuple(range(1, 32))


def parse_vcis(text: str) -> List[int]:
    """Parse ``"all"``, ``"2,3,12"`` or ranges like ``"1-5,12"``."""
    text = text.strip()
    if text.lower() == "all":
        return list(ALL_VCIS)
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    for v in out:
        vci_to_combination(v)
    return out


def transform(
    combination: Union[ViewpointCombination, int],
    events: Sequence[NoteEvent],
    *,
    ioi_from_durations: bool = False,
) -> List[FeatureVector]:
    """Map each event to a feature vector, one slot per member viewpoint.

    Binary viewpoints look at ``(events[i-1], events[i])`` and are ``None`` at
    index 0. ``ioi_from_durations`` swaps the onset-difference ioi for the
    duration-difference variant.
    """
    if isinstance(combination, int):
        combination = vci_to_combination(combination)
    ioi = vp_ioi_duration_difference if ioi_from_durations else vp_ioi
    funcs = []
    for m in combination.members:
        if m is Viewpoint.PITCH:
            funcs.append(lambda prev, e: e.pitch)
        elif m is Viewpoint.DURATION:
            funcs.append(lambda prev, e: e.duration)
        elif m is Viewpoint.IOI:
            funcs.append(ioi)
        elif m is Viewpoint.PITCH_CONTOUR:
            funcs.append(vp_pitch_contour)
        else:
            funcs.append(vp_pitch_interval)
    out: List[FeatureVector] = []
    prev: Optional[NoteEvent] = None
    for e in events:
        out.append(tuple(f(prev, e) for f in funcs))
        prev = e
    return out
