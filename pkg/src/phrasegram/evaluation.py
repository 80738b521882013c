"""Fuzzy phrase matching and precision/recall/F1 against ground truth."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Hashable, List, Sequence, Tuple

from .segmentation import Annotation, Occurrence

DEFAULT_TAU = 0.7


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Unit-cost edit distance between two sequences of comparable items."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def similarity(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        raise ValueError("similarity is undefined for two empty sequences")
    return 1.0 - levenshtein(a, b) / longest


def extract(occurrence: Occurrence, seq: Sequence) -> Sequence:
    if occurrence.end >= len(seq):
        raise ValueError(f"occurrence [{occurrence.start}, {occurrence.end}] out of bounds for length {len(seq)}")
    return seq[occurrence.start:occurrence.end + 1]


@dataclass(frozen=True)
class FuzzyMatchResult:
    matched_ground_truth: int
    matched_discovered: int


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float


def fuzzy_intersection(p: Annotation, q: Annotation, seq: Sequence, tau: float = DEFAULT_TAU) -> FuzzyMatchResult:
    """Count phrases of ``p`` and of ``q`` that have a counterpart.

    Two phrases match when any pair of their occurrences reaches similarity
    ``tau`` on the subsequences of ``seq`` they span.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    p_spans = [[extract(o, seq) for o in ph.occurrences] for ph in p.phrases]
    q_spans = [[extract(o, seq) for o in ph.occurrences] for ph in q.phrases]
    matched_p = set()
    matched_q = set()
    for i, ps in enumerate(p_spans):
        for j, qs in enumerate(q_spans):
            if i in matched_p and j in matched_q:
                continue
            if any(similarity(a, b) >= tau for a in ps for b in qs):
                matched_p.add(i)
                matched_q.add(j)
    return FuzzyMatchResult(len(matched_p), len(matched_q))


def scores_from_counts(result: FuzzyMatchResult, n_ground_truth: int, n_discovered: int) -> Scores:
    precision = result.matched_discovered / n_discovered if n_discovered else 0.0
    recall = result.matched_ground_truth / n_ground_truth if n_ground_truth else 0.0
    total = precision + recall
    f1 = 2.0 * precision * recall / total if total > 0 else 0.0
    return Scores(precision, recall, f1)


def precision_recall_f1(p: Annotation, q: Annotation, seq: Sequence, tau: float = DEFAULT_TAU) -> Scores:
    """Score discovered phrases ``q`` against ground truth ``p``.

    Precision uses the matched discovered phrases and recall the matched
    ground-truth phrases. Empty denominators yield 0.
    """
    return scores_from_counts(fuzzy_intersection(p, q, seq, tau), len(p), len(q))


def pairwise_f1_matrix(
    annotations: Sequence[Tuple[str, Annotation]], seq: Sequence, tau: float = DEFAULT_TAU
) -> List[List[float]]:
    """Entry (i, j) scores annotation j as discovered against i as ground truth."""
    if len(annotations) < 2:
        raise ValueError("need at least two annotations to compare")
    return [
        [precision_recall_f1(gt, disc, seq, tau).f1 for _, disc in annotations]
        for _, gt in annotations
    ]


def matrix_to_csv(labels: Sequence[str], matrix: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(labels))
    for label, row in zip(labels, matrix):
        writer.writerow([label] + [repr(float(v)) for v in row])
    return buf.getvalue()
