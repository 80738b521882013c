"""Lossless grammar induction: LZ78, Sequitur and Iterative Repeat Replace.

All algorithms take a sequence of hashable tokens (feature vectors in the
music pipeline, anything comparable in tests) and return a ``Grammar`` whose
start rule expands back to exactly that sequence.

Internally tokens are interned to small integers so the inner loops hash
cheap values; the returned grammar carries the original tokens.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .grammar import (
    Grammar,
    NonTerminal,
    Rule,
    Symbol,
    Terminal,
    count,
    join_with_delimiters,
    scan_repeats,
    substitute_in,
)


class Algorithm(str, enum.Enum):
    LZ78 = "lz78"
    SEQUITUR = "sequitur"
    REPAIR = "repair"
    LONGEST_FIRST = "longest_first"
    MOST_COMPRESSIVE = "most_compressive"

    @classmethod
    def parse(cls, name: str) -> "Algorithm":
        key = name.strip().lower().replace("-", "_")
        aliases = {"longestfirst": "longest_first", "mostcompressive": "most_compressive"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            valid = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown algorithm {name!r} (expected one of {valid})") from None


# -- interning -------------------------------------------------------------


class _Interner:
    def __init__(self, tokens: Sequence[Hashable]):
        self.table: List[Hashable] = []
        codes: Dict[Hashable, int] = {}
        self.encoded: List[Terminal] = []
        for tok in tokens:
            code = codes.get(tok)
            if code is None:
                code = codes[tok] = len(self.table)
                self.table.append(tok)
            self.encoded.append(Terminal(code))

    def decode_rules(self, rules: Dict[int, List[Symbol]]) -> Grammar:
        table = self.table
        return Grammar(
            tuple(
                Rule(NonTerminal(nid), tuple(Terminal(table[s.token]) if s.kind == "t" else s for s in body))
                for nid, body in rules.items()
            )
        )


def _size(rules: Dict[int, List[Symbol]]) -> int:
    return sum(len(b) for b in rules.values()) + len(rules) - 1


# -- LZ78 ------------------------------------------------------------------


def induce_lz78(tokens: Sequence[Hashable]) -> Grammar:
    """Single-pass LZ78 parse expressed as a grammar.

    The buffer grows by one token at a time; whenever it equals the body of a
    dictionary rule it collapses to that rule's non-terminal, otherwise it is
    frozen into a new rule and referenced from the start rule.
    """
    it = _Interner(tokens)
    rules: Dict[int, List[Symbol]] = {0: []}
    # The start rule is deliberately absent from the lookup table.
    by_body: Dict[Tuple[Symbol, ...], int] = {}
    buffer: Tuple[Symbol, ...] = ()
    next_id = 1
    for t in it.encoded:
        buffer = buffer + (t,)
        hit = by_body.get(buffer)
        if hit is not None:
            buffer = (NonTerminal(hit),)
        else:
            rules[0].append(NonTerminal(next_id))
            rules[next_id] = list(buffer)
            by_body[buffer] = next_id
            next_id += 1
            buffer = ()
    rules[0].extend(buffer)
    return it.decode_rules(rules)


# -- Sequitur --------------------------------------------------------------


def _leftmost_repeated_digram(rules: Dict[int, List[Symbol]]) -> Optional[Tuple[Symbol, Symbol]]:
    first: Dict[tuple, int] = {}
    end: Dict[tuple, int] = {}
    repeated: Dict[tuple, int] = {}
    offset = 0
    for body in rules.values():
        for i in range(len(body) - 1):
            d = (body[i], body[i + 1])
            g = offset + i
            e = end.get(d)
            if e is None:
                first[d] = g
                end[d] = g + 2
            elif g >= e:
                repeated[d] = first[d]
                end[d] = g + 2
        offset += len(body) + 1
    if not repeated:
        return None
    return min(repeated.items(), key=lambda kv: kv[1])[0]


def _first_underused_rule(rules: Dict[int, List[Symbol]]) -> Optional[int]:
    uses = Counter(s.id for body in rules.values() for s in body if s.kind == "n")
    for nid in rules:
        if nid != 0 and uses[nid] < 2:
            return nid
    return None


def _sequitur_settle(rules: Dict[int, List[Symbol]], next_id: int) -> int:
    """Restore digram uniqueness and rule utility; returns the next free id."""
    done = False
    while not done:
        done = True
        while True:
            d = _leftmost_repeated_digram(rules)
            if d is None:
                break
            done = False
            owner = None
            for nid, body in rules.items():
                if nid != 0 and len(body) == 2 and body[0] == d[0] and body[1] == d[1]:
                    owner = nid
                    break
            if owner is None:
                owner = next_id
                next_id += 1
                for nid in rules:
                    rules[nid] = substitute_in(rules[nid], d, NonTerminal(owner))
                rules[owner] = list(d)
            else:
                for nid in rules:
                    if nid != owner:
                        rules[nid] = substitute_in(rules[nid], d, NonTerminal(owner))
        while True:
            victim = _first_underused_rule(rules)
            if victim is None:
                break
            done = False
            body = rules.pop(victim)
            sym = NonTerminal(victim)
            for nid, other in rules.items():
                if sym in other:
                    spliced: List[Symbol] = []
                    for s in other:
                        if s == sym:
                            spliced.extend(body)
                        else:
                            spliced.append(s)
                    rules[nid] = spliced
    return next_id


def induce_sequitur(
    tokens: Sequence[Hashable],
    on_token: Optional[Callable[[Grammar], None]] = None,
) -> Grammar:
    """Sequitur as a fixed-point loop rather than the linear-time original.

    After each appended token the grammar is rewritten until no digram occurs
    twice and every rule is referenced at least twice. Repeated digrams are
    handled leftmost-first; a digram that already is the whole body of a rule
    is replaced by that rule's non-terminal. ``on_token`` (if given) receives
    the settled grammar after every token.
    """
    it = _Interner(tokens)
    rules: Dict[int, List[Symbol]] = {0: []}
    next_id = 1
    for t in it.encoded:
        rules[0].append(t)
        next_id = _sequitur_settle(rules, next_id)
        if on_token is not None:
            on_token(it.decode_rules(rules))
    return it.decode_rules(rules)


# -- Iterative Repeat Replace ------------------------------------------------


def _score_count(length: int, occurrences: int) -> int:
    return occurrences


def _score_length(length: int, occurrences: int) -> int:
    return length


def _score_compression(length: int, occurrences: int) -> int:
    return length * occurrences - length - occurrences - 1


class Objective(enum.Enum):
    """IRR scoring functions over (pattern length, non-overlapping count)."""

    REPAIR = "repair"
    LONGEST_FIRST = "longest_first"
    MOST_COMPRESSIVE = "most_compressive"

    def score(self, length: int, occurrences: int) -> int:
        return _SCORERS[self](length, occurrences)


_SCORERS = {
    Objective.REPAIR: _score_count,
    Objective.LONGEST_FIRST: _score_length,
    Objective.MOST_COMPRESSIVE: _score_compression,
}


def score_repair(w: Sequence[Symbol], g: Grammar) -> int:
    return count(w, g)


def score_longest(w: Sequence[Symbol], g: Grammar) -> int:
    return len(w)


def score_most_compressive(w: Sequence[Symbol], g: Grammar) -> int:
    return _score_compression(len(w), count(w, g))


@dataclass(frozen=True)
class IrrStep:
    """One accepted substitution of an IRR run (tokens already decoded)."""

    before: Grammar
    pattern: Tuple[Symbol, ...]
    score: int
    size_before: int
    size_after: int


def selection_key(score, first_position: int, length: int):
    """Sort key for IRR candidates; the maximum wins.

    Higher score first, then the earlier first occurrence (rule order, then
    offset), then the shorter pattern. Two candidates sharing a first
    position and a length are the same window, so no further key is needed.
    """
    return (score, -first_position, -length)


def best_repeat(rules: Sequence[Sequence[Symbol]], objective: Objective):
    """Return ``(pattern, count, score)`` for the argmax repeat, or None."""
    flat = join_with_delimiters(rules)
    scorer = _SCORERS[objective]
    best = None
    best_key = None
    if objective is Objective.REPAIR:
        # Every repeat's prefix digram has at least its count and an earlier or
        # equal first position, so the Repair argmax is always a digram.
        candidates = _digram_repeats(flat)
    else:
        candidates = scan_repeats(flat)
    for pattern, c, pos in candidates:
        s = scorer(len(pattern), c)
        key = selection_key(s, pos, len(pattern))
        if best_key is None or key > best_key:
            best_key = key
            best = (pattern, c, s)
    return best


def _digram_repeats(flat):
    first: Dict[tuple, int] = {}
    end: Dict[tuple, int] = {}
    counts: Dict[tuple, int] = {}
    for i in range(len(flat) - 1):
        d = (flat[i], flat[i + 1])
        e = end.get(d)
        if e is None:
            first[d] = i
            end[d] = i + 2
            counts[d] = 1
        elif i >= e:
            counts[d] += 1
            end[d] = i + 2
    return [(d, c, first[d]) for d, c in counts.items() if c >= 2]


def induce_irr(
    tokens: Sequence[Hashable],
    objective: Objective,
    trace: Optional[List[IrrStep]] = None,
) -> Grammar:
    """Iterative Repeat Replace with the given objective.

    Starting from ``N_s -> tokens``, the best-scoring repeat is replaced by a
    fresh non-terminal for as long as doing so strictly shrinks the grammar.
    The loop stops at the first argmax that fails the size test. Accepted
    steps are appended to ``trace`` when one is supplied.
    """
    objective = Objective(objective)
    it = _Interner(tokens)
    rules: Dict[int, List[Symbol]] = {0: list(it.encoded)}
    next_id = 1
    size = _size(rules)
    while True:
        best = best_repeat(list(rules.values()), objective)
        if best is None:
            break
        pattern, _, score = best
        sym = NonTerminal(next_id)
        candidate = {nid: substitute_in(body, pattern, sym) for nid, body in rules.items()}
        candidate[next_id] = list(pattern)
        new_size = _size(candidate)
        if new_size >= size:
            break
        if trace is not None:
            before = it.decode_rules(rules)
            decoded = tuple(Terminal(it.table[s.token]) if s.kind == "t" else s for s in pattern)
            trace.append(IrrStep(before, decoded, score, size, new_size))
        rules = candidate
        size = new_size
        next_id += 1
    return it.decode_rules(rules)


def induce(algorithm, tokens: Sequence[Hashable]) -> Grammar:
    algorithm = Algorithm.parse(algorithm) if isinstance(algorithm, str) and not isinstance(algorithm, Algorithm) else Algorithm(algorithm)
    if algorithm is Algorithm.LZ78:
        return induce_lz78(tokens)
    if algorithm is Algorithm.SEQUITUR:
        return induce_sequitur(tokens)
    return induce_irr(tokens, Objective(algorithm.value))
