"""Straight-line grammars over arbitrary token alphabets.

A grammar here always derives exactly one string. Rules keep insertion order
and the start rule (id 0) comes first. The helpers in this module (``count``,
``repeats``, ``substitute``, ``grammar_size``, ``expand``) are the primitives
every induction algorithm is written against.

Occurrence counting is greedy and left to right inside each right-hand side,
and no occurrence ever spans two rules.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple, Union

from ._rational import as_rational, to_json_number


class Terminal(NamedTuple):
    token: Hashable
    kind: str = "t"

    def __repr__(self) -> str:
        return f"T({self.token!r})"


class NonTerminal(NamedTuple):
    id: int
    kind: str = "n"

    def __repr__(self) -> str:
        return "N_s" if self.id == 0 else f"N_{self.id}"


Symbol = Union[Terminal, NonTerminal]
Pattern = Tuple[Symbol, ...]

START = NonTerminal(0)


class GrammarError(ValueError):
    """Raised for structurally broken grammars (cycles, dangling rules)."""


@dataclass(frozen=True)
class Rule:
    lhs: NonTerminal
    rhs: Tuple[Symbol, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))


def lhs(rule: Rule) -> NonTerminal:
    return rule.lhs


def rhs(rule: Rule) -> Tuple[Symbol, ...]:
    return rule.rhs


@dataclass(frozen=True)
class Grammar:
    rules: Tuple[Rule, ...]
    _index: Dict[int, Rule] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        index = {}
        for rule in self.rules:
            if rule.lhs.id in index:
                raise GrammarError(f"duplicate rule for {rule.lhs!r}")
            index[rule.lhs.id] = rule
        if START.id not in index:
            raise GrammarError("grammar has no start rule")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_tokens(cls, tokens: Iterable[Hashable]) -> "Grammar":
        """The trivial grammar ``N_s -> tokens``."""
        return cls((Rule(START, tuple(Terminal(t) for t in tokens)),))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Sequence[Symbol]]) -> "Grammar":
        return cls(tuple(Rule(NonTerminal(k), tuple(v)) for k, v in mapping.items()))

    @property
    def start(self) -> NonTerminal:
        return START

    @property
    def start_rule(self) -> Rule:
        return self._index[START.id]

    def rule(self, n: NonTerminal) -> Rule:
        try:
            return self._index[n.id]
        except KeyError:
            raise KeyError(f"no rule defines {n!r}") from None

    def __contains__(self, n: NonTerminal) -> bool:
        return n.id in self._index

    def __len__(self) -> int:
        return len(self.rules)

    def rhs_sequences(self) -> List[Tuple[Symbol, ...]]:
        return [r.rhs for r in self.rules]

    def as_mapping(self) -> Dict[int, Tuple[Symbol, ...]]:
        return {r.lhs.id: r.rhs for r in self.rules}

    def validate(self) -> None:
        """Check for dangling non-terminals and derivation cycles."""
        for rule in self.rules:
            for sym in rule.rhs:
                if sym.kind == "n" and sym.id not in self._index:
                    raise GrammarError(f"{rule.lhs!r} references undefined {sym!r}")
        _topological_order(self)

    def __str__(self) -> str:
        lines = []
        for rule in self.rules:
            body = " ".join(_fmt_symbol(s) for s in rule.rhs) or "()"
            lines.append(f"{rule.lhs!r} -> {body}")
        return "\n".join(lines)

    # -- serialization -------------------------------------------------

    def to_json_obj(self) -> Dict[str, Any]:
        return {
            "rules": [
                {"lhs": r.lhs.id, "rhs": [_symbol_to_json(s) for s in r.rhs]}
                for r in self.rules
            ]
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_obj(), **kwargs)

    @classmethod
    def from_json_obj(cls, obj: Mapping[str, Any]) -> "Grammar":
        return cls(
            tuple(
                Rule(NonTerminal(int(r["lhs"])), tuple(_symbol_from_json(s) for s in r["rhs"]))
                for r in obj["rules"]
            )
        )

    @classmethod
    def from_json(cls, text: str) -> "Grammar":
        return cls.from_json_obj(json.loads(text))


def _fmt_symbol(sym: Symbol) -> str:
    if sym.kind == "n":
        return repr(sym)
    tok = sym.token
    if isinstance(tok, tuple):
        inner = ", ".join("⊥" if v is None else str(to_json_number(v)) for v in tok)
        return f"<{inner}>"
    return str(tok)


def _symbol_to_json(sym: Symbol):
    if sym.kind == "n":
        return {"n": sym.id}
    tok = sym.token
    if isinstance(tok, tuple):
        return {"t": [to_json_number(v) for v in tok]}
    return {"t": to_json_number(tok)}


def _symbol_from_json(obj) -> Symbol:
    if "n" in obj:
        return NonTerminal(int(obj["n"]))
    tok = obj["t"]
    if isinstance(tok, list):
        return Terminal(tuple(None if v is None else as_rational(v) for v in tok))
    if isinstance(tok, float):
        return Terminal(as_rational(tok))
    return Terminal(tok)


# -- occurrence primitives -------------------------------------------------


def count_in(seq: Sequence[Symbol], pattern: Sequence[Symbol]) -> int:
    """Greedy leftmost non-overlapping occurrences of ``pattern`` in ``seq``."""
    k = len(pattern)
    if k == 1:
        return list(seq).count(pattern[0])
    pattern = tuple(pattern)
    first = pattern[0]
    n = len(seq)
    c = 0
    i = 0
    while i <= n - k:
        if seq[i] == first and tuple(seq[i:i + k]) == pattern:
            c += 1
            i += k
        else:
            i += 1
    return c


def substitute_in(seq: Sequence[Symbol], pattern: Sequence[Symbol], replacement: Symbol) -> List[Symbol]:
    k = len(pattern)
    pattern = tuple(pattern)
    first = pattern[0]
    n = len(seq)
    out: List[Symbol] = []
    i = 0
    while i < n:
        if i <= n - k and seq[i] == first and tuple(seq[i:i + k]) == pattern:
            out.append(replacement)
            i += k
        else:
            out.append(seq[i])
            i += 1
    return out


def count(pattern: Sequence[Symbol], g: Grammar) -> int:
    """Non-overlapping occurrences of ``pattern`` across all right-hand sides."""
    if len(pattern) == 0:
        raise ValueError("pattern must be non-empty")
    return sum(count_in(r.rhs, pattern) for r in g.rules)


def substitute(g: Grammar, pattern: Sequence[Symbol], n: NonTerminal) -> Grammar:
    """Replace every greedy occurrence of ``pattern`` with ``n``.

    No rule for ``n`` is added; callers do that themselves.
    """
    if len(pattern) == 0:
        raise ValueError("pattern must be non-empty")
    if n in g:
        raise GrammarError(f"{n!r} is already defined")
    return Grammar(tuple(Rule(r.lhs, tuple(substitute_in(r.rhs, pattern, n))) for r in g.rules))


def grammar_size(g: Grammar) -> int:
    """Length of all right-hand sides joined with one delimiter between rules."""
    return sum(len(r.rhs) for r in g.rules) + len(g.rules) - 1


def join_with_delimiters(seqs: Iterable[Sequence[Symbol]]) -> list:
    """Concatenate sequences separated by unique sentinels.

    Each sentinel is a fresh object, so it never participates in a repeat and
    no window can straddle two sequences.
    """
    flat: list = []
    for idx, seq in enumerate(seqs):
        if idx:
            flat.append(object())
        flat.extend(seq)
    return flat


def scan_repeats(flat: Sequence) -> Iterator[Tuple[tuple, int, int]]:
    """Yield ``(pattern, count, first_position)`` for every repeat in ``flat``.

    A repeat is a window of length >= 2 with at least two greedy
    non-overlapping occurrences. Windows are grown one symbol at a time and a
    branch is abandoned once fewer than two (possibly overlapping)
    occurrences remain, which cannot hide any longer repeat.
    """
    groups: Dict[tuple, List[int]] = defaultdict(list)
    for i in range(len(flat) - 1):
        groups[(flat[i], flat[i + 1])].append(i)
    frontier = [(p, occ) for p, occ in groups.items() if len(occ) > 1]
    length = 2
    n = len(flat)
    while frontier:
        nxt = []
        for pattern, occ in frontier:
            c = 0
            end = 0
            for i in occ:
                if i >= end:
                    c += 1
                    end = i + length
            if c >= 2:
                yield pattern, c, occ[0]
            ext: Dict[Any, List[int]] = {}
            for i in occ:
                j = i + length
                if j < n:
                    sym = flat[j]
                    bucket = ext.get(sym)
                    if bucket is None:
                        ext[sym] = [i]
                    else:
                        bucket.append(i)
            for sym, o in ext.items():
                if len(o) > 1:
                    nxt.append((pattern + (sym,), o))
        frontier = nxt
        length += 1


def repeat_counts(g: Grammar) -> Dict[Pattern, int]:
    return {p: c for p, c, _ in scan_repeats(join_with_delimiters(g.rhs_sequences()))}


def repeats(g: Grammar) -> set:
    """Every window of length >= 2 whose non-overlapping count is at least 2."""
    return set(repeat_counts(g))


# -- expansion -------------------------------------------------------------


def _topological_order(g: Grammar) -> List[int]:
    """Rule ids ordered so that every rule follows the rules it references."""
    state: Dict[int, int] = {}
    order: List[int] = []
    for root in g.as_mapping():
        if root in state:
            continue
        stack = [(root, iter(g._index[root].rhs))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            for sym in it:
                if sym.kind != "n":
                    continue
                if sym.id not in g._index:
                    raise KeyError(f"no rule defines {sym!r}")
                s = state.get(sym.id)
                if s == 1:
                    raise GrammarError(f"derivation cycle through {sym!r}")
                if s is None:
                    state[sym.id] = 1
                    stack.append((sym.id, iter(g._index[sym.id].rhs)))
                    break
            else:
                state[node] = 2
                order.append(node)
                stack.pop()
    return order


def expansion_lengths(g: Grammar) -> Dict[int, int]:
    lengths: Dict[int, int] = {}
    for nid in _topological_order(g):
        lengths[nid] = sum(lengths[s.id] if s.kind == "n" else 1 for s in g._index[nid].rhs)
    return lengths


def expand(g: Grammar, n: NonTerminal = START) -> Tuple[Hashable, ...]:
    """Terminal tokens derived from ``n``."""
    if n.id not in g._index:
        raise KeyError(f"no rule defines {n!r}")
    memo: Dict[int, Tuple[Hashable, ...]] = {}
    for nid in _topological_order(g):
        out: List[Hashable] = []
        for s in g._index[nid].rhs:
            if s.kind == "n":
                out.extend(memo[s.id])
            else:
                out.append(s.token)
        memo[nid] = tuple(out)
    return memo[n.id]
