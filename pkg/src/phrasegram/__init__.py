"""Musical phrase segmentation by lossless grammar induction."""

from .evaluation import (
    DEFAULT_TAU,
    FuzzyMatchResult,
    Scores,
    extract,
    fuzzy_intersection,
    levenshtein,
    pairwise_f1_matrix,
    precision_recall_f1,
    similarity,
)
from .grammar import (
    START,
    Grammar,
    GrammarError,
    NonTerminal,
    Rule,
    Terminal,
    count,
    expand,
    grammar_size,
    repeats,
    substitute,
)
from .induction import Algorithm, Objective, induce, induce_irr, induce_lz78, induce_sequitur
from .segmentation import (
    AnnotatedSequence,
    Annotation,
    Occurrence,
    Phrase,
    essen_group_phrases,
    extract_annotation,
    has_repeated_pattern,
    load_dataset,
)
from .viewpoints import NoteEvent, Viewpoint, ViewpointCombination, transform, vci_to_combination

__all__ = [name for name in dir() if not name.startswith("_")]
