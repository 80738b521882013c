"""Experiment grid: datasets x algorithms x viewpoint combinations.

Every cell transforms one annotated sequence with a viewpoint combination,
induces a grammar, extracts the discovered annotation and scores it against
the ground truth on the same feature sequence. Cells are independent, so the
grid fans out over a process pool; results are re-sorted before writing so
that output files do not depend on the degree of parallelism.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .evaluation import (
    DEFAULT_TAU,
    fuzzy_intersection,
    matrix_to_csv,
    pairwise_f1_matrix,
    scores_from_counts,
)
from .grammar import grammar_size
from .induction import Algorithm, induce
from .segmentation import AnnotatedSequence, Annotation, extract_annotation, load_dataset
from .viewpoints import transform, vci_to_combination

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


class XorShift64Star:
    """xorshift64* generator seeded through one splitmix64 step.

    Kept deliberately tiny so the sampling sequence can be reproduced in any
    language: state update ``x ^= x >> 12; x ^= x << 25; x ^= x >> 27``
    (64-bit), output ``x * 0x2545F4914F6CDD1D mod 2**64``.
    """

    def __init__(self, seed: int):
        z = (seed + 0x9E3779B97F4A7C15) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n


def sample_sequences(sequences: Sequence[AnnotatedSequence], count: int, seed: int) -> List[AnnotatedSequence]:
    """Uniform sample without replacement, independent of input order.

    Sequences are sorted by id, a partial Fisher-Yates shuffle driven by
    ``XorShift64Star(seed)`` picks ``count`` of them, and the pick is
    returned in id order.
    """
    ordered = sorted(sequences, key=lambda s: s.id)
    if count > len(ordered):
        raise ValueError(f"cannot sample {count} sequences from {len(ordered)}")
    rng = XorShift64Star(seed)
    idx = list(range(len(ordered)))
    for i in range(count):
        j = i + rng.below(len(idx) - i)
        idx[i], idx[j] = idx[j], idx[i]
    return [ordered[i] for i in sorted(idx[:count])]


@dataclass
class ExperimentConfig:
    datasets: List[Path]
    algorithms: List[Algorithm] = field(default_factory=lambda: list(Algorithm))
    vcis: List[int] = field(default_factory=lambda: list(range(1, 32)))
    tau: float = DEFAULT_TAU
    sample: Optional[Tuple[int, int]] = None
    out_dir: Path = Path("results")
    jobs: int = 1
    emit_grammar: bool = False
    emit_annotations: bool = False
    ioi_from_durations: bool = False

    def __post_init__(self):
        self.datasets = [Path(p) for p in self.datasets]
        self.algorithms = [a if isinstance(a, Algorithm) else Algorithm.parse(a) for a in self.algorithms]
        for v in self.vcis:
            vci_to_combination(v)
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        if self.jobs < 1:
            raise ValueError("jobs must be a positive integer")
        self.out_dir = Path(self.out_dir)


@dataclass
class ExperimentResult:
    dataset: str
    sequence_id: str
    algorithm: str
    vci: int
    status: str = "ok"
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    matched_ground_truth: int = 0
    matched_discovered: int = 0
    ground_truth_phrases: int = 0
    phrase_count: int = 0
    dropped_phrases: int = 0
    grammar_size: int = 0
    rule_count: int = 0
    runtime_ms: float = 0.0
    error: str = ""


RESULT_COLUMNS = [
    "dataset", "sequence_id", "algorithm", "vci", "status", "precision", "recall", "f1",
    "matched_ground_truth", "matched_discovered", "ground_truth_phrases", "phrase_count",
    "dropped_phrases", "grammar_size", "rule_count", "error",
]


@dataclass
class AggregateRow:
    dataset: str
    algorithm: str
    vci: int
    mean_f1: float
    variance_f1: float
    max_f1: float
    sequences: int
    failures: int


@dataclass
class Simulation:
    """Everything one cell produced, including optional exports."""

    result: ExperimentResult
    grammar_json: Optional[dict] = None
    annotation_json: Optional[list] = None


def run_simulation(
    seq: AnnotatedSequence,
    algorithm,
    vci: int,
    tau: float = DEFAULT_TAU,
    dataset: str = "",
    ioi_from_durations: bool = False,
    keep_artifacts: bool = False,
) -> Simulation:
    algorithm = algorithm if isinstance(algorithm, Algorithm) else Algorithm.parse(algorithm)
    result = ExperimentResult(dataset, seq.id, algorithm.value, vci)
    start = time.perf_counter()
    try:
        features = transform(vci_to_combination(vci), seq.events, ioi_from_durations=ioi_from_durations)
        g = induce(algorithm, features)
        discovered = extract_annotation(g, len(features))
        match = fuzzy_intersection(seq.ground_truth, discovered, features, tau)
        scores = scores_from_counts(match, len(seq.ground_truth), len(discovered))
    except Exception as exc:  # one bad cell must not sink the grid
        result.status = "error"
        result.error = f"{type(exc).__name__}: {exc}"
        result.runtime_ms = (time.perf_counter() - start) * 1000.0
        return Simulation(result)
    result.runtime_ms = (time.perf_counter() - start) * 1000.0
    result.precision = scores.precision
    result.recall = scores.recall
    result.f1 = scores.f1
    result.matched_ground_truth = match.matched_ground_truth
    result.matched_discovered = match.matched_discovered
    result.ground_truth_phrases = len(seq.ground_truth)
    result.phrase_count = len(discovered)
    result.dropped_phrases = discovered.dropped
    result.grammar_size = grammar_size(g)
    result.rule_count = len(g)
    if keep_artifacts:
        return Simulation(result, g.to_json_obj(), discovered.to_json())
    return Simulation(result)


def _run_cell(args) -> Simulation:
    return run_simulation(*args)


def aggregate(results: Iterable[ExperimentResult]) -> List[AggregateRow]:
    """Mean, population variance and max of F1 per (dataset, algorithm, vci)."""
    groups: Dict[Tuple[str, str, int], List[ExperimentResult]] = {}
    for r in results:
        groups.setdefault((r.dataset, r.algorithm, r.vci), []).append(r)
    rows = []
    for (dataset, algorithm, vci), members in groups.items():
        f1s = [r.f1 for r in members if r.status == "ok"]
        failures = len(members) - len(f1s)
        if f1s:
            mean = math.fsum(f1s) / len(f1s)
            var = math.fsum((x - mean) ** 2 for x in f1s) / len(f1s)
            top = max(f1s)
        else:
            mean = var = top = float("nan")
        rows.append(AggregateRow(dataset, algorithm, vci, mean, var, top, len(f1s), failures))
    return rows


@dataclass
class SummaryRow:
    dataset: str
    algorithm: str
    vcis: int
    mean_over_vcis: float
    variance_over_vcis: float
    best_vci: int
    best_mean_f1: float


def summarize(rows: Iterable[AggregateRow]) -> List[SummaryRow]:
    """Per (dataset, algorithm): spread of mean F1 across VCIs and the best VCI."""
    groups: Dict[Tuple[str, str], List[AggregateRow]] = {}
    for r in rows:
        if r.sequences:
            groups.setdefault((r.dataset, r.algorithm), []).append(r)
    out = []
    for (dataset, algorithm), members in groups.items():
        means = [r.mean_f1 for r in members]
        mu = math.fsum(means) / len(means)
        var = math.fsum((m - mu) ** 2 for m in means) / len(means)
        best = max(members, key=lambda r: (r.mean_f1, -r.vci))
        out.append(SummaryRow(dataset, algorithm, len(members), mu, var, best.vci, best.mean_f1))
    return out


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def _safe_name(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in text)


@dataclass
class GridOutput:
    results: List[ExperimentResult]
    aggregates: List[AggregateRow]
    summary: List[SummaryRow]


def load_config_datasets(config: ExperimentConfig) -> List[Tuple[str, List[AnnotatedSequence]]]:
    loaded = []
    for path in config.datasets:
        try:
            sequences = load_dataset(path)
        except OSError as exc:
            raise SystemExit(f"cannot read dataset {path}: {exc}") from exc
        sequences = sorted(sequences, key=lambda s: s.id)
        if config.sample is not None:
            n, seed = config.sample
            sequences = sample_sequences(sequences, n, seed)
        loaded.append((path.stem, sequences))
    return loaded


def run_grid(config: ExperimentConfig, write: bool = True) -> GridOutput:
    datasets = load_config_datasets(config)
    keep = config.emit_grammar or config.emit_annotations
    cells = [
        (seq, algo, vci, config.tau, name, config.ioi_from_durations, keep)
        for name, sequences in datasets
        for seq in sequences
        for algo in config.algorithms
        for vci in config.vcis
    ]
    log.info("running %d simulations with %d job(s)", len(cells), config.jobs)
    if config.jobs == 1 or len(cells) <= 1:
        sims = [_run_cell(c) for c in cells]
    else:
        chunk = max(1, len(cells) // (config.jobs * 8))
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            sims = list(pool.map(_run_cell, cells, chunksize=chunk))

    dataset_rank = {name: i for i, (name, _) in enumerate(datasets)}
    algo_rank = {a.value: i for i, a in enumerate(config.algorithms)}
    sims.sort(key=lambda s: (dataset_rank[s.result.dataset], s.result.sequence_id, algo_rank[s.result.algorithm], s.result.vci))
    results = [s.result for s in sims]
    failures = [r for r in results if r.status != "ok"]
    for r in failures:
        log.warning("%s/%s %s vci=%d failed: %s", r.dataset, r.sequence_id, r.algorithm, r.vci, r.error)
    aggregates = aggregate(results)
    summary = summarize(aggregates)
    output = GridOutput(results, aggregates, summary)
    if write:
        write_outputs(config, output, sims)
    return output


def write_outputs(config: ExperimentConfig, output: GridOutput, sims: Sequence[Simulation]) -> None:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "results.csv", RESULT_COLUMNS, (asdict(r) for r in output.results))
    _write_csv(
        out / "aggregates.csv",
        ["dataset", "algorithm", "vci", "mean_f1", "variance_f1", "max_f1", "sequences", "failures"],
        (asdict(r) for r in output.aggregates),
    )
    _write_csv(
        out / "summary.csv",
        ["dataset", "algorithm", "vcis", "mean_over_vcis", "variance_over_vcis", "best_vci", "best_mean_f1"],
        (asdict(r) for r in output.summary),
    )
    # Wall-clock times vary run to run, so they live apart from results.csv.
    _write_csv(
        out / "timings.csv",
        ["dataset", "sequence_id", "algorithm", "vci", "runtime_ms"],
        (asdict(r) for r in output.results),
    )
    meta = {
        "tau": config.tau,
        "algorithms": [a.value for a in config.algorithms],
        "vcis": list(config.vcis),
        "datasets": [str(p) for p in config.datasets],
        "sample": list(config.sample) if config.sample else None,
        "sampler": "xorshift64* seeded via splitmix64; partial Fisher-Yates over id-sorted sequences",
        "variance": "population (divide by n)",
        "precision_numerator": "matched_discovered",
        "recall_numerator": "matched_ground_truth",
        "zero_denominator": "precision=0 if no discovered phrases; recall=0 if no ground truth phrases; f1=0 if precision+recall=0",
        "ioi": "duration difference" if config.ioi_from_durations else "onset difference",
    }
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if config.emit_grammar or config.emit_annotations:
        for sim in sims:
            r = sim.result
            if r.status != "ok":
                continue
            stem = _safe_name(f"{r.dataset}__{r.sequence_id}__{r.algorithm}__vci{r.vci:02d}")
            if config.emit_grammar and sim.grammar_json is not None:
                d = out / "grammars"
                d.mkdir(exist_ok=True)
                (d / f"{stem}.json").write_text(json.dumps(sim.grammar_json) + "\n", encoding="utf-8")
            if config.emit_annotations and sim.annotation_json is not None:
                d = out / "annotations"
                d.mkdir(exist_ok=True)
                (d / f"{stem}.json").write_text(json.dumps(sim.annotation_json) + "\n", encoding="utf-8")


def compare_annotations(
    seq: AnnotatedSequence,
    extra: Sequence[Tuple[str, Annotation]],
    vci: int,
    tau: float = DEFAULT_TAU,
    include_ground_truth: bool = True,
    ioi_from_durations: bool = False,
) -> str:
    """Pairwise F1 matrix (as CSV) over the ground truth and ``extra``."""
    features = transform(vci_to_combination(vci), seq.events, ioi_from_durations=ioi_from_durations)
    named = ([("ground_truth", seq.ground_truth)] if include_ground_truth else []) + list(extra)
    for _, ann in named:
        ann.check_bounds(len(features))
    matrix = pairwise_f1_matrix(named, features, tau)
    return matrix_to_csv([label for label, _ in named], matrix)


def algorithm_annotations(
    seq: AnnotatedSequence, algorithms: Iterable[Algorithm], vci: int, ioi_from_durations: bool = False
) -> List[Tuple[str, Annotation]]:
    features = transform(vci_to_combination(vci), seq.events, ioi_from_durations=ioi_from_durations)
    return [(a.value, extract_annotation(induce(a, features), len(features))) for a in algorithms]
