"""Command line entry point: ``phrasegram run | compare | convert-essen``."""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .evaluation import DEFAULT_TAU
from .harness import ExperimentConfig, algorithm_annotations, compare_annotations, run_grid
from .induction import Algorithm
from .segmentation import AnnotatedSequence, Annotation, has_repeated_pattern, write_dataset
from .viewpoints import parse_vcis

log = logging.getLogger("phrasegram")


def _algorithms(text: str) -> List[Algorithm]:
    if text.strip().lower() == "all":
        return list(Algorithm)
    return [Algorithm.parse(part) for part in text.split(",") if part.strip()]


def _truthy(text: str) -> bool:
    return text.strip().lower() in {"1", "true", "yes", "on"}


def _read_config_file(path: Path) -> dict:
    """Read the ``[run]`` section of an INI file into argparse defaults."""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise SystemExit(f"cannot read config file {path}")
    if not parser.has_section("run"):
        return {}
    section = parser["run"]
    values: dict = {}
    if "dataset" in section:
        values["dataset"] = section["dataset"].split()
    for key in ("algorithms", "vcis"):
        if key in section:
            values[key] = section[key]
    if "tau" in section:
        values["tau"] = section.getfloat("tau")
    for key in ("sample", "seed", "jobs"):
        if key in section:
            values[key] = section.getint(key)
    if "out" in section:
        values["out"] = Path(section["out"])
    for key in ("emit_grammar", "emit_annotations", "ioi_from_durations"):
        if key in section:
            values[key] = _truthy(section[key])
    return values


def _add_run(sub) -> argparse.ArgumentParser:
    p = sub.add_parser("run", help="run the dataset x algorithm x VCI grid")
    p.add_argument("--config", type=Path, help="INI file with a [run] section; flags override it")
    p.add_argument("--dataset", nargs="+", metavar="PATH", help="canonical or line-grouped JSONL files")
    p.add_argument("--algorithms", default="all", help="comma list of algorithms or 'all'")
    p.add_argument("--vcis", default="all", help="comma list / ranges of VCIs (1-31) or 'all'")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--sample", type=int, help="use N sequences per dataset, sampled uniformly")
    p.add_argument("--seed", type=int, default=0, help="seed for --sample")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--emit-grammar", action="store_true")
    p.add_argument("--emit-annotations", action="store_true")
    p.add_argument("--ioi-from-durations", action="store_true",
                   help="compute ioi as a difference of durations instead of onsets")
    p.set_defaults(func=cmd_run)
    return p


def _add_compare(sub) -> None:
    p = sub.add_parser("compare", help="pairwise F1 matrix between annotations of one sequence")
    p.add_argument("--sequence", type=Path, required=True, help="JSON or JSONL file holding the sequence")
    p.add_argument("--id", help="sequence id to pick from a multi-record file")
    p.add_argument("--annotations", nargs="*", type=Path, default=[],
                   help="JSON files: a phrase list, or {'label': ..., 'annotation': [...]}")
    p.add_argument("--with-algorithms", default="", help="also compare annotations from these algorithms")
    p.add_argument("--vci", type=int, default=2)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--no-ground-truth", action="store_true", help="leave the record's own annotation out")
    p.add_argument("--out", type=Path, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_compare)


def _add_convert(sub) -> None:
    p = sub.add_parser("convert-essen", help="line-grouped tunes -> canonical JSONL")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--require-repeats", action="store_true", help="drop tunes without a repeated phrase")
    p.set_defaults(func=cmd_convert_essen)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phrasegram", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.run_parser = _add_run(sub)
    _add_compare(sub)
    _add_convert(sub)
    return parser


def cmd_run(args, parser) -> int:
    if not args.dataset:
        raise SystemExit("run: at least one --dataset is required")
    config = ExperimentConfig(
        datasets=args.dataset,
        algorithms=_algorithms(args.algorithms),
        vcis=parse_vcis(args.vcis) if isinstance(args.vcis, str) else list(args.vcis),
        tau=args.tau,
        sample=(args.sample, args.seed) if args.sample is not None else None,
        out_dir=args.out,
        jobs=args.jobs,
        emit_grammar=args.emit_grammar,
        emit_annotations=args.emit_annotations,
        ioi_from_durations=args.ioi_from_durations,
    )
    output = run_grid(config)
    failed = sum(r.status != "ok" for r in output.results)
    print(f"{len(output.results)} simulations ({failed} failed) -> {config.out_dir}")
    for row in output.summary:
        print(f"  {row.dataset:<16} {row.algorithm:<17} mean F1 {row.mean_over_vcis:.3f}  "
              f"best VCI-{row.best_vci} {row.best_mean_f1:.3f}")
    return 0


def _load_records(path: Path) -> List[dict]:
    text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    return obj if isinstance(obj, list) else [obj]


def _load_annotation(path: Path):
    obj = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(obj, dict):
        return str(obj.get("label", path.stem)), Annotation.from_json(obj["annotation"])
    return path.stem, Annotation.from_json(obj)


def cmd_compare(args, parser) -> int:
    records = _load_records(args.sequence)
    if args.id is not None:
        records = [r for r in records if str(r.get("id")) == args.id]
        if not records:
            raise SystemExit(f"no sequence with id {args.id!r} in {args.sequence}")
    seq = AnnotatedSequence.from_json(records[0])
    extra = [_load_annotation(p) for p in args.annotations]
    if args.with_algorithms:
        extra += algorithm_annotations(seq, _algorithms(args.with_algorithms), args.vci)
    table = compare_annotations(seq, extra, args.vci, args.tau, include_ground_truth=not args.no_ground_truth)
    if args.out:
        args.out.write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    return 0


def cmd_convert_essen(args, parser) -> int:
    kept: List[AnnotatedSequence] = []
    skipped = 0
    for path in args.inputs:
        for record in _load_records(path):
            try:
                seq = AnnotatedSequence.from_json(record)
            except (KeyError, TypeError, ValueError) as exc:
                log.warning("skipping %s: %s", record.get("id", "?"), exc)
                skipped += 1
                continue
            if args.require_repeats and not has_repeated_pattern(seq.ground_truth):
                skipped += 1
                continue
            kept.append(seq)
    write_dataset(args.out, kept)
    print(f"wrote {len(kept)} tunes to {args.out} ({skipped} skipped)")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.config is not None:
        # Second pass: file values become defaults, explicit flags still win.
        parser.run_parser.set_defaults(**_read_config_file(args.config))
        args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
