"""Sequitur on the Hymn 2 duration sequence: print the grammar, the phrases it
implies, and their agreement with the first annotator."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from hymn_data import HYMN2_ANNOTATOR1, hymn2_durations  # noqa: E402

from phrasegram.evaluation import precision_recall_f1  # noqa: E402
from phrasegram.induction import Algorithm, induce  # noqa: E402
from phrasegram.segmentation import Annotation, extract_annotation  # noqa: E402


def main():
    durations = hymn2_durations()
    annotator = Annotation.from_json(HYMN2_ANNOTATOR1)
    for algo in Algorithm:
        g = induce(algo, durations)
        found = extract_annotation(g, len(durations))
        s = precision_recall_f1(annotator, found, durations)
        print(f"{algo.value:<17} rules={len(g):<3} phrases={len(found):<3} "
              f"P={s.precision:.2f} R={s.recall:.2f} F1={s.f1:.2f}")

    g = induce(Algorithm.SEQUITUR, durations)
    print("\nSequitur grammar (a=1, b=2, h=1/2 beats):")
    print(str(g))
    print("\nphrases:")
    for phrase in extract_annotation(g, len(durations)):
        spans = ", ".join(f"[{o.start}, {o.end}]" for o in phrase.occurrences)
        print(f"  N{phrase.label}: {spans}")


if __name__ == "__main__":
    main()
