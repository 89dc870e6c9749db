"""Run all four similarity settings over the bundled toy pair.

The source ontology talks about accepted papers; the target expresses
acceptance through a hasDecision edge to an Acceptance individual.  The
embedding settings recover that restriction as a complex correspondence,
while the Levenshtein baseline cannot see past the unrelated labels.
"""
import tempfile
from pathlib import Path

from kgmatch.pipeline import MatchRunConfig, run_pair
from kgmatch.similarity import SimilaritySetting

DATA = Path(__file__).resolve().parent / "data"


def main():
    with tempfile.TemporaryDirectory() as scratch:
        for kind, threshold in (("baseline", 0.7), ("les", 0.5), ("esq", 0.5), ("se", 0.5)):
            setting = SimilaritySetting(kind, threshold=threshold)
            alignment, _ = run_pair(
                MatchRunConfig(
                    source=DATA / "source.ttl",
                    target=DATA / "target.ttl",
                    queries=DATA / "queries",
                    output_dir=Path(scratch) / kind,
                    setting=setting,
                    embeddings=DATA / "cache.tsv" if setting.uses_embeddings else None,
                )
            )
            print(f"{kind} at threshold {threshold}: {len(alignment.correspondences)} correspondence(s)")
            for corr in alignment.correspondences:
                print(f"  {corr.confidence:<14.12g} {corr.source_expr.text()} = {corr.target_expr.text()}")
            print()


if __name__ == "__main__":
    main()
