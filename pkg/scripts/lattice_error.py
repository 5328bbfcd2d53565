"""Normalised lattice-count errors |M - vol T / n^2| / scale over a (T, n, class) grid."""
import argparse
from dataclasses import dataclass

from conicpoints.harness import CorpusSpec, generate_corpus, lattice_error_grid
from conicpoints.norms import IsometricNorm
from conicpoints.quadform import Q0, Q1


@dataclass
class GridConfig:
    count: int = 6
    height: int = 30
    seed: int = 3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=GridConfig.count)
    cfg = GridConfig(count=ap.parse_args(argv).count)
    forms = [Q0, Q1] + [f.form.to_special() for f in generate_corpus(CorpusSpec(cfg.count, cfg.height, "special", cfg.seed))]
    for S in forms:
        for N in (IsometricNorm.sup(), IsometricNorm.diag(1, 2, "1/3")):
            rows = lattice_error_grid(S, N)
            worst = max(rows, key=lambda r: r["ratio"])
            print(f"{str(S.to_json()):>50}  sup={N.is_sup!s:5}  max ratio {worst['ratio']:.3f} at {worst}")


if __name__ == "__main__":
    main()
