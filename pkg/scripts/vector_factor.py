"""Measure N(Q,B) / script-N(Q,B) over a corpus and compare with c_Q / c'_Q.

The ratio fixes how many primitive zeros each parameter (s, t) contributes.

    python scripts/vector_factor.py --count 10 --B 100000
"""
import argparse
import json
import warnings
from dataclasses import asdict, dataclass

from conicpoints.densities import constants
from conicpoints.harness import CorpusSpec, generate_corpus, measure_vector_factor


@dataclass
class FactorConfig:
    count: int = 10
    height: int = 30
    B: int = 10**5
    seed: int = 7


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in asdict(FactorConfig()).items():
        ap.add_argument(f"--{f}", type=type(v), default=v)
    cfg = FactorConfig(**vars(ap.parse_args(argv)))
    warnings.simplefilter("ignore")
    half = cfg.count // 2
    corpus = (generate_corpus(CorpusSpec(cfg.count - half, cfg.height, "special", cfg.seed))
              + generate_corpus(CorpusSpec(max(half, 1), cfg.height, "general", cfg.seed + 1)))[:cfg.count]
    out = []
    for item, row in zip(corpus, measure_vector_factor(corpus, cfg.B)):
        rep = constants(item.form)
        row["c_Q"], row["c_prime_Q"], row["constant_ratio"] = rep.c_Q, rep.c_prime_Q, rep.ratio
        out.append(row)
        print(f"{row['form_id']:>20}  N/script-N = {row['ratio']:.6f}  c/c' = {rep.ratio:.6f}  "
              f"N - 2 script-N = {row['excess']}")
    print(json.dumps({"config": asdict(cfg), "rows": out}, indent=1))


if __name__ == "__main__":
    main()
