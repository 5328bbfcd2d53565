"""N(Q, B) against c_Q B for Q0 and Q1 over B = 10^3 .. 10^6.

    python scripts/sweep.py --out results/sweep.csv
"""
import argparse
import sys
from dataclasses import dataclass, field

from conicpoints.harness import SWEEP_COLUMNS, rows_to_csv, run_sweep
from conicpoints.quadform import Q0, Q1


@dataclass
class SweepConfig:
    bounds: list = field(default_factory=lambda: [10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5, 3 * 10**5, 10**6])
    tol: float = 1e-4
    out: str | None = None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    ap.add_argument("--max-B", type=int, default=10**6)
    args = ap.parse_args(argv)
    cfg = SweepConfig(out=args.out)
    bounds = [B for B in cfg.bounds if B <= args.max_B]
    rows = []
    for name, form in (("Q0", Q0), ("Q1", Q1)):
        rows += run_sweep(form, B_list=bounds, form_id=name, tol=cfg.tol)
    text = rows_to_csv(rows, SWEEP_COLUMNS)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    for r in rows:
        print(f"# {r.form_id} B={r.B:>8} N/B={r.N / r.B:.5f} c={r.cB / r.B:.5f} rel={r.abs_err / r.cB:.2e}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
