"""Selection error and weighted symmetric difference as n grows.

For each n on the ladder, prints the mean of |A_c symdiff A*| / r* at c=0.5
and of sum_k w_k |A_k symdiff A*| / r* (per-replication weak-consistency
surrogate) for SOIL-BIC-p and, optionally, SOIL-ARM.

    python3 scripts/consistency_trend.py --example c1 --ns 100,400,1600
    python3 scripts/consistency_trend.py --example s1 --ns 150,600,2400
"""

import numpy as np
from _common import parser, save, timed

from soil.simulation import AnalysisSettings, example, run_study


def main():
    ap = parser(__doc__, reps=50)
    ap.add_argument("--example", default="c1")
    ap.add_argument("--ns", default="100,400,1600")
    ap.add_argument("--methods", default="bic-p")
    args = ap.parse_args()
    methods = tuple(args.methods.split(","))
    settings = AnalysisSettings(methods=methods, n_splits=args.splits)
    rows = []
    for n in (int(x) for x in args.ns.split(",")):
        cfg = example(args.example, n=n, replications=args.reps, seed=args.seed)
        r_star = len(cfg.true_support)
        res = timed(run_study, cfg, settings)
        for m in methods:
            sel = res.selection_stats[m][0.5]["symmetric_difference"] / r_star
            wsd = float(np.mean(res.weighted_symdiff[m])) / r_star
            rows.append({"n": n, "method": m, "selection_error": sel, "weighted_symdiff": wsd})
            print(f"n={n:5d} {m:>8}: selection error/r* {sel:.4f}  weighted symdiff/r* {wsd:.4f}")
    save(args.output, rows)


if __name__ == "__main__":
    main()
