"""Examples 3 (beta*=0) and 4 (beta*=1): equal unimportance vs equal importance.

Also reports how often the empty model carries the largest weight in Example 3.

    python3 scripts/null_vs_equal.py --reps 100
"""

from _common import parser, report_dict, save, show, timed

from soil.simulation import AnalysisSettings, example, run_study


def main():
    ap = parser(__doc__)
    ap.add_argument("--methods", default="arm,bic-p,fiducial")
    args = ap.parse_args()
    settings = AnalysisSettings(methods=tuple(args.methods.split(",")), n_splits=args.splits)
    reports = {}
    for name in ("3", "4"):
        res = timed(run_study, example(name, replications=args.reps, seed=args.seed), settings)
        show(f"example {name}", res)
        if name == "3":
            for m in res.methods:
                print(f"  empty model has the top {m} weight in {res.top_is_truth[m].mean():.0%} of replications")
        reports[name] = report_dict(res, name, args.seed)
    save(args.output, reports)


if __name__ == "__main__":
    main()
