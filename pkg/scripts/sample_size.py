"""Logistic Examples 5 (n=80) and 6 (n=5000): importances sharpen with n.

    python3 scripts/sample_size.py --reps 100 --large-reps 50
"""

from _common import parser, report_dict, save, show, timed

from soil.simulation import AnalysisSettings, example, run_study


def main():
    ap = parser(__doc__)
    ap.add_argument("--large-reps", type=int, default=50)
    args = ap.parse_args()
    settings = AnalysisSettings(methods=("arm", "bic-p"), n_splits=args.splits)
    reports = {}
    for name, reps in (("5", args.reps), ("6", args.large_reps)):
        res = timed(run_study, example(name, replications=reps, seed=args.seed), settings)
        show(f"example {name} (n={example(name).n})", res)
        reports[name] = report_dict(res, name, args.seed)
    save(args.output, reports)


if __name__ == "__main__":
    main()
