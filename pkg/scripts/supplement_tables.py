"""Mean SOIL importances for the two n=100, p=20 supplement settings.

Setting c1: rho=0, sigma^2=0.01. Setting c2: rho=0.7, sigma^2=0.1, beta_2=0.
Candidates are the merged Lasso/SCAD/MCP paths; psi=0.5.

    python3 scripts/supplement_tables.py --reps 100
"""

from _common import parser, report_dict, save, show, timed

from soil.simulation import AnalysisSettings, example, run_study


def main():
    ap = parser(__doc__)
    ap.add_argument("--methods", default="arm,bic-p")
    args = ap.parse_args()
    settings = AnalysisSettings(methods=tuple(args.methods.split(",")), n_splits=args.splits)
    reports = {}
    for name in ("c1", "c2"):
        res = timed(run_study, example(name, replications=args.reps, seed=args.seed), settings)
        show(f"setting {name}", res)
        reports[name] = report_dict(res, name, args.seed)
    save(args.output, reports)


if __name__ == "__main__":
    main()
