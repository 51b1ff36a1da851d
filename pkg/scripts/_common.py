"""Shared argument parsing and printing for the experiment scripts."""

import argparse
import time

from soil.io import report_to_json, study_report


def parser(description, reps=100):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--reps", type=int, default=reps)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--splits", type=int, default=100)
    ap.add_argument("--output", help="write the JSON report(s) here")
    return ap


def show(title, result):
    print(f"\n{title}  ({result.replications} replications)")
    print(f"{'var':>6}" + "".join(f"  {m:>15}" for m in result.methods))
    for j, name in enumerate(result.names):
        cells = "".join(f"  {result.mean_importance[m][j]:7.3f} ± {result.se_importance[m][j]:5.3f}"
                        for m in result.methods)
        print(f"{name:>6}{cells}")


def save(path, reports):
    if path:
        with open(path, "w") as fh:
            fh.write(report_to_json(reports))


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    print(f"[{time.perf_counter() - t0:.1f}s]")
    return out


def report_dict(result, label, seed):
    return study_report(result, {"label": label}, seed)

