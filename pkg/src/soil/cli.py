"""Command-line front end.

Every option can also come from ``--config FILE``: one ``key = value`` per
line, keys spelled like the long flags (``lambda-count`` or
``lambda_count``), ``#`` starts a comment. Precedence is command-line flag,
then config file, then built-in default.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .candidates import all_subsets, build_candidates
from .errors import SoilError
from .importance import ImportanceVector, rank_variables, soil, threshold_select
from .io import importance_report, load_dataset, study_report, write_report
from .simulation import AnalysisSettings, ScenarioConfig, cross_examination, example, run_study
from .weighting import METHODS, compute_weights


def _csv_list(text):
    return tuple(s.strip() for s in str(text).split(",") if s.strip())


def _float_list(text):
    return tuple(float(s) for s in _csv_list(text))


def _methods(text):
    ms = _csv_list(text)
    bad = [m for m in ms if m not in METHODS]
    if bad or not ms:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {','.join(METHODS)}")
    return ms


def _penalties(text):
    ps = _csv_list(text)
    if not ps or any(p not in ("lasso", "scad", "mcp") for p in ps):
        raise argparse.ArgumentTypeError("penalties must be drawn from lasso,scad,mcp")
    return ps


# name -> (type, default); shared by flag parsing and config files
COMMON = {
    "method": (_methods, ("arm", "bic-p")),
    "psi": (float, 0.5),
    "splits": (int, 100),
    "penalties": (_penalties, ("lasso", "scad", "mcp")),
    "lambda-count": (int, 100),
    "gamma-f": (float, 1.0),
    "seed": (int, 0),
    "output": (str, None),
    "format": (str, "json"),
}
OPTIONS = {
    "importance": {**COMMON, "response": (str, None), "task": (str, "regression"),
                   "threshold": (float, None), "candidates": (str, "auto")},
    "simulate": {**COMMON, "example": (str, None), "reps": (int, 100), "threshold": (_float_list, (0.5,)),
                 "n": (int, None), "p": (int, None), "rho": (float, None), "sigma2": (float, None),
                 "beta": (_float_list, None), "task": (str, None), "addon": (str, None)},
    "cross-examine": {**COMMON, "response": (str, None), "base-method": (str, "arm"), "top-m": (int, 2),
                      "reps": (int, 100), "threshold": (_float_list, (0.5,))},
}
CHOICES = {"format": ("json", "csv"), "task": ("regression", "classification"),
           "candidates": ("auto", "all-subsets", "paths"), "base-method": METHODS,
           "addon": ("none", "confuser", "quadratics", "interactions")}


def read_config(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise argparse.ArgumentTypeError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split(sep, 1))
            values[key.replace("_", "-").lstrip("-")] = value
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog="soil", description="SOIL variable importance")
    parser.add_argument("--version", action="version", version=f"soil {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, opts in OPTIONS.items():
        sp = sub.add_parser(command)
        if command != "simulate":
            sp.add_argument("input", nargs="?", help="CSV file with a header row")
        sp.add_argument("--config", help="key = value file mirroring the flags")
        for name, (typ, _) in opts.items():
            sp.add_argument(f"--{name}", type=typ, default=None, choices=CHOICES.get(name))
    return parser


def resolve(args, parser):
    """Merge flags over config-file values over defaults."""
    opts = OPTIONS[args.command]
    try:
        config = read_config(args.config) if args.config else {}
    except (argparse.ArgumentTypeError, OSError) as exc:
        parser.error(str(exc))
    unknown = set(config) - set(opts) - {"input"}
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    merged = {}
    for name, (typ, default) in opts.items():
        flag = getattr(args, name.replace("-", "_"))
        if flag is not None:
            merged[name] = flag
        elif name in config:
            try:
                merged[name] = typ(config[name])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                parser.error(f"config key {name}: {exc}")
            if name in CHOICES and merged[name] not in CHOICES[name]:
                parser.error(f"config key {name}: must be one of {', '.join(CHOICES[name])}")
        else:
            merged[name] = default
    if args.command != "simulate":
        merged["input"] = args.input if args.input is not None else config.get("input")
    if merged["psi"] < 0 or merged["splits"] < 1 or merged["lambda-count"] < 2:
        parser.error("need psi >= 0, splits >= 1, lambda-count >= 2")
    thresholds = merged.get("threshold")
    cs = thresholds if isinstance(thresholds, tuple) else (thresholds,) if thresholds is not None else ()
    if any(not 0 < c < 1 for c in cs):
        parser.error("thresholds must lie in (0, 1)")
    return merged


def _settings(cfg, thresholds=(0.5,)):
    return AnalysisSettings(methods=cfg["method"], thresholds=thresholds, psi=cfg["psi"],
                            n_splits=cfg["splits"], gamma_f=cfg["gamma-f"],
                            penalties=cfg["penalties"], n_lambda=cfg["lambda-count"])


def _table(names, columns, order):
    width = max(8, max(len(n) for n in names))
    head = f"{'variable':<{width}}" + "".join(f"  {m:>10}" for m in columns)
    lines = [head, "-" * len(head)]
    for j in order:
        lines.append(f"{names[j]:<{width}}" + "".join(f"  {columns[m][j]:>10.4f}" for m in columns))
    return "\n".join(lines)


def _emit(report, cfg, text_table):
    print(text_table)
    if cfg["output"]:
        write_report(report, cfg["output"], cfg["format"])


def _config_meta(cfg):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(cfg.items()) if k != "output"}


def _need_input(cfg, parser):
    if not cfg["input"]:
        parser.error("an input CSV file is required")
    if not cfg["response"]:
        parser.error("--response is required")


def cmd_importance(cfg, parser):
    _need_input(cfg, parser)
    data = load_dataset(cfg["input"], cfg["response"], cfg["task"])
    settings = _settings(cfg)
    if cfg["candidates"] == "all-subsets" or (cfg["candidates"] == "auto" and data.p <= settings.all_subsets_max_p):
        cands = all_subsets(data.p)
    else:
        cands = build_candidates(data, settings.penalties, settings.n_lambda, all_subsets_max_p=0)
    columns, selection = {}, []
    for method in settings.methods:
        w = compute_weights(method, data, cands, settings.psi, settings.n_splits, cfg["seed"], settings.gamma_f)
        imp = soil(w, cands, data.names)
        columns[method] = imp.values
        if cfg["threshold"] is not None:
            rep = threshold_select(imp, cfg["threshold"])
            selection.append({"method": method, "threshold": cfg["threshold"],
                              "selected": [data.names[j] for j in rep.selected]})
    order = rank_variables(ImportanceVector(columns[settings.methods[0]]))
    report = importance_report(data.names, columns, _config_meta(cfg), cfg["seed"], selection,
                               extra={"n_candidates": len(cands)})
    _emit(report, cfg, _table(data.names, columns, order))


def _scenario(cfg, parser):
    custom = {"n": cfg["n"], "rho": cfg["rho"], "sigma2": cfg["sigma2"], "task": cfg["task"],
              "addon": cfg["addon"], "replications": cfg["reps"], "seed": cfg["seed"]}
    if cfg["example"]:
        if cfg["p"] is not None or cfg["beta"] is not None:
            parser.error("--p/--beta cannot be combined with --example")
        return example(cfg["example"], **custom)
    if cfg["n"] is None or cfg["beta"] is None:
        parser.error("simulate needs --example, or --n and --beta for a custom scenario")
    p_base = cfg["p"] if cfg["p"] is not None else len(cfg["beta"])
    custom = {k: v for k, v in custom.items() if v is not None}
    return ScenarioConfig(p_base=p_base, beta_star=cfg["beta"], **custom)


def cmd_simulate(cfg, parser):
    scenario = _scenario(cfg, parser)
    result = run_study(scenario, _settings(cfg, cfg["threshold"]))
    meta = _config_meta(cfg)
    meta["scenario"] = {"name": scenario.name, "n": scenario.n, "p": scenario.p, "rho": scenario.rho,
                        "sigma2": scenario.sigma2, "task": scenario.task, "addon": scenario.addon,
                        "beta_star": list(scenario.beta_star)}
    report = study_report(result, meta, cfg["seed"])
    order = range(len(result.names))
    _emit(report, cfg, _table(result.names, result.mean_importance, order))


def cmd_cross_examine(cfg, parser):
    _need_input(cfg, parser)
    data = load_dataset(cfg["input"], cfg["response"], "regression")
    settings = _settings(cfg, cfg["threshold"])
    base_method = cfg["base-method"]
    cands = all_subsets(data.p) if data.p <= settings.all_subsets_max_p else build_candidates(
        data, settings.penalties, settings.n_lambda, all_subsets_max_p=0)
    w = compute_weights(base_method, data, cands, settings.psi, settings.n_splits, cfg["seed"], settings.gamma_f)
    base = soil(w, cands, data.names)
    result = cross_examination(data, base, cfg["top-m"], cfg["reps"], cfg["seed"], settings)
    meta = _config_meta(cfg)
    meta["base_importance"] = dict(zip(data.names, base.values.tolist()))
    report = study_report(result, meta, cfg["seed"])
    order = rank_variables(base)
    _emit(report, cfg, _table(data.names, result.mean_importance, order))


COMMANDS = {"importance": cmd_importance, "simulate": cmd_simulate, "cross-examine": cmd_cross_examine}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args, parser)
        COMMANDS[args.command](cfg, parser)
    except (SoilError, OSError, np.linalg.LinAlgError) as exc:
        print(f"soil: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
