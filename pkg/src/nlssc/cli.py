"""Command-line interface: ``nlssc {generate,cluster,gridsearch,eval}``.

Exit codes: 0 success, 2 solver did not converge, 3 input error,
4 numerical error.
"""

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import data as data_io
from .errors import InputError, MalformedInputError, NumericalError, ParameterError
from .metrics import clustering_error, nmi
from .pipeline import (GRID_COLUMNS, RunConfig, default_grid, run_cluster, run_gridsearch,
                       sensitivity_slice)

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3, 4

# flag dest -> (section, key) in the RunConfig dict
CONFIG_FLAGS = {
    "mode": (None, "mode"),
    "kernel": (None, "kernel"),
    "sigma": (None, "sigma"),
    "clusters": (None, "n_clusters"),
    "repeats": (None, "repeats"),
    "seed": (None, "seed"),
    "neighbor_metric": (None, "neighbor_metric"),
    "lam": ("solver", "lam"),
    "mu": ("solver", "mu"),
    "k": ("solver", "k"),
    "rho0": ("solver", "rho0"),
    "delta_rho": ("solver", "delta_rho"),
    "rho_max": ("solver", "rho_max"),
    "epsilon": ("solver", "epsilon"),
    "max_iters": ("solver", "max_iters"),
    "tau": ("restore", "tau"),
    "restore_repeats": ("restore", "repeats"),
}


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_data_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV data matrix (or kernel matrix with --kernel precomputed)")
    src.add_argument("--generate", metavar="SPEC",
                     help='synthetic data, e.g. "3x4@30,n=50,noise=0.05[,offset=1]"')
    p.add_argument("--layout", default="rows-are-samples", choices=data_io.LAYOUTS)
    p.add_argument("--labels", help="CSV of ground-truth labels")
    p.add_argument("--data-seed", type=int, default=0, help="seed for --generate")


def _add_run_args(p):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--mode", choices=("nlssc", "nlkssc"))
    p.add_argument("--kernel", choices=("linear", "gaussian", "hik", "precomputed"))
    p.add_argument("--sigma", type=float, help="gaussian bandwidth (default: mean squared distance)")
    p.add_argument("--clusters", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--neighbor-metric", choices=("kernel-induced-distance", "raw-similarity"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--rho0", type=float)
    p.add_argument("--delta-rho", type=float)
    p.add_argument("--rho-max", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--restore", choices=("on", "off"))
    p.add_argument("--tau", type=float)
    p.add_argument("--restore-repeats", type=int)
    p.add_argument("--no-far", action="store_true", help="disable the far-neighbour term (B = 0)")


def build_parser():
    parser = argparse.ArgumentParser(prog="nlssc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic union-of-subspaces dataset")
    g.add_argument("spec", help='e.g. "3x4@30,n=50,noise=0.05"')
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="data CSV (rows are samples)")
    g.add_argument("--labels-out", help="labels CSV")

    c = sub.add_parser("cluster", help="run NLSSC / NLKSSC end to end")
    _add_data_args(c)
    _add_run_args(c)
    c.add_argument("--out", help="results JSON (default: stdout)")
    c.add_argument("--save-gamma", action="store_true", help="include the code matrix as triplets")
    c.add_argument("--assignment-out", help="CSV of the first run's cluster labels")

    s = sub.add_parser("gridsearch", help="grid-search lambda, mu, k")
    _add_data_args(s)
    _add_run_args(s)
    s.add_argument("--lambdas", type=_float_list)
    s.add_argument("--mus", type=_float_list)
    s.add_argument("--ks", type=_int_list)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="grid CSV (default: stdout)")
    s.add_argument("--slice", choices=("lambda", "mu", "k"),
                   help="also write a sensitivity slice through the best cell")
    s.add_argument("--slice-out", help="CSV path for --slice")

    e = sub.add_parser("eval", help="score a predicted labelling")
    e.add_argument("pred")
    e.add_argument("truth")
    return parser


def resolve_config(args):
    """Defaults < config file < command-line flags."""
    cfg = RunConfig().to_dict()
    cfg["kernel"] = None
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInputError(f"cannot read config {args.config}: {exc}") from exc
        for key, value in loaded.items():
            if key in ("solver", "restore"):
                cfg[key].update(value)
            else:
                cfg[key] = value
    for dest, (section, key) in CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            (cfg[section] if section else cfg)[key] = value
    if args.restore is not None:
        cfg["restore_enabled"] = args.restore == "on"
    if args.no_far:
        cfg["use_far"] = False
    if cfg["mode"] == "nlssc" and cfg.get("kernel") == "linear":
        cfg["kernel"] = None
    try:
        return RunConfig.from_dict(cfg)
    except TypeError as exc:
        raise ParameterError(str(exc)) from exc


def load_inputs(args, cfg):
    labels = None
    if args.generate:
        spec = data_io.SyntheticSpec.parse(args.generate, seed=args.data_seed)
        X, labels = data_io.generate_synthetic(spec)
    elif cfg.kernel_kind == "precomputed":
        X = data_io.read_matrix(args.data)
    else:
        X = data_io.load_csv(args.data, args.layout)
    if args.labels:
        labels = data_io.load_labels(args.labels)
    return X, labels


def _write_json(doc, path):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_grid_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=GRID_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in GRID_COLUMNS})


def cmd_generate(args):
    spec = data_io.SyntheticSpec.parse(args.spec, seed=args.seed)
    X, labels = data_io.generate_synthetic(spec)
    data_io.save_csv(X, args.out)
    if args.labels_out:
        data_io.save_labels(labels, args.labels_out)
    print(f"wrote {X.shape[1]} samples of dimension {X.shape[0]} to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_cluster(args):
    cfg = resolve_config(args)
    X, labels = load_inputs(args, cfg)
    doc, gamma, _ = run_cluster(X, cfg, labels)
    if args.save_gamma:
        doc["gamma"] = data_io.results_document(doc["assignment"], gamma,
                                                include_gamma=True)["gamma"]
    _write_json(doc, args.out)
    if args.assignment_out:
        data_io.save_labels(doc["assignment"], args.assignment_out)
    if doc["ce"] is not None:
        print(f"mean CE {doc['ce']:.4f} (median {doc['metrics']['ce_median']:.4f}), "
              f"mean NMI {doc['nmi']:.4f}", file=sys.stderr)
    return EXIT_OK if doc["converged"] else EXIT_NOT_CONVERGED


def cmd_gridsearch(args):
    cfg = resolve_config(args)
    X, labels = load_inputs(args, cfg)
    grid = default_grid()
    for axis, value in (("lambda", args.lambdas), ("mu", args.mus), ("k", args.ks)):
        if value is not None:
            grid[axis] = value
    rows = run_gridsearch(X, labels, cfg, grid, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_grid_csv(rows, fh)
    else:
        write_grid_csv(rows, sys.stdout)
    if args.slice:
        best = rows[0]
        fixed = {key: best[key] for key in ("lambda", "mu", "k") if key != args.slice}
        part = sensitivity_slice(rows, args.slice, fixed)
        if args.slice_out:
            with open(args.slice_out, "w", newline="") as fh:
                write_grid_csv(part, fh)
        else:
            write_grid_csv(part, sys.stderr)
    return EXIT_OK


def cmd_eval(args):
    pred = data_io.load_labels(args.pred)
    truth = data_io.load_labels(args.truth)
    ce, matching = clustering_error(pred, truth)
    _write_json({"ce": ce, "nmi": nmi(pred, truth),
                 "matching": {str(k): v for k, v in matching.items()}}, None)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "cluster": cmd_cluster,
            "gridsearch": cmd_gridsearch, "eval": cmd_eval}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
