"""Command line front end.

Subcommands:

estimate       fit one direction estimator to a headered CSV file
               (columns = features, optional "label" column with values
               in {-1, 1}) and write a JSON report.
constants      print the theoretical limiting constants, and the full
               limiting covariance matrices when the mixture is pinned
               down with --sigma and --h.
simulate-chat  run the constant-recovery experiment from a JSON config.
simulate-msi   run the direction-recovery experiment from a JSON config.

Exit codes: 0 success, 1 runtime or numeric failure (bad data, singular
covariance, degenerate skewness), 2 usage or config error. Failures
print a single JSON line to stderr.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import estimators
from .asymptotics import avar_ae, avar_mom, c0_constant, c_lda, c_skewvec
from .errors import (ConfigError, DegenerateSkewnessError, Error,
                     NearSingularError, SupervisionRequiredError,
                     WeightDivergenceError)
from .model import DataSet, MixtureParams
from .montecarlo import ExperimentConfig, chat_experiment, msi_experiment

CHAT_COLUMNS = ("method", "alpha1", "tau", "n",
                "reps_used", "reps_failed", "c_hat", "c_theory")
MSI_COLUMNS = ("method", "alpha1", "tau", "n", "p",
               "reps_used", "reps_failed", "mean_msi")

_METHOD_FLAGS = {tag.lower(): tag for tag in estimators.METHODS}


class CsvFormatError(Error):
    """An input CSV file could not be parsed; the message carries the
    offending line number."""


class UsageError(Error):
    """A subcommand was invoked with inconsistent or missing options."""


def load_csv(path):
    """Read a headered feature CSV into a DataSet. A column named
    "label" (any position) becomes the labels; every other column must
    be numeric."""
    import csv as csvmod

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csvmod.reader(fh)
        try:
            header = [c.strip() for c in next(reader)]
        except StopIteration:
            raise CsvFormatError(f"{path}: line 1: empty file") from None
        label_col = header.index("label") if "label" in header else None
        feature_cols = [i for i in range(len(header)) if i != label_col]
        if not feature_cols:
            raise CsvFormatError(f"{path}: line 1: no feature columns")
        rows = []
        labels = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise CsvFormatError(
                    f"{path}: line {line_no}: expected {len(header)} fields, "
                    f"got {len(record)}")
            try:
                rows.append([float(record[i]) for i in feature_cols])
            except ValueError:
                raise CsvFormatError(
                    f"{path}: line {line_no}: non-numeric feature value") from None
            if label_col is not None:
                value = record[label_col].strip()
                if value not in ("-1", "1", "+1"):
                    raise CsvFormatError(
                        f"{path}: line {line_no}: label must be -1 or 1, "
                        f"got {value!r}")
                labels.append(int(value))
    if not rows:
        raise CsvFormatError(f"{path}: line 2: no data rows")
    observations = np.array(rows, dtype=float)
    return DataSet(observations,
                   labels=np.array(labels) if label_col is not None else None)


def _require_file(path):
    if not os.path.isfile(path):
        raise UsageError(f"input file does not exist: {path}")


def _require_out_dir(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory does not exist: {parent}")


def _cmd_estimate(args):
    method = _METHOD_FLAGS[args.method]
    if method == estimators.MOM and args.alpha1 is None:
        raise UsageError("--alpha1 is required for method mom")
    _require_file(args.input)
    data = load_csv(args.input)
    rng = None if args.seed is None else np.random.default_rng(args.seed)
    if method == estimators.MOM:
        est = estimators.est_mom(data, args.alpha1)
    elif method == estimators.SKEWVEC:
        est = estimators.est_skewvec(data)
    elif method == estimators.TOBI:
        est = estimators.est_tobi(data)
    elif method == estimators.JADE3:
        est = estimators.est_jade3(data, tol=args.tol,
                                   max_iter=args.max_iter, rng=rng)
    elif method == estimators.LDA:
        est = estimators.est_lda(data)
    else:
        est = estimators.est_pp(data, tol=args.tol,
                                max_iter=args.max_iter, rng=rng)
    centered = data.observations - data.observations.mean(axis=0)
    report = {
        "method": est.method,
        "n": data.n,
        "p": data.p,
        "unit": est.unit.tolist(),
        "raw_norm": float(np.linalg.norm(est.raw)),
        "converged": est.converged,
        "iterations": est.iterations,
        "notes": list(est.notes),
        "scores": (centered @ est.unit).tolist(),
    }
    text = json.dumps(report, indent=2)
    if args.output is None:
        print(text)
    else:
        _require_out_dir(args.output)
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def _parse_vector(text):
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"expected a comma-separated vector, got {text!r}") from None


def _parse_matrix(text):
    rows = [_parse_vector(row) for row in text.split(";")]
    if any(len(r) != len(rows) for r in rows):
        raise UsageError(f"expected a square ';'-separated matrix, got {text!r}")
    return np.array(rows, dtype=float)


def _cmd_constants(args):
    sigma = None if args.sigma is None else _parse_matrix(args.sigma)
    h = None if args.h is None else _parse_vector(args.h)
    if (sigma is None) != (h is None):
        raise UsageError("--sigma and --h must be given together")
    tau = args.tau
    p = args.p
    if h is not None:
        if sigma.shape[0] != h.shape[0]:
            raise UsageError("--sigma and --h dimensions disagree")
        if p is not None and p != h.shape[0]:
            raise UsageError("--p disagrees with the dimension of --h")
        p = h.shape[0]
        implied_tau = float(h @ np.linalg.solve(sigma, h))
        if tau is not None and abs(tau - implied_tau) > 1e-8 * max(implied_tau, 1.0):
            raise UsageError(
                f"--tau {tau} disagrees with h'Sigma^(-1)h = {implied_tau}")
        tau = implied_tau
    if tau is None:
        raise UsageError("--tau is required (or derivable from --sigma and --h)")
    if p is None:
        raise UsageError("--p is required (or derivable from --h)")
    lda = c_lda(args.alpha1, tau)
    c0 = c0_constant(args.alpha1, tau)
    cr = c_skewvec(args.alpha1, tau, p)
    print(f"alpha1 = {args.alpha1}, tau = {tau}, p = {p}")
    print(f"C[LDA]          = {lda}")
    print(f"C[TOBI/JADE3/PP] = {c0}")
    print(f"C[SKEWVEC]      = {cr}")
    if h is not None:
        alpha2 = 1.0 - args.alpha1
        params = MixtureParams(alpha1=args.alpha1, mu1=-alpha2 * h,
                               mu2=args.alpha1 * h, sigma=sigma)
        with np.printoptions(precision=6, suppress=True):
            print("limiting covariance, TOBI/JADE3/PP:")
            print(np.array_str(avar_ae(c0, params, estimator="TOBI").covariance))
            print("limiting covariance, SKEWVEC:")
            print(np.array_str(avar_ae(cr, params, estimator="SKEWVEC").covariance))
            print("limiting covariance, MOM:")
            print(np.array_str(avar_mom(params).covariance))
    return 0


def _load_config(path):
    _require_file(path)
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: not valid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise ConfigError("config: top level must be a JSON object")
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key in payload:
        if key not in fields:
            raise ConfigError(f"{key}: unknown config field")
    required = fields - {"sigma_mode"}
    for key in sorted(required):
        if key not in payload:
            raise ConfigError(f"{key}: missing config field")
    return ExperimentConfig(**payload)


def _write_table(path, columns, rows):
    import csv as csvmod

    _require_out_dir(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csvmod.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if row[c] is None else row[c] for c in columns])


def _cmd_simulate_chat(args):
    rows = chat_experiment(_load_config(args.config), workers=args.workers)
    _write_table(args.out, CHAT_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_simulate_msi(args):
    rows = msi_experiment(_load_config(args.config), workers=args.workers)
    _write_table(args.out, MSI_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="skewdisc",
        description="Skewness-based linear discriminant direction estimation "
                    "for two-component Gaussian location mixtures.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    est = sub.add_parser("estimate", help="estimate a direction from a CSV file")
    est.add_argument("input", help="headered CSV; columns = features, "
                                   "optional 'label' column in {-1,1}")
    est.add_argument("--method", required=True, choices=sorted(_METHOD_FLAGS))
    est.add_argument("--alpha1", type=float,
                     help="true weight of the heavier component (mom only)")
    est.add_argument("--tol", type=float, default=estimators.DEFAULT_TOL,
                     help="fixed-point stopping tolerance (jade3, pp)")
    est.add_argument("--max-iter", type=int, default=estimators.DEFAULT_MAX_ITER,
                     help="fixed-point iteration cap (jade3, pp)")
    est.add_argument("--seed", type=int,
                     help="seed for the restart generator (jade3, pp)")
    est.add_argument("--output", help="write the JSON report here instead of stdout")
    est.set_defaults(func=_cmd_estimate)

    con = sub.add_parser("constants", help="print theoretical limiting constants")
    con.add_argument("--alpha1", type=float, required=True)
    con.add_argument("--tau", type=float)
    con.add_argument("--p", type=int)
    con.add_argument("--sigma", help="matrix, rows ';'-separated, entries ','-separated")
    con.add_argument("--h", help="component mean difference, comma-separated")
    con.set_defaults(func=_cmd_constants)

    for name, func in (("simulate-chat", _cmd_simulate_chat),
                       ("simulate-msi", _cmd_simulate_msi)):
        sim = sub.add_parser(name, help=f"run the {name.split('-')[1]} experiment")
        sim.add_argument("config", help="experiment config JSON")
        sim.add_argument("out", help="output CSV path")
        sim.add_argument("--workers", type=int,
                         help="thread count (default: $SKEWDISC_WORKERS or 1)")
        sim.set_defaults(func=func)
    return parser


def _fail(code, exc):
    kind = type(exc).__name__
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, SupervisionRequiredError,
            WeightDivergenceError) as exc:
        return _fail(2, exc)
    except (CsvFormatError, DegenerateSkewnessError, NearSingularError,
            np.linalg.LinAlgError, OSError) as exc:
        return _fail(1, exc)
    except ValueError as exc:
        return _fail(2, exc)


if __name__ == "__main__":
    sys.exit(main())
