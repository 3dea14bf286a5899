"""Command-line front end: training runs with CSV traces, pmf and MCA demos."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .boosting import StepRule, save_model, train_rgbm
from .datasets import feature_quantiles, load_libsvm, to_binary_labels, train_test_split
from .geometry import (
    binary_basis,
    mca_binary_infinity,
    mca_estimate,
    mca_orthogonal_infinity,
    mca_orthogonal_ordered,
)
from .losses import make_loss
from .norms import InfinityNorm, OrderedL1Norm
from .sampling import SelectionRule, beta_limit_pdf, selection_pmf
from .stumps import StumpBasis

CLASSIFICATION_LOSSES = ("logistic", "exponential")

TRAIN_DEFAULTS = {
    "test": None,
    "loss": "squared",
    "loss_param": None,
    "rule": "type0",
    "t": None,
    "step": "line",
    "rho": None,
    "iters": 100,
    "quantiles": 100,
    "seed": 0,
    "model_out": None,
    "split_frac": 0.8,
}


class CliError(Exception):
    def __init__(self, message, code=1):
        super().__init__(message)
        self.code = code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rgbm", description="Randomized gradient boosting over tree stumps."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a model and write a metrics CSV")
    train.add_argument("--train", dest="train_path", help="LIBSVM training file")
    train.add_argument("--test", dest="test", help="LIBSVM test file (else split)")
    train.add_argument("--loss", choices=["squared", "huber", "logistic", "exponential"])
    train.add_argument("--loss-param", dest="loss_param", type=float,
                       help="huber threshold / logistic ridge")
    train.add_argument("--rule", choices=["type0", "type1", "type2", "type3"])
    train.add_argument("--t", type=int, help="draw count for type1/type3")
    train.add_argument("--step", choices=["line", "const"])
    train.add_argument("--rho", type=float, help="constant step multiplier (default 1/smoothness)")
    train.add_argument("--iters", type=int, help="boosting rounds")
    train.add_argument("--quantiles", type=int, help="split candidates per feature")
    train.add_argument("--seed", type=int)
    train.add_argument("--out", help="metrics CSV path")
    train.add_argument("--model-out", dest="model_out", help="model file path")
    train.add_argument("--split-frac", dest="split_frac", type=float,
                       help="train fraction when no test file is given")
    train.add_argument("--config", help="key=value file; flags override its entries")

    pmf = sub.add_parser("pmf", help="print the random-then-greedy selection law")
    pmf.add_argument("K", type=int, help="number of items")
    pmf.add_argument("t", type=int, help="draw count")

    mca = sub.add_parser("mca", help="minimal cosine angle: closed form vs estimate")
    mca.add_argument("basis", choices=["orthogonal", "binary", "file"])
    mca.add_argument("--p", type=int, help="dimension for orthogonal/binary bases")
    mca.add_argument("--path", help="whitespace-separated matrix file for basis=file")
    mca.add_argument("--norm", choices=["infinity", "ordered"], default="infinity")
    mca.add_argument("--t", type=int, help="draw count defining the ordered-norm weights")
    mca.add_argument("--restarts", type=int, default=200)
    mca.add_argument("--seed", type=int, default=0)
    return parser


def read_config(path):
    if not os.path.exists(path):
        raise CliError(f"config file not found: {path}", code=2)
    entries = {}
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise CliError(f"{path}:{line_no}: expected key=value, got {line!r}")
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def resolve_train_config(args):
    """Merge flags over config-file entries over defaults."""
    config = {"train_path": None, "out": None, **TRAIN_DEFAULTS}
    types = {
        "loss_param": float, "t": int, "rho": float, "iters": int,
        "quantiles": int, "seed": int, "split_frac": float,
    }
    if args.config:
        for key, raw in read_config(args.config).items():
            alias = {"train": "train_path"}.get(key, key)
            if alias not in config:
                raise CliError(f"unknown config key {key!r}")
            config[alias] = types.get(alias, str)(raw)
    for key in config:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            config[key] = flag_value
    if config["train_path"] is None:
        raise CliError("missing required --train file")
    if config["out"] is None:
        raise CliError("missing required --out CSV path")
    return config


def _load_dataset(path, n_features=None):
    if not os.path.exists(path):
        raise CliError(f"input file not found: {path}", code=2)
    return load_libsvm(path, n_features=n_features)


def cmd_train(args, stdout):
    config = resolve_train_config(args)
    print("effective configuration:", file=stdout)
    for key in sorted(config):
        print(f"  {key}={config[key]}", file=stdout)

    train_data = _load_dataset(config["train_path"])
    if config["test"] is not None:
        test_data = _load_dataset(config["test"], n_features=train_data.n_features)
        if test_data.n_features > train_data.n_features:
            train_data = _load_dataset(config["train_path"], n_features=test_data.n_features)
    else:
        train_data, test_data = train_test_split(
            train_data, config["split_frac"], config["seed"]
        )

    if config["loss"] in CLASSIFICATION_LOSSES:
        train_data = train_data.with_labels(to_binary_labels(train_data.labels))
        test_data = test_data.with_labels(to_binary_labels(test_data.labels))

    loss = make_loss(config["loss"], config["loss_param"])
    try:
        splits = feature_quantiles(train_data, config["quantiles"])
        basis = StumpBasis(train_data, splits)
        rule = SelectionRule(config["rule"], config["t"])
        if config["step"] == "const":
            rho = config["rho"]
            if rho is None:
                if loss.smoothness is None:
                    raise ValueError(f"loss {loss.kind!r} has no default constant step")
                rho = 1.0 / loss.smoothness
            step = StepRule.constant(rho)
        else:
            step = StepRule.line_search()
        result = train_rgbm(
            train_data, loss, basis, rule, step,
            config["iters"], config["seed"], test=test_data,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    with open(config["out"], "w", encoding="ascii") as fh:
        fh.write("iter,elapsed_sec,train_loss,test_loss\n")
        for rec in result.trace:
            test_field = "" if rec.test_objective is None else repr(rec.test_objective)
            fh.write(f"{rec.iteration},{rec.elapsed_sec!r},{rec.train_objective!r},{test_field}\n")

    if config["model_out"] is not None:
        save_model(config["model_out"], result.coefficients, basis, loss.kind)

    if result.trace:
        final = result.trace[-1]
        print(f"final train loss: {final.train_objective!r}", file=stdout)
        if final.test_objective is not None:
            print(f"final test loss: {final.test_objective!r}", file=stdout)
    else:
        print("no iterations run; model predicts 0", file=stdout)
    if result.capped_iterations:
        print(
            f"warning: line-search cap bound at iterations {result.capped_iterations}",
            file=stdout,
        )
    return 0


def cmd_pmf(args, stdout):
    if not 1 <= args.t <= args.K:
        raise CliError(f"need 1 <= t <= K, got t={args.t}, K={args.K}")
    pmf = selection_pmf(args.K, args.t)
    print("rank\tprob\tscaled\tbeta_limit", file=stdout)
    for j in range(1, args.K + 1):
        q = j / args.K
        limit = beta_limit_pdf(q, args.t) if 0 < q < 1 else float("nan")
        print(f"{j}\t{pmf[j - 1]:.10g}\t{args.K * pmf[j - 1]:.10g}\t{limit:.10g}", file=stdout)
    print(f"sum={np.sum(pmf):.12g}", file=stdout)
    return 0


def cmd_mca(args, stdout):
    rng = np.random.default_rng(args.seed)
    if args.basis == "file":
        if not args.path:
            raise CliError("basis=file needs --path")
        if not os.path.exists(args.path):
            raise CliError(f"input file not found: {args.path}", code=2)
        B = np.loadtxt(args.path, ndmin=2)
        norms = np.linalg.norm(B, axis=0)
        if np.any(norms == 0):
            raise CliError("matrix has a zero column")
        B = B / norms
        p = B.shape[1]
        closed = None
    elif args.basis == "orthogonal":
        if not args.p:
            raise CliError("basis=orthogonal needs --p")
        p = args.p
        B = np.eye(p)
        closed = None
    else:
        if not args.p:
            raise CliError("basis=binary needs --p")
        p = args.p
        try:
            B = binary_basis(p)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        closed = None

    if args.norm == "infinity":
        spec = InfinityNorm()
        if args.basis == "orthogonal":
            closed = mca_orthogonal_infinity(p)
        elif args.basis == "binary":
            closed = mca_binary_infinity(p)
    else:
        if not args.t:
            raise CliError("norm=ordered needs --t")
        weights = selection_pmf(B.shape[1], args.t)
        spec = OrderedL1Norm(weights)
        if args.basis == "orthogonal":
            closed = mca_orthogonal_ordered(weights)

    try:
        estimate = mca_estimate(B, spec, restarts=args.restarts, rng=rng)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    closed_text = "n/a" if closed is None else f"{closed:.8f}"
    print(f"closed_form={closed_text} estimate={estimate.value:.8f}", file=stdout)
    return 0


def main(argv=None, stdout=None):
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"train": cmd_train, "pmf": cmd_pmf, "mca": cmd_mca}
    try:
        return handlers[args.command](args, stdout)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
