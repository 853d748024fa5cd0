"""Command-line interface: ``ripe fit | predict | eval | experiment``.

Exit codes: 0 success, 2 usage or input error, 3 internal invariant violation.
Logs and timings go to stderr; stdout only carries deterministic output.
"""

from __future__ import annotations

import csv
import functools
import logging
import sys
import time
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import modelfile
from .core import InputError, InvariantError, ParameterError, activation_matrix
from .experiment import ExperimentConfig, nmse, run
from .generate import MiningParams
from .predict import NO_RULE, RuleModel, fit, summarize
from .significance import SignificanceSpec, check_conditions, threshold_function

log = logging.getLogger("ripe")


def read_csv(path, target: Optional[str] = None):
    """Read a numeric CSV with a header row.

    Returns ``(X, y, feature_names)``; ``y`` is ``None`` when ``target`` is not given.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    if not body:
        raise InputError(f"{path} has no data rows")
    if target is not None and target not in header:
        raise InputError(f"target column {target!r} not found in {path}")
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                values[i - 2, j] = float(cell)
            except ValueError:
                raise InputError(f"{path}:{i}: column {header[j]!r} is not numeric: {cell!r}") from None
    if not np.isfinite(values).all():
        raise InputError(f"{path} contains missing or non-finite values")
    if target is None:
        return values, None, header
    t = header.index(target)
    keep = [j for j in range(len(header)) if j != t]
    return values[:, keep], values[:, t], [header[j] for j in keep]


def align_features(model: RuleModel, X: np.ndarray, names) -> np.ndarray:
    expected = list(model.meta.feature_names)
    missing = [name for name in expected if name not in names]
    if missing:
        raise InputError(f"missing feature columns: {missing}")
    return X[:, [names.index(name) for name in expected]]


def audit(model: RuleModel, X: np.ndarray, y: np.ndarray) -> None:
    """Re-check coverage and significance of every rule on the training data."""
    disc = model.discretizer.transform(X)
    bits = activation_matrix(model.rules, disc)
    z_fn = threshold_function(model.params.spec, y)
    mu_all = float(y.mean())
    for i, rule in enumerate(model.rules):
        n_r = int(bits[:, i].sum())
        mu = float(y[bits[:, i]].sum() / n_r) if n_r else 0.0
        if not check_conditions(n_r, y.size, mu, mu_all, z_fn(n_r), model.params.m_n):
            raise InvariantError(f"selected rule {rule.label} is not suitable")
    if model.cell_table.n != y.size:
        raise InvariantError("cell table does not cover the training sample")


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InputError, ParameterError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except InvariantError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(3)
    return wrapper


def mining_options(fn):
    options = [
        click.option("--mn", "m_n", type=int, default=5, show_default=True, help="Modalities per feature."),
        click.option("--alpha", type=float, default=0.05, show_default=True, help="Significance level."),
        click.option("--z", "z_kind", type=click.Choice(["hoeffding", "bernstein"]), default="bernstein",
                     show_default=True, help="Significance function."),
        click.option("--max-rules-beam", "beam", type=int, default=300, show_default=True,
                     help="Rules of complexity 1 and c-1 intersected at complexity c."),
        click.option("--max-complexity", type=int, default=None, help="Cap on rule complexity (default: d)."),
        click.option("--threads", type=int, default=1, envvar="RIPE_THREADS", show_default=True,
                     help="Worker threads used while mining."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def make_params(m_n, alpha, z_kind, beam, max_complexity) -> MiningParams:
    return MiningParams(m_n, SignificanceSpec(z_kind, alpha), beam, max_complexity)


def warn_modalities(m_n: int, n: int, d: int) -> None:
    if m_n ** min(d, 8) > n:
        log.warning("m_n^min(d, 8) = %d exceeds n = %d; consider fewer modalities", m_n ** min(d, 8), n)


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def cli(verbose: int) -> None:
    """RIPE: interpretable regression with hyperrectangle rules."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


@cli.command("fit")
@click.option("--data", required=True, type=click.Path(dir_okay=False), help="Training CSV with header.")
@click.option("--target", required=True, help="Name of the target column.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Model file to write.")
@click.option("--fallback-mean", is_flag=True, help="Predict the global mean on cells unseen in training.")
@mining_options
@handle_errors
def fit_cmd(data, target, out, fallback_mean, m_n, alpha, z_kind, beam, max_complexity, threads):
    """Fit a model and print its rule summary."""
    X, y, names = read_csv(data, target)
    params = make_params(m_n, alpha, z_kind, beam, max_complexity)
    warn_modalities(m_n, X.shape[0], X.shape[1])
    start = time.perf_counter()
    model = fit(X, y, params, names, fallback_mean=fallback_mean, n_jobs=threads)
    log.info("fit took %.2f s", time.perf_counter() - start)
    audit(model, X, y)
    if not model.rules:
        log.warning("no suitable rules found; the model predicts the global mean")
    modelfile.save(model, out)
    click.echo(summarize(model).to_text())


@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@click.option("--data", required=True, type=click.Path(dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--explain", is_flag=True, help="Add a column listing the activated rules.")
@handle_errors
def predict_cmd(model_path, data, out, explain):
    """Write one prediction per input row."""
    model = modelfile.load(model_path)
    X, _, names = read_csv(data)
    X = align_features(model, X, names)
    preds = model.predict(X)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if explain:
            writer.writerow(["prediction", "rules"])
            active = model.activations(X)
            for p, row in zip(preds, active):
                labels = [r.label for r, on in zip(model.rules, row) if on]
                writer.writerow([repr(float(p)), "|".join(labels) if labels else NO_RULE])
        else:
            writer.writerow(["prediction"])
            writer.writerows([[repr(float(p))] for p in preds])


@cli.command("eval")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@click.option("--data", required=True, type=click.Path(dir_okay=False))
@click.option("--target", required=True)
@handle_errors
def eval_cmd(model_path, data, target):
    """Print MSE, NMSE and row count on a labelled CSV."""
    model = modelfile.load(model_path)
    X, y, names = read_csv(data, target)
    preds = model.predict(align_features(model, X, names))
    mse = float(np.mean((preds - y) ** 2))
    try:
        score = nmse(preds, y)
    except InputError:
        log.warning("constant target: NMSE undefined")
        score = float("nan")
    click.echo(f"mse={mse!r}\nnmse={score!r}\nn={y.size}")


@cli.command("experiment")
@click.option("--kind", type=click.Choice(["circle", "linear"]), default="circle", show_default=True)
@click.option("--n", type=int, default=None, help="Sample size (circle: 5000, linear: 500).")
@click.option("--d", type=int, default=50, show_default=True, help="Features (linear only; circle uses 10).")
@click.option("--p", type=int, default=3, show_default=True, help="Informative features (linear only).")
@click.option("--noise-sd", type=float, default=10.0, show_default=True, help="Noise scale (linear only).")
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--train-fraction", type=float, default=0.6, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="experiment_out", show_default=True)
@mining_options
@handle_errors
def experiment_cmd(kind, n, d, p, noise_sd, seed, train_fraction, out_dir,
                   m_n, alpha, z_kind, beam, max_complexity, threads):
    """Run a synthetic experiment and write metrics.csv, rules.csv and grid.csv."""
    if kind == "circle":
        config = ExperimentConfig("circle", n or 5000, 10, 2, 1.0, seed, train_fraction)
    else:
        config = ExperimentConfig("linear", n or 500, d, p, noise_sd, seed, train_fraction)
        if p == 0:
            log.warning("p = 0: the target carries no signal, expect a near-constant model")
    report = run(config, make_params(m_n, alpha, z_kind, beam, max_complexity), n_jobs=threads)
    log.info("fit took %.2f s", report.seconds)
    for path in report.write(out_dir):
        log.info("wrote %s", path)
    click.echo(report.to_text())


def main(argv=None) -> None:
    cli.main(args=argv, prog_name="ripe")


if __name__ == "__main__":
    main()
