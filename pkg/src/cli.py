import sys
from pathlib import Path

import click
import pandas as pd

from .config.settings import settings
from .interfaces.cv_report import CSV_COLUMNS
from .interfaces.fuzzy_params import FuzzyParams
from .interfaces.reducer_spec import ReducerSpec
from .repositories.dump_repository import (
    read_labels,
    read_matrix_dump,
    write_factor_dump,
    write_lines,
    write_matrix_dump,
    write_model_dump,
)
from .usecases.experiment_usecases import ExperimentUseCases, load_experiment_config, parse_dims
from .usecases.fuzzy_usecases import FuzzyUseCases
from .usecases.linear_usecases import LinearUseCases
from .usecases.validation_usecases import EvaluationUseCases
from .utils.error_handler import FuzzyDrError, InsufficientPoints, InvalidParams, raise_domain_error
from .utils.logger import get_logger

logger = get_logger("cli")


def experiment_options(func):
    """Flags shared by every subcommand that builds an ExperimentConfig."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Flat key=value config file."),
        click.option("--dataset", help="loader[:path,...], loader one of lines, reuters, dirs, synthetic."),
        click.option("--positive", help="Positive class label, topic or directory."),
        click.option("--dims", help="Dimensions: 10,20,30 or start:stop:step."),
        click.option("--methods", help="Comma-separated subset of FC,PCA,SVD."),
        click.option("--fuzzifier", help="Comma-separated fuzzifier values for FC."),
        click.option("--folds", type=int, help="Cross-validation folds."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(config_path=None, **flags):
    return load_experiment_config(config_path, flags)


def _load_matrix(matrix_path, cfg):
    """A matrix dump (labels from the sibling labels.txt) or a freshly ingested corpus."""
    if matrix_path:
        X = read_matrix_dump(matrix_path)
        labels_path = Path(matrix_path).with_name("labels.txt")
        y = read_labels(labels_path) if labels_path.exists() else None
        return X, y
    corpus, _, X = ExperimentUseCases().ingest(cfg)
    return X, corpus.label_array()


def _single(values, name):
    if len(values) != 1:
        raise_domain_error(InvalidParams, f"This command takes exactly one {name}, got {values}")
    return values[0]


def _reducer(cfg) -> ReducerSpec:
    method = _single(cfg.methods, "method")
    k = _single(cfg.dims, "dimension")
    if method == "FC":
        return ReducerSpec(method="FC", k=k, q=cfg.fuzzifiers[0])
    return ReducerSpec(method=method, k=k, normalize_rows=cfg.normalize_linear_rows)


@click.group()
def cli():
    """Fuzzy-clustering dimensionality reduction toolkit."""


@cli.command()
@experiment_options
def ingest(**flags):
    """Tokenize a corpus and dump its document-term matrix."""
    cfg = build_config(**flags)
    corpus, vocab, X = ExperimentUseCases().ingest(cfg)
    out = Path(cfg.out_dir)
    write_matrix_dump(out / "matrix.txt", X)
    write_lines(out / "vocabulary.txt", vocab.terms)
    write_lines(out / "labels.txt", corpus.labels)
    click.echo(f"{cfg.dataset.label}: n={X.n_rows} m={X.n_cols} nnz={X.nnz} skipped={corpus.skipped} -> {out}")


@cli.command()
@experiment_options
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), help="Matrix dump to reduce.")
def reduce(matrix_path, **flags):
    """Fit one reduction on the whole matrix and dump the reduced rows."""
    cfg = build_config(**flags)
    spec = _reducer(cfg)
    X, _ = _load_matrix(matrix_path, cfg)
    out = Path(cfg.out_dir)
    if spec.method == "FC":
        model, reduced = FuzzyUseCases().fit_reduce(X, FuzzyParams(k=spec.k, q=spec.q, seed=cfg.seed))
        write_model_dump(out / f"model_{spec.variant}_{spec.k}.txt", model)
    else:
        reduced = LinearUseCases().reduce(X, spec.method, spec.k, cfg.seed, spec.normalize_rows)
    values = reduced.values
    path = write_factor_dump(out / f"reduced_{spec.variant}_{spec.k}.txt", spec.variant, spec.k, values)
    click.echo(f"{spec.variant} k={spec.k}: {values.shape[0]} rows -> {path}")


@cli.command(name="eval")
@experiment_options
@click.option("--classifier", "classifiers", multiple=True, type=click.Choice(["forest", "adaboost", "linear"]))
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False))
def evaluate(classifiers, matrix_path, **flags):
    """Cross-validate a single (method, k) cell and print its CSV rows."""
    cfg = build_config(**flags)
    spec = _reducer(cfg)
    X, y = _load_matrix(matrix_path, cfg)
    if y is None:
        raise_domain_error(InvalidParams, "Evaluation needs labels.txt next to the matrix dump")
    names = list(classifiers) or list(cfg.classifiers)
    params = {"forest": cfg.forest, "adaboost": cfg.boost, "linear": cfg.linear}
    reports = EvaluationUseCases().evaluate(X, y, spec, names, params, cfg.folds, cfg.seed, cfg.dataset.label, cfg.n_jobs)
    click.echo(",".join(CSV_COLUMNS))
    for name in names:
        click.echo(",".join(reports[name].to_csv_row()))


@cli.command()
@experiment_options
@click.option("--no-progress", is_flag=True, help="Hide the progress bar.")
def sweep(no_progress, **flags):
    """Run the full dimension x method x classifier sweep (resumable)."""
    cfg = build_config(**flags)
    experiments = ExperimentUseCases()
    table = experiments.run(cfg, progress=not no_progress)
    averaged = table.averaged()
    click.echo(averaged.to_string(index=False) if not averaged.empty else "no completed cells")
    try:
        for variant, sigma in experiments.stability_ranking(table, cfg.dataset.label):
            click.echo(f"{variant}: sigma={sigma:.6g}")
    except InsufficientPoints:
        click.echo("stability needs at least 2 dimensions per variant")


@cli.command()
@click.option("--ns", default="10000,20000,40000,80000", show_default=True, help="Corpus sizes.")
@click.option("--k", "k", default=50, show_default=True)
@click.option("--m", "m", default=10000, show_default=True)
@click.option("--nnz", default=40, show_default=True, help="Non-zeros per row.")
@click.option("--seed", default=settings.DEFAULT_SEED, show_default=True)
@click.option("--iterations", default=5, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None)
def bench(ns, k, m, nnz, seed, iterations, out):
    """Per-iteration fuzzy fit time against corpus size."""
    report = ExperimentUseCases().benchmark(parse_dims(ns), k, m, nnz, seed=seed, iterations=iterations)
    frame = report.to_frame()
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        frame.to_csv(Path(out) / "bench.csv", index=False, lineterminator="\n")
    click.echo(frame.to_string(index=False))
    click.echo(f"slope={report.slope:.6g} s/doc  R^2={report.r_squared:.4f}")


@cli.command()
@experiment_options
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False))
def validity(matrix_path, **flags):
    """Xie-Beni index over a range of k; lower is better."""
    cfg = build_config(**flags)
    X, _ = _load_matrix(matrix_path, cfg)
    q = cfg.fuzzifiers[0]
    scores, best_k = FuzzyUseCases().scan(X, cfg.dims, q, cfg.seed)
    click.echo(pd.DataFrame({"k": list(scores), "xie_beni": list(scores.values())}).to_string(index=False))
    click.echo(f"best k={best_k}")


def main(argv=None) -> int:
    """Entry point mapping errors onto exit codes: 1 usage, 2 data, 3 numerical."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except FuzzyDrError as e:
        click.echo(f"error: {e.message}", err=True)
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
