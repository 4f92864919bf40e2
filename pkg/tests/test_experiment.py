import os

import numpy as np
import pandas as pd
import pytest

from src.config.reference_accuracy import REFERENCE_ACCURACY, REFERENCE_DIMS
from src.interfaces.classifier_params import LinearParams
from src.interfaces.experiment_config import DatasetSpec, ExperimentConfig
from src.interfaces.results_table import ResultsTable
from src.repositories.results_repository import ResultsRepository
from src.usecases.corpus_usecases import CorpusUseCases
from src.usecases.experiment_usecases import (
    ExperimentUseCases,
    compare_with_reference,
    emit_plot_data,
    load_experiment_config,
    parse_dataset,
    parse_dims,
    parse_plot_data,
    rank_by_stability,
    reference_key,
    run_experiment,
    scaling_benchmark,
    stability_summary,
)
from src.utils.error_handler import InsufficientPoints, InvalidK, InvalidParams, ParseError


def _config(out_dir, **overrides):
    values = dict(
        dataset=DatasetSpec(synthetic_n=60, seed=3),
        dims=[2, 3],
        methods=["FC", "SVD"],
        fuzzifiers=[1.5],
        classifiers=["adaboost", "linear"],
        folds=3,
        seed=5,
        out_dir=str(out_dir),
        n_jobs=1,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def _read(path):
    return path.read_bytes()


class TestRunExperiment:
    def test_single_cell(self, tmp_path):
        cfg = _config(tmp_path, methods=["SVD"], dims=[2], classifiers=["linear"])
        table = run_experiment(cfg, progress=False)
        repository = ResultsRepository(tmp_path)
        assert len(repository.load_rows()) == 1
        assert len(table.averaged()) == 1
        assert table.frame["wall_time"].notna().all()
        assert len(repository.averaged_path.read_text().splitlines()) == 2

    def test_resume_matches_uninterrupted_run(self, tmp_path):
        full = tmp_path / "full"
        run_experiment(_config(full), progress=False)

        resumed = tmp_path / "resumed"
        run_experiment(_config(resumed, dims=[2]), progress=False)
        run_experiment(_config(resumed), progress=False)

        assert _read(full / "results.csv") == _read(resumed / "results.csv")
        assert _read(full / "averaged.csv") == _read(resumed / "averaged.csv")

    def test_rerun_skips_completed_cells(self, tmp_path):
        run_experiment(_config(tmp_path), progress=False)
        before = _read(tmp_path / "results.csv")
        timings = len(ResultsRepository(tmp_path).load_timings())
        run_experiment(_config(tmp_path), progress=False)
        assert _read(tmp_path / "results.csv") == before
        assert len(ResultsRepository(tmp_path).load_timings()) == timings

    def test_worker_count_does_not_change_results(self, tmp_path):
        run_experiment(_config(tmp_path / "serial"), progress=False)
        run_experiment(_config(tmp_path / "pool", n_jobs=2), progress=False)
        assert _read(tmp_path / "serial" / "results.csv") == _read(tmp_path / "pool" / "results.csv")

    def test_failed_cells_are_recorded_then_retried(self, tmp_path):
        broken = _config(tmp_path, methods=["SVD"], linear=LinearParams(max_iterations=1, tolerance=1e-12))
        table = run_experiment(broken, progress=False)
        rows = ResultsRepository(tmp_path).load_rows()
        assert set(rows["status"]) == {"failed"}
        assert len(rows) == 4
        assert table.averaged().empty

        table = run_experiment(_config(tmp_path, methods=["SVD"]), progress=False)
        rows = ResultsRepository(tmp_path).load_rows()
        assert set(rows["status"]) == {"ok"}
        assert len(rows) == 4
        assert len(table.averaged()) == 2

    def test_averaging_identity(self, tmp_path):
        table = run_experiment(_config(tmp_path), progress=False)
        frame = table.frame
        for row in table.averaged().itertuples(index=False):
            members = frame[(frame["variant"] == row.variant) & (frame["k"] == row.k)]
            assert row.classifiers == 2
            assert abs(row.mean_accuracy - members["mean_accuracy"].mean()) <= 1e-12

    def test_plot_files(self, tmp_path):
        run_experiment(_config(tmp_path), progress=False)
        plot_dir = ResultsRepository(tmp_path).plot_dir
        assert sorted(p.name for p in plot_dir.glob("*.dat")) == ["synthetic-3_FC-1.5.dat", "synthetic-3_SVD.dat"]
        assert [k for k, _ in parse_plot_data(plot_dir / "synthetic-3_SVD.dat")] == [2, 3]

    def test_dimension_above_matrix_rank(self, tmp_path):
        with pytest.raises(InvalidK):
            run_experiment(_config(tmp_path, dims=[500]), progress=False)


def _reference_table():
    return ResultsTable.from_series("reuters-grain", REFERENCE_ACCURACY["reuters-grain"])


class TestStability:
    def test_constant_series(self):
        table = ResultsTable.from_series("d", {"SVD": [(10, 0.9), (20, 0.9), (30, 0.9)]})
        assert stability_summary(table) == {"SVD": 0.0}

    def test_population_convention(self):
        table = ResultsTable.from_series("d", {"PCA": [(10, 0.9), (20, 1.0)]})
        assert stability_summary(table)["PCA"] == pytest.approx(0.05)

    def test_reference_series(self):
        summary = stability_summary(_reference_table(), "reuters-grain")
        assert abs(summary["FC-1.5"] - 4.6e-5) < 5e-6
        assert summary["FC-1.5"] < summary["SVD"] < summary["PCA"]

    def test_ranking(self):
        ranking = [variant for variant, _ in rank_by_stability(_reference_table())]
        assert ranking == ["FC-1.5", "FC-2", "SVD", "PCA"]

    def test_needs_two_points(self):
        table = ResultsTable.from_series("d", {"SVD": [(10, 0.9)]})
        with pytest.raises(InsufficientPoints):
            stability_summary(table)


class TestPlotData:
    def test_reference_series_round_trip(self, tmp_path):
        written = emit_plot_data(_reference_table(), tmp_path)
        assert len(written) == 4
        for (_, variant), path in written.items():
            assert len(path.read_text().splitlines()) == len(REFERENCE_DIMS)
            assert parse_plot_data(path) == list(REFERENCE_ACCURACY["reuters-grain"][variant])
        combined = pd.read_csv(tmp_path / "plot_data.csv")
        assert len(combined) == 4 * len(REFERENCE_DIMS)

    def test_malformed_series_line(self, tmp_path):
        path = tmp_path / "bad.dat"
        path.write_text("10 0.9\n20\n")
        with pytest.raises(ParseError) as info:
            parse_plot_data(path)
        assert info.value.offset == 2

    def test_empty_table_writes_nothing(self, tmp_path):
        table = ResultsTable.from_series("d", {})
        assert emit_plot_data(table, tmp_path) == {}


class TestReferenceComparison:
    def test_reference_against_itself(self):
        comparison = compare_with_reference(_reference_table(), "reuters-grain", "reuters-grain")
        assert len(comparison) == 4 * len(REFERENCE_DIMS)
        assert (comparison["gap"] == 0.0).all()

    def test_unknown_reference(self):
        assert compare_with_reference(_reference_table(), None).empty

    def test_reference_keys(self):
        assert reference_key(DatasetSpec(loader="reuters", positive="Grain")) == "reuters-grain"
        assert reference_key(DatasetSpec(loader="dirs", positive="virus")) == "ohsumed-virus"
        assert reference_key(DatasetSpec()) is None


class TestScalingBenchmark:
    def test_small_sizes(self):
        report = scaling_benchmark([200, 400, 800], k=5, m=300, nnz_per_row=10, iterations=2, repeats=1)
        assert report.ns == (200, 400, 800)
        assert all(t > 0 for t in report.seconds_per_iteration)
        assert len(report.ratios()) == 2
        assert list(report.to_frame().columns) == ["n", "seconds_per_iteration"]

    def test_single_cluster(self):
        report = scaling_benchmark([100], k=1, m=50, nnz_per_row=5, iterations=1, repeats=1)
        assert np.isnan(report.r_squared)


class TestConfig:
    def test_file_values_and_overrides(self, tmp_path):
        path = tmp_path / "sweep.env"
        path.write_text(
            "DATASET=synthetic\nDIMS=10:30:10\nMETHODS=FC,SVD\nFUZZIFIER=1.5,2\n"
            "FOLDS=4\nSEED=9\nTREES=20\nSYNTHETIC_N=80\n"
        )
        cfg = load_experiment_config(path, {"folds": 3, "methods": None})
        assert cfg.folds == 3
        assert cfg.methods == ["FC", "SVD"]
        assert cfg.dims == [10, 20, 30]
        assert cfg.fuzzifiers == [1.5, 2.0]
        assert cfg.forest.n_trees == 20
        assert cfg.dataset.synthetic_n == 80
        assert cfg.dataset.seed == 9

    def test_defaults(self):
        cfg = load_experiment_config()
        assert cfg.dims == list(range(10, 101, 10))
        assert cfg.fuzzifiers == [1.5, 2.0]
        assert cfg.classifiers == ["forest", "adaboost", "linear"]
        assert cfg.folds == 5

    def test_invalid_fuzzifier(self):
        with pytest.raises(InvalidParams):
            load_experiment_config(overrides={"fuzzifier": "1.0"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidParams):
            load_experiment_config(tmp_path / "absent.env")

    def test_parse_dims(self):
        assert parse_dims("10:100:10") == list(range(10, 101, 10))
        assert parse_dims("5,3") == [5, 3]
        with pytest.raises(InvalidParams):
            parse_dims("ten")

    def test_parse_dataset(self):
        assert parse_dataset("reuters:a.sgm,b.sgm") == {"loader": "reuters", "paths": ["a.sgm", "b.sgm"]}
        assert parse_dataset("synthetic") == {"loader": "synthetic", "paths": []}


@pytest.mark.slow
class TestAcceptance:
    def test_scaling_is_linear(self):
        report = scaling_benchmark([10_000, 20_000, 40_000, 80_000], k=50, m=10_000, nnz_per_row=40)
        assert report.r_squared >= 0.95
        assert max(report.ratios()) <= 2.6

    def test_fuzzy_features_are_most_stable(self, tmp_path):
        reuters = os.environ.get("REUTERS_DIR")
        if reuters:
            dataset = DatasetSpec(loader="reuters", paths=[reuters], positive="grain")
        else:
            # proxy: imbalanced synthetic corpus with 5% positives
            dataset = DatasetSpec(
                synthetic_n=400,
                synthetic_positive_fraction=0.05,
                synthetic_vocabulary=60,
                synthetic_shared_fraction=0.3,
                synthetic_cross_fraction=0.1,
            )
        cfg = ExperimentConfig(
            dataset=dataset, dims=list(REFERENCE_DIMS), fuzzifiers=[1.5], out_dir=str(tmp_path), seed=0
        )
        table = run_experiment(cfg, progress=False)
        fc = dict(table.series("FC-1.5"))
        for method in ("SVD", "PCA"):
            wins = sum(fc[k] >= value for k, value in table.series(method))
            assert wins >= 5, method
        summary = stability_summary(table)
        assert summary["FC-1.5"] <= min(summary["PCA"], summary["SVD"])


class TestExperimentUseCases:
    def test_sweep_ingests_through_the_injected_corpus_use_cases(self, tmp_path):
        class CountingCorpusUseCases(CorpusUseCases):
            def __init__(self):
                super().__init__()
                self.ingested = 0

            def ingest(self, spec, cfg, n_jobs=1):
                self.ingested += 1
                return super().ingest(spec, cfg, n_jobs)

        corpus_usecases = CountingCorpusUseCases()
        experiments = ExperimentUseCases(corpus_usecases)
        table = experiments.run(_config(tmp_path, methods=["SVD"], classifiers=["linear"]), progress=False)
        assert corpus_usecases.ingested == 1
        assert len(table.averaged()) == 2
        assert [variant for variant, _ in experiments.stability_ranking(table)] == ["SVD"]
