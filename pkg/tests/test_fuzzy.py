import itertools

import numpy as np
import pytest

from src.interfaces.fuzzy_params import FuzzyParams
from src.interfaces.membership_matrix import MembershipMatrix
from src.interfaces.sparse_doc_matrix import SparseDocMatrix
from src.interfaces.tokenizer_config import TokenizerConfig
from src.usecases import fuzzy_usecases
from src.usecases.corpus_usecases import l2_normalize_rows
from src.usecases.fuzzy_usecases import FuzzyUseCases
from src.utils.error_handler import DimensionMismatch, IdenticalPrototypes, InvalidParams, TooFewDocuments


def _check_contract(U: np.ndarray, n: int):
    np.testing.assert_allclose(U.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(U >= 0.0) and np.all(U <= 1.0)
    columns = U.sum(axis=0)
    assert np.all(columns > 0.0) and np.all(columns < n)


class TestDissimilarity:
    def test_identical_and_orthogonal(self):
        assert fuzzy_usecases.cosine_dissimilarity(np.array([1.0, 0.0]), [1.0, 0.0]) == 0.0
        assert fuzzy_usecases.cosine_dissimilarity(np.array([0.0, 1.0]), [1.0, 0.0]) == 1.0

    def test_empty_document(self):
        assert fuzzy_usecases.cosine_dissimilarity(np.zeros(3), [1.0, 0.0, 0.0]) == 1.0


class TestMemberships:
    def test_equal_distances_split_evenly(self):
        U = fuzzy_usecases.memberships_from_dissimilarities(np.array([[0.2, 0.2]]), q=1.5)
        np.testing.assert_allclose(U, [[0.5, 0.5]])

    def test_closed_form(self):
        U = fuzzy_usecases.memberships_from_dissimilarities(np.array([[0.1, 0.4]]), q=2.0)
        np.testing.assert_allclose(U, [[0.8, 0.2]])

    def test_zero_distance_takes_all_mass(self):
        U = fuzzy_usecases.memberships_from_dissimilarities(np.array([[0.0, 0.5], [0.0, 0.0]]), q=1.5)
        np.testing.assert_allclose(U, [[1.0, 0.0], [0.5, 0.5]])

    def test_empty_rows_get_uniform_memberships(self, small_matrix):
        X = SparseDocMatrix.from_dense(np.vstack([small_matrix.to_dense(), np.zeros(10)]))
        V = np.eye(10)[:3]
        U = fuzzy_usecases.update_memberships(l2_normalize_rows(X), V, q=1.5)
        np.testing.assert_allclose(U.values[-1], [1 / 3] * 3)


class TestPrototypes:
    def test_unit_norm(self, small_matrix):
        Xn = l2_normalize_rows(small_matrix)
        U = MembershipMatrix(np.full((5, 2), 0.5))
        V, degenerate = fuzzy_usecases.update_prototypes(Xn, U, q=1.5)
        np.testing.assert_allclose(np.linalg.norm(V, axis=1), 1.0)
        assert degenerate == []

    def test_vanished_cluster_is_reseeded(self, small_matrix):
        Xn = l2_normalize_rows(small_matrix)
        U = MembershipMatrix(np.column_stack([np.ones(5), np.zeros(5)]))
        V, degenerate = fuzzy_usecases.update_prototypes(Xn, U, q=1.5)
        assert degenerate == [1]
        np.testing.assert_allclose(np.linalg.norm(V[1]), 1.0)


class TestFit:
    @pytest.mark.parametrize("q", [1.5, 2.0])
    def test_small_corpus_pattern(self, small_matrix, q):
        for seed in range(10):
            model, U = fuzzy_usecases.fit(small_matrix, FuzzyParams(k=2, q=q, seed=seed, n_restarts=3))
            labels = U.hard_assignment()
            assert labels[1] == labels[3]
            assert labels[0] == labels[2]
            assert labels[0] != labels[1]
            top = U.values.max(axis=1)
            assert np.argmin(top) == 4

    def test_membership_contract_and_descent(self, random_matrix):
        rng = np.random.default_rng(11)
        converged = 0
        for case in range(20):
            n, m = int(rng.integers(20, 80)), int(rng.integers(20, 120))
            X = random_matrix(n, m, density=0.1, seed=case)
            k = int(rng.integers(2, 7))
            q = [1.5, 2.0][case % 2]
            model, U = fuzzy_usecases.fit(X, FuzzyParams(k=k, q=q, seed=case))
            _check_contract(U.values, n)
            assert np.all(np.diff(model.objective_trace) <= 1e-10)
            converged += model.converged
        assert converged >= 18

    def test_deterministic(self, small_matrix):
        params = FuzzyParams(k=2, q=1.5, seed=4)
        first, _ = fuzzy_usecases.fit(small_matrix, params)
        second, _ = fuzzy_usecases.fit(small_matrix, params)
        assert first.fingerprint() == second.fingerprint()
        assert first.objective_trace == second.objective_trace

    def test_restarts_never_worse(self, random_matrix):
        X = random_matrix(60, 40, density=0.15, seed=3)
        single, _ = fuzzy_usecases.fit(X, FuzzyParams(k=4, seed=8))
        best, _ = fuzzy_usecases.fit(X, FuzzyParams(k=4, seed=8, n_restarts=4))
        assert best.final_objective <= single.final_objective

    def test_k_larger_than_corpus(self, small_matrix):
        with pytest.raises(InvalidParams):
            fuzzy_usecases.fit(small_matrix, FuzzyParams(k=6))

    def test_too_few_non_empty_documents(self):
        X = SparseDocMatrix.from_dense([[1, 0], [0, 1], [0, 0], [0, 0]])
        with pytest.raises(TooFewDocuments):
            fuzzy_usecases.fit(X, FuzzyParams(k=3))

    def test_k_one_gives_constant_memberships(self, small_matrix):
        _, U = fuzzy_usecases.fit(small_matrix, FuzzyParams(k=1))
        np.testing.assert_allclose(U.values, 1.0)


class TestReduce:
    def test_training_rows_reproduce_fit_memberships(self, small_matrix):
        model, U = fuzzy_usecases.fit(small_matrix, FuzzyParams(k=2, seed=1))
        reduced = fuzzy_usecases.reduce(small_matrix, model)
        assert reduced.method == "FC"
        np.testing.assert_allclose(reduced.values, U.values, atol=1e-12)

    def test_term_count_mismatch(self, small_matrix):
        model, _ = fuzzy_usecases.fit(small_matrix, FuzzyParams(k=2, seed=1))
        with pytest.raises(DimensionMismatch):
            fuzzy_usecases.reduce(SparseDocMatrix.from_dense(np.ones((2, 4))), model)


class TestValidity:
    def test_xie_beni_positive(self, small_matrix):
        model, U = fuzzy_usecases.fit(small_matrix, FuzzyParams(k=2, seed=0))
        Xn = l2_normalize_rows(small_matrix)
        assert fuzzy_usecases.xie_beni(Xn, model.prototypes, U, 1.5) > 0.0

    def test_needs_two_clusters(self, small_matrix):
        with pytest.raises(InvalidParams):
            fuzzy_usecases.xie_beni(small_matrix, np.eye(10)[:1], MembershipMatrix(np.ones((5, 1))), 1.5)

    def test_identical_prototypes(self, small_matrix):
        V = np.vstack([np.eye(10)[0], np.eye(10)[0]])
        with pytest.raises(IdenticalPrototypes):
            fuzzy_usecases.xie_beni(small_matrix, V, MembershipMatrix(np.full((5, 2), 0.5)), 1.5)

    def test_scan_prefers_two_topics(self, separable_matrix):
        X, _ = separable_matrix
        scores, best_k = fuzzy_usecases.validity_scan(X, [2, 3, 4], FuzzyParams(k=1, seed=0))
        assert sorted(scores) == [2, 3, 4]
        assert best_k == 2


class TestEuclideanReference:
    def test_two_blobs(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(0.0, 0.1, (30, 2)), rng.normal(5.0, 0.1, (30, 2))])
        centers, U, trace = fuzzy_usecases.euclidean_fcm(X, k=2, q=2.0, seed=0)
        found = sorted(centers.tolist())
        np.testing.assert_allclose(found[0], [0.0, 0.0], atol=0.1)
        np.testing.assert_allclose(found[1], [5.0, 5.0], atol=0.1)
        assert np.all(np.diff(trace) <= 1e-10)


def _dense_unit_rows(X: SparseDocMatrix) -> np.ndarray:
    dense = X.to_dense()
    norms = np.linalg.norm(dense, axis=1, keepdims=True)
    return np.divide(dense, norms, out=np.zeros_like(dense), where=norms > 0)


def _eight_by_five():
    rng = np.random.default_rng(12)
    counts = rng.integers(1, 5, (8, 5)) * (rng.random((8, 5)) < 0.7) + np.eye(5)[np.arange(8) % 5]
    X = SparseDocMatrix.from_dense(counts)
    U = rng.random((8, 3))
    return X, MembershipMatrix(U / U.sum(axis=1, keepdims=True))


class TestDenseAgreement:
    def test_prototypes_match_weighted_mean(self):
        X, U = _eight_by_five()
        Xn = l2_normalize_rows(X)
        V, degenerate = fuzzy_usecases.update_prototypes(Xn, U, q=1.5)
        expected = (U.values ** 1.5).T @ _dense_unit_rows(X)
        expected /= np.linalg.norm(expected, axis=1, keepdims=True)
        assert degenerate == []
        assert np.all(np.sum(V * expected, axis=1) >= 1.0 - 1e-12)

    def test_objective_matches_dense_sum(self):
        X, U = _eight_by_five()
        Xn = l2_normalize_rows(X)
        V, _ = fuzzy_usecases.update_prototypes(Xn, U, q=2.0)
        D = 1.0 - _dense_unit_rows(X) @ V.T
        expected = float(np.sum(U.values ** 2.0 * D))
        assert fuzzy_usecases.objective(Xn, V, U, 2.0) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_xie_beni_by_hand(self):
        root = 1.0 / np.sqrt(2.0)
        X = SparseDocMatrix.from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1], [root, root, 0]])
        U = MembershipMatrix(np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.45, 0.45, 0.1]]))
        expected = (0.07 + 0.405 * (1.0 - root)) / 4.0
        assert fuzzy_usecases.xie_beni(X, np.eye(3), U, 2.0) == pytest.approx(expected, abs=1e-10)

    def test_orthogonal_groups_score_zero(self):
        X = SparseDocMatrix.from_dense([[1, 1, 0, 0], [2, 2, 0, 0], [0, 0, 1, 3], [0, 0, 2, 6]])
        model, U = fuzzy_usecases.fit(X, FuzzyParams(k=2, q=1.5, seed=0))
        np.testing.assert_allclose(np.sort(U.values, axis=1), [[0.0, 1.0]] * 4, atol=1e-12)
        assert fuzzy_usecases.xie_beni(l2_normalize_rows(X), model.prototypes, U, 1.5) == pytest.approx(0.0, abs=1e-12)


class TestSymmetries:
    def test_updates_commute_with_row_permutation(self, random_matrix):
        Xn = l2_normalize_rows(random_matrix(30, 20, density=0.3, seed=6))
        perm = np.random.default_rng(1).permutation(30)
        V = fuzzy_usecases.initial_prototypes(Xn, 3, np.random.default_rng(0))

        U = fuzzy_usecases.update_memberships(Xn, V, 1.5)
        U_perm = fuzzy_usecases.update_memberships(Xn.take_rows(perm), V, 1.5)
        np.testing.assert_allclose(U_perm.values, U.values[perm], atol=1e-14)

        V_next, _ = fuzzy_usecases.update_prototypes(Xn, U, 1.5)
        V_perm, _ = fuzzy_usecases.update_prototypes(Xn.take_rows(perm), U_perm, 1.5)
        np.testing.assert_allclose(V_perm, V_next, atol=1e-12)
        assert fuzzy_usecases.objective(Xn.take_rows(perm), V, U_perm, 1.5) == pytest.approx(
            fuzzy_usecases.objective(Xn, V, U, 1.5), rel=1e-12
        )

    def test_reduce_commutes_with_row_permutation(self, random_matrix):
        X = random_matrix(25, 15, density=0.3, seed=2)
        model, _ = fuzzy_usecases.fit(X, FuzzyParams(k=3, seed=5))
        perm = np.random.default_rng(4).permutation(25)
        np.testing.assert_allclose(
            fuzzy_usecases.reduce(X.take_rows(perm), model).values,
            fuzzy_usecases.reduce(X, model).values[perm],
            atol=1e-14,
        )

    def test_duplicate_documents_share_memberships(self, small_matrix):
        dense = small_matrix.to_dense()
        X = SparseDocMatrix.from_dense(np.vstack([dense, dense[1]]))
        _, U = fuzzy_usecases.fit(X, FuzzyParams(k=2, seed=3))
        np.testing.assert_allclose(U.values[5], U.values[1], atol=1e-15)

    def test_row_entropy_grows_with_fuzzifier(self):
        D = np.random.default_rng(9).uniform(0.05, 1.5, (40, 4))
        entropies = []
        for q in (1.2, 1.5, 2.0, 4.0):
            U = fuzzy_usecases.memberships_from_dissimilarities(D, q)
            entropies.append(-np.sum(U * np.log(np.clip(U, 1e-300, None)), axis=1))
        for lower, higher in zip(entropies, entropies[1:]):
            assert np.all(higher >= lower - 1e-12)


def _best_two_partition(Xn: np.ndarray):
    """Exhaustive crisp spherical 2-means: labels minimizing sum_j (1 - x_j . c(label_j))."""
    n = Xn.shape[0]
    best, best_labels = np.inf, None
    for tail in itertools.product([0, 1], repeat=n - 1):
        labels = np.array((0,) + tail)
        if labels.all() or not labels.any():
            continue
        cost = 0.0
        for cluster in (0, 1):
            cost += np.sum(labels == cluster) - np.linalg.norm(Xn[labels == cluster].sum(axis=0))
        if cost < best:
            best, best_labels = cost, labels
    return best_labels


class TestExhaustivePartition:
    def test_hard_assignment_is_best_two_partition(self):
        X = SparseDocMatrix.from_dense(
            [
                [3, 2, 1, 0, 0, 0, 1, 0],
                [2, 3, 0, 1, 0, 0, 0, 0],
                [1, 2, 3, 0, 1, 0, 0, 0],
                [2, 0, 2, 2, 0, 0, 0, 1],
                [3, 1, 1, 1, 0, 1, 0, 0],
                [0, 0, 1, 0, 3, 2, 1, 2],
                [0, 1, 0, 0, 2, 3, 2, 1],
                [0, 0, 0, 1, 1, 2, 3, 2],
                [1, 0, 0, 0, 2, 1, 2, 3],
            ]
        )
        expected = _best_two_partition(_dense_unit_rows(X))
        for seed in range(5):
            _, U = fuzzy_usecases.fit(X, FuzzyParams(k=2, q=1.5, seed=seed, n_restarts=3))
            labels = U.hard_assignment()
            assert np.array_equal(labels, expected) or np.array_equal(labels, 1 - expected)


@pytest.mark.slow
class TestMembershipContractAtScale:
    def test_two_hundred_random_matrices(self, random_matrix):
        rng = np.random.default_rng(2024)
        converged = 0
        for case in range(200):
            n, m = int(rng.integers(10, 201)), int(rng.integers(10, 501))
            X = random_matrix(n, m, density=float(rng.uniform(0.02, 0.2)), seed=case)
            k = int(rng.integers(2, 11))
            if len(X.nonempty_rows()) < k:
                continue
            model, U = fuzzy_usecases.fit(X, FuzzyParams(k=k, q=[1.5, 2.0][case % 2], seed=case))
            _check_contract(U.values, n)
            assert np.all(np.diff(model.objective_trace) <= 1e-10)
            converged += model.converged
        assert converged >= 190


class TestFuzzyUseCases:
    def test_documents_reduce_to_memberships(self, separable_corpus, separable_matrix):
        X, _ = separable_matrix
        params = FuzzyParams(k=2, seed=1)
        vocab, _, reduced = FuzzyUseCases().reduce_documents(separable_corpus.documents, TokenizerConfig(), params)
        _, U = fuzzy_usecases.fit(X, params)
        assert vocab.size == X.n_cols
        assert reduced.method == "FC"
        np.testing.assert_allclose(reduced.values, U.values)

    def test_scan_matches_validity_scan(self, separable_matrix):
        X, _ = separable_matrix
        scores, best_k = FuzzyUseCases().scan(X, [2, 3], q=1.5, seed=0)
        assert (scores, best_k) == fuzzy_usecases.validity_scan(X, [2, 3], FuzzyParams(k=1, q=1.5, seed=0))
