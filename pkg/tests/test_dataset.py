import numpy as np
import pytest

from conftest import WALK_NAMES, random_dag
from hretan import (
    Dataset,
    Instance,
    build_dag,
    conditional_mutual_information,
    parse_dataset,
    project,
    project_instance,
    serialize_dataset,
    stratified_kfold,
    synthesize,
    validate_true_path,
)
from hretan.errors import ArgumentError, ParseError


class TestParse:
    def test_minimal_file(self):
        data = parse_dataset("f1,f2,class\n1,0,pro\n")
        assert data.feature_names == ("f1", "f2")
        assert data.rows.tolist() == [[1, 0]]
        assert data.class_names == ("pro",)
        assert data.labels.tolist() == [0]

    def test_class_order_lexicographic(self):
        data = parse_dataset("f1,class\n1,pro\n0,anti\n")
        assert data.class_names == ("anti", "pro")
        assert data.labels.tolist() == [1, 0]

    def test_positive_class_override(self):
        data = parse_dataset("f1,class\n1,pro\n0,anti\n", positive_class="anti")
        assert data.class_names == ("pro", "anti")
        assert data.labels.tolist() == [0, 1]

    def test_unknown_positive_class(self):
        with pytest.raises(ParseError):
            parse_dataset("f1,class\n1,pro\n0,anti\n", positive_class="missing")

    def test_non_binary_value_with_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_dataset("f1,f2,class\n1,2,pro\n")
        assert "line 2" in str(err.value)

    def test_header_only(self):
        with pytest.raises(ParseError):
            parse_dataset("f1,f2,class\n")

    def test_ragged_row(self):
        with pytest.raises(ParseError) as err:
            parse_dataset("f1,f2,class\n1,0,1,pro\n")
        assert "line 2" in str(err.value)

    def test_empty_header(self):
        with pytest.raises(ParseError):
            parse_dataset("\n1,pro\n")

    def test_missing_class_column(self):
        with pytest.raises(ParseError):
            parse_dataset("f1\n1\n")

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        dag = random_dag(rng, 6)
        data = synthesize(dag, 40, 0.4, 0.5, seed=9)
        back = parse_dataset(serialize_dataset(data))
        assert back.feature_names == data.feature_names
        assert back.class_names == data.class_names
        assert np.array_equal(back.rows, data.rows)
        assert np.array_equal(back.labels, data.labels)


class TestDatasetInvariants:
    def test_rejects_non_binary(self):
        with pytest.raises(ArgumentError):
            Dataset(feature_names=("a",), rows=np.asarray([[2]]),
                    labels=np.asarray([0]), class_names=("c",))

    def test_rejects_bad_label(self):
        with pytest.raises(ArgumentError):
            Dataset(feature_names=("a",), rows=np.asarray([[1]]),
                    labels=np.asarray([3]), class_names=("c",))

    def test_zero_rows_allowed_in_memory(self):
        data = Dataset(feature_names=("a",), rows=np.zeros((0, 1), dtype=np.uint8),
                       labels=np.zeros(0, dtype=np.int64), class_names=("c",))
        assert data.n_instances == 0

    def test_instance_values_validated(self):
        with pytest.raises(ArgumentError):
            Instance(values=np.asarray([0, 5], dtype=np.int64))


class TestStratifiedKFold:
    @staticmethod
    def _dataset(labels):
        labels = np.asarray(labels, dtype=np.int64)
        return Dataset(feature_names=("x",),
                       rows=np.zeros((len(labels), 1), dtype=np.uint8),
                       labels=labels, class_names=("a", "b"))

    def test_perfect_stratification(self):
        data = self._dataset([0] * 5 + [1] * 5)
        split = stratified_kfold(data, 5, seed=1)
        for fold in range(5):
            test = split.test_indices(fold)
            assert len(test) == 2
            assert sorted(data.labels[test].tolist()) == [0, 1]

    def test_deterministic(self):
        data = self._dataset([0] * 7 + [1] * 13)
        a = stratified_kfold(data, 4, seed=42)
        b = stratified_kfold(data, 4, seed=42)
        assert np.array_equal(a.assignments, b.assignments)

    def test_28_instances_10_folds(self):
        data = self._dataset([0] * 8 + [1] * 20)
        split = stratified_kfold(data, 10, seed=3)
        sizes = [len(split.test_indices(f)) for f in range(10)]
        assert sorted(set(sizes)) == [2, 3]
        # per-class counts across folds differ by at most 1
        for cls in (0, 1):
            per_fold = [int(np.sum(data.labels[split.test_indices(f)] == cls))
                        for f in range(10)]
            assert max(per_fold) - min(per_fold) <= 1

    def test_union_and_disjoint(self):
        data = self._dataset([0] * 9 + [1] * 6)
        split = stratified_kfold(data, 4, seed=8)
        seen = np.concatenate([split.test_indices(f) for f in range(4)])
        assert sorted(seen.tolist()) == list(range(15))
        for f in range(4):
            train = set(split.train_indices(f).tolist())
            test = set(split.test_indices(f).tolist())
            assert not (train & test)
            assert len(train | test) == 15

    def test_argument_errors(self):
        data = self._dataset([0, 1, 0, 1])
        with pytest.raises(ArgumentError):
            stratified_kfold(data, 1, seed=0)
        with pytest.raises(ArgumentError):
            stratified_kfold(data, 5, seed=0)

    def test_every_fold_nonempty_with_scarce_class(self):
        data = self._dataset([0] * 11 + [1])
        split = stratified_kfold(data, 3, seed=0)
        for f in range(3):
            assert len(split.test_indices(f)) > 0


class TestProjection:
    @staticmethod
    def _data():
        rows = np.asarray([[1, 0, 1, 0], [0, 1, 1, 0]], dtype=np.uint8)
        return Dataset(feature_names=("a", "b", "c", "d"), rows=rows,
                       labels=np.asarray([0, 1]), class_names=("n", "p"))

    def test_identity(self):
        data = self._data()
        same = project(data, [0, 1, 2, 3])
        assert same.feature_names == data.feature_names
        assert np.array_equal(same.rows, data.rows)

    def test_column_subset_in_given_order(self):
        data = self._data()
        sub = project(data, [2, 0])
        assert sub.feature_names == ("c", "a")
        assert sub.rows.tolist() == [[1, 1], [1, 0]]
        assert np.array_equal(sub.labels, data.labels)

    def test_walkthrough_kept_features(self):
        # keeping {F, B, A, E} of the 6-feature universe drops columns C, D
        rows = np.asarray([[1, 1, 0, 0, 0, 1]], dtype=np.uint8)
        data = Dataset(feature_names=WALK_NAMES, rows=rows,
                       labels=np.asarray([0]), class_names=("n", "p"))
        sub = project(data, [0, 2, 3, 5])
        assert sub.feature_names == ("F", "B", "A", "E")
        assert sub.rows.tolist() == [[1, 0, 0, 1]]

    def test_errors(self):
        data = self._data()
        with pytest.raises(IndexError):
            project(data, [])
        with pytest.raises(IndexError):
            project(data, [0, 0])
        with pytest.raises(IndexError):
            project(data, [9])
        inst = data.instance(0)
        with pytest.raises(IndexError):
            project_instance(inst, [])
        with pytest.raises(IndexError):
            project_instance(inst, [1, 1])

    def test_original_untouched(self):
        data = self._data()
        sub = project(data, [1])
        sub.rows[0, 0] = 1 - sub.rows[0, 0]
        assert data.rows.tolist() == [[1, 0, 1, 0], [0, 1, 1, 0]]


class TestSynthesize:
    def test_true_path_always_holds(self):
        rng = np.random.default_rng(2)
        for trial in range(10):
            dag = random_dag(rng, 8, edge_prob=0.35)
            data = synthesize(dag, 50, 0.4, 0.5, seed=trial)
            assert validate_true_path(dag, data) == []

    def test_balance_concentration(self):
        dag = build_dag(("a", "b"), [])
        data = synthesize(dag, 1000, 0.5, 0.0, seed=4)
        positives = int(data.labels.sum())
        assert 400 <= positives <= 600

    def test_zero_dependency_gives_near_independent_features(self):
        dag = build_dag(tuple("abcdef"), [])
        data = synthesize(dag, 100_000, 0.5, 0.0, seed=12)
        cmis = [conditional_mutual_information(data, i, j)
                for i in range(6) for j in range(i + 1, 6)]
        assert float(np.mean(cmis)) < 0.01

    def test_both_classes_present(self):
        dag = build_dag(("a",), [])
        data = synthesize(dag, 3, 0.001, 0.0, seed=0)
        assert set(data.labels.tolist()) == {0, 1}

    def test_parameter_validation(self):
        dag = build_dag(("a",), [])
        with pytest.raises(ArgumentError):
            synthesize(dag, 0, 0.5, 0.0, seed=0)
        with pytest.raises(ArgumentError):
            synthesize(dag, 5, 0.0, 0.0, seed=0)
        with pytest.raises(ArgumentError):
            synthesize(dag, 5, 1.0, 0.0, seed=0)
        with pytest.raises(ArgumentError):
            synthesize(dag, 5, 0.5, 1.5, seed=0)

    def test_deterministic(self):
        dag = build_dag(("a", "b", "c"), [("b", "a")])
        first = synthesize(dag, 30, 0.3, 0.4, seed=77)
        second = synthesize(dag, 30, 0.3, 0.4, seed=77)
        assert np.array_equal(first.rows, second.rows)
        assert np.array_equal(first.labels, second.labels)
