import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ose.augmentation import (
    AugmentationConfig,
    LabeledDataset,
    Record,
    augment,
    filter_min_class_size,
    load_labeled_dataset,
    split_dataset,
    write_labeled_dataset,
)
from ose.errors import ClassTooSmall, ExhaustedSubsets, ParseError, SynthesisFailed
from ose.linalg import cosine_distance
from ose.store import EmbeddingTable


def blobs(n_classes=3, per_class=5, dim=6, seed=0):
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((n_classes, dim)) * 3
    labels, vecs = [], []
    for c in range(n_classes):
        for _ in range(per_class):
            labels.append(f"c{c}")
            vecs.append(centers[c] + rng.standard_normal(dim))
    return LabeledDataset.from_arrays(labels, vecs)


def added(data, out):
    return out.records[len(data):]


class TestAugment:
    def test_bov_count(self):
        data = blobs(1, 5)
        out = augment(data, AugmentationConfig(k=2, K=1, method="bov"))
        assert len(out) == 6
        new = added(data, out)[0]
        X = data.matrix
        assert any(np.allclose(new.vector, (X[i] + X[j]) / 2) for i, j in combinations(range(5), 2))

    def test_ose_pair_closed_form(self):
        data = LabeledDataset.from_arrays(["a", "a"], [(1, 0), (0, 1)])
        new = added(data, augment(data, AugmentationConfig(k=2, K=1, method="ose")))[0]
        np.testing.assert_allclose(new.vector, (1 / math.sqrt(2), 1 / math.sqrt(2)), atol=1e-15)
        assert new.key == "aug:a:0" and new.label == "a"

    def test_exhausted(self):
        with pytest.raises(ExhaustedSubsets):
            augment(blobs(1, 5), AugmentationConfig(k=2, K=math.comb(5, 2) + 1, method="bov"))

    def test_all_subsets_when_exact(self):
        data = blobs(1, 5)
        out = augment(data, AugmentationConfig(k=2, K=10, method="bov"))
        assert len(out) == 15

    def test_class_too_small(self):
        data = LabeledDataset.from_arrays(["a", "a", "b"], np.eye(3))
        with pytest.raises(ClassTooSmall) as exc:
            augment(data, AugmentationConfig(k=2, K=1))
        assert exc.value.label == "b"

    def test_synthesis_failed(self):
        # three generic directions in the plane: the difference vectors fill R^2
        data = LabeledDataset.from_arrays(["a"] * 3, [(1, 0), (0, 1), (1, 1)])
        with pytest.raises(SynthesisFailed):
            augment(data, AugmentationConfig(k=3, K=1, method="ose"))

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            AugmentationConfig(k=1)
        with pytest.raises(ValueError):
            AugmentationConfig(K=0)

    def test_originals_untouched(self):
        data = blobs(2, 6)
        out = augment(data, AugmentationConfig(k=3, K=2))
        assert out.records[:len(data)] == data.records

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(4, 9), st.integers(2, 4), st.integers(1, 6), st.integers(0, 1000))
    def test_invariants(self, n_classes, per_class, k, K, seed):
        data = blobs(n_classes, per_class, dim=12, seed=seed)
        K = min(K, math.comb(per_class, k))
        cfg = AugmentationConfig(k=k, K=K, method="ose", seed=seed)
        out = augment(data, cfg)
        assert len(out) == len(data) + n_classes * K
        again = augment(data, cfg)
        for r1, r2 in zip(out.records, again.records):
            assert r1.key == r2.key and r1.vector.tobytes() == r2.vector.tobytes()


    def test_distinct_equidistant_seed_sets(self, monkeypatch):
        import ose.augmentation as mod

        calls = []
        real = mod.ose

        def spy(seeds, rank_tol):
            res = real(seeds, rank_tol)
            calls.append((np.array(seeds), res.solution))
            return res

        monkeypatch.setattr(mod, "ose", spy)
        data = blobs(1, 6, dim=10)
        out = augment(data, AugmentationConfig(k=3, K=15))
        assert len(calls) == 15
        keys = {frozenset(s.tobytes() for s in seeds) for seeds, _ in calls}
        assert len(keys) == 15
        for (seeds, sol), rec in zip(calls, added(data, out)):
            np.testing.assert_array_equal(sol, rec.vector)
            d = [cosine_distance(sol, s) for s in seeds]
            assert max(d) - min(d) <= 1e-9


class TestSplit:
    def test_even(self):
        train, test = split_dataset(blobs(1, 10), 0.5, seed=1)
        assert (len(train), len(test)) == (5, 5)

    def test_odd_floor_to_test(self):
        train, test = split_dataset(blobs(1, 7), 0.5, seed=1)
        assert (len(train), len(test)) == (4, 3)

    def test_deterministic_and_disjoint(self):
        data = blobs(3, 9)
        a = split_dataset(data, 0.5, seed=3)
        b = split_dataset(data, 0.5, seed=3)
        assert [r.key for r in a[0].records] == [r.key for r in b[0].records]
        keys_train = {r.key for r in a[0].records}
        keys_test = {r.key for r in a[1].records}
        assert not keys_train & keys_test
        assert keys_train | keys_test == {r.key for r in data.records}

    def test_class_too_small(self):
        with pytest.raises(ClassTooSmall):
            split_dataset(blobs(1, 1), 0.5)

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            split_dataset(blobs(), 1.0)


class TestFilterAndIO:
    def test_filter_min_class_size(self):
        recs = [Record("a", f"w{i}", np.ones(2)) for i in range(4)] + [Record("a", "w0", np.ones(2))]
        recs += [Record("b", f"w{i}", np.ones(2)) for i in range(2)]
        out = filter_min_class_size(LabeledDataset(tuple(recs)), 3)
        assert out.class_sizes() == {"a": 4}

    def test_word_csv(self, tmp_path):
        table = EmbeddingTable.from_dict({"cat": (1, 0), "dog": (0, 1)})
        p = tmp_path / "d.csv"
        p.write_text("label,word\nanimal,cat\nanimal,dog\nanimal,unicorn\n", encoding="utf-8")
        data, skipped = load_labeled_dataset(p, table)
        assert len(data) == 2 and skipped == 1

    def test_sentence_tsv(self, tmp_path):
        table = EmbeddingTable.from_dict({"a": (1, 0, 0), "b": (0, 1, 0)})
        p = tmp_path / "d.tsv"
        p.write_text("label\tsentence\npos\ta b.\nneg\tzzz\n", encoding="utf-8")
        data, skipped = load_labeled_dataset(p, table, method="ose")
        assert skipped == 1
        np.testing.assert_allclose(data.records[0].vector, (2 ** -0.5, 2 ** -0.5, 0))

    def test_vector_round_trip(self, tmp_path):
        data = blobs(2, 3)
        p = tmp_path / "v.csv"
        with p.open("w", encoding="utf-8") as fh:
            write_labeled_dataset(data, fh)
        back, _ = load_labeled_dataset(p)
        assert [r.label for r in back.records] == [r.label for r in data.records]
        np.testing.assert_allclose(back.matrix, data.matrix, rtol=1e-7)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("foo,bar\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_labeled_dataset(p, EmbeddingTable.from_dict({"a": (1,)}))
