import numpy as np
import pytest

from msbm import (
    ClassLabels,
    accuracy,
    balanced_labels,
    majority_vote,
    per_layer_fit,
    sample_multigraph,
)

from conftest import constant_prob_array, labels


class TestMajorityVote:
    def test_single_layer_identity(self):
        z = labels(2, [0, 1, 0, 1])
        assert np.array_equal(majority_vote([z]).labels, z.labels)

    def test_consistent_layers_up_to_renaming(self):
        # three layers with the same partition under different class names
        a = labels(2, [0, 0, 1, 1])
        b = labels(2, [1, 1, 0, 0])
        out = majority_vote([a, b, a])
        assert accuracy(out, a) == 1.0

    def test_outvotes_a_noisy_layer(self):
        good = labels(2, [0, 0, 0, 1, 1, 1])
        noisy = labels(2, [0, 1, 0, 1, 0, 1])
        out = majority_vote([good, good, noisy])
        assert accuracy(out, good) == 1.0

    def test_tie_breaks_to_lower_index(self):
        a = labels(2, [0, 1])
        b = labels(2, [0, 0])
        # after alignment node 1 has one vote for each class
        out = majority_vote([a, b])
        assert out.labels[1] == 0

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            majority_vote([])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            majority_vote([labels(2, [0, 1]), labels(2, [0, 1, 0])])


class TestPerLayerFit:
    def test_spectral_strong_layers(self):
        c = balanced_labels(2, 24)
        P = constant_prob_array([[0.9, 0.05], [0.05, 0.9]], 6)
        G = sample_multigraph(c, P, 0)
        fits = per_layer_fit(G, 2, "spectral", seed=1)
        assert len(fits) == 6
        for lab in fits:
            assert accuracy(lab, c) == 1.0
        assert accuracy(majority_vote(fits), c) == 1.0

    def test_vem_strong_layers(self):
        c = balanced_labels(2, 24)
        P = constant_prob_array([[0.9, 0.05], [0.05, 0.9]], 4)
        G = sample_multigraph(c, P, 3)
        fits = per_layer_fit(G, 2, "vem", seed=1)
        assert accuracy(majority_vote(fits), c) == 1.0

    def test_determinism(self):
        c = balanced_labels(2, 16)
        G = sample_multigraph(c, constant_prob_array([[0.7, 0.3], [0.3, 0.7]], 5), 2)
        f1 = per_layer_fit(G, 2, "spectral", seed=9)
        f2 = per_layer_fit(G, 2, "spectral", seed=9)
        for a, b in zip(f1, f2):
            assert np.array_equal(a.labels, b.labels)

    def test_unknown_method(self):
        c = balanced_labels(2, 8)
        G = sample_multigraph(c, constant_prob_array([[0.5, 0.5], [0.5, 0.5]], 1), 0)
        with pytest.raises(ValueError):
            per_layer_fit(G, 2, "exact", seed=0)

    def test_undetectable_layers_stay_near_chance(self):
        # per-layer SNR is too small for any single layer; pooling would
        # succeed easily at this layer count, the vote does not
        c = balanced_labels(2, 32)
        P = constant_prob_array([[0.52, 0.48], [0.48, 0.52]], 40)
        accs = []
        for s in range(5):
            G = sample_multigraph(c, P, s)
            out = majority_vote(per_layer_fit(G, 2, "spectral", seed=s))
            accs.append(accuracy(out, c))
        assert np.mean(accs) < 0.75
