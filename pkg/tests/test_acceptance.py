"""End-to-end acceptance checks.

Each class below encodes one headline requirement with its stated tolerance:
reference-table reproduction, the 16-node toy study, the bound/exact curves,
the layer-pooling vs. majority-vote comparison, the mixture counterexample,
variational-EM correctness, oracle equivalence of the two likelihood
maximizers, the expected-profile-likelihood inequalities, model-order
selection, and byte-level CLI determinism.
"""

import itertools
import json
import os
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from msbm import (
    ClassLabels,
    SearchOptions,
    VemOptions,
    accuracy,
    align_labels,
    balanced_labels,
    delta_of,
    exact_profile_mle,
    exact_sigma_gap,
    expected_profile_terms,
    lemma3_bound,
    local_search_profile_mle,
    min_nodes_k2,
    planted_partition,
    sample_multigraph,
    select_k,
    vem_fit,
)
from msbm.experiments import (
    FIG3_LAYER_COUNTS,
    TABLE1_DELTAS,
    TABLE1_MARGINS,
    counterexample41,
    fig3,
    table1,
    toy51,
)

from conftest import constant_prob_array, random_multigraph

# reference values for the minimum-problem-size table, rows indexed by
# separation (0.165, 0.091, 0.040, 0.010), columns by margin (0.3 .. 0.05)
REFERENCE_TABLE = {
    0.165: (42, 50, 64, 88, 124, 184),
    0.091: (44, 52, 66, 92, 142, 234),
    0.040: (46, 56, 70, 94, 148, 314),
    0.010: (66, 68, 74, 100, 156, 330),
}
# the four corner cells of that table, checked at a tighter tolerance
REFERENCE_CORNERS = {
    (0.165, 0.3): 42,
    (0.165, 0.05): 184,
    (0.010, 0.3): 66,
    (0.010, 0.05): 330,
}


@pytest.fixture(scope="module")
def table1_result():
    start = time.monotonic()
    rows, _ = table1()
    elapsed = time.monotonic() - start
    values = {(r["delta"], r["c0"]): r["min_nodes"] for r in rows}
    return values, elapsed


class TestCriterion1MinimumSizeTable:
    def test_cells_within_20_percent(self, table1_result):
        values, _ = table1_result
        bad = []
        for d in TABLE1_DELTAS:
            for c0, ref in zip(TABLE1_MARGINS, REFERENCE_TABLE[d]):
                got = values[(d, c0)]
                if abs(got - ref) > 0.2 * ref:
                    bad.append((d, c0, got, ref))
        assert not bad, f"cells outside 20%: {bad}"

    def test_monotone_in_margin(self, table1_result):
        values, _ = table1_result
        for d in TABLE1_DELTAS:
            row = [values[(d, c0)] for c0 in TABLE1_MARGINS]
            assert all(b >= a for a, b in zip(row, row[1:])), row

    def test_monotone_in_separation(self, table1_result):
        values, _ = table1_result
        for c0 in TABLE1_MARGINS:
            col = [values[(d, c0)] for d in TABLE1_DELTAS]
            assert all(b >= a for a, b in zip(col, col[1:])), col

    def test_corner_cells(self, table1_result):
        values, _ = table1_result
        bad = {
            key: (values[key], ref)
            for key, ref in REFERENCE_CORNERS.items()
            if abs(values[key] - ref) > 6
        }
        assert not bad, f"corners outside +-6: {bad}"

    def test_runtime(self, table1_result):
        _, elapsed = table1_result
        assert elapsed < 600


@pytest.fixture(scope="module")
def toy_rows():
    rows, _ = toy51(seed=0, reps=20)
    return rows


class TestCriterion2ToyStudy:
    def test_case1_recovers_exactly(self, toy_rows):
        accs = [r["accuracy"] for r in toy_rows if r["case"] == "case1"]
        assert len(accs) == 20
        assert np.mean([a == 1.0 for a in accs]) >= 0.9

    def test_case2_fails_to_recover(self, toy_rows):
        accs = [r["accuracy"] for r in toy_rows if r["case"] == "case2"]
        assert len(accs) == 20
        assert np.mean([a < 1.0 for a in accs]) >= 0.6

    def test_min_nodes_at_case2_constants(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            n = min_nodes_k2(0.49, 0.0100)
        assert 36 <= n <= 44


class TestCriterion3BoundCurves:
    def test_bound_dominates_and_decays(self):
        for p in (0.1, 0.25, 0.4):
            gaps, bounds = {}, {}
            for n in range(10, 1001, 10):
                g, b = exact_sigma_gap(n, p), lemma3_bound(n, p)
                assert b >= g, (n, p, g, b)
                gaps[n], bounds[n] = g, b
            assert abs(gaps[1000]) < abs(gaps[100])
            assert bounds[1000] < bounds[100]


@pytest.fixture(scope="module")
def fig3_means():
    rows, _ = fig3(seed=0, reps=20)
    means = {}
    for method in ("spectral", "local-mle", "majority-spectral", "majority-vem"):
        means[method] = [
            np.mean([r["accuracy"] for r in rows if r["method"] == method and r["t"] == t])
            for t in FIG3_LAYER_COUNTS
        ]
    return means


class TestCriterion4LayerPooling:
    @pytest.mark.parametrize("method", ["spectral", "local-mle"])
    def test_pooling_accuracy_grows_with_layers(self, fig3_means, method):
        m = fig3_means[method]
        assert all(b >= a - 0.05 for a, b in zip(m, m[1:])), m
        assert m[-1] > 0.9, m

    @pytest.mark.parametrize("method", ["spectral", "local-mle"])
    def test_pooling_beats_majority_votes(self, fig3_means, method):
        final = fig3_means[method][-1]
        assert final - fig3_means["majority-spectral"][-1] >= 0.2
        assert final - fig3_means["majority-vem"][-1] >= 0.2

    @pytest.mark.parametrize("method", ["majority-spectral", "majority-vem"])
    def test_majority_votes_flat(self, fig3_means, method):
        m = fig3_means[method]
        assert max(m) - min(m) < 0.1, m


@pytest.fixture(scope="module")
def counterexample_means():
    rows, _ = counterexample41(seed=0, reps=50)
    out = {}
    for method in ("spectral", "vem"):
        out[method] = float(np.mean([r["accuracy"] for r in rows if r["method"] == method]))
    return out


class TestCriterion5MixtureCounterexample:
    def test_mean_graph_spectral_stays_near_chance(self, counterexample_means):
        assert counterexample_means["spectral"] <= 0.6

    def test_vem_recovers(self, counterexample_means):
        assert counterexample_means["vem"] >= 0.9


class TestCriterion6VemCorrectness:
    def test_elbo_monotone_and_simplex_on_random_instances(self):
        rng = np.random.default_rng(0)
        for i in range(100):
            n = int(rng.integers(6, 41))
            k = int(rng.integers(1, 4))
            t = int(rng.integers(1, 11))
            G = random_multigraph(rng, n, t, density=float(rng.uniform(0.1, 0.6)))
            try:
                state, _, trace = vem_fit(
                    G, k, VemOptions(restarts=1, init="random", max_iter=40, seed=i)
                )
            except RuntimeError:
                continue  # class collapse consumes the restart; no state to check
            assert all(
                b >= a - 1e-8 * (abs(a) + 1.0) for a, b in zip(trace, trace[1:])
            ), (i, trace)
            B = state.responsibilities
            assert (B >= -1e-9).all()
            assert np.abs(B.sum(axis=1) - 1.0).max() <= 1e-9
            pi = state.class_probs
            assert (pi >= -1e-9).all() and abs(pi.sum() - 1.0) <= 1e-9


class TestCriterion7OracleEquivalence:
    def test_local_search_attains_exact_optimum(self):
        rng = np.random.default_rng(1)
        hits = 0
        for i in range(100):
            G = random_multigraph(rng, 10, 5)
            ex = exact_profile_mle(G, 2)
            ls = local_search_profile_mle(G, 2, SearchOptions(restarts=20, init="random", seed=i))
            hits += ls.objective >= ex.objective - 1e-9 * (abs(ex.objective) + 1.0)
        assert hits >= 95, hits

    def test_alignment_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            K = int(rng.integers(2, 6))
            n = int(rng.integers(K, 30))
            est = ClassLabels(K, rng.integers(0, K, n))
            ref = ClassLabels(K, rng.integers(0, K, n))
            perm = align_labels(est, ref)
            agree = int(np.sum(perm[est.labels] == ref.labels))
            best = max(
                int(np.sum(np.array(p)[est.labels] == ref.labels))
                for p in itertools.permutations(range(K))
            )
            assert agree == best


class TestCriterion8ExpectedProfileInequalities:
    def test_true_labels_dominate_by_separation_margin(self):
        rng = np.random.default_rng(3)
        c = balanced_labels(2, 12)
        flip = ClassLabels(2, 1 - c.labels)
        for mat in ([[0.7, 0.3], [0.3, 0.7]], [[0.65, 0.35], [0.35, 0.6]]):
            P = constant_prob_array(mat, 1)
            delta = delta_of(P)
            _, h_c, _ = expected_profile_terms(c, c, P)
            rhs = 0.5 * delta * 6  # smallest true class has 6 nodes
            checked = 0
            while checked < 50:
                z = ClassLabels(2, rng.integers(0, 2, 12))
                if np.array_equal(z.labels, c.labels) or np.array_equal(z.labels, flip.labels):
                    continue
                _, h_z, _ = expected_profile_terms(z, c, P)
                assert h_c - h_z >= rhs, (mat, z.labels.tolist(), h_c - h_z, rhs)
                checked += 1

    def test_expectation_gap_approaches_half_per_block(self):
        # per layer the gap g - h tends to (number of blocks)/2 = K(K+1)/4
        c = balanced_labels(2, 100)  # class sizes 50
        for mat in ([[0.7, 0.3], [0.3, 0.7]], [[0.6, 0.45], [0.45, 0.55]]):
            for t in (1, 3):
                P = constant_prob_array(mat, t)
                g, h, _ = expected_profile_terms(c, c, P)
                assert abs((g - h) / t - 1.5) < 0.05, (mat, t, (g - h) / t)


class TestCriterion9ModelOrderSelection:
    def test_true_k_recovered(self):
        c = balanced_labels(3, 60)
        P = constant_prob_array(planted_partition(3, 0.6, 0.2), 10)
        hits = 0
        for s in range(20):
            G = sample_multigraph(c, P, s)
            best_k, _ = select_k(G, 2, 6, VemOptions(seed=s, restarts=3))
            hits += best_k == 3
        assert hits >= 16, hits


def _run_cli(argv, cwd, threads):
    env = dict(os.environ)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        env[var] = str(threads)
    env.pop("MSBM_THREADS", None)
    proc = subprocess.run(
        [sys.executable, "-m", "msbm.cli", *argv],
        cwd=cwd,
        env=env,
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


class TestCriterion10Determinism:
    """Every CLI command must be byte-identical across repeated runs and
    across host thread-pool settings."""

    def _outputs(self, tmp_path, tag, threads):
        d = tmp_path / tag
        d.mkdir()
        out = {}
        _run_cli(
            ["generate", "--n", "24", "--k", "2", "--t", "6", "--seed", "7",
             "--p-in", "0.8", "--p-out", "0.2", "-o", str(d / "g.mgr")],
            d, threads,
        )
        out["mgr"] = (d / "g.mgr").read_bytes()
        out["labels"] = (d / "g.labels.csv").read_bytes()
        for method in ("spectral", "vem", "local-mle"):
            _run_cli(
                ["fit", "-i", str(d / "g.mgr"), "--method", method, "--k", "2",
                 "--seed", "3", "--truth", str(d / "g.labels.csv"),
                 "-o", str(d / f"fit-{method}.json")],
                d, threads,
            )
            out[f"fit-{method}"] = (d / f"fit-{method}.json").read_bytes()
        _run_cli(
            ["bounds", "--p", "0.25", "--n-min", "10", "--n-max", "100",
             "--n-step", "10", "-o", str(d / "curve.csv")],
            d, threads,
        )
        out["bounds"] = (d / "curve.csv").read_bytes()
        out["min-nodes"] = _run_cli(["min-nodes", "--c0", "0.3", "--delta", "0.165"], d, threads)
        _run_cli(
            ["select-k", "-i", str(d / "g.mgr"), "--k-min", "1", "--k-max", "3",
             "--seed", "2", "--restarts", "2", "-o", str(d / "sk.json")],
            d, threads,
        )
        out["select-k"] = (d / "sk.json").read_bytes()
        _run_cli(
            ["experiment", "--name", "counterexample41", "--seed", "1", "--reps", "2",
             "-o", str(d / "exp.csv")],
            d, threads,
        )
        out["experiment"] = (d / "exp.csv").read_bytes()
        return out

    def test_byte_identical_across_runs_and_thread_counts(self, tmp_path):
        base = self._outputs(tmp_path, "run1-t1", 1)
        rerun = self._outputs(tmp_path, "run2-t1", 1)
        threaded = self._outputs(tmp_path, "run3-t4", 4)
        for key, val in base.items():
            assert rerun[key] == val, f"{key} differs between identical runs"
            assert threaded[key] == val, f"{key} differs across thread counts"

    def test_fit_json_parses(self, tmp_path):
        out = self._outputs(tmp_path, "parse", 1)
        obj = json.loads(out["fit-vem"])
        assert obj["accuracy"] == 1.0
