import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypertree.dataset import count_table
from hypertree.errors import GuardLimitError
from hypertree.paritygen import (
    TargetBiases,
    bias_to_weight,
    biases_from_dict,
    biases_to_dict,
    dump_biases,
    generate,
    load_biases,
    realize_weights,
    weight_to_bias,
)
from hypertree.solvers import exact_search
from hypertree.structure import ktree_edges
from hypertree.weights import WeightFunction, compute_weights


class TestBiasWeight:
    def test_zero(self):
        assert bias_to_weight(0.0) == 0.0
        assert weight_to_bias(0.0) == 0.0

    def test_half(self):
        assert bias_to_weight(0.5) == pytest.approx(0.13081203594113697, abs=1e-12)
        assert weight_to_bias(0.13081203594113697) == pytest.approx(0.5, abs=1e-9)

    def test_small_bias_quadratic(self):
        assert bias_to_weight(0.01) == pytest.approx(5e-5, abs=1e-9)
        for b in (0.001, 0.005, 0.02, 0.05):
            assert abs(bias_to_weight(b) - b * b / 2) <= b ** 4

    def test_monotone(self):
        bs = np.linspace(0, 0.99, 200)
        ws = [bias_to_weight(float(b)) for b in bs]
        assert all(w2 > w1 for w1, w2 in zip(ws, ws[1:]))
        assert all(w >= 0 for w in ws)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bias_to_weight(1.0)
        with pytest.raises(ValueError):
            bias_to_weight(-0.1)
        with pytest.raises(ValueError):
            weight_to_bias(-1e-9)
        with pytest.raises(ValueError):
            weight_to_bias(math.log(2))

    @given(b=st.floats(0.0, 0.95))
    @settings(max_examples=80, deadline=None)
    def test_roundtrip(self, b):
        w = bias_to_weight(b)
        b2 = weight_to_bias(w)
        assert abs(b2 - b) <= 1e-11
        assert abs(bias_to_weight(b2) - w) <= 1e-11

    def test_quadratic_inverse_for_small_weights(self):
        for b in (0.001, 0.01, 0.03):
            assert weight_to_bias(b * b / 2) == pytest.approx(b, abs=b ** 3)


def _parity_counts(dataset, h):
    par = dataset.rows[:, h].sum(axis=1) % 2
    odd = int((par == 1).sum())
    return odd, dataset.n_rows - odd


class TestGenerate:
    def test_tiny_example_by_hand(self):
        # n = k+1 = 2, q = 2, p = 1: one uniform cube block of 4 rows plus
        # one odd-parity block of 4 rows -> 8 rows, bias 1/2 on the pair
        tb = TargetBiases(k=1, n=2, q=2, entries={(0, 1): 1})
        s = generate(tb)
        assert s.dataset.n_rows == 8
        odd, even = _parity_counts(s.dataset, [0, 1])
        assert (odd - even) / 8 == 0.5
        for col in range(2):
            assert count_table(s.dataset, (col,)).tolist() == [4, 4]
        assert len(s.block_log) == 2
        assert sum(fixed for _, _, fixed in s.block_log) == 1

    def test_all_zero_biases(self):
        tb = TargetBiases(k=1, n=3, q=2, entries={})
        s = generate(tb)
        assert s.dataset.n_rows == 3 * 2 * 8
        wf = compute_weights(s.dataset, 1)
        for h, w in wf.weights.items():
            if len(h) >= 2:
                assert abs(w) <= 1e-12

    def test_exact_uniformity_and_bias_rationals(self):
        tb = TargetBiases(k=2, n=5, q=4,
                          entries={(0, 1, 2): 3, (1, 3, 4): 1, (0, 2, 4): 2})
        s = generate(tb)
        n_sets = math.comb(5, 3)
        t = s.dataset.n_rows
        # marginals over <= k variables: exact integer equality
        for size in (1, 2):
            for scope in itertools.combinations(range(5), size):
                counts = count_table(s.dataset, scope)
                assert counts.min() == counts.max()
        # parity biases: exact as rationals, (odd - even) * q * C = p * T
        for h in itertools.combinations(range(5), 3):
            odd, even = _parity_counts(s.dataset, list(h))
            p = tb.entries.get(h, 0)
            assert (odd - even) * tb.q * n_sets == p * t

    def test_pair_weights_match_bias_formula(self):
        tb = TargetBiases(k=1, n=4, q=4, entries={(0, 1): 2, (2, 3): 1})
        s = generate(tb)
        wf = compute_weights(s.dataset, 1)
        n_sets = math.comb(4, 2)
        for h in itertools.combinations(range(4), 2):
            b = (tb.entries.get(h, 0) / tb.q) / n_sets
            assert wf[h] == pytest.approx(bias_to_weight(b), abs=1e-9)

    def test_cube_guard(self):
        tb = TargetBiases(k=1, n=15, q=1, entries={})
        with pytest.raises(GuardLimitError):
            generate(tb)
        tb_ok = TargetBiases(k=1, n=4, q=1, entries={})
        assert generate(tb_ok, cube_limit=4).dataset.n_rows == 6 * 16

    def test_target_biases_validation(self):
        with pytest.raises(ValueError):
            TargetBiases(k=1, n=3, q=2, entries={(0, 1): 2})
        with pytest.raises(ValueError):
            TargetBiases(k=1, n=3, q=2, entries={(0, 1, 2): 1})
        with pytest.raises(ValueError):
            TargetBiases(k=2, n=2, q=2, entries={})


class TestRealizeWeights:
    def test_all_zero_targets(self):
        rep = realize_weights({}, n=4, k=1, q_grid=8)
        assert rep.biases.entries == {}
        assert rep.total_abs_error == 0.0

    def test_single_target_induces_single_weight(self):
        rep = realize_weights({(0, 1, 2): 0.75}, n=4, k=2, q_grid=64)
        s = generate(rep.biases)
        wf = compute_weights(s.dataset, 2)
        for h in itertools.combinations(range(4), 3):
            if h == (0, 1, 2):
                assert wf[h] > 1e-6
            else:
                assert abs(wf[h]) <= 1e-12
        for h, w in wf.weights.items():
            if len(h) == 2:
                assert abs(w) <= 1e-12

    def test_induced_weights_proportional_up_to_reported_error(self):
        targets = {(0, 1, 2): 0.5, (0, 2, 3): 1.0, (1, 2, 3): 0.25}
        rep = realize_weights(targets, n=4, k=2, q_grid=128)
        s = generate(rep.biases)
        wf = compute_weights(s.dataset, 2)
        for h in itertools.combinations(range(4), 3):
            intended = rep.scale * targets.get(h, 0.0)
            assert wf[h] == pytest.approx(
                intended + rep.per_set_error[h], abs=1e-9)

    def test_zero_one_instance_preserves_argmax(self):
        # weight 1 on two triples, 0 elsewhere; fine grid keeps the optimum
        targets = {(0, 1, 2): 1.0, (0, 1, 3): 1.0}
        n, k = 5, 2
        wtab = {}
        for size in range(1, k + 2):
            for h in itertools.combinations(range(n), size):
                wtab[h] = 0.0
        for h, w in targets.items():
            wtab[h] = w
        intended = WeightFunction(k=k, n=n, weights=wtab)
        want = exact_search(intended)
        rep = realize_weights(targets, n=n, k=k, q_grid=1000)
        s = generate(rep.biases)
        induced = compute_weights(s.dataset, k)
        got = exact_search(induced)
        assert ktree_edges(got.tree) == ktree_edges(want.tree)

    def test_explicit_infeasible_scale(self):
        with pytest.raises(ValueError, match="infeasible"):
            realize_weights({(0, 1): 0.6}, n=4, k=1, q_grid=8, scale=1.0)
        with pytest.raises(ValueError, match="infeasible"):
            realize_weights({(0, 1): 0.5}, n=4, k=1, q_grid=1)

    def test_rejects_negative_targets(self):
        with pytest.raises(ValueError):
            realize_weights({(0, 1): -0.5}, n=3, k=1, q_grid=8)


def test_biases_json_roundtrip(tmp_path):
    tb = TargetBiases(k=2, n=5, q=8, entries={(0, 1, 4): 3, (1, 2, 3): 7})
    doc = biases_to_dict(tb)
    assert doc["Q"] == 8
    assert biases_from_dict(doc) == tb
    path = tmp_path / "biases.json"
    dump_biases(tb, path)
    assert load_biases(path) == tb


def test_generation_is_deterministic():
    tb = TargetBiases(k=1, n=3, q=3, entries={(0, 2): 2})
    s1 = generate(tb)
    s2 = generate(tb)
    assert np.array_equal(s1.dataset.rows, s2.dataset.rows)
    assert s1.block_log == s2.block_log
