import itertools
import math

import numpy as np
import pytest

from statecone import boxes as bx


class TestBoxInvariants:
    def test_pr_box(self):
        box = bx.pr_box()
        box.validate()
        assert box.no_signaling_residual() == 0.0
        marginals = box.table.sum(axis=3)
        np.testing.assert_allclose(marginals, 0.5)

    def test_white_noise(self):
        box = bx.white_noise_box()
        box.validate()
        assert bx.chsh_value(box) == pytest.approx(0.0, abs=1e-14)

    def test_bad_tables_rejected(self):
        bad = np.full((2, 2, 2, 2), 0.3)
        with pytest.raises(ValueError):
            bx.NoSignalingBox(bad).validate()
        signaling = np.zeros((2, 2, 2, 2))
        signaling[0, 0, 0, 0] = 1.0
        signaling[0, 1, 0, 0] = 1.0
        signaling[1, 0, 1, 0] = 1.0
        signaling[1, 1, 0, 0] = 1.0
        with pytest.raises(ValueError):
            bx.NoSignalingBox(signaling).validate()

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            bx.NoSignalingBox(np.zeros((2, 2, 2)))


class TestChshValues:
    def test_pr_box_reaches_four(self):
        assert bx.chsh_value(bx.pr_box()) == pytest.approx(4.0, abs=1e-14)

    def test_constant_outputs_give_two(self):
        box = bx.deterministic_box((0, 0), (0, 0))
        assert bx.chsh_value(box) == pytest.approx(2.0, abs=1e-14)

    def test_deterministic_extremes(self):
        values = [
            bx.chsh_value(bx.deterministic_box(fa, fb))
            for fa in itertools.product((0, 1), repeat=2)
            for fb in itertools.product((0, 1), repeat=2)
        ]
        assert max(values) == 2.0
        assert min(values) == -2.0

    def test_mixture_linearity(self):
        boxes = [bx.pr_box(), bx.white_noise_box(),
                 bx.deterministic_box((0, 1), (1, 0))]
        weights = np.array([0.2, 0.5, 0.3])
        mixed = bx.mix_boxes(boxes, weights)
        expected = sum(
            w * bx.chsh_value(b) for w, b in zip(weights, boxes)
        )
        assert bx.chsh_value(mixed) == pytest.approx(expected, abs=1e-12)


class TestQuantumBoxes:
    def test_standard_angles_reach_tsirelson(self):
        strategy = bx.QuantumStrategy(
            bx.bell_state(),
            (0.0, math.pi / 2),
            (math.pi / 4, -math.pi / 4),
        )
        box = bx.box_from_quantum(strategy)
        box.validate(tol=1e-10)
        assert bx.chsh_value(box) == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-9
        )

    def test_quantum_boxes_never_signal(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            strategy = bx.QuantumStrategy(
                bx.bell_state(),
                tuple(rng.uniform(0, 2 * math.pi, 2)),
                tuple(rng.uniform(0, 2 * math.pi, 2)),
            )
            box = bx.box_from_quantum(strategy)
            assert box.no_signaling_residual() < 1e-10

    def test_product_states_stay_classical(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            state = bx.product_strategy_state(*rng.uniform(0, 2 * math.pi, 2))
            strategy = bx.QuantumStrategy(
                state,
                tuple(rng.uniform(0, 2 * math.pi, 2)),
                tuple(rng.uniform(0, 2 * math.pi, 2)),
            )
            assert bx.chsh_value(bx.box_from_quantum(strategy)) <= 2.0 + 1e-9

    def test_correlation_tensor_matches_box(self):
        rng = np.random.default_rng(2)
        t = bx._correlation_tensor(bx.bell_state())
        for _ in range(10):
            angles = rng.uniform(0, 2 * math.pi, 4)
            assert bx._chsh_from_tensor(t, angles) == pytest.approx(
                bx._chsh_of_angles(bx.bell_state(), angles), abs=1e-10
            )


class TestOptimizer:
    def test_reaches_tsirelson(self):
        value, strategy = bx.maximize_quantum_chsh(seed=3, restarts=10)
        ceiling = 2.0 * math.sqrt(2.0)
        assert value <= ceiling + 1e-7
        assert value >= ceiling - 1e-6
        box_value = bx.chsh_value(bx.box_from_quantum(strategy))
        assert box_value == pytest.approx(value, abs=1e-9)

    def test_never_exceeds_ceiling_across_seeds(self):
        ceiling = 2.0 * math.sqrt(2.0)
        for seed in range(5):
            value, _ = bx.maximize_quantum_chsh(seed=seed, restarts=3)
            assert value <= ceiling + 1e-7

    def test_product_restriction_capped_at_two(self):
        value, _ = bx.maximize_quantum_chsh(
            seed=4, restarts=8, entangled=False
        )
        assert value <= 2.0 + 1e-9
        assert value >= 2.0 - 1e-6

    def test_hierarchy_of_correlations(self):
        deterministic = max(
            bx.chsh_value(bx.deterministic_box(fa, fb))
            for fa in itertools.product((0, 1), repeat=2)
            for fb in itertools.product((0, 1), repeat=2)
        )
        quantum, _ = bx.maximize_quantum_chsh(seed=5, restarts=10)
        assert deterministic == 2.0
        assert deterministic < quantum < bx.chsh_value(bx.pr_box())
