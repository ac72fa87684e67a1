"""Environments: dynamics oracles, map layout, brute-force optima, wrappers."""

import itertools
import math

import numpy as np
import pytest

from qrlforge.envs import (
    CartPoleEnv,
    FrozenLakeEnv,
    KnapsackEnv,
    TspEnv,
    make_env,
    register_env,
    wrap_continuous,
    wrap_discrete_index,
)
from qrlforge.envs.cartpole import THETA_LIMIT, dynamics
from qrlforge.envs.frozenlake import LAYOUT, cell
from qrlforge.errors import EpisodeDoneError, InvalidActionError

from oracles import brute_force_knapsack, brute_force_tsp


def reference_cartpole_step(state, force):
    """Literal transcription of the cart-pole equations, kept independent."""
    x, x_dot, theta, theta_dot = state
    temp = (force + 0.05 * theta_dot**2 * math.sin(theta)) / 1.1
    theta_acc = (9.8 * math.sin(theta) - math.cos(theta) * temp) / (
        0.5 * (4.0 / 3.0 - 0.1 * math.cos(theta) ** 2 / 1.1)
    )
    x_acc = temp - 0.05 * theta_acc * math.cos(theta) / 1.1
    return (
        x + 0.02 * x_dot,
        x_dot + 0.02 * x_acc,
        theta + 0.02 * theta_dot,
        theta_dot + 0.02 * theta_acc,
    )


class TestCartPole:
    def test_push_right_from_rest(self):
        nxt = dynamics(np.zeros(4), 10.0)
        np.testing.assert_allclose(nxt, [0.0, 0.19512, 0.0, -0.29268], atol=5e-6)

    def test_matches_reference_equations(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            state = rng.uniform(-0.3, 0.3, size=4)
            force = float(rng.choice([-10.0, 10.0]))
            np.testing.assert_allclose(dynamics(state, force), reference_cartpole_step(state, force), atol=1e-12)

    def test_action_zero_mirrors_action_one(self):
        env = CartPoleEnv()
        env.reset(seed=0)
        env.state = np.zeros(4)
        right = env.step(1).observation
        env.reset(seed=0)
        env.state = np.zeros(4)
        left = env.step(0).observation
        np.testing.assert_allclose(left, [0.0, -right[1], 0.0, -right[3]], atol=1e-12)

    def test_terminates_beyond_angle_limit(self):
        env = CartPoleEnv()
        env.reset(seed=1)
        env.state = np.array([0.0, 0.0, 13.0 * math.pi / 180.0, 0.0])
        result = env.step(0)
        assert result.terminated

    def test_instability_with_zero_force(self):
        for theta0 in (0.05, -0.12, 0.2):
            state = np.array([0.0, 0.0, theta0, 0.0])
            prev = abs(theta0)
            for _ in range(10):
                state = dynamics(state, 0.0)
                assert abs(state[2]) >= prev - 1e-12
                prev = abs(state[2])

    def test_reset_determinism(self):
        a = CartPoleEnv().reset(seed=42)
        b = CartPoleEnv().reset(seed=42)
        np.testing.assert_array_equal(a, b)

    def test_truncation_at_500(self):
        env = CartPoleEnv()
        env.reset(seed=3)
        done = False
        steps = 0
        while not done:
            env.state[2] = 0.0  # hold the pole upright to force truncation
            env.state[0] = 0.0
            result = env.step(steps % 2)
            steps += 1
            done = result.terminated or result.truncated
        assert steps == 500 and result.truncated and not result.terminated

    def test_step_after_done_raises(self):
        env = CartPoleEnv()
        env.reset(seed=1)
        env.state = np.array([3.0, 0.0, 0.0, 0.0])
        env.step(0)
        with pytest.raises(EpisodeDoneError):
            env.step(0)


class TestFrozenLake:
    def test_map_layout(self):
        assert cell(5) == "H"
        assert {i for i in range(16) if cell(i) == "H"} == {5, 7, 11, 12}
        assert cell(0) == "S" and cell(15) == "G"
        assert LAYOUT == ("SFFF", "FHFH", "FFFH", "HFFG")

    def test_wall_is_noop(self):
        env = FrozenLakeEnv()
        env.reset(seed=0)
        result = env.step(0)  # left from the start cell
        assert result.observation[0] == 0.0
        assert result.reward == 0.0

    def test_goal_transition(self):
        env = FrozenLakeEnv()
        env.reset(seed=0)
        env.position = 14
        result = env.step(2)  # right into G
        assert result.observation[0] == 15.0
        assert result.reward == 1.0
        assert result.terminated

    def test_hole_terminates_without_reward(self):
        env = FrozenLakeEnv()
        env.reset(seed=0)
        env.position = 1
        result = env.step(1)  # down into the hole at 5
        assert result.terminated and result.reward == 0.0

    def test_truncation_at_100(self):
        env = FrozenLakeEnv()
        env.reset(seed=0)
        for i in range(99):
            assert not env.step(0).truncated
        assert env.step(0).truncated

    def test_slippery_moves_inline_or_perpendicular(self):
        env = FrozenLakeEnv(slippery=True)
        env.reset(seed=5)
        seen = set()
        for _ in range(50):
            env.reset()
            env.position = 9  # interior-ish cell
            env.steps = 0
            result = env.step(2)
            seen.add(int(result.observation[0]))
        assert seen <= {10, 5, 13}
        assert len(seen) > 1


class TestTsp:
    def test_square_corners_best_tour(self):
        env = TspEnv(4)
        env.reset(seed=0)
        env.coords = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
        diff = env.coords[:, None, :] - env.coords[None, :, :]
        env.distances = np.sqrt(np.sum(diff**2, axis=-1))
        total = 0.0
        for city in (1, 2, 3):
            total += env.step(city).reward
        assert total == pytest.approx(-4.0, abs=1e-12)

    def test_brute_force_optimum(self):
        for seed in range(25):
            env = TspEnv(5)
            env.reset(seed=seed)
            coords = env.coords.copy()
            best = -math.inf
            for perm in itertools.permutations(range(1, 5)):
                env.reset(seed=seed)
                total = 0.0
                for city in perm:
                    total += env.step(city).reward
                best = max(best, total)
            assert best == pytest.approx(-brute_force_tsp(coords), abs=1e-9)

    def test_episode_reward_equals_negative_tour_length(self):
        rng = np.random.default_rng(7)
        for seed in range(100):
            env = TspEnv(5)
            env.reset(seed=seed)
            coords = env.coords.copy()
            order = [0]
            total = 0.0
            done = False
            while not done:
                valid = np.flatnonzero(env.action_mask())
                city = int(rng.choice(valid))
                result = env.step(city)
                order.append(city)
                total += result.reward
                done = result.terminated
            order.append(0)
            length = sum(
                float(np.linalg.norm(coords[a] - coords[b])) for a, b in zip(order[:-1], order[1:])
            )
            assert total == pytest.approx(-length, abs=1e-9)

    def test_revisit_raises(self):
        env = TspEnv(4)
        env.reset(seed=1)
        env.step(2)
        with pytest.raises(InvalidActionError):
            env.step(2)

    def test_mask_tracks_visits(self):
        env = TspEnv(4)
        env.reset(seed=2)
        assert not env.action_mask()[0]
        env.step(3)
        mask = env.action_mask()
        assert not mask[3] and mask[1] and mask[2]


class TestKnapsack:
    def test_fixed_instance_best_reward(self):
        values = [2.0, 3.0]
        weights = [1.0, 2.0]
        env = KnapsackEnv(2, values=values, weights=weights, capacity=2.0)
        best = -math.inf
        for plan in ([0], [1], [0, 1], [1, 0], []):
            env.reset(seed=0)
            total = 0.0
            done = False
            for item in plan:
                result = env.step(item)
                total += result.reward
                if result.terminated or result.truncated:
                    done = True
                    break
            if not done:
                total += env.step(env.stop_action).reward
            best = max(best, total)
        assert best == pytest.approx(3.0)
        assert best == pytest.approx(brute_force_knapsack(values, weights, 2.0))

    def test_stop_at_start(self):
        env = KnapsackEnv(3)
        env.reset(seed=0)
        result = env.step(env.stop_action)
        assert result.reward == 0.0 and result.terminated

    def test_overweight_penalty(self):
        env = KnapsackEnv(2, values=[1.0, 1.0], weights=[0.9, 0.9], capacity=1.0)
        env.reset(seed=0)
        env.step(0)
        result = env.step(1)
        assert result.reward == -1.0 and result.terminated

    def test_retake_raises(self):
        env = KnapsackEnv(3, values=[0.1] * 3, weights=[0.1] * 3, capacity=1.0)
        env.reset(seed=0)
        env.step(1)
        with pytest.raises(InvalidActionError):
            env.step(1)

    def test_capacity_is_half_total_weight(self):
        env = KnapsackEnv(6)
        env.reset(seed=9)
        assert env.capacity == pytest.approx(env.weights.sum() / 2)
        assert np.all(env.values > 0) and np.all(env.values <= 1)


class TestWrappers:
    def test_arctan_unbounded(self):
        out = wrap_continuous(np.array([1.0]), {})
        assert out[0] == pytest.approx(0.785398, abs=1e-6)

    def test_linear_endpoint(self):
        out = wrap_continuous(np.array([2.4]), {0: (-2.4, 2.4)})
        assert out[0] == pytest.approx(math.pi)

    def test_zero_maps_to_zero(self):
        out = wrap_continuous(np.zeros(3), {0: (-2.4, 2.4), 2: (-0.2, 0.2)})
        np.testing.assert_allclose(out, 0.0, atol=1e-15)

    def test_range_property(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            obs = rng.normal(scale=30.0, size=4)
            out = wrap_continuous(obs, {0: (-2.4, 2.4), 2: (-0.21, 0.21)})
            assert np.all(out >= -math.pi - 1e-12) and np.all(out <= math.pi + 1e-12)

    def test_discrete_bits(self):
        np.testing.assert_allclose(wrap_discrete_index(5, 16), [0.0, math.pi, 0.0, math.pi])

    def test_discrete_zero(self):
        np.testing.assert_allclose(wrap_discrete_index(0, 16), np.zeros(4))

    def test_discrete_out_of_range(self):
        with pytest.raises(IndexError):
            wrap_discrete_index(16, 16)

    def test_discrete_injective(self):
        seen = {tuple(wrap_discrete_index(i, 16)) for i in range(16)}
        assert len(seen) == 16


class TestRegistry:
    def test_builtin_ids(self):
        assert isinstance(make_env("cartpole"), CartPoleEnv)
        assert isinstance(make_env("frozenlake-4x4"), FrozenLakeEnv)
        assert isinstance(make_env("tsp-5"), TspEnv)
        assert make_env("tsp-4").n_cities == 4
        assert make_env("knapsack-6").n_items == 6

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            make_env("mountaincar")

    def test_custom_registration(self):
        class Stub(CartPoleEnv):
            pass

        register_env("stub-env-test", Stub)
        assert isinstance(make_env("stub-env-test"), Stub)

    def test_reset_determinism_all_envs(self):
        for env_id in ("cartpole", "frozenlake-4x4", "tsp-5", "knapsack-6"):
            a = make_env(env_id).reset(seed=123)
            b = make_env(env_id).reset(seed=123)
            np.testing.assert_array_equal(a, b)
