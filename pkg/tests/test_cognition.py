from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentzero import cognition as cog
from agentzero.cognition import Mode, RWParams
from agentzero.errors import ConfigError

from oracles import window_means


def profile(gamma=1.0, theta_base=0.5):
    return cog.AgentProfile(0, True, 18.0, gamma, 3, 1, 0.5, theta_base)


class TestImpulseControl:
    @pytest.mark.parametrize("age,gamma", [(18, 1.0), (68, 0.5), (150, 0.05), (100, 0.18)])
    def test_values(self, age, gamma):
        assert cog.impulse_control_from_age(age) == pytest.approx(gamma)

    def test_below_anchor_rejected(self):
        with pytest.raises(ConfigError):
            cog.impulse_control_from_age(17.9)

    def test_age_draw_clamped(self):
        rng = np.random.default_rng(0)
        ages = [cog.draw_age(rng, 35, 40) for _ in range(2000)]
        assert min(ages) == 18.0 and max(ages) == 100.0


class TestRescorlaWagner:
    p = RWParams(0.5, 0.6)

    def test_acquisition(self):
        assert cog.rescorla_wagner_update(0.0, 1, self.p) == pytest.approx(0.3)

    def test_extinction(self):
        assert cog.rescorla_wagner_update(0.5, 0, self.p) == pytest.approx(0.35)

    def test_fixed_point(self):
        assert cog.rescorla_wagner_update(1.0, 1, self.p) == 1.0

    @given(st.floats(0, 1), st.lists(st.sampled_from([0, 1]), max_size=200))
    def test_stays_in_unit_interval(self, a, stimuli):
        for lam in stimuli:
            a = cog.rescorla_wagner_update(a, lam, self.p)
            assert 0.0 <= a <= 1.0

    @pytest.mark.parametrize("lam,a0", [(1, 0.0), (1, 0.4), (0, 1.0), (0, 0.7)])
    def test_geometric_convergence(self, lam, a0):
        a = a0
        for t in range(1, 101):
            prev = a
            a = cog.rescorla_wagner_update(a, lam, self.p)
            assert abs(a - lam) <= abs(prev - lam)
            assert abs(abs(a - lam) - 0.7**t * abs(a0 - lam)) <= 1e-12

    def test_params_validated(self):
        with pytest.raises(ConfigError):
            RWParams(0.0, 0.5)


class TestProbability:
    def test_full_window(self):
        mem = deque([0.0, 0.3], maxlen=3)
        assert cog.update_probability(mem, 0.6) == pytest.approx(0.3)

    def test_warm_up(self):
        assert cog.update_probability(deque(maxlen=3), 0.5) == 0.5

    def test_eviction(self):
        mem = deque(maxlen=2)
        for v in (1.0, 0.0, 0.0):
            p = cog.update_probability(mem, v)
        assert p == 0.0 and len(mem) == 2

    def test_random_replay_matches_window_oracle(self):
        rng = np.random.default_rng(2)
        obs = rng.random(1000).tolist()
        for m in (1, 3, 12):
            mem = deque(maxlen=m)
            got = [cog.update_probability(mem, v) for v in obs]
            want = window_means(obs, m)
            assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-12

    def test_long_memory_outlasts_short(self):
        pulse = [1.0] * 3 + [0.0] * 20
        short, long_ = deque(maxlen=3), deque(maxlen=12)
        ps = [cog.update_probability(short, v) for v in pulse]
        pl = [cog.update_probability(long_, v) for v in pulse]
        want_s, want_l = window_means(pulse, 3), window_means(pulse, 12)
        assert ps == pytest.approx(want_s) and pl == pytest.approx(want_l)
        for t in range(3, len(pulse)):
            if pl[t] == 0.0 and ps[t] == 0.0:
                break
            assert pl[t] > ps[t]


class TestRadius:
    @pytest.mark.parametrize("a,r", [(0.0, 1), (1.0, 5), (0.49, 2), (0.25, 2), (0.2499, 1)])
    def test_values(self, a, r):
        assert cog.destructive_radius(a) == r

    def test_fixed_when_disabled(self):
        assert cog.destructive_radius(0.9, endogenous=False, fixed_radius=2) == 2

    def test_step_function_range(self):
        grid = np.linspace(0, 1, 10001)
        radii = [cog.destructive_radius(a) for a in grid]
        assert all(b >= a for a, b in zip(radii, radii[1:]))
        assert set(radii) == {1, 2, 3, 4, 5}


class TestThreshold:
    @pytest.mark.parametrize("gamma,theta", [(1.0, 0.5), (0.5, 1.0), (0.05, 10.0)])
    def test_values(self, gamma, theta):
        assert cog.activation_threshold(profile(gamma)) == pytest.approx(theta)

    def test_disabled(self):
        assert cog.activation_threshold(profile(0.5), age_enabled=False) == 0.5


class TestDisposition:
    def test_closed_form(self):
        assert cog.compute_disposition(0.4, 0.3, 0.2, 0.5) == pytest.approx(0.4)

    def test_empty_state(self):
        assert cog.compute_disposition(0, 0, 0, 0.5) == -0.5

    def test_damage_penalty(self):
        assert cog.compute_disposition(0.4, 0.3, 0.2, 0.5, 2.0, 0.1) == pytest.approx(0.2)

    def test_zero_penalty_is_exact(self):
        assert cog.compute_disposition(0.4, 0.3, 0.2, 0.5, 2.0, 0.0) == cog.compute_disposition(0.4, 0.3, 0.2, 0.5)


class TestChooseMode:
    def test_fight_precedence(self):
        assert cog.choose_mode(0.4, 0.9, 0.5, True) is Mode.FIGHT

    def test_flight(self):
        assert cog.choose_mode(-0.2, 0.9, 0.5, True) is Mode.FLIGHT

    def test_quiet(self):
        assert cog.choose_mode(-0.2, 0.1, 0.5, True) is Mode.QUIET

    def test_zero_disposition_is_not_fight(self):
        assert cog.choose_mode(0.0, 0.0, 0.5, True) is Mode.QUIET

    @given(st.floats(-3, 3), st.floats(0, 1), st.floats(0, 1))
    def test_flight_unreachable_when_disabled(self, d, p, pf):
        assert cog.choose_mode(d, p, pf, False) is not Mode.FLIGHT

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 2), st.floats(0.05, 1), st.floats(0.05, 1))
    def test_older_never_fights_more(self, a, p, c, g1, g2):
        young, old = max(g1, g2), min(g1, g2)  # lower gamma = older
        d_young = cog.compute_disposition(a, p, c, cog.activation_threshold(profile(young, 0.6)))
        d_old = cog.compute_disposition(a, p, c, cog.activation_threshold(profile(old, 0.6)))
        if cog.choose_mode(d_young, p, 0.5, True) is not Mode.FIGHT:
            assert cog.choose_mode(d_old, p, 0.5, True) is not Mode.FIGHT


class TestSurface:
    def test_corner(self):
        assert cog.disposition_surface([0.0], [0.0], 0.0, 0.5)[0, 0] == -0.5

    def test_boundary_line(self):
        s = cog.disposition_surface([0.0, 0.6], [0.0, 0.6], 0.2, 0.8)
        assert s[1, 0] == pytest.approx(0.0) and s[0, 1] == pytest.approx(0.0)

    def test_monotone(self):
        ax = np.linspace(0, 1, 21)
        s = cog.disposition_surface(ax, ax, 0.1, 0.7)
        assert np.all(np.diff(s, axis=0) >= 0) and np.all(np.diff(s, axis=1) >= 0)

    def test_empty_axes_rejected(self):
        with pytest.raises(ValueError):
            cog.disposition_surface([], [0.1], 0, 0)
