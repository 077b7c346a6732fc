import dataclasses

import numpy as np
import pytest

from agentzero.cognition import Mode
from agentzero.config import EXTENSION_FLAGS, AgentOverride, SimConfig
from agentzero.engine import apply_shock, init_model, make_stream, run, step
from agentzero.environment import PatchState, any_active
from agentzero.errors import ConfigError

from helpers import post_environment_grid
from oracles import disc_cells


def small(n=3, ticks=200, **env):
    cfg = SimConfig().replace("run", n_ticks=ticks).replace("agents", n_agents=n)
    return cfg.replace("environment", **env) if env else cfg


class TestInit:
    def test_baseline(self):
        st = init_model(SimConfig())
        assert len(st.agents) == 3
        assert not st.agents[0].profile.mobile
        assert all(a.profile.mobile for a in st.agents[1:])
        assert st.grid.count(PatchState.CALM) == 2500
        assert all(a.state.affect == 0 and len(a.state.memory) == 0 for a in st.agents)
        assert np.allclose(st.ties.weights, 0.5 * (1 - np.eye(3)))
        assert st.tick == 0

    def test_twenty_agents(self):
        st = init_model(SimConfig().replace("agents", n_agents=20))
        assert len(st.agents) == 20 and not st.agents[0].profile.mobile

    def test_deterministic(self):
        a, b = init_model(SimConfig()), init_model(SimConfig())
        assert [x.profile for x in a.agents] == [x.profile for x in b.agents]
        assert [x.state.position for x in a.agents] == [x.state.position for x in b.agents]

    def test_overrides_do_not_shift_streams(self):
        base = init_model(SimConfig())
        cfg = dataclasses.replace(SimConfig(), overrides=((1, AgentOverride(age=20.0, x=1, y=1)),))
        st = init_model(cfg)
        assert st.agents[1].profile.age == 20.0 and st.agents[1].state.position == (1, 1)
        assert st.agents[1].rng.random() == base.agents[1].rng.random()

    def test_invalid_rejected(self):
        with pytest.raises(ConfigError, match="run.n_ticks"):
            init_model(SimConfig().replace("run", n_ticks=0))

    def test_stream_derivation_is_pure(self):
        assert make_stream(5, "agent", 2).random() == make_stream(5, "agent", 2).random()
        assert make_stream(5, "agent", 2).random() != make_stream(5, "agent", 3).random()
        assert make_stream(5, "environment").random() != make_stream(5, "shock").random()


class TestStep:
    def test_threat_free_world(self):
        r = run(small(attack_rate=0.0))
        for f in r.frames:
            assert f.active_count == 0 and f.destroyed_count == 0
            for a in f.agents:
                assert a.affect == 0.0 and a.mode is not Mode.FIGHT

    def test_same_seed_same_frames(self):
        assert run(small()).frames == run(small()).frames

    def test_different_seed_differs(self):
        assert run(small()).frames != run(small().with_seed(1)).frames

    def test_frame_ticks_are_zero_based(self):
        assert [f.tick for f in run(small(ticks=5)).frames] == [0, 1, 2, 3, 4]

    def test_step_past_end_raises(self):
        st = init_model(small(ticks=1))
        step(st)
        with pytest.raises(RuntimeError):
            step(st)

    def test_environment_stream_independent_of_agents(self):
        # toggling agent behaviour must not advance the environment generator differently
        a = init_model(small(ticks=50))
        b = init_model(small(ticks=50).with_flags(flight=False, memory=False))
        for _ in range(50):
            step(a)
            step(b)
        assert a.env_rng.bit_generator.state == b.env_rng.bit_generator.state

    def test_perception_precedes_destruction(self):
        # crowd a small grid so attacks routinely overlap other agents' sampling discs
        cfg = small(n=6, ticks=200, width=12, height=12, attack_rate=0.05)
        cfg = cfg.with_flags(endogenous_radius=False)
        st = init_model(cfg)
        rate = cfg.rw_params.rate
        overlaps = 0
        for _ in range(cfg.run.n_ticks):
            grid = post_environment_grid(st)
            before = [(a.state.affect, a.state.position) for a in st.agents]
            frame = step(st)
            for rec, (a0, pos) in zip(frame.agents, before):
                lam = 1 if any_active(grid, pos, 1) else 0
                assert rec.affect == a0 + rate * (lam - a0)
            hit = set()
            for ev in st.events:
                if ev.tick == frame.tick:
                    hit |= disc_cells(ev.center, ev.radius, 12, 12)
            overlaps += sum(
                1 for _, pos in before if any(c in hit for c in disc_cells(pos, 1, 12, 12))
            )
        assert overlaps > 0

    def test_attack_discs_match_grid(self):
        r = run(small(ticks=400))
        assert r.events
        destroyed = set()
        for ev in r.events:
            disc = disc_cells(ev.center, ev.radius, 50, 50)
            assert len(disc) == (2 * ev.radius + 1) ** 2
            assert ev.patches_destroyed == len(disc - destroyed)
            assert ev.attacker not in ev.harmed
            destroyed |= disc
        got = {(x, y) for y, x in zip(*np.nonzero(r.grid.cells == PatchState.DESTROYED))}
        assert destroyed <= got  # extinction never resurrects destroyed patches
        assert r.frames[-1].destroyed_count == len(got)

    def test_invariants_over_run(self):
        r = run(small(n=5, ticks=600))
        prev = 0
        for f in r.frames:
            assert f.destroyed_count >= prev
            prev = f.destroyed_count
            assert f.destroyed_count + f.active_count <= 2500
            for a in f.agents:
                assert 0 <= a.affect <= 1 and 0 <= a.probability <= 1
                assert a.damage >= 0
                assert a.radius == int(np.floor(1 + 4 * a.affect))
                assert a.mode in Mode
            assert f.avg_tie_strength == pytest.approx(1 / 4)


class TestShocks:
    def _state(self):
        st = init_model(small(n=4))
        for i, a in enumerate(st.agents):
            a.state.affect = 0.1 * i
        return st

    def test_zero_magnitude_is_noop(self):
        st = self._state()
        apply_shock(st, 0.0, "per_agent_random", st.shock_rng)
        assert [a.state.affect for a in st.agents] == [0.0, 0.1, 0.2, 0.30000000000000004]

    def test_uniform(self):
        st = self._state()
        st.agents[3].state.affect = 0.8
        apply_shock(st, 0.5, "uniform", st.shock_rng)
        assert [a.state.affect for a in st.agents] == pytest.approx([0.5, 0.6, 0.7, 1.0])

    def test_per_agent_spreads_affects(self):
        st = init_model(small(n=5))
        apply_shock(st, 0.5, "per_agent_random", st.shock_rng)
        got = [a.state.affect for a in st.agents]
        assert all(0 <= x <= 0.5 for x in got) and np.std(got) > 0

    def test_not_applied_at_tick_zero(self):
        cfg = small(ticks=3, attack_rate=0.0).with_flags(shocks=True).replace("shocks", period=1, mode="uniform")
        r = run(cfg)
        assert [f.agents[0].affect for f in r.frames] == pytest.approx([0.0, 0.5, 0.5 * 0.7 + 0.5])


def test_all_flags_off_reduced_dynamics():
    cfg = small(ticks=400).with_flags(**dict.fromkeys(EXTENSION_FLAGS, False))
    r = run(cfg)
    st = init_model(cfg)
    assert all(a.profile.memory_length == 1 for a in st.agents)
    for f in r.frames:
        assert f.avg_tie_strength == 0.5 and f.tie_strength_dispersion == 0.0
        for a in f.agents:
            assert a.radius == cfg.conflict.fixed_radius
            assert a.mode is not Mode.FLIGHT and a.damage == 0.0
    assert any(a.mode is Mode.FIGHT for f in r.frames for a in f.agents)
