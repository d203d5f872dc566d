import pytest
from hypothesis import given
from hypothesis import strategies as st

from socrm import controller as ctl
from socrm.event_bus import FaceEvent, replay


def make_events(faces_list):
    return [FaceEvent(f, i + 1, i * 1000) for i, f in enumerate(faces_list)]


class TestDecide:
    @pytest.mark.parametrize("faces,expected", [
        (0, (ctl.APU, 8)),
        (1, (ctl.APU, 1024)),
        (2, (ctl.PL, 2048)),
        (3, (ctl.PL, 4096)),
        (17, (ctl.PL, 4096)),
    ])
    def test_rule_map(self, faces, expected):
        assert ctl.decide(faces) == expected

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ctl.decide(-1)

    @given(st.integers(min_value=0, max_value=10_000),
           st.integers(min_value=0, max_value=10_000))
    def test_monotone_in_faces(self, a, b):
        if a > b:
            a, b = b, a
        assert ctl.decide(a)[1] <= ctl.decide(b)[1]

    @given(st.integers(min_value=3, max_value=10_000))
    def test_saturates_above_two(self, faces):
        assert ctl.decide(faces) == (ctl.PL, 4096)

    @given(st.integers(min_value=0, max_value=10_000))
    def test_single_migration_boundary(self, faces):
        domain = ctl.decide(faces)[0]
        assert domain == (ctl.APU if faces <= 1 else ctl.PL)


class TestPlanAction:
    def test_migrate_and_scale(self):
        state = ctl.FunctionState(ctl.APU, 1024, True, 1)
        action = ctl.plan_action(state, (ctl.PL, 2048))
        assert action.kind == ctl.MIGRATE_AND_SCALE
        assert action.overhead_us == 0.0

    def test_noop_identity(self):
        state = ctl.initial_state()
        action = ctl.plan_action(state, (ctl.APU, 8))
        assert action.kind == ctl.NO_OP
        assert action.overhead_us == 0.0

    def test_scale_only(self):
        state = ctl.initial_state()
        assert ctl.plan_action(state, (ctl.APU, 1024)).kind == ctl.SCALE_ONLY

    def test_partial_bitstream_overhead_on_pl_activation(self):
        state = ctl.initial_state()
        action = ctl.plan_action(state, (ctl.PL, 2048),
                                 mechanism=ctl.PARTIAL_BITSTREAM)
        assert action.overhead_us == 10_000

    def test_partial_bitstream_no_overhead_back_to_apu(self):
        state = ctl.FunctionState(ctl.PL, 4096, False, 3)
        action = ctl.plan_action(state, (ctl.APU, 8),
                                 mechanism=ctl.PARTIAL_BITSTREAM)
        assert action.kind == ctl.MIGRATE_AND_SCALE
        assert action.overhead_us == 0.0


class TestApply:
    def test_migrate_updates_gating_and_generation(self):
        state = ctl.FunctionState(ctl.APU, 1024, True, 4)
        action = ctl.plan_action(state, (ctl.PL, 2048))
        new = ctl.apply_action(state, action)
        assert new == ctl.FunctionState(ctl.PL, 2048, False, 5)

    def test_noop_leaves_state_unchanged(self):
        state = ctl.initial_state()
        assert ctl.apply_action(state, ctl.plan_action(state, state.config)) is state

    def test_stale_action_rejected(self):
        state = ctl.initial_state()
        action = ctl.plan_action(ctl.FunctionState(ctl.PL, 2048, False, 2),
                                 (ctl.APU, 8))
        with pytest.raises(ctl.StaleActionError):
            ctl.apply_action(state, action)


class TestProcessEvent:
    def test_demo_trace(self):
        c = ctl.Controller(seed=0)
        results = [c.process_event(e) for e in make_events([0, 1, 2, 3])]
        configs = [state.config for state, _, _ in results]
        assert configs == [(ctl.APU, 8), (ctl.APU, 1024),
                           (ctl.PL, 2048), (ctl.PL, 4096)]
        kinds = [action.kind for _, action, _ in results]
        assert kinds == [ctl.NO_OP, ctl.SCALE_ONLY,
                         ctl.MIGRATE_AND_SCALE, ctl.SCALE_ONLY]
        gated = [state.pl_clock_gated for state, _, _ in results]
        assert gated == [True, True, False, False]

    def test_repeated_event_is_noop(self):
        c = ctl.Controller(seed=0)
        c.process_event(FaceEvent(2, 1, 0))
        _, action, _ = c.process_event(FaceEvent(2, 2, 1000))
        assert action.kind == ctl.NO_OP

    def test_return_to_apu_regates_pl(self):
        c = ctl.Controller(seed=0)
        c.process_event(FaceEvent(3, 1, 0))
        state, action, _ = c.process_event(FaceEvent(0, 2, 1000))
        assert action.kind == ctl.MIGRATE_AND_SCALE
        assert state.config == (ctl.APU, 8)
        assert state.pl_clock_gated

    def test_generation_counts_non_noops(self):
        c = ctl.Controller(seed=0)
        faces = [0, 0, 1, 1, 2, 3, 3, 0]
        non_noop = 0
        for event in make_events(faces):
            state, action, _ = c.process_event(event)
            if action.kind != ctl.NO_OP:
                non_noop += 1
            assert state.generation == non_noop
            assert state.pl_clock_gated == (state.domain == ctl.APU)

    def test_report_carries_model_figures(self):
        c = ctl.Controller(seed=0)
        _, _, report = c.process_event(FaceEvent(2, 1, 0))
        assert report.exec_time_us == 8.7
        assert report.power.total_mw == 4354
        assert report.mse is not None and report.mse > 0

    def test_apu_report_has_no_mse(self):
        c = ctl.Controller(seed=0)
        _, _, report = c.process_event(FaceEvent(1, 1, 0))
        assert report.mse is None
        assert report.exec_time_us == 50.62

    def test_replay_determinism(self):
        trace = [(0, 0), (1000, 1), (1000, 2), (1000, 3), (1000, 0)]

        def run():
            c = ctl.Controller(seed=7)
            return ctl.run_trace(replay(trace, fast_forward=True), c)

        first, second = run(), run()
        assert [(r.state, r.action, r.exec_time_us, r.mse) for r in first] == \
               [(r.state, r.action, r.exec_time_us, r.mse) for r in second]
