"""Trial runner, metrics and log serialization tests."""

import math
from dataclasses import replace
from pathlib import Path

import pytest

from rovsim.dynamics import DivergedState
from rovsim.environment import EnvironmentConfig, WaveConfig
from rovsim.simengine import (CSV_COLUMNS, LogFormatError, ScenarioConfig,
                              ScenarioRunner, TickRecord, TrialLog, export_log,
                              import_log, run_scenario, trial_metrics)
from rovsim.teleop import LatencyProfile
from rovsim.vehicle import Buttons

DATA = Path(__file__).resolve().parent / "data"


def constant_velocity_log(v=0.135, goal=4.0, dt=0.01):
    """Synthetic log of a vehicle that always moved at cruise speed."""
    records = []
    t = x = 0.0
    while True:
        records.append(TickRecord(t=t, x=x, y=0.0, z=0.0, psi=0.0, v1=v,
                                  v2=0.0, v6=0.0, w=0.0, f1=2.0, f2=0.0,
                                  f6=0.0, fz=0.0, dist_f1=0.0, cmd=1, temp=25,
                                  hum=60, batt=12.5))
        if x >= goal:
            break
        t += dt
        x += v * dt
    return TrialLog(records=records, status="FINISHED", goal=goal, dt=dt)


class TestConfigValidation:

    def test_defaults_are_valid(self):
        ScenarioConfig()

    def test_bad_values_rejected(self):
        with pytest.raises(ValueError):
            ScenarioConfig(goal=0.0)
        with pytest.raises(ValueError):
            ScenarioConfig(dt=0.5)
        with pytest.raises(ValueError):
            ScenarioConfig(max_time=-1.0)
        with pytest.raises(ValueError):
            ScenarioConfig(integrator="rk5")
        with pytest.raises(ValueError):
            ScenarioConfig(source="telepathy")


class TestRunScenario:

    def test_still_water_trial_matches_published_times(self):
        log = run_scenario(ScenarioConfig())
        assert log.status == "FINISHED"
        assert 30.0 <= log.records[-1].t <= 33.0

    def test_goal_crossing_brackets_the_goal(self):
        log = run_scenario(ScenarioConfig())
        assert log.records[-1].x >= log.goal
        assert log.records[-2].x < log.goal

    def test_zero_thrust_times_out_with_no_motion(self):
        cfg = ScenarioConfig(max_time=3.0)
        runner = ScenarioRunner(cfg)
        while runner.status is None:
            runner.tick(Buttons.NONE)  # scripted source that never thrusts
        log = runner.finish()
        assert log.status == "TIMEOUT"
        assert log.records[-1].x == 0.0

    def test_total_loss_times_out(self, no_latency):
        lossy = LatencyProfile(startup_range=(0.0, 0.0),
                               nav_range=(0.0, 0.0), loss=1.0)
        log = run_scenario(ScenarioConfig(latency=lossy, max_time=5.0))
        assert log.status == "TIMEOUT"
        assert log.records[-1].x == 0.0

    def test_timestamps_increase_by_dt(self, fast_cfg):
        log = run_scenario(replace(fast_cfg, max_time=2.0, goal=100.0))
        for a, b in zip(log.records, log.records[1:]):
            assert b.t - a.t == pytest.approx(fast_cfg.dt, abs=1e-12)
            assert b.t > a.t

    def test_displacement_strictly_increasing_without_latency(self, fast_cfg):
        log = run_scenario(replace(fast_cfg, goal=0.5))
        xs = [r.x for r in log.records]
        assert all(b > a for a, b in zip(xs[1:], xs[2:]))  # after first step

    def test_divergence_aborts_with_partial_log(self):
        # absurd drag-free thrust with a tiny speed limit trips the guard
        cfg = ScenarioConfig(max_time=20.0)
        veh = replace(cfg.vehicle, speed_limit=0.1)
        cfg = replace(cfg, vehicle=veh,
                      latency=LatencyProfile((0.0, 0.0), (0.0, 0.0)))
        with pytest.raises(DivergedState) as err:
            run_scenario(cfg)
        assert err.value.tick_index > 0
        assert err.value.log.status == "DIVERGED"
        assert len(err.value.log.records) == err.value.tick_index + 1

    def test_determinism_bit_identical_logs(self):
        cfg = ScenarioConfig(seed=4)
        a = export_log(run_scenario(cfg), "jsonl")
        b = export_log(run_scenario(cfg), "jsonl")
        assert a == b

    def test_different_seed_changes_the_run(self):
        a = run_scenario(ScenarioConfig(seed=0)).records[-1].t
        b = run_scenario(ScenarioConfig(seed=12)).records[-1].t
        assert a != b  # latency samples shift the finish time

    def test_wave_disabled_is_bit_identical_to_still_water(self):
        still = ScenarioConfig()
        zero_wave = replace(
            still, env=replace(still.env, wave=WaveConfig(amplitude=0.0)))
        assert export_log(run_scenario(still), "csv") == \
            export_log(run_scenario(zero_wave), "csv")

    def test_golden_log_regression(self):
        cfg = ScenarioConfig(
            goal=1000.0, max_time=2.0, dt=0.02,
            latency=LatencyProfile(startup_range=(0.0, 0.0),
                                   nav_range=(0.2, 0.4)))
        log = run_scenario(cfg)
        golden = (DATA / "golden_short_trial.csv").read_bytes()
        assert export_log(log, "csv") == golden


class TestMetrics:

    def test_constant_velocity_log(self):
        m = trial_metrics(constant_velocity_log())
        assert m.time_taken == pytest.approx(4.0 / 0.135, abs=0.02)
        assert m.avg_velocity_dist_over_time == pytest.approx(0.135, abs=1e-3)
        assert m.avg_velocity_instantaneous_mean == pytest.approx(0.135)
        assert m.v_max == 0.135

    def test_both_velocity_definitions_reported(self):
        # 4 m in 33 s: the distance/time figure is 12.12 cm/s regardless of
        # what the instantaneous average says
        log = constant_velocity_log(v=4.0 / 33.0, goal=4.0, dt=0.01)
        m = trial_metrics(log)
        assert 100.0 * m.avg_velocity_dist_over_time == pytest.approx(
            12.1212, abs=2e-2)
        assert m.avg_velocity_instantaneous_mean > 0.0

    def test_consistency_invariant(self):
        log = run_scenario(ScenarioConfig())
        m = trial_metrics(log)
        assert m.avg_velocity_dist_over_time * m.time_taken == pytest.approx(
            log.goal, abs=1e-9)

    def test_time_to_95pct_on_tanh_ramp(self, fast_cfg):
        # atanh(0.95) * tau with tau = 0.7425 s, plus rounding to the tick
        log = run_scenario(replace(fast_cfg, goal=1.2))
        m = trial_metrics(log)
        tau = 11.0 * 0.135 / 2.0
        assert m.time_to_95pct_vmax == pytest.approx(
            math.atanh(0.95) * tau, abs=0.05)

    def test_rejects_unfinished_logs(self):
        log = TrialLog(records=[], status="TIMEOUT")
        with pytest.raises(ValueError):
            trial_metrics(log)


class TestExport:

    def test_empty_log_is_header_only(self):
        data = export_log(TrialLog(), "csv")
        assert data.decode() == ",".join(CSV_COLUMNS) + "\n"

    def test_three_ticks_four_lines(self):
        log = TrialLog(records=constant_velocity_log().records[:3])
        data = export_log(log, "csv")
        assert len(data.decode().strip().split("\n")) == 4

    def test_csv_round_trip_byte_identical(self):
        log = run_scenario(ScenarioConfig(max_time=40.0))
        once = export_log(log, "csv")
        again = export_log(import_log(once, "csv"), "csv")
        assert once == again

    def test_jsonl_round_trip_byte_identical_and_lossless(self):
        log = run_scenario(ScenarioConfig(max_time=40.0))
        once = export_log(log, "jsonl")
        back = import_log(once, "jsonl")
        assert back.status == log.status
        assert back.goal == log.goal
        assert back.dt == log.dt
        assert back.records == log.records
        assert export_log(back, "jsonl") == once

    def test_jsonl_parseable_stream(self):
        import json
        data = export_log(run_scenario(ScenarioConfig(max_time=5.0,
                                                      goal=100.0)), "jsonl")
        lines = data.decode().strip().split("\n")
        meta = json.loads(lines[0])
        assert meta["schema"] == 1 and meta["status"] == "TIMEOUT"
        for line in lines[1:]:
            json.loads(line)

    def test_corrupt_csv_reports_record_index(self):
        log = constant_velocity_log()
        data = export_log(log, "csv").decode().split("\n")
        data[3] = data[3].replace(",", ";", 2)
        with pytest.raises(LogFormatError) as err:
            import_log("\n".join(data).encode(), "csv")
        assert err.value.record_index == 2

    def test_wrong_header_rejected(self):
        with pytest.raises(LogFormatError):
            import_log(b"a,b,c\n1,2,3\n", "csv")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            export_log(TrialLog(), "xml")
