"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete. The determinism criterion runs the full default
benchmark twice and is the slow one (a few minutes budgeted, bounded below).
"""

import math
import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from crowdbench import (MetricConfig, MetricReport, OrcaParams, OrcaPolicy,
                        GoalGreedyPolicy, RunConfig, ScenarioKind, SimConfig,
                        StationaryPolicy, aggregate, metric_integrated_jerk,
                        metric_personal_space, metric_projected_path,
                        metric_side_preference, metric_walking_speed,
                        orca_halfplanes, orca_velocity, rescore_run, run_episode,
                        run_suite, sample_scenario)
from crowdbench.agents import preferred_velocity
from crowdbench.runner import derive_seed
from crowdbench.scenarios import RING_JITTER, SPAWN_CLEARANCE

from helpers import (grid_minimizer, make_agent, mirror_log, np_rect_corners,
                     np_sat_intersect, random_scene, synthetic_log)


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


def random_synthetic_log(rng: random.Random):
    n_frames = rng.randint(100, 200)
    pos, vel = [], []
    cur = [(rng.uniform(-4, 4), rng.uniform(-4, 4)) for _ in range(6)]
    for _ in range(n_frames):
        v = [(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6)) for _ in range(6)]
        cur = [(p[0] + vv[0] * 0.25, p[1] + vv[1] * 0.25) for p, vv in zip(cur, v)]
        pos.append(list(cur))
        vel.append(v)
    return synthetic_log(pos, vel)


def test_metric_oracle_suite():
    """M_I, M_II, M_V on 100 randomized logs match an independent
    brute-force per-frame scan with bit-equal counts, in under 10 s."""
    with criterion("metric-oracle-suite"):
        cfg = MetricConfig()
        rng = random.Random(424242)
        t0 = time.perf_counter()
        for _ in range(100):
            log = random_synthetic_log(rng)
            n = len(log.frames)
            T = n * log.dt

            m1_count = m2_count = m5_count = 0
            for frame in log.frames:
                robot = frame[0]
                dmin = min(math.hypot(robot.position.x - h.position.x,
                                      robot.position.y - h.position.y)
                           for h in frame[1:])
                if dmin < cfg.epsilon:
                    m1_count += 1
                rc = np_rect_corners(robot.position.x, robot.position.y,
                                     robot.velocity.x, robot.velocity.y,
                                     2 * robot.radius, cfg.projection_horizon)
                if rc is not None:
                    for h in frame[1:]:
                        hc = np_rect_corners(h.position.x, h.position.y,
                                             h.velocity.x, h.velocity.y,
                                             2 * h.radius, cfg.projection_horizon)
                        if hc is not None and np_sat_intersect(rc, hc):
                            m2_count += 1
                            break
                if math.hypot(robot.velocity.x, robot.velocity.y) > cfg.speed_limit:
                    m5_count += 1

            assert metric_personal_space(log, cfg) == (m1_count / n, m1_count / n * T)
            assert metric_projected_path(log, cfg) == (m2_count / n, m2_count / n * T)
            assert metric_walking_speed(log, cfg) == (m5_count / n, m5_count / n * T)
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0, f"oracle suite took {elapsed:.1f}s"


def analytic_log(fn, dt: float, total: float):
    ks = int(round(total / dt)) + 1
    return synthetic_log([[(fn(k * dt), 0.0)] for k in range(ks)], dt=dt)


def test_jerk_analytic_check():
    """Constant-velocity/acceleration -> 0 exactly; cubic -> per-step jerk 6
    exactly and mean within 5% of 36, converging under dt halving."""
    with criterion("jerk-analytic-check"):
        assert metric_integrated_jerk(analytic_log(lambda t: 1.25 * t, 0.25, 5.0)) == 0.0
        assert metric_integrated_jerk(analytic_log(lambda t: 0.5 * t * t, 0.25, 5.0)) == 0.0

        cubic = analytic_log(lambda t: t ** 3, 0.25, 5.0)
        xs = [f[0].position.x for f in cubic.frames]
        for t in range(3, len(xs)):
            j = (xs[t] - 3 * xs[t - 1] + 3 * xs[t - 2] - xs[t - 3]) / 0.25 ** 3
            assert j == pytest.approx(6.0, rel=1e-12)
        m4_coarse = metric_integrated_jerk(cubic)
        assert abs(m4_coarse - 36.0) / 36.0 < 0.05

        m4_fine = metric_integrated_jerk(analytic_log(lambda t: t ** 3, 0.125, 5.0))
        m4_finer = metric_integrated_jerk(analytic_log(lambda t: t ** 3, 0.0625, 5.0))
        assert abs(m4_fine - 36.0) <= abs(m4_coarse - 36.0) + 1e-9
        assert abs(m4_finer - 36.0) <= abs(m4_fine - 36.0) + 1e-9


def test_orca_lp_correctness():
    """200 randomized 2-6 agent configurations: the returned velocity
    satisfies every half-plane (slack >= -1e-7) and sits within 0.01 m/s of
    the velocity-space grid-search minimizer, in under 30 s."""
    with criterion("orca-lp-correctness"):
        rng = random.Random(20240817)
        params = OrcaParams()
        dt = 0.25
        t0 = time.perf_counter()
        compared = 0
        for _ in range(200):
            scene = random_scene(rng, rng.randint(2, 6))
            me, others = scene[0], scene[1:]
            v = orca_velocity(me, others, params, dt)
            for hp in orca_halfplanes(me, others, params, dt):
                assert hp.slack(v.x, v.y) >= -1e-7
            g = grid_minimizer(me, others, params, dt, pitch=0.005)
            assert g is not None, "generated configuration was infeasible"
            pref = preferred_velocity(me, dt)
            assert v.distance_to(pref) <= g.distance_to(pref) + 1e-9
            assert v.distance_to(g) <= 0.01
            compared += 1
        elapsed = time.perf_counter() - t0
        assert compared == 200
        assert elapsed < 30.0, f"LP correctness batch took {elapsed:.1f}s"


def test_orca_safety_batch():
    """200 seeded 5-agent circle exchanges with zero inter-agent collisions."""
    with criterion("orca-safety-batch"):
        params = OrcaParams(time_horizon_agents=5.0, max_speed=1.0)
        dt = 0.25
        for seed in range(200):
            rng = random.Random(seed)
            agents = []
            base = rng.uniform(0, 2 * math.pi)
            for i in range(5):
                ang = base + 2 * math.pi * i / 5 + rng.uniform(-0.25, 0.25)
                sx, sy = 4 * math.cos(ang), 4 * math.sin(ang)
                agents.append(make_agent(i, sx, sy, 0, 0,
                                         -sx + rng.uniform(-0.3, 0.3),
                                         -sy + rng.uniform(-0.3, 0.3)))
            for _ in range(200):
                vels = [orca_velocity(a, [o for o in agents if o is not a],
                                      params, dt) for a in agents]
                for a, v in zip(agents, vels):
                    a.velocity = v
                    a.position = a.position + v * dt
                for i in range(5):
                    for j in range(i + 1, 5):
                        d = agents[i].position.distance_to(agents[j].position)
                        assert d >= agents[i].radius + agents[j].radius, \
                            f"collision in exchange seed {seed}"
                if all(a.position.distance_to(a.goal) < a.radius for a in agents):
                    break


def test_scenario_constraint_suite():
    """1000 samples per kind satisfy every placement constraint."""
    with criterion("scenario-constraint-suite"):
        for kind in ScenarioKind:
            for seed in range(1000):
                spec = sample_scenario(kind, 5, -4.0, seed)
                assert spec.robot_start.as_tuple() == (0.0, -4.0)
                assert spec.robot_goal.as_tuple() == (0.0, 4.0)
                starts = [(spec.robot_start, 0.2)] + [(h.start, h.radius)
                                                      for h in spec.humans]
                for i in range(len(starts)):
                    for j in range(i + 1, len(starts)):
                        d = starts[i][0].distance_to(starts[j][0])
                        assert d >= starts[i][1] + starts[j][1] + SPAWN_CLEARANCE - 1e-12

                if kind is ScenarioKind.CIRCULAR_CROSSING:
                    for h in spec.humans:
                        assert 4.0 - RING_JITTER <= h.start.norm() <= 4.0 + RING_JITTER
                        assert h.goal.distance_to(-h.start) <= RING_JITTER + 1e-12
                elif kind is ScenarioKind.RANDOM:
                    for h in spec.humans:
                        for p in (h.start, h.goal):
                            assert abs(p.x) <= 6.0 and abs(p.y) <= 6.0
                elif kind is ScenarioKind.PARALLEL_TRAFFIC:
                    for h in spec.humans:
                        assert h.start.y * h.goal.y < 0
                elif kind is ScenarioKind.PERPENDICULAR_TRAFFIC:
                    for h in spec.humans:
                        assert h.start.x * h.goal.x < 0
                elif kind is ScenarioKind.PASSING:
                    (h,) = spec.humans
                    assert -0.4 <= h.start.x <= 0.4 and -0.4 <= h.goal.x <= 0.4
                    assert h.start.y == 4.0 and h.goal.y == -4.0
                elif kind is ScenarioKind.OVERTAKING:
                    (h,) = spec.humans
                    assert h.start.y > spec.robot_start.y
                    assert h.goal.y > spec.robot_goal.y
                    assert h.preferred_speed < 1.0
                elif kind is ScenarioKind.CROSSING:
                    (h,) = spec.humans
                    assert h.start.x == -4.0 and h.goal.x == 4.0
                    assert abs(h.start.y) <= 0.4 and abs(h.goal.y) <= 0.4


def approach_log(human_xs, kind=ScenarioKind.PASSING):
    """Robot walks (0,-4) -> (0,4); human descends with given x per frame."""
    pos = []
    for k in range(33):
        ry = -4.0 + 0.25 * k
        hy = 4.0 - 0.25 * k
        pos.append([(0.0, ry), (human_xs[min(k, len(human_xs) - 1)], hy)])
    return synthetic_log(pos, kind=kind)


def test_side_preference_ground_truth():
    """Synthetic pass-left/pass-right logs label correctly; mirroring swaps
    100% of labels over 100 randomized approach logs."""
    with criterion("side-preference-ground-truth"):
        assert metric_side_preference(approach_log([0.5] * 33)) == "left"
        assert metric_side_preference(approach_log([-0.5] * 33)) == "right"

        rng = random.Random(99)
        swapped = 0
        for _ in range(100):
            # wandering but never exactly zero at any frame
            xs = [rng.choice([-1, 1]) * rng.uniform(0.05, 1.5) for _ in range(33)]
            kind = rng.choice(list({ScenarioKind.PASSING, ScenarioKind.OVERTAKING,
                                    ScenarioKind.CROSSING}))
            log = approach_log(xs, kind=kind)
            label = metric_side_preference(log)
            mirrored = metric_side_preference(mirror_log(log))
            assert label in ("left", "right")
            assert mirrored == ("right" if label == "left" else "left")
            swapped += 1
        assert swapped == 100


def test_determinism_and_replay(tmp_path):
    """Full default suite with goal_greedy, run twice with the same master
    seed: byte-identical manifests, logs, and reports; offline re-scoring
    reproduces every reported value; wall clock under 5 minutes."""
    with criterion("determinism-and-replay"):
        t0 = time.perf_counter()

        def full_run(out: Path, workers: int):
            cfg = RunConfig(master_seed=77, policy="goal_greedy", out_dir=out,
                            workers=workers)
            return run_suite(cfg)

        _, aggs_a = full_run(tmp_path / "a", workers=2)
        _, aggs_b = full_run(tmp_path / "b", workers=1)

        files_a = {p.relative_to(tmp_path / "a"): p
                   for p in sorted((tmp_path / "a").rglob("*")) if p.is_file()}
        files_b = {p.relative_to(tmp_path / "b"): p
                   for p in sorted((tmp_path / "b").rglob("*")) if p.is_file()}
        assert set(files_a) == set(files_b)
        for rel, pa in files_a.items():
            if rel.name == "run_info.json":
                continue  # timestamps live here, outside the determinism claim
            assert pa.read_bytes() == files_b[rel].read_bytes(), f"differs: {rel}"

        # episode counts: 4 x 500 + 3 x 200 = 2600 per visibility mode
        logs = list((tmp_path / "a" / "logs").rglob("*.jsonl"))
        assert len(logs) == 2 * (4 * 500 + 3 * 200)

        rescored = rescore_run(tmp_path / "a", tmp_path / "rescored")
        assert rescored == aggs_a
        assert ((tmp_path / "rescored" / "report.csv").read_bytes()
                == (tmp_path / "a" / "report.csv").read_bytes())

        elapsed = time.perf_counter() - t0
        assert elapsed < 300.0, f"determinism criterion took {elapsed:.0f}s"


def test_harness_sanity_batch():
    """ORCA robot, visible mode, circular crossing, 500 episodes: success
    rate >= 90%, collision rate <= 2%, aggregated time finite on every
    success; the invisibility contract holds on 50 seeds."""
    with criterion("harness-sanity-batch"):
        config = SimConfig(robot_visible=True)
        outcomes = {"success": 0, "collision": 0, "timeout": 0}
        from crowdbench import metric_aggregated_time
        for i in range(500):
            seed = derive_seed(2025, "circular_crossing", "sanity", i)
            spec = sample_scenario(ScenarioKind.CIRCULAR_CROSSING, 5, -4.0, seed)
            log = run_episode(spec, OrcaPolicy(), config)
            outcomes[log.outcome] += 1
            if log.outcome == "success":
                m3 = metric_aggregated_time(log)
                assert math.isfinite(m3) and m3 > 0
        total = sum(outcomes.values())
        assert total == 500
        success_rate = outcomes["success"] / total
        collision_rate = outcomes["collision"] / total
        print(f"\n  sanity batch: success {100*success_rate:.1f}% "
              f"collision {100*collision_rate:.1f}%")
        assert success_rate >= 0.90
        assert collision_rate <= 0.02

        invisible = SimConfig(robot_visible=False)
        for i in range(50):
            seed = derive_seed(2025, "circular_crossing", "contract", i)
            spec = sample_scenario(ScenarioKind.CIRCULAR_CROSSING, 5, -4.0, seed)
            log_a = run_episode(spec, GoalGreedyPolicy(), invisible)
            log_b = run_episode(spec, StationaryPolicy(), invisible)
            for k in range(min(len(log_a.frames), len(log_b.frames))):
                for h in range(1, 6):
                    assert log_a.frames[k][h].position == log_b.frames[k][h].position
                    assert log_a.frames[k][h].velocity == log_b.frames[k][h].velocity


def test_aggregation_arithmetic():
    """Hand-constructed 4-episode set: success 75% / collision 25%; m1
    values {0.2, 0.4} give mean 0.3 and sample std 0.1414."""
    with criterion("aggregation-arithmetic"):
        def rep(outcome, m1):
            return MetricReport(kind="passing", outcome=outcome, nav_time_s=8.0,
                                m1=m1, m1_seconds=m1, m2=0.0, m2_seconds=0.0,
                                m3_seconds=None, m4=0.0, m5=0.0, m5_seconds=0.0,
                                side_label="undetermined")

        agg = aggregate([rep("success", 0.2), rep("success", 0.4),
                         rep("success", 0.2), rep("collision", 0.9)])
        assert agg.success_pct == 75.0
        assert agg.collision_pct == 25.0
        assert agg.timeout_pct == 0.0

        two = aggregate([rep("success", 0.2), rep("success", 0.4)])
        assert two.m1_mean == pytest.approx(0.3, abs=1e-15)
        assert two.m1_std == pytest.approx(math.sqrt(0.02), rel=1e-12)
        assert two.m1_std == pytest.approx(0.1414, abs=5e-5)
