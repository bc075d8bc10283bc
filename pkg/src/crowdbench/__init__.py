"""crowdbench: deterministic 2D crowd-navigation simulation and a
social-conformity benchmark harness for robot navigation policies."""

from ._version import __version__
from .agents import HUMAN, ROBOT, AgentState, OrcaParams, PolicyAction, preferred_velocity
from .bridge import BridgePolicy, PolicySession, StdioTransport, TcpTransport
from .engine import (ABORTED, COLLISION, OUTCOMES, SUCCESS, TIMEOUT, EpisodeLog,
                     SimConfig, run_episode)
from .errors import (CrowdBenchError, InvalidInputError, PolicyAborted,
                     PolicyConfigError, ProtocolError, ScenarioGenerationError,
                     VisibilityError)
from .geometry import (OrientedRect, Vec2, min_center_distance, point_in_rect,
                       rect_from_agent, rect_separation, rects_intersect)
from .logio import dump_episode, load_episode, parse_episode, write_episode
from .metrics import (AggregateReport, MetricConfig, MetricReport,
                      REPRODUCTION_METRICS, aggregate, metric_aggregated_time,
                      metric_integrated_jerk, metric_personal_space,
                      metric_projected_path, metric_side_preference,
                      metric_walking_speed, score_episode)
from .orca import HalfPlane, orca_halfplanes, orca_velocity
from .policies import (GoalGreedyPolicy, OrcaPolicy, RobotPolicy,
                       StationaryPolicy, builtin_policy, make_builtin_policy)
from .render import render_trajectory
from .report import emit_report, parse_csv_report, parse_json_report
from .runner import (RunConfig, RunManifest, default_episode_counts, derive_seed,
                     make_policy, rescore_run, run_suite)
from .scenarios import (MULTI_HUMAN_KINDS, SINGLE_HUMAN_KINDS, HumanSpec,
                        ScenarioKind, ScenarioSpec, sample_scenario)

__all__ = [name for name in dir() if not name.startswith("_")]
