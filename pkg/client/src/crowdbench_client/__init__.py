"""Reference external-policy client for the crowdbench wire protocol."""

from .client import (AgentView, ClientSession, NegotiatedConfig, Observation,
                     StdioLines, TcpLines, clip_to_speed, handshake, run_client)
from .policies import POLICIES, LearnedPolicyAdapter, goal_greedy

__version__ = "0.1.0"
__all__ = [
    "AgentView", "ClientSession", "NegotiatedConfig", "Observation",
    "StdioLines", "TcpLines", "clip_to_speed", "handshake", "run_client",
    "POLICIES", "LearnedPolicyAdapter", "goal_greedy", "__version__",
]
