""" Agent networks """

from mgan.agents.qnet import (
    AgentQNetwork,
    RecurrentState,
    agent_forward,
    build_agent_input,
    build_inputs,
    greedy_actions,
    select_action,
)

__all__ = [
    "AgentQNetwork",
    "RecurrentState",
    "agent_forward",
    "build_agent_input",
    "build_inputs",
    "greedy_actions",
    "select_action",
]
