"""Remove-win replicated collections (sets, priority queues) and a simulated network."""

from ._core import (
    CausalDeliveryViolation,
    Replica,
    ScriptError,
    Simulation,
    WireFormatError,
    has_unseen,
    merge,
    replay_script,
    run_figures,
    run_trial,
)

__all__ = [
    "CausalDeliveryViolation",
    "Replica",
    "ScriptError",
    "Simulation",
    "WireFormatError",
    "has_unseen",
    "merge",
    "replay_script",
    "run_figures",
    "run_trial",
]
