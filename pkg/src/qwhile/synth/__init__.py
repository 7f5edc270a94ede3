"""Unitary synthesis into basic-gate circuits."""
from .pipeline import synthesize
from .qsd import multiplexed_rotation_ops, qsd_decompose, two_qubit_ops
from .sequences import (
    GateOp,
    GateSequence,
    GateSet,
    phase_dist,
    reconstruct,
    strip_phase,
)
from .sk import SKNet, build_net, default_net, solovay_kitaev
from .two_level import TwoLevelFactor, two_level_decompose, two_level_to_circuit

__all__ = [
    "synthesize",
    "multiplexed_rotation_ops", "qsd_decompose", "two_qubit_ops",
    "GateOp", "GateSequence", "GateSet", "phase_dist", "reconstruct", "strip_phase",
    "SKNet", "build_net", "default_net", "solovay_kitaev",
    "TwoLevelFactor", "two_level_decompose", "two_level_to_circuit",
]
