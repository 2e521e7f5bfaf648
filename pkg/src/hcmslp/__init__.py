"""Hybrid-constellation modulation with symbol-level precoding for RIS-aided MU-MISO."""

from hcmslp.constellation import Constellation, build_hcm, build_qam, classify, detect
from hcmslp.channel import (
    ChannelSet,
    FadingParams,
    PhaseConfig,
    SystemGeometry,
    gen_channels,
    total_channel,
)
from hcmslp.phases import inverse_power_objective, random_phases, refine_phases
from hcmslp.lcqp import LcqpProblem, solve, is_feasible
from hcmslp.wl import WlSystem, build_permutation, pinv_and_projector, wl_mat, wl_system, wl_vec
from hcmslp.slp import (
    SlpSolution,
    apply_transmit,
    hcm_slp,
    qam_slp,
    slp_exact,
    slp_heuristic,
    zf_precode,
)

__all__ = [
    "Constellation",
    "build_hcm",
    "build_qam",
    "classify",
    "detect",
    "ChannelSet",
    "FadingParams",
    "PhaseConfig",
    "SystemGeometry",
    "gen_channels",
    "total_channel",
    "inverse_power_objective",
    "random_phases",
    "refine_phases",
    "LcqpProblem",
    "solve",
    "is_feasible",
    "WlSystem",
    "build_permutation",
    "pinv_and_projector",
    "wl_mat",
    "wl_system",
    "wl_vec",
    "SlpSolution",
    "apply_transmit",
    "hcm_slp",
    "qam_slp",
    "slp_exact",
    "slp_heuristic",
    "zf_precode",
]
