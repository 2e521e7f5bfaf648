"""Discrete RIS phase selection by element-wise successive refinement."""

from __future__ import annotations

import numpy as np

from hcmslp.channel import ChannelSet, PhaseConfig, total_channel
from hcmslp.errors import RANK_RTOL, ConfigurationError, SingularMatrixError


def inverse_power_objective(H_T: np.ndarray) -> float:
    """``tr((H_T H_T^H)^-1)``, the total power of the channel inverse."""
    H_T = np.atleast_2d(H_T)
    K, M = H_T.shape
    if K > M:
        raise SingularMatrixError(f"{K} users exceed {M} antennas")
    gram = H_T @ H_T.conj().T
    lam = np.linalg.eigvalsh(gram)
    if not np.all(np.isfinite(lam)) or lam[0] <= (RANK_RTOL**2) * lam[-1]:
        raise SingularMatrixError("Gram matrix of the total channel is singular")
    return float(np.sum(1.0 / lam))


def random_phases(N: int, Q: int, rng: np.random.Generator) -> PhaseConfig:
    return PhaseConfig(Q, rng.integers(0, Q, size=N))


def refine_phases(
    ch: ChannelSet,
    Q: int,
    rng: np.random.Generator,
    max_sweeps: int = 20,
    return_trace: bool = False,
):
    """Coordinate descent over RIS elements from a random start.

    Each element in turn takes the level in ``0..Q-1`` that minimizes
    :func:`inverse_power_objective` with the others held; the incumbent is
    kept on ties.  Stops after a sweep with no change or ``max_sweeps`` sweeps.

    With ``return_trace`` the objective after every element update is also
    returned (first entry: the initial configuration).
    """
    if Q < 2:
        raise ConfigurationError("Q must be >= 2")
    if ch.H.shape[0] > ch.H.shape[1]:
        raise SingularMatrixError("refinement needs at least as many antennas as users")
    N = ch.F.shape[1]
    idx = random_phases(N, Q, rng).indices.copy()
    levels = np.exp(2j * np.pi * np.arange(Q) / Q)

    def objective(indices):
        H_T = ch.H + (ch.F * levels[indices]) @ ch.G
        try:
            return inverse_power_objective(H_T)
        except SingularMatrixError:
            return np.inf

    best = objective(idx)
    trace = [best]
    for _ in range(max_sweeps):
        changed = False
        for n in range(N):
            incumbent = idx[n]
            for q in range(Q):
                if q == incumbent:
                    continue
                idx[n] = q
                val = objective(idx)
                if val < best:
                    best, incumbent, changed = val, q, True
            idx[n] = incumbent
            trace.append(best)
        if not changed:
            break
    if not np.isfinite(best):
        raise SingularMatrixError("no nonsingular phase configuration found")
    cfg = PhaseConfig(Q, idx)
    return (cfg, trace) if return_trace else cfg


def parse_phase_option(option) -> tuple[str, int]:
    """``2`` -> ("refined", 2); ``"random"`` -> ("random", 4); ``"random:2"`` -> ("random", 2)."""
    text = str(option).strip().lower()
    try:
        if text.startswith("random"):
            q = text.partition(":")[2]
            mode, Q = "random", int(q) if q else 4
        else:
            mode, Q = "refined", int(text)
    except ValueError:
        raise ConfigurationError(f"bad phase option {option!r}") from None
    if Q < 2:
        raise ConfigurationError(f"phase option {option!r}: Q must be >= 2")
    return mode, Q


def phase_for(ch: ChannelSet, option, rng: np.random.Generator, max_sweeps: int = 20) -> PhaseConfig:
    mode, Q = parse_phase_option(option)
    if mode == "random":
        return random_phases(ch.F.shape[1], Q, rng)
    return refine_phases(ch, Q, rng, max_sweeps=max_sweeps)


__all__ = [
    "inverse_power_objective",
    "random_phases",
    "refine_phases",
    "parse_phase_option",
    "phase_for",
    "total_channel",
]
