"""Symbol-level precoders: HCM-SLP (exact and sign-heuristic), QAM-SLP and ZF.

All HCM-SLP and QAM-SLP transmit vectors share the structure
``x = H_f^+ s_f + P t`` where ``H_f`` holds the WL rows that must be received
exactly and ``P`` projects onto its null space.  Since the two terms are
orthogonal, ``||x||^2 = ||H_f^+ s_f||^2 + ||P t||^2`` and the precoder only
has to buy the extra power ``||P t||^2`` that moves constrained rows into
their CI regions.

Everything here works in lattice units: the noise-free receive ``H x``
equals the symbol vector on fixed rows, and the actual transmit signal is
``sqrt(P_t / xi) x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from hcmslp.constellation import Constellation
from hcmslp.errors import ConfigurationError, check_full_row_rank
from hcmslp.lcqp import LcqpProblem, solve
from hcmslp.wl import WlSystem, from_wl_vec, pinv_and_projector, wl_mat, wl_system, wl_vec

EXACT_LIMIT = 16


@dataclass(eq=False)
class SlpSolution:
    x_wl: np.ndarray
    xi: float
    t: np.ndarray
    psi: np.ndarray
    status: str  # optimal | heuristic | infeasible | unconstrained
    sign_ties: int = 0
    branches: list = field(default_factory=list, repr=False)

    @property
    def x(self) -> np.ndarray:
        return from_wl_vec(self.x_wl)


class _Structure:
    """Pseudo-inverse, projector and base point for one channel/row split.

    The channel is divided by its RMS entry before factorization so that the
    QP sees O(1) data whatever the path loss; results are mapped back.
    """

    def __init__(self, H_wl: np.ndarray, fixed_rows, s_fixed):
        self.scale = float(np.sqrt(np.mean(H_wl**2))) or 1.0
        self.Hn = H_wl / self.scale
        self.pinv, self.P = pinv_and_projector(self.Hn[fixed_rows])
        self.x0 = self.pinv @ s_fixed  # normalized units

    def finish(self, t_n: np.ndarray):
        x_n = self.x0 + self.P @ t_n
        x = x_n / self.scale
        return x, float(x @ x), t_n / self.scale


def _unconstrained(st: _Structure, status="unconstrained") -> SlpSolution:
    x, xi, t = st.finish(np.zeros_like(st.x0))
    return SlpSolution(x, xi, t, np.zeros(0), status)


def _branch(st: _Structure, rows, psi, thr):
    """LCQP for one sign pattern: ``psi * (H_rows (x0 + P t)) + thr <= 0``."""
    H_r = st.Hn[rows]
    A = psi[:, None] * (H_r @ st.P)
    b = -psi * (H_r @ st.x0) - thr
    return solve(LcqpProblem(st.P, A, b))


def slp_exact(ws: WlSystem, c: Constellation, limit: int = EXACT_LIMIT) -> SlpSolution:
    """Enumerate every sign vector and keep the cheapest feasible branch."""
    st = _Structure(ws.H_T_wl, ws.perm_fixed, ws.s_fixed)
    if ws.n_b2 == 0:
        return _unconstrained(st)
    if ws.n_b2 > limit:
        raise ConfigurationError(f"{ws.n_b2} constrained rows exceed the enumeration limit {limit}")
    best, best_psi, branches = None, None, []
    for signs in itertools.product((-1.0, 1.0), repeat=ws.n_b2):
        psi = np.array(signs)
        res = _branch(st, ws.rows_b2, psi, c.ci_threshold)
        if res.status != "optimal":
            branches.append((signs, np.inf))
            continue
        x, xi, t = st.finish(res.t)
        branches.append((signs, xi))
        if best is None or xi < best[1]:
            best, best_psi = (x, xi, t), psi
    if best is None:
        return SlpSolution(np.full(st.x0.shape, np.nan), np.inf, np.zeros_like(st.x0),
                           np.zeros(ws.n_b2), "infeasible", branches=branches)
    x, xi, t = best
    return SlpSolution(x, xi, t, best_psi, "optimal", branches=branches)


def heuristic_signs(v0: np.ndarray) -> tuple[np.ndarray, int]:
    """``-sign(v0)`` with ``sign(0) = +1``; also returns how many zeros were resolved."""
    return np.where(v0 >= 0.0, -1.0, 1.0), int(np.count_nonzero(v0 == 0.0))


def slp_heuristic(ws: WlSystem, c: Constellation) -> SlpSolution:
    """Fix each constrained row's side to the one the unconstrained solution already leans to."""
    st = _Structure(ws.H_T_wl, ws.perm_fixed, ws.s_fixed)
    if ws.n_b2 == 0:
        return _unconstrained(st)
    psi, ties = heuristic_signs(st.Hn[ws.rows_b2] @ st.x0)
    res = _branch(st, ws.rows_b2, psi, c.ci_threshold)
    if res.status != "optimal":
        return SlpSolution(np.full(st.x0.shape, np.nan), np.inf, np.zeros_like(st.x0), psi,
                           "infeasible", sign_ties=ties)
    x, xi, t = st.finish(res.t)
    return SlpSolution(x, xi, t, psi, "heuristic", sign_ties=ties)


def hcm_slp(H_T: np.ndarray, s, c: Constellation, exact: bool = False,
            limit: int = EXACT_LIMIT) -> SlpSolution:
    """HCM-SLP for complex channel ``H_T`` and symbol indices ``s``.

    The heuristic falls back to enumeration when its single branch is infeasible
    and the enumeration is within ``limit``.
    """
    ws = wl_system(H_T, c, s)
    if exact:
        return slp_exact(ws, c, limit)
    sol = slp_heuristic(ws, c)
    if sol.status == "infeasible" and ws.n_b2 <= limit:
        sol = slp_exact(ws, c, limit)
    return sol


def zf_precode(H_T: np.ndarray, s) -> tuple[np.ndarray, float]:
    """``x = H^H (H H^H)^-1 s`` and its power."""
    H_T = np.atleast_2d(np.asarray(H_T, dtype=complex))
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    check_full_row_rank(H_T)
    x = H_T.conj().T @ np.linalg.solve(H_T @ H_T.conj().T, s)
    return x, float(np.vdot(x, x).real)


def qam_slp(H_T: np.ndarray, s, c: Constellation) -> SlpSolution:
    """Minimum-power precoder letting QAM edge/corner symbols drift outward.

    WL rows of interior directions are received exactly; each outward
    direction ``d`` of an edge or corner symbol only requires
    ``d * (received - symbol) >= 0``.
    """
    if c.outward is None:
        raise ConfigurationError("qam_slp needs a square QAM constellation")
    s = np.asarray(s, dtype=int)
    H_wl = wl_mat(H_T)
    s_wl = wl_vec(c.values[s])
    d = np.concatenate([c.outward[s, 0], c.outward[s, 1]]).astype(float)
    fixed = np.flatnonzero(d == 0)
    free = np.flatnonzero(d != 0)
    check_full_row_rank(H_wl)
    st = _Structure(H_wl, fixed, s_wl[fixed])
    if free.size == 0:
        return _unconstrained(st)
    H_r = st.Hn[free]
    dr = d[free]
    A = -dr[:, None] * (H_r @ st.P)
    b = dr * (H_r @ st.x0) - dr * s_wl[free]
    res = solve(LcqpProblem(st.P, A, b))
    if res.status != "optimal":
        # H_wl has full row rank, so the exact-ZF point is always feasible
        raise RuntimeError("QAM-SLP problem reported infeasible on a full-rank channel")
    x, xi, t = st.finish(res.t)
    return SlpSolution(x, xi, t, dr, "optimal")


def apply_transmit(H_T, x, xi: float, P_t: float, sigma2: float, rng: np.random.Generator):
    """Genie-rescaled observation ``H_T x + sqrt(xi / P_t) v`` with ``v ~ CN(0, sigma2 I)``.

    ``x`` is the unscaled precoder output (complex, or WL real of length 2M).
    With ``xi == 0`` nothing is transmitted and the raw noise ``v`` is returned.
    """
    H_T = np.atleast_2d(np.asarray(H_T, dtype=complex))
    x = np.asarray(x)
    if np.isrealobj(x) and x.size == 2 * H_T.shape[1]:
        x = from_wl_vec(x)
    K = H_T.shape[0]
    v = np.sqrt(sigma2 / 2.0) * (rng.standard_normal(K) + 1j * rng.standard_normal(K))
    if xi == 0:
        return v
    return H_T @ x + np.sqrt(xi / P_t) * v


def fixed_row_snr(xi: float, P_t: float, sigma2: float, avg_fixed_power: float) -> float:
    """Per-WL-row SNR of the rescaled receive; decreasing in ``xi``."""
    return 2.0 * P_t * avg_fixed_power / (xi * sigma2)
