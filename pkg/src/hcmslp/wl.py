"""Widely-linear (real-composite) forms and the fixed/variable row split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hcmslp.constellation import Constellation
from hcmslp.errors import check_full_row_rank


def wl_vec(a) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    return np.concatenate([a.real, a.imag])


def wl_mat(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def from_wl_vec(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    return v[:n] + 1j * v[n:]


@dataclass(frozen=True, eq=False)
class WlSystem:
    H_T_wl: np.ndarray  # 2K x 2M
    perm_fixed: np.ndarray  # WL row indices carried exactly
    perm_variable: np.ndarray  # WL row indices left to the precoder
    rows_b2: np.ndarray  # subset of perm_variable that must clear the CI threshold
    s_fixed: np.ndarray  # WL fixed-part values, aligned with perm_fixed

    @property
    def n_b2(self) -> int:
        return int(self.rows_b2.size)

    @property
    def H_fixed(self) -> np.ndarray:
        return self.H_T_wl[self.perm_fixed]

    @property
    def H_b2(self) -> np.ndarray:
        return self.H_T_wl[self.rows_b2]


def build_permutation(c: Constellation, s):
    """Split the WL rows of symbol vector ``s`` (indices into ``c``) into fixed and variable.

    Returns ``(perm_fixed, perm_variable, rows_b2, s_fixed)``.  Row ``k``
    (real part of user ``k``) is always fixed; row ``K + k`` is fixed only for
    QAM-SC symbols.
    """
    s = np.asarray(s, dtype=int)
    K = s.size
    codes = c.class_codes[s]
    vals = c.values[s]
    users = np.arange(K)
    a1 = codes == 1
    perm_fixed = np.concatenate([users, K + users[a1]])
    perm_variable = K + users[~a1]
    rows_b2 = K + users[codes == 2]
    s_fixed = np.concatenate([vals.real, vals.imag[a1]])
    return perm_fixed, perm_variable, rows_b2, s_fixed


def wl_system(H_T: np.ndarray, c: Constellation, s) -> WlSystem:
    pf, pv, rb2, sf = build_permutation(c, s)
    return WlSystem(wl_mat(H_T), pf, pv, rb2, sf)


def pinv_and_projector(H_f: np.ndarray):
    """Right pseudo-inverse ``H_f^T (H_f H_f^T)^-1`` and null-space projector ``I - H_f^+ H_f``."""
    H_f = np.atleast_2d(np.asarray(H_f, dtype=float))
    check_full_row_rank(H_f)
    n = H_f.shape[1]
    if H_f.shape[0] == 0:
        return np.zeros((n, 0)), np.eye(n)
    pinv = np.linalg.solve(H_f @ H_f.T, H_f).T
    P = np.eye(n) - pinv @ H_f
    # symmetrize away round-off so the projector validates cleanly downstream
    return pinv, 0.5 * (P + P.T)
