"""Convex QPs of the form ``min ||P t||^2  s.t.  A t <= b`` with ``P`` an orthogonal projector.

The Hessian ``P^T P = P`` is singular whenever ``P`` is not the identity.
When the constraint rows live in the range of ``P`` (the SLP case, where
``A = A P``) the problem is solved exactly in an orthonormal basis of that
range, where it becomes a strictly convex minimum-norm problem.  Otherwise a
``1e-12`` ridge on the full variable is used.

The core is a primal active-set method started from a feasible point:
``t = 0`` when it is feasible, the minimum-norm solution of ``A t = b`` when
``A`` has full row rank, and an LP phase-1 point otherwise.  Constraint
additions and deletions follow Bland's lowest-index rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from hcmslp.errors import RANK_RTOL, IterationLimitError

RIDGE = 1e-12


@dataclass(eq=False)
class LcqpProblem:
    projector: np.ndarray
    constraint_matrix: np.ndarray
    constraint_rhs: np.ndarray
    feasibility_tol: float = 1e-8
    max_iterations: int = 500

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.projector, dtype=float))
        n = P.shape[0]
        A = np.asarray(self.constraint_matrix, dtype=float).reshape(-1, n)
        b = np.asarray(self.constraint_rhs, dtype=float).reshape(-1)
        if P.shape != (n, n):
            raise ValueError(f"projector must be square, got {P.shape}")
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"{A.shape[0]} constraint rows but {b.shape[0]} right-hand sides")
        scale = max(1.0, np.linalg.norm(P))
        if np.linalg.norm(P - P.T) > 1e-8 * scale or np.linalg.norm(P @ P - P) > 1e-8 * scale:
            raise ValueError("projector must be symmetric and idempotent")
        self.projector, self.constraint_matrix, self.constraint_rhs = P, A, b

    @property
    def n(self) -> int:
        return self.projector.shape[0]

    @property
    def n_constraints(self) -> int:
        return self.constraint_matrix.shape[0]


@dataclass(eq=False)
class LcqpResult:
    t: np.ndarray
    objective: float
    status: str  # "optimal" | "infeasible"
    multipliers: np.ndarray = field(repr=False)
    active: tuple[int, ...] = ()
    iterations: int = 0


def _range_basis(P: np.ndarray):
    vals, vecs = np.linalg.eigh(P)
    keep = vals > 0.5
    return vecs[:, keep], vecs[:, ~keep]


def _phase1_lp(C: np.ndarray, b: np.ndarray):
    """Minimize the worst violation ``s`` of ``C z <= b + s``; returns (z, s)."""
    nc, n = C.shape
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    A_ub = np.hstack([C, -np.ones((nc, 1))])
    bounds = [(None, None)] * n + [(-1.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise IterationLimitError(f"phase-1 LP failed: {res.message}")
    return res.x[:n], float(res.x[-1])


def _independent_subset(C: np.ndarray, candidates) -> list[int]:
    chosen: list[int] = []
    for i in candidates:
        trial = C[chosen + [i]]
        s = np.linalg.svd(trial, compute_uv=False)
        if s[-1] > RANK_RTOL * max(1.0, s[0]):
            chosen.append(i)
    return chosen


def _active_set(Hess, C, b, tol, max_iter):
    """Primal active-set for ``min 0.5 z'Hz  s.t.  C z <= b`` with H positive definite.

    Rows of ``C`` must have unit norm.  Returns (z, multipliers, working set,
    iterations) or ``None`` when the feasible set is empty.
    """
    nc, n = C.shape
    if np.all(b >= -tol):
        return np.zeros(n), np.zeros(nc), [], 0

    z = None
    s = np.linalg.svd(C, compute_uv=False) if nc <= n else None
    if s is not None and s[-1] > RANK_RTOL * s[0]:
        z = np.linalg.lstsq(C, b, rcond=None)[0]
        if np.max(C @ z - b) > tol:
            z = None
        else:
            work = list(range(nc))
    if z is None:
        z, worst = _phase1_lp(C, b)
        if worst > tol:
            return None
        resid = C @ z - b
        work = _independent_subset(C, [i for i in range(nc) if resid[i] >= -tol])

    for it in range(1, max_iter + 1):
        g = Hess @ z
        m = len(work)
        Cw = C[work]
        # null-space step: p lies exactly in ker(Cw), so a full working set gives p = 0
        if m:
            _, sv, Vt = np.linalg.svd(Cw)
            Z = Vt[int(np.sum(sv > RANK_RTOL * sv[0])):].T
        else:
            Z = np.eye(n)
        if Z.shape[1]:
            p = -Z @ np.linalg.solve(Z.T @ Hess @ Z, Z.T @ g)
        else:
            p = np.zeros(n)
        lam_w = np.linalg.lstsq(Cw.T, -(g + Hess @ p), rcond=None)[0] if m else np.zeros(0)

        if np.linalg.norm(p) <= 1e-10 * (1.0 + np.linalg.norm(z)):
            neg = [j for j in range(m) if lam_w[j] < -1e-10 * (1.0 + np.linalg.norm(g))]
            if not neg:
                lam = np.zeros(nc)
                lam[work] = np.maximum(lam_w, 0.0)
                return z, lam, work, it
            drop = min(neg, key=lambda j: work[j])
            work.pop(drop)
            continue

        Cp = C @ p
        alpha, block = 1.0, None
        for i in range(nc):
            if i in work or Cp[i] <= 1e-14 * np.linalg.norm(p):
                continue
            a_i = max(0.0, (b[i] - C[i] @ z) / Cp[i])
            if a_i < alpha:
                alpha, block = a_i, i
        z = z + alpha * p
        if block is not None:
            work.append(block)
            work.sort()
    raise IterationLimitError(f"active-set solver exceeded {max_iter} iterations")


def solve(p: LcqpProblem) -> LcqpResult:
    n, nc = p.n, p.n_constraints
    A, b, P = p.constraint_matrix, p.constraint_rhs, p.projector
    if nc == 0:
        return LcqpResult(np.zeros(n), 0.0, "optimal", np.zeros(0))

    Nb, Kb = _range_basis(P)
    a_norm = max(np.linalg.norm(A), 1e-300)
    on_range = Kb.shape[1] == 0 or np.linalg.norm(A @ Kb) <= 1e-12 * a_norm
    if on_range:
        C, to_t = A @ Nb, Nb
        Hess = 2.0 * np.eye(Nb.shape[1])
    else:
        C, to_t = A, np.eye(n)
        Hess = 2.0 * (P + RIDGE * np.eye(n))

    norms = np.linalg.norm(C, axis=1)
    live = norms > 1e-14 * max(1.0, norms.max(initial=0.0))
    if np.any(b[~live] < -p.feasibility_tol):
        return LcqpResult(np.zeros(n), np.inf, "infeasible", np.zeros(nc))
    rows = np.flatnonzero(live)
    Cn = C[rows] / norms[rows, None]
    bn = b[rows] / norms[rows]

    out = _active_set(Hess, Cn, bn, p.feasibility_tol, p.max_iterations)
    if out is None:
        return LcqpResult(np.zeros(n), np.inf, "infeasible", np.zeros(nc))
    z, lam_n, work, iters = out
    t = to_t @ z
    lam = np.zeros(nc)
    lam[rows] = lam_n / norms[rows]
    Pt = P @ t
    return LcqpResult(t, float(Pt @ Pt), "optimal", lam, tuple(int(rows[j]) for j in work), iters)


def is_feasible(p: LcqpProblem) -> bool:
    """Whether ``{t : A t <= b}`` is nonempty, decided by an LP phase-1 problem."""
    if p.n_constraints == 0:
        return True
    A, b = p.constraint_matrix, p.constraint_rhs
    norms = np.linalg.norm(A, axis=1)
    live = norms > 0
    if np.any(b[~live] < -p.feasibility_tol):
        return False
    if not np.any(live):
        return True
    _, worst = _phase1_lp(A[live] / norms[live, None], b[live] / norms[live])
    return worst <= p.feasibility_tol


def dump_problem(p: LcqpProblem, path) -> None:
    """Plain-text fixture: dimensions line, then projector, A (row-major) and b blocks."""
    lines = ["# lcqp v1", f"n {p.n} nc {p.n_constraints}", "projector"]
    lines += [" ".join(repr(float(v)) for v in row) for row in p.projector]
    lines.append("A")
    lines += [" ".join(repr(float(v)) for v in row) for row in p.constraint_matrix]
    lines.append("b")
    lines.append(" ".join(repr(float(v)) for v in p.constraint_rhs))
    Path(path).write_text("\n".join(lines) + "\n")


def load_problem(path) -> LcqpProblem:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    head = lines[0].split()
    if head[0] != "n" or head[2] != "nc":
        raise ValueError(f"{path}: bad header {lines[0]!r}")
    n, nc = int(head[1]), int(head[3])

    def block(start, rows):
        return np.array([[float(v) for v in lines[start + i].split()] for i in range(rows)])

    def expect(i, tag):
        if i >= len(lines) or lines[i] != tag:
            raise ValueError(f"{path}: expected {tag!r} block")

    expect(1, "projector")
    P = block(2, n)
    expect(2 + n, "A")
    A = block(3 + n, nc).reshape(nc, n)
    expect(3 + n + nc, "b")
    b = np.array([float(v) for v in lines[4 + n + nc].split()]) if nc else np.zeros(0)
    return LcqpProblem(P, A, b)
