"""Independent reference solvers used by unit and acceptance tests."""

import itertools

import numpy as np


def face_branch(ws, psi, thr):
    """Branch optimum of ``min |x|^2`` s.t. fixed rows exact and ``psi * (H_b2 x) + thr <= 0``.

    For a min-norm problem over a polyhedron the optimum is the min-norm point
    of the affine hull of its active face, and every feasible face point is no
    better, so the best feasible face point is the optimum.
    """
    best = np.inf
    n = ws.n_b2
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            S = list(S)
            A = np.vstack([ws.H_fixed, ws.H_b2[S]])
            b = np.concatenate([ws.s_fixed, -psi[S] * thr])
            if np.linalg.matrix_rank(A) < A.shape[0]:
                continue
            x = np.linalg.lstsq(A, b, rcond=None)[0]
            if np.all(psi * (ws.H_b2 @ x) + thr <= 1e-9):
                best = min(best, float(x @ x))
    return best


def enumerate_branches(ws, thr):
    return {signs: face_branch(ws, np.array(signs), thr)
            for signs in itertools.product((-1.0, 1.0), repeat=ws.n_b2)}


def grid_min_norm_2d(A, b, step=1e-3, span=20.0, coarse=1e-2):
    """Grid estimates of ``min |t|^2`` over ``A t <= b`` in two variables.

    Returns ``(fine, coarse_min)``: ``fine`` walks every constraint line with
    ``step`` and adds all vertices and the origin; ``coarse_min`` is a plain 2-D
    grid over the box ``[-span, span]^2`` that bounds the true minimum from above.
    """
    cands = [np.zeros(2)]
    s = np.arange(-span, span, step)
    for i in range(len(b)):
        a = A[i]
        foot = a * b[i] / (a @ a)
        d = np.array([-a[1], a[0]]) / np.linalg.norm(a)
        cands.append(foot)
        cands.extend(foot + s[:, None] * d)
        for j in range(i + 1, len(b)):
            M = A[[i, j]]
            if abs(np.linalg.det(M)) > 1e-12:
                cands.append(np.linalg.solve(M, b[[i, j]]))
    cands = np.array(cands)
    ok = np.all(cands @ A.T <= b + 1e-9, axis=1)
    fine = float(np.min(np.sum(cands[ok] ** 2, axis=1)))

    g = np.arange(-span, span + coarse, coarse)
    best = np.inf
    for row in g:
        pts = np.column_stack([np.full(g.size, row), g])
        ok = np.all(pts @ A.T <= b, axis=1)
        if ok.any():
            best = min(best, float(np.min(np.sum(pts[ok] ** 2, axis=1))))
    return fine, best
