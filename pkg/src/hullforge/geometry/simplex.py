"""
Small dense simplex for ``max c.x  s.t.  A x <= b`` with free ``x``.

The method walks vertices of the polyhedron. A basis is a list of ``d``
linearly independent constraint rows held tight. The leaving row is the
one with the most negative multiplier (ties to the lowest row index) and
the entering row comes from the ratio test, where ties go to the largest
pivot element for stability. After a streak of degenerate pivots both
choices switch to Bland's lowest-index rule, which rules out cycling.
"""

from __future__ import annotations

import numpy as np

from ..errors import Infeasible, NonConvergence, Unbounded

PIVOT_TOL = 1e-9
DUAL_TOL = 1e-12
FEAS_TOL = 1e-9
MAX_PIVOTS = 50_000
DEGENERATE_STREAK = 50
REFRESH = 32


def _independent(rows: np.ndarray) -> bool:
    if rows.shape[0] == 0:
        return True
    s = np.linalg.svd(rows, compute_uv=False)
    return s[-1] > 1e-10 * max(1.0, s[0])


def _null_space(rows: np.ndarray, d: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return np.eye(d)
    _, _, vt = np.linalg.svd(rows)
    return vt[rows.shape[0]:].T


def _ratio_test(A, b, x, direction, exclude):
    """Step length and blocking row for moving from ``x`` along ``direction``."""
    Ad = A @ direction
    scale = np.linalg.norm(direction)
    mask = Ad > PIVOT_TOL * max(scale, 1e-300)
    if exclude:
        mask[list(exclude)] = False
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return None, None
    slack = np.maximum(b[idx] - A[idx] @ x, 0.0)
    ratios = slack / Ad[idx]
    tmin = ratios.min()
    # lowest index among (near-)ties
    tie = ratios <= tmin + 1e-14 * max(1.0, tmin)
    return float(tmin), int(idx[np.argmax(tie)])


def _crossover(A, b, c, x):
    """From a feasible point, reach a vertex without decreasing c.x.

    Returns (A, b, x, basis); A and b gain two pinning rows per lineality
    direction encountered (a line through the polyhedron orthogonal to c).
    """
    m, d = A.shape
    slack = b - A @ x
    W: list[int] = []
    for i in np.nonzero(slack <= FEAS_TOL)[0]:
        if len(W) == d:
            break
        if _independent(A[W + [int(i)]]):
            W.append(int(i))
    while len(W) < d:
        N = _null_space(A[W], d)
        direction = N @ (N.T @ c)
        free = np.linalg.norm(direction) <= 1e-12 * max(1.0, np.linalg.norm(c))
        if free:
            direction = N[:, 0]
        t, i = _ratio_test(A, b, x, direction, W)
        if t is None:
            if not free:
                raise Unbounded("objective is unbounded over the polyhedron")
            direction = -direction
            t, i = _ratio_test(A, b, x, direction, W)
        if t is None:
            # a line lies in the polyhedron and c is orthogonal to it: pin it
            val = direction @ x
            A = np.vstack([A, direction, -direction])
            b = np.concatenate([b, [val, -val]])
            W.append(A.shape[0] - 2)
            continue
        x = x + t * direction
        W.append(i)
    return A, b, x, W


def _iterate(A, b, c, basis):
    """Run simplex pivots from a feasible vertex basis until optimal.

    The basis inverse is updated by Sherman-Morrison after each pivot and
    refreshed from scratch every ``REFRESH`` pivots.
    """
    B = np.array(basis, dtype=int)
    Binv = np.linalg.inv(A[B])
    x = Binv @ b[B]
    cscale = max(1.0, float(np.abs(c).max()))
    dual_tol = DUAL_TOL * cscale
    bland = False
    streak = 0
    for it in range(1, MAX_PIVOTS + 1):
        lam = c @ Binv
        if lam.min() >= -dual_tol:
            x = np.linalg.solve(A[B], b[B])
            return float(c @ x), x, B.tolist(), np.linalg.solve(A[B].T, c)
        neg = np.flatnonzero(lam < -dual_tol)
        if bland:
            j = int(neg[np.argmin(B[neg])])
        else:
            cand = neg[lam[neg] <= lam[neg].min() + 1e-15 * cscale]
            j = int(cand[np.argmin(B[cand])])
        dx = -Binv[:, j]
        Ad = A @ dx
        Ad[B] = 0.0
        idx = np.flatnonzero(Ad > PIVOT_TOL * np.linalg.norm(dx))
        if idx.size == 0:
            raise Unbounded("objective is unbounded over the polyhedron")
        slack = b[idx] - A[idx] @ x
        np.maximum(slack, 0.0, out=slack)
        ratios = slack / Ad[idx]
        t = ratios.min()
        tie = ratios <= t + 1e-14 * max(1.0, t)
        if bland:
            i = int(idx[np.argmax(tie)])
        else:
            i = int(idx[tie][np.argmax(Ad[idx][tie])])
        if t <= 1e-14:
            streak += 1
            bland = bland or streak >= DEGENERATE_STREAK
        else:
            streak = 0
        delta = A[i] - A[B[j]]
        row = delta @ Binv
        col = Binv[:, j].copy()
        B[j] = i
        if it % REFRESH == 0 or abs(1.0 + row[j]) < 1e-8:
            Binv = np.linalg.inv(A[B])
            x = Binv @ b[B]
        else:
            Binv -= np.outer(col, row) / (1.0 + row[j])
            x = x + t * dx
    raise NonConvergence("simplex exceeded its pivot cap")


def _phase_one(A, b):
    """A feasible point of ``A x <= b`` via the auxiliary problem max -s."""
    m, d = A.shape
    Aa = np.zeros((m + 1, d + 1))
    Aa[:m, :d] = A
    Aa[:m, d] = -1.0
    Aa[m, d] = -1.0
    ba = np.concatenate([b, [0.0]])
    ca = np.zeros(d + 1)
    ca[d] = -1.0
    start = np.zeros(d + 1)
    start[d] = max(0.0, float(np.max(-b))) + 1.0
    Aa, ba, z, W = _crossover(Aa, ba, ca, start)
    _, z, _, _ = _iterate(Aa, ba, ca, W)
    bscale = max(1.0, float(np.abs(b).max()))
    if z[d] > FEAS_TOL * bscale:
        raise Infeasible("halfspace intersection is empty")
    return z[:d]


def lp_max(A, b, c, basis=None):
    """Maximize ``c.x`` over ``{x : A x <= b}``.

    Parameters
    ----------
    A : (m, d) array
    b : (m,) array
    c : (d,) array
    basis : optional list of d row indices describing a feasible vertex
        (a warm start, e.g. from a previous solve on the same polyhedron).

    Returns
    -------
    value, x, basis, multipliers
        ``basis`` is None if the polyhedron needed pinning rows (it has
        no vertices), since then it does not index rows of ``A``.

    Raises
    ------
    Unbounded, Infeasible, NonConvergence
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, d = A.shape
    if basis is not None:
        B = list(basis)
        if len(B) == d:
            try:
                x = np.linalg.solve(A[B], b[B])
            except np.linalg.LinAlgError:
                x = None
            if x is not None and np.all(np.isfinite(x)):
                viol = float(np.max(A @ x - b))
                if viol <= FEAS_TOL * max(1.0, float(np.abs(b).max())):
                    return _iterate(A, b, c, B)
    x0 = _phase_one(A, b)
    A2, b2, _, W = _crossover(A, b, c, x0)
    value, x, B, lam = _iterate(A2, b2, c, W)
    if A2.shape[0] != m:
        return value, x, None, lam
    return value, x, B, lam
