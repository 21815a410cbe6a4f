"""Shatter functions, cap separability and the VC-type traversal bound.

A subset T of P is cut out by a cap iff some affine halfspace
``{y : <y, u> >= t}`` contains T and misses the rest, so realizability is a
linear separability question.  It is decided by a margin LP:

    maximize s  subject to  <x, u> - t >= s  (x in T),   t - <x, u> >= s  (x not in T),

with ``u`` in a box.  A positive margin certifies a cap; a zero optimum comes
with dual weights exhibiting a common point of conv(T) and conv(P \\ T),
which certifies that no cap exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .sphere import Cap, PointSet, Rng, UnitVector, sample_uniform, uniform_directions

MARGIN_TOL = 1e-9
CERT_TOL = 1e-9
MAX_SHATTER_POINTS = 22


def phi_sauer_shelah(d: int, m: int) -> int:
    """Sum of C(m, k) for k = 0..d, in exact integer arithmetic."""
    if d < 0 or m < 1:
        raise ValueError("need d >= 0 and m >= 1")
    return sum(math.comb(m, k) for k in range(min(d, m) + 1))


@dataclass
class Realization:
    status: str  # "true", "false" or "undecided"
    witness: Cap | None = None
    margin: float = float("nan")
    certificate: dict = field(default_factory=dict)

    @property
    def realized(self) -> bool | None:
        return {"true": True, "false": False}.get(self.status)


def _as_mask(T, m: int) -> np.ndarray:
    if isinstance(T, (int, np.integer)):
        if T < 0 or T >= 1 << m:
            raise ValueError("bitmask has bits outside the point set")
        return (int(T) >> np.arange(m)) & 1 == 1
    arr = np.asarray(T)
    if arr.dtype == bool:
        if arr.shape != (m,):
            raise ValueError("boolean mask must have one entry per point")
        return arr.copy()
    mask = np.zeros(m, dtype=bool)
    idx = arr.astype(int).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= m):
        raise ValueError("subset indices out of range")
    mask[idx] = True
    return mask


def _empty_cap(X: np.ndarray) -> Cap:
    # centre far from every point, radius half the gap
    cand = np.vstack([-X, uniform_directions(Rng(0).generator(), 256, X.shape[1] - 1)])
    gap = np.arccos(np.clip(np.max(cand @ X.T, axis=1), -1.0, 1.0))
    i = int(np.argmax(gap))
    return Cap(UnitVector(cand[i]), 0.5 * gap[i])


def cap_realizes(P: PointSet, T) -> Realization:
    """Decide whether some closed cap contains exactly the points in ``T``.

    ``T`` is a bitmask integer, a boolean mask or a collection of indices.
    """
    X = P.coords
    m, D = X.shape
    mask = _as_mask(T, m)
    if not mask.any():
        return Realization("true", _empty_cap(X), math.inf)
    if mask.all():
        return Realization("true", Cap(UnitVector(X[0]), math.pi), math.inf)
    sgn = np.where(mask, -1.0, 1.0)
    A = np.hstack([sgn[:, None] * X, -sgn[:, None], np.ones((m, 1))])
    c = np.zeros(D + 2)
    c[-1] = -1.0
    bounds = [(-1.0, 1.0)] * D + [(None, None), (None, 1.0)]
    res = linprog(c, A_ub=A, b_ub=np.zeros(m), bounds=bounds, method="highs")
    if res.status != 0:
        return Realization("undecided", certificate={"lp_status": int(res.status), "message": res.message})
    u, t, s = res.x[:D], res.x[D], res.x[D + 1]
    if s >= MARGIN_TOL:
        nu = np.linalg.norm(u)
        level = float(np.clip(t / nu, -1.0, 1.0))
        cap = Cap(UnitVector(u / nu), math.acos(level))
        inside = X @ cap.center.coords >= math.cos(cap.radius)
        if np.array_equal(inside, mask):
            return Realization("true", cap, float(s))
        return Realization("undecided", margin=float(s), certificate={"reason": "witness check failed"})
    w = np.abs(res.ineqlin.marginals)
    lam, mu = w[mask], w[~mask]
    if lam.sum() <= 0 or mu.sum() <= 0:
        return Realization("undecided", margin=float(s), certificate={"reason": "degenerate dual"})
    lam, mu = lam / lam.sum(), mu / mu.sum()
    point = lam @ X[mask]
    gap = float(np.linalg.norm(point - mu @ X[~mask]))
    cert = {"lambda": lam.tolist(), "mu": mu.tolist(), "residual": gap}
    if gap <= CERT_TOL:
        return Realization("false", margin=float(s), certificate=cert)
    return Realization("undecided", margin=float(s), certificate=cert)


def _sweep_masks(X: np.ndarray, directions: int, rng: Rng) -> set[int]:
    """Subsets cut out by random halfspaces with a clear margin; a cheap certified pre-pass."""
    m, D = X.shape
    U = uniform_directions(rng.generator(), directions, D - 1)
    G = U @ X.T
    order = np.argsort(-G, axis=1)
    Gs = np.take_along_axis(G, order, axis=1)
    weights = np.left_shift(1, order.astype(np.int64))
    prefix = np.cumsum(weights, axis=1)
    ok = (Gs[:, :-1] - Gs[:, 1:]) > 4 * MARGIN_TOL
    return set(prefix[:, :-1][ok].tolist())


@dataclass
class ShatterResult:
    count: int
    undecided: int
    m: int
    realized: list[int] = field(default_factory=list)

    @property
    def shattered(self) -> bool:
        return self.count == 1 << self.m


def shatter_details(P: PointSet, *, stop_at_first_miss: bool = False, sweep: int = 4096) -> ShatterResult:
    """Exhaustive cap realizability over all 2^m subsets.

    A subset and its complement are realized together (flip the halfspace),
    so only masks containing point 0 are decided.  Random halfspace sweeps
    certify most realizable masks before any LP is solved.
    """
    X = P.coords
    m = len(X)
    if m > MAX_SHATTER_POINTS:
        raise ValueError(f"2^{m} subsets exceed the enumeration budget (m <= {MAX_SHATTER_POINTS})")
    full = (1 << m) - 1
    known = _sweep_masks(X, sweep, Rng(m, 7)) if m > 1 else set()
    realized, undecided = [], 0
    for T in range(1 << (m - 1)):
        T = 2 * T + 1  # masks with bit 0 set
        if T in known or (full ^ T) in known or T == full:
            status = "true"
        else:
            status = cap_realizes(P, T).status
        if status == "true":
            realized += [T, full ^ T]
        elif status == "undecided":
            undecided += 2
        elif stop_at_first_miss:
            break
    return ShatterResult(len(realized), undecided, m, sorted(realized))


def empirical_shatter(P: PointSet) -> int:
    """Number of subsets of P realized by caps (undecided subsets are not counted)."""
    return shatter_details(P).count


def vc_lower_bound_search(d: int, k: int, trials: int, rng: Rng) -> PointSet | None:
    """First random k-point set on S^d shattered by caps, or None.

    A miss is evidence, not proof, that no k points can be shattered.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    for i in range(trials):
        P = sample_uniform(d, k, rng.child(i))
        res = shatter_details(P, stop_at_first_miss=True)
        if res.shattered:
            return P
    return None


def traversal_log_bound(m: int, d: int, eps: float) -> float:
    """Natural log of 2 (2em/d)^d 2^(-eps m / 2)."""
    if d < 1 or m < d:
        raise ValueError("need m >= d >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.log(2.0) + d * math.log(2 * math.e * m / d) - eps * m / 2 * math.log(2.0)


def vc_traversal_bound(m: int, d: int, eps: float) -> float:
    """Probability bound that m i.i.d. points miss some set of measure > eps.

    Not clipped at 1; see :func:`traversal_informative`.
    """
    lb = traversal_log_bound(m, d, eps)
    return math.exp(lb) if lb < 700 else math.inf


def traversal_informative(m: int, d: int, eps: float) -> bool:
    return traversal_log_bound(m, d, eps) < 0.0


def traversal_epsilon(m: int, d: int) -> float:
    """The eps at which the traversal bound drops below one: (3/ln 2)(d/m) ln(2em/d)."""
    return 3.0 / math.log(2.0) * d / m * math.log(2 * math.e * m / d)
