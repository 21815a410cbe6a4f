"""Cap dispersion of a point set: exact, multistart-minimax and Monte Carlo.

Everything rests on the support function ``h(u) = max_i <x_i, u>``.  The
largest empty cap is centred at the minimizer ``u*`` of ``h`` over the unit
sphere and has radius ``phi(P) = arccos h(u*)``; the dispersion is then
``V_d(phi(P))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .sphere import Cap, Lens, PointSet, Rng, UnitVector, uniform_directions
from .volume import cap_volume

RANK_TOL = 1e-10
DEFAULT_MAX_SUBSETS = 10**7
AUTO_ENUMERATE_LIMIT = 20_000
METHODS = ("exact_enum", "minimax_opt", "monte_carlo")


@dataclass
class DispersionResult:
    value: float
    covering_radius: float | None
    witness: Cap | Lens
    method: str
    certified: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_value(self) -> float:
        return self.diagnostics.get("n", float("nan")) * self.value

    def to_dict(self) -> dict:
        if isinstance(self.witness, Lens):
            wit = {"type": "lens", "caps": [_cap_dict(c) for c in self.witness.caps]}
        else:
            wit = {"type": "cap", **_cap_dict(self.witness)}
        return {
            "value": self.value,
            "covering_radius": self.covering_radius,
            "witness": wit,
            "method": self.method,
            "certified": self.certified,
            "diagnostics": self.diagnostics,
        }


def _cap_dict(c: Cap) -> dict:
    return {"center": c.center.coords.tolist(), "radius": c.radius}


def support_function(P, U: np.ndarray) -> np.ndarray:
    """``max_i <x_i, u>`` for each row ``u`` of ``U``."""
    X = P.coords if isinstance(P, PointSet) else np.asarray(P)
    return np.max(np.atleast_2d(U) @ X.T, axis=1)


def _result(P: PointSet, u: np.ndarray, h: float, method: str, certified: bool, diag: dict) -> DispersionResult:
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    # arccos is ill-conditioned near h = -1; measure from the nearest point instead
    i = int(np.argmax(P.coords @ u))
    x = P.coords[i]
    phi = float(2 * np.arctan2(np.linalg.norm(x - u), np.linalg.norm(x + u)))
    diag = {"n": P.n, "d": P.d, **diag}
    return DispersionResult(cap_volume(P.d, phi), phi, Cap(UnitVector(u), phi), method, certified, diag)


# ---------------------------------------------------------------- candidates

def _combinations(n: int, k: int, chunk: int):
    it = itertools.combinations(range(n), k)
    while True:
        block = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, chunk)), dtype=np.intp)
        if block.size == 0:
            return
        yield block.reshape(-1, k)


def hyperplane_normals(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals of the hyperplanes through batches of d+1 points in R^{d+1}.

    ``pts`` has shape ``(B, D, D)``.  The normal is the generalized cross
    product of the edge vectors (cofactor expansion).  Returns ``(normals,
    ok)`` where ``ok`` flags batches whose edge vectors are of full rank
    relative to ``RANK_TOL``.
    """
    B, D, _ = pts.shape
    edges = pts[:, 1:, :] - pts[:, :1, :]
    if D == 2:
        nrm = np.stack([edges[:, 0, 1], -edges[:, 0, 0]], axis=1)
    else:
        cols = np.arange(D)
        nrm = np.empty((B, D))
        for j in range(D):
            minor = edges[:, :, cols != j]
            nrm[:, j] = (-1) ** j * np.linalg.det(minor)
    size = np.linalg.norm(nrm, axis=1)
    scale = np.prod(np.linalg.norm(edges, axis=2), axis=1)
    ok = size > RANK_TOL * np.where(scale > 0, scale, np.inf)
    out = np.zeros_like(nrm)
    out[ok] = nrm[ok] / size[ok, None]
    return out, ok


def _affine_feet(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest point to the origin in conv(S) when it lies in the relative interior.

    ``pts`` has shape ``(B, k, D)`` with ``k <= d``.  Returns ``(w, ok)``;
    ``ok`` is false for rank-deficient subsets and for subsets whose
    affine foot point falls outside the simplex (those optima belong to a
    smaller face, which is enumerated separately).
    """
    B, k, D = pts.shape
    if k == 1:
        return pts[:, 0, :], np.ones(B, dtype=bool)
    x0 = pts[:, 0, :]
    E = pts[:, 1:, :] - x0[:, None, :]
    G = E @ np.swapaxes(E, 1, 2)
    rhs = -(E @ x0[:, :, None])[:, :, 0]
    tr = np.trace(G, axis1=1, axis2=2)
    # active-set solve on the face: equality-constrained least squares
    ok = np.abs(np.linalg.det(G)) > (RANK_TOL * np.maximum(tr, 1e-300)) ** (k - 1)
    lam = np.zeros((B, k - 1))
    if ok.any():
        lam[ok] = np.linalg.solve(G[ok], rhs[ok][:, :, None])[:, :, 0]
    bary = np.concatenate([1.0 - lam.sum(axis=1, keepdims=True), lam], axis=1)
    ok &= np.all(bary >= -1e-12, axis=1)
    w = x0 + (lam[:, None, :] @ E)[:, 0, :]
    return w, ok


def min_norm_point(S: np.ndarray) -> np.ndarray:
    """Exact minimum-norm point of conv(S) for a handful of points.

    Enumerates faces of the point set (every subset is an active-set guess),
    keeps the feasible stationary points and returns the shortest one.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    best, best_norm = None, math.inf
    for k in range(1, len(S) + 1):
        for sub in itertools.combinations(range(len(S)), k):
            w, ok = _affine_feet(S[list(sub)][None])
            if ok[0] and np.linalg.norm(w[0]) < best_norm - 1e-15:
                best, best_norm = w[0], float(np.linalg.norm(w[0]))
    return best


def _score(X: np.ndarray, U: np.ndarray, best: tuple[float, np.ndarray | None]):
    if len(U) == 0:
        return best
    h = np.max(U @ X.T, axis=1)
    i = int(np.argmin(h))
    if h[i] < best[0]:
        return float(h[i]), U[i].copy()
    return best


def _orthogonal_complement_candidate(X: np.ndarray) -> np.ndarray | None:
    _, s, Vt = np.linalg.svd(X, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    if rank < X.shape[1]:
        return Vt[-1]
    return None


def count_subsets(n: int, d: int) -> int:
    return math.comb(n, d + 1)


def covering_radius_exact(P: PointSet, *, candidates: str = "enumerate",
                          max_subsets: int = DEFAULT_MAX_SUBSETS, chunk: int = 65536,
                          auto_limit: int = AUTO_ENUMERATE_LIMIT) -> DispersionResult:
    """Certified covering radius by candidate enumeration.

    Candidates for the minimizer of the support function:

    (a) for every (d+1)-subset, both unit normals of the hyperplane through it;
    (b) for every subset of size at most d, the direction ``-w/|w|`` where ``w``
        is the minimum-norm point of its convex hull (kept when ``w`` lies in
        the relative interior; boundary optima come from smaller subsets);
    (c) when the points span a proper linear subspace, a normal to it.

    Each candidate is scored by the support function and the minimum wins.
    ``candidates="hull"`` restricts family (a) to facets of the convex hull
    (valid when the origin is interior, which it checks, falling back to
    enumeration otherwise), and ``"auto"`` enumerates up to ``auto_limit``
    subsets and uses the hull beyond.
    """
    X = P.coords
    n, D = X.shape
    d = D - 1
    if candidates == "auto":
        candidates = "enumerate" if count_subsets(n, d) <= auto_limit else "hull"
    if candidates == "hull":
        res = _covering_radius_hull(P)
        if res is not None:
            return res
        candidates = "enumerate"
    if candidates != "enumerate":
        raise ValueError(f"unknown candidate family {candidates!r}")
    if count_subsets(n, d) > max_subsets:
        raise ValueError(
            f"C({n}, {D}) = {count_subsets(n, d)} subsets exceeds the budget {max_subsets}; "
            "use candidates='hull' or covering_radius_opt")
    best: tuple[float, np.ndarray | None] = (math.inf, None)
    examined = degenerate = scored = 0
    if n >= D:
        for idx in _combinations(n, D, chunk):
            nrm, ok = hyperplane_normals(X[idx])
            examined += len(idx)
            degenerate += int((~ok).sum())
            U = nrm[ok]
            U = np.concatenate([U, -U])
            scored += len(U)
            best = _score(X, U, best)
    for k in range(1, min(d, n) + 1):
        for idx in _combinations(n, k, chunk):
            w, ok = _affine_feet(X[idx])
            examined += len(idx)
            norms = np.linalg.norm(w, axis=1)
            ok &= norms > 1e-14
            U = -w[ok] / norms[ok, None]
            scored += len(U)
            best = _score(X, U, best)
    extra = _orthogonal_complement_candidate(X)
    if extra is not None:
        best = _score(X, np.stack([extra, -extra]), best)
        scored += 2
    if best[1] is None:
        raise ValueError("degenerate configuration: no admissible candidate direction")
    diag = {"candidate_family": "enumerate", "subsets_examined": examined,
            "degenerate_skipped": degenerate, "candidates_scored": scored}
    return _result(P, best[1], best[0], "exact_enum", True, diag)


def empty_cap_centers(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centres and support levels of the locally largest empty caps.

    These are the outward facet normals of conv(X) with level
    ``cos(radius)`` equal to the facet's distance from the origin.  Falls back
    to the enumeration candidates when the hull is degenerate.
    """
    X = np.asarray(X, dtype=float)
    try:
        hull = ConvexHull(X)
        normals, levels = hull.equations[:, :-1], -hull.equations[:, -1]
        if levels.min() > 1e-12:
            return normals, levels
    except (QhullError, ValueError):
        pass
    res = covering_radius_exact(PointSet(X))
    u = res.witness.center.coords[None, :]
    return u, support_function(X, u)


def _covering_radius_hull(P: PointSet) -> DispersionResult | None:
    X = P.coords
    try:
        hull = ConvexHull(X)
    except (QhullError, ValueError):
        return None
    normals, offsets = hull.equations[:, :-1], -hull.equations[:, -1]
    if offsets.min() <= 1e-12:
        return None  # origin on or outside the hull; the facet family is incomplete
    order = np.argsort(offsets)[:16]
    U = normals[order]
    h = np.max(U @ X.T, axis=1)
    i = int(np.argmin(h))
    diag = {"candidate_family": "hull_facets", "facets": len(offsets)}
    return _result(P, U[i], float(h[i]), "exact_enum", True, diag)


# ---------------------------------------------------------------- multistart

def _polish(X: np.ndarray, u: np.ndarray, extra: int = 3) -> tuple[float, np.ndarray]:
    """Snap ``u`` to the best vertex spanned by its near-active points.

    The ``D + extra`` points with the largest inner product with ``u`` are
    treated as the candidate active set; every subset of it is tried with the
    enumeration candidates, so a near-tie with a non-active point cannot pull
    the polish onto the wrong vertex.
    """
    D = X.shape[1]
    g = X @ u
    best = (float(g.max()), u)
    top = np.argsort(-g)[:min(len(X), D + extra)]
    S = X[top]
    k = len(S)
    if k >= D:
        idx = np.array(list(itertools.combinations(range(k), D)))
        nrm, ok = hyperplane_normals(S[idx])
        best = _score(X, np.concatenate([nrm[ok], -nrm[ok]]), best)
    for m in range(1, min(D - 1, k) + 1):
        idx = np.array(list(itertools.combinations(range(k), m)))
        w, ok = _affine_feet(S[idx])
        norms = np.linalg.norm(w, axis=1)
        ok &= norms > 1e-14
        best = _score(X, -w[ok] / norms[ok, None], best)
    return best


def covering_radius_opt(P: PointSet, restarts: int = 32, rng: Rng | None = None, *,
                        iterations: int = 2000, step: float = 0.5, pool: int = 32,
                        stable_window: int = 25) -> DispersionResult:
    """Multistart projected subgradient descent on the support function.

    Restart ``r`` draws ``pool`` uniform directions from stream
    ``rng.child(r)`` and starts from the best of them, so the restart sets for
    ``R`` and ``2R`` restarts are nested.  Steps are ``step / sqrt(t)``; when a
    restart's active set has been stable for ``stable_window`` iterations it is
    polished by solving the equal-inner-product system on that set.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = rng or Rng()
    X = P.coords
    n, D = X.shape
    starts = []
    for r in range(restarts):
        C = uniform_directions(rng.child(r).generator(), pool, D - 1)
        starts.append(C[np.argmin(support_function(X, C))])
    U = np.array(starts)
    # rowwise products keep each restart's trajectory independent of the batch
    G = np.einsum("rk,nk->rn", U, X)
    best_h = G.max(axis=1)
    best_u = U.copy()
    last_active = np.full(restarts, -1)
    stable = np.zeros(restarts, dtype=int)
    polished = np.zeros(restarts, dtype=bool)
    polish_calls = 0
    it = 0
    for it in range(1, iterations + 1):
        live = np.flatnonzero(~polished)
        Ul = U[live]
        G = np.einsum("rk,nk->rn", Ul, X)
        imax = np.argmax(G, axis=1)
        h = G[np.arange(len(live)), imax]
        better = h < best_h[live]
        best_h[live[better]] = h[better]
        best_u[live[better]] = Ul[better]
        # active set fingerprint: indices within two step lengths of the max
        tol = 2 * step / math.sqrt(it)
        act = (G >= h[:, None] - tol)
        fp = act @ (np.arange(n) % 61 + 1) + 1000 * act.sum(axis=1)
        stable[live] = np.where(fp == last_active[live], stable[live] + 1, 0)
        last_active[live] = fp
        # a polished restart is frozen, so its result does not depend on the others
        for r in live[stable[live] >= stable_window]:
            hp, up = _polish(X, best_u[r])
            polish_calls += 1
            if hp < best_h[r]:
                best_h[r], best_u[r] = hp, up
            polished[r] = True
        if polished.all():
            break
        g = X[imax]
        tang = g - np.sum(g * Ul, axis=1, keepdims=True) * Ul
        Ul = Ul - (step / math.sqrt(it)) * tang
        U[live] = Ul / np.linalg.norm(Ul, axis=1, keepdims=True)
    for r in np.flatnonzero(~polished):
        hp, up = _polish(X, best_u[r])
        polish_calls += 1
        if hp < best_h[r]:
            best_h[r], best_u[r] = hp, up
    i = int(np.argmin(best_h))
    diag = {"restarts": restarts, "iterations": it, "polish_calls": polish_calls,
            "unconverged_restarts": int((~polished).sum())}
    return _result(P, best_u[i], float(best_h[i]), "minimax_opt", False, diag)


# ---------------------------------------------------------------- Monte Carlo

def dispersion_monte_carlo(P: PointSet, samples: int, rng: Rng | None = None, *,
                           batch: int = 65536) -> DispersionResult:
    """Lower estimate of the covering radius from uniform sample directions.

    Samples are drawn in fixed-size batches from one stream, so a run with more
    samples extends the sample sequence of a shorter run.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = rng or Rng()
    gen = rng.generator()
    X = P.coords
    best = (math.inf, None)
    done = 0
    while done < samples:
        B = min(batch, samples - done)
        Y = uniform_directions(gen, batch, P.d)[:B]
        best = _score(X, Y, best)
        done += B
    return _result(P, best[1], best[0], "monte_carlo", False, {"samples": samples})


def covering_radius(P: PointSet, method: str = "exact", *, restarts: int = 32,
                    samples: int = 100_000, rng: Rng | None = None) -> DispersionResult:
    if method in ("exact", "exact_enum"):
        return covering_radius_exact(P, candidates="auto")
    if method in ("opt", "minimax_opt"):
        return covering_radius_opt(P, restarts, rng)
    if method in ("mc", "monte_carlo"):
        return dispersion_monte_carlo(P, samples, rng)
    raise ValueError(f"unknown method {method!r}")
