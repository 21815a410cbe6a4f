"""Named point configurations: simplices, cross-polytopes, block simplices, greedy nets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .sphere import PointSet, Rng, sample_uniform, uniform_directions
from .io import load_pointset
from .volume import cap_volume

KINDS = ("simplex", "cross_polytope", "block_simplices", "random_uniform", "greedy_net", "from_file")


def _helmert_columns(m: int) -> np.ndarray:
    """Columns of the (m-1) x m Helmert matrix, as m rows in R^{m-1}.

    The rows of the Helmert matrix are an orthonormal basis of the hyperplane
    orthogonal to (1, ..., 1), so the columns are the centered standard basis
    vectors written in that basis.
    """
    H = np.zeros((m - 1, m))
    for k in range(1, m):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -float(k)
        H[k - 1] /= math.sqrt(k * (k + 1))
    return H.T


def regular_simplex(d: int) -> PointSet:
    """The d+2 vertices of a regular simplex inscribed in S^d (``d = 0`` gives ``{+1, -1}``)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    X = _helmert_columns(d + 2)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    if d == 0:
        return X  # raw array; S^0 is not a PointSet
    return PointSet(X, label="simplex")


def cross_polytope(d: int) -> PointSet:
    """The 2(d+1) points ``+-e_i``, ordered ``e_1, -e_1, e_2, -e_2, ...``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    I = np.eye(d + 1)
    X = np.empty((2 * (d + 1), d + 1))
    X[0::2] = I
    X[1::2] = -I
    return PointSet(X, label="cross_polytope")


def block_sizes(d: int, k: int) -> list[int]:
    q, r = divmod(d + 1, k)
    return [q + 1] * r + [q] * (k - r)


def block_simplices(d: int, n: int) -> PointSet:
    """Union of regular simplices inscribed in k = n - d - 1 orthogonal coordinate blocks.

    Block sizes are ceil((d+1)/k) for the leading blocks and floor((d+1)/k) for
    the rest; k = 1 is the regular simplex and k = d+1 the cross-polytope.
    """
    if not (d + 2 <= n <= 2 * d + 2):
        raise ValueError(f"block construction needs d+2 <= n <= 2d+2, got d={d}, n={n}")
    k = n - d - 1
    rows = []
    start = 0
    for size in block_sizes(d, k):
        simplex = regular_simplex(size - 1)
        simplex = simplex.coords if isinstance(simplex, PointSet) else simplex
        block = np.zeros((size + 1, d + 1))
        block[:, start:start + size] = simplex
        rows.append(block)
        start += size
    return PointSet(np.vstack(rows), label="block_simplices")


@dataclass
class NetDiagnostics:
    proposals: int = 0
    random_accepted: int = 0
    witness_accepted: int = 0
    completion_rounds: int = 0
    stopped_by: str = ""
    covering_radius: float | None = None


def _chord(eps: float) -> float:
    return 2.0 * math.sin(eps / 2.0)


def _greedy_in_order(cand: np.ndarray, r: float) -> np.ndarray:
    """Accept candidates in index order, skipping any within chord r of an earlier acceptance."""
    if len(cand) == 0:
        return np.zeros(0, dtype=bool)
    pairs = cKDTree(cand).query_pairs(r, output_type="ndarray")
    keep = np.ones(len(cand), dtype=bool)
    if len(pairs) == 0:
        return keep
    pairs.sort(axis=1)
    order = np.argsort(pairs[:, 1], kind="stable")
    pairs = pairs[order]
    # neighbors with a smaller index, grouped by the larger index
    starts = np.searchsorted(pairs[:, 1], np.arange(len(cand) + 1))
    for j in np.unique(pairs[:, 1]):
        lo, hi = starts[j], starts[j + 1]
        if keep[pairs[lo:hi, 0]].any():
            keep[j] = False
    return keep


def greedy_net(d: int, eps: float, rng: Rng, *, max_rejections: int | None = None,
               rejection_cap: int = 200_000, proposal_budget: int | None = None,
               complete: bool = True, max_completion_rounds: int = 50,
               return_diagnostics: bool = False):
    """Maximal geodesic eps-separated set built by greedy acceptance.

    Uniform proposals are accepted iff their geodesic distance to every
    accepted point exceeds ``eps``.  The uniform phase stops after
    ``max_rejections`` consecutive rejections (default ``10^4 * |net|``, capped
    at ``rejection_cap``) or when ``proposal_budget`` is spent.

    With ``complete=True`` the set is then made maximal: the centres of the
    largest empty caps (from the convex hull of the net) are offered as
    further proposals, under the same acceptance rule, until no empty cap of
    radius larger than ``eps`` remains.  A maximal eps-separated set is an
    eps-net, so on return the covering radius is at most ``eps``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if not (0.0 < eps < math.pi):
        raise ValueError("eps must lie in (0, pi)")
    diag = NetDiagnostics()
    gen = rng.generator()
    r = _chord(eps)
    first = uniform_directions(gen, 1, d)
    net = first
    diag.random_accepted = 1
    if proposal_budget is None:
        # the rejection rule ends small nets; this only bounds the work on huge ones
        est = 1.0 / max(cap_volume(d, eps / 2.0), 1e-300)
        proposal_budget = int(min(max(50 * est, 2 * rejection_cap), 5e6))
    run = 0
    batch = 4096
    while True:
        limit = max_rejections if max_rejections is not None else min(10_000 * len(net), rejection_cap)
        if run >= limit:
            diag.stopped_by = "rejections"
            break
        if diag.proposals >= proposal_budget:
            diag.stopped_by = "budget"
            break
        B = int(min(batch, proposal_budget - diag.proposals))
        cand = uniform_directions(gen, B, d)
        dist, _ = cKDTree(net).query(cand, k=1)
        survive = dist > r
        idx = np.flatnonzero(survive)
        keep = _greedy_in_order(cand[idx], r)
        accepted = np.zeros(B, dtype=bool)
        accepted[idx[keep]] = True
        # replay the batch in order so the consecutive-rejection rule is exact
        acc_pos = np.flatnonzero(accepted)
        cut = B
        if len(acc_pos) == 0:
            if run + B >= limit:
                cut = limit - run
        else:
            gaps = np.diff(np.concatenate([[-1], acc_pos, [B]])) - 1
            gaps[0] += run
            over = np.flatnonzero(gaps >= limit)
            if len(over):
                j = over[0]
                cut = limit - run if j == 0 else acc_pos[j - 1] + 1 + limit
        accepted[cut:] = False
        diag.proposals += int(cut)
        new = cand[accepted]
        if len(new):
            net = np.vstack([net, new])
            diag.random_accepted += len(new)
            run = int(cut - 1 - np.flatnonzero(accepted)[-1])
        else:
            run += int(cut)
        batch = int(min(max(batch, 2 * len(net)), 1 << 20))
        if cut < B:
            diag.stopped_by = "rejections"
            break
    if complete:
        net = _complete_net(net, eps, diag, max_completion_rounds)
    P = PointSet(net, label="greedy_net")
    return (P, diag) if return_diagnostics else P


def _complete_net(net: np.ndarray, eps: float, diag: NetDiagnostics, rounds: int) -> np.ndarray:
    from .dispersion import empty_cap_centers

    r = _chord(eps)
    ce = math.cos(eps)
    for _ in range(rounds):
        centers, levels = empty_cap_centers(net)
        far = levels < ce
        if not far.any():
            diag.covering_radius = float(np.arccos(np.clip(levels.min(), -1, 1)))
            return net
        diag.completion_rounds += 1
        cand = centers[far][np.argsort(levels[far], kind="stable")]
        # a centre could still sit within eps of the net if the hull was degenerate
        dist, _ = cKDTree(net).query(cand, k=1)
        cand = cand[dist > r]
        keep = _greedy_in_order(cand, r)
        if not keep.any():
            break
        net = np.vstack([net, cand[keep]])
        diag.witness_accepted += int(keep.sum())
    centers, levels = empty_cap_centers(net)
    diag.covering_radius = float(np.arccos(np.clip(levels.min(), -1, 1)))
    return net


def generate(kind: str, d: int, n: int | None = None, *, eps: float | None = None,
             rng: Rng | None = None, path: str | None = None) -> PointSet:
    """Dispatch on a configuration kind; enforces each kind's arity constraint."""
    if kind not in KINDS:
        raise ValueError(f"unknown configuration kind {kind!r}; choose from {KINDS}")
    if kind == "simplex":
        if n is not None and n != d + 2:
            raise ValueError("simplex forces n = d+2")
        return regular_simplex(d)
    if kind == "cross_polytope":
        if n is not None and n != 2 * d + 2:
            raise ValueError("cross_polytope forces n = 2d+2")
        return cross_polytope(d)
    if kind == "block_simplices":
        if n is None:
            raise ValueError("block_simplices needs n")
        return block_simplices(d, n)
    if kind == "random_uniform":
        if n is None:
            raise ValueError("random_uniform needs n")
        return sample_uniform(d, n, rng or Rng())
    if kind == "greedy_net":
        if eps is None:
            raise ValueError("greedy_net needs eps")
        return greedy_net(d, eps, rng or Rng())
    if path is None:
        raise ValueError("from_file needs a path")
    return load_pointset(path)
