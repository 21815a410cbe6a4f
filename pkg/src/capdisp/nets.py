"""Finite families of caps and lenses that approximate all sets of a given volume.

A family N is a ``(c0 * gamma)``-approximation when every cap (or lens) of
volume ``gamma`` contains a member of N of volume at least ``c0 * gamma``.
Both constructions start from a geodesic eps-net N0: caps use
``B(w, delta - eps)`` for ``w`` in N0, lenses use all pairs of net points
combined with radii from the grid ``pi - i * eps``.  The lens family is far
too large to list, so members are indexed lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .configurations import greedy_net
from .lens import lens_volume
from .sphere import Cap, Lens, PointSet, Rng, UnitVector, uniform_directions
from .volume import cap_volume, inverse_cap_volume

MATERIALIZE_BUDGET = 10**7


@dataclass
class Match:
    """A family member found inside a target set."""

    member: Cap | Lens
    index: tuple[int, ...]
    volume: float
    contained: bool


@dataclass
class ApproxFamily:
    kind: str  # "caps" or "lenses"
    d: int
    gamma: float
    c0: float
    eps: float
    net: PointSet
    delta: float | None = None  # cap radius with volume gamma (caps only)
    grid_size: int = 0  # k + 1 radii pi - i*eps, i = 1..k+1 (lenses only)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self._tree = cKDTree(self.net.coords)

    def __len__(self) -> int:
        return min(self.size, 2**63 - 1)

    @property
    def size(self) -> int:
        if self.kind == "caps":
            return self.net.n
        return self.net.n**2 * self.grid_size**2

    @property
    def cardinality_bound(self) -> float:
        d, g = self.d, self.gamma
        if self.kind == "caps":
            return 2 * (3 * d * math.pi / g**2) ** d
        return 9 * (12 * d * math.pi / g**2) ** (2 * (d + 1))

    def grid_radius(self, i: int) -> float:
        return math.pi - i * self.eps

    def member(self, index: tuple[int, ...]) -> Cap | Lens:
        W = self.net.coords
        if self.kind == "caps":
            (w,) = index
            return Cap(UnitVector(W[w]), self.delta - self.eps)
        w1, w2, i, j = index
        if not (1 <= i <= self.grid_size and 1 <= j <= self.grid_size):
            raise IndexError("radius index outside the grid")
        return Lens((Cap(UnitVector(W[w1]), self.grid_radius(i)), Cap(UnitVector(W[w2]), self.grid_radius(j))))

    def members(self) -> list[Cap | Lens]:
        """Every member as an object; refused beyond the materialization budget."""
        if self.size > MATERIALIZE_BUDGET:
            raise ValueError(f"family too large to list: {self.size} members "
                             f"(cardinality bound {self.cardinality_bound:.4g}, budget {MATERIALIZE_BUDGET})")
        if self.kind == "caps":
            return [self.member((w,)) for w in range(self.net.n)]
        n, k = self.net.n, self.grid_size
        return [self.member((a, b, i, j)) for a in range(n) for b in range(n)
                for i in range(1, k + 1) for j in range(1, k + 1)]

    def _nearest(self, v: np.ndarray) -> tuple[int, float]:
        dist, idx = self._tree.query(v, k=1)
        rho = float(np.arccos(np.clip(self.net.coords[idx] @ v, -1.0, 1.0)))
        return int(idx), rho

    def find_inside(self, A: Cap | Lens) -> Match:
        """The member the construction assigns to ``A``, with a containment check."""
        if self.kind == "caps":
            if not isinstance(A, Cap):
                raise TypeError("cap family matches caps")
            w, rho = self._nearest(A.center.coords)
            B = self.member((w,))
            return Match(B, (w,), cap_volume(self.d, B.radius), rho + B.radius <= A.radius + 1e-12)
        if not isinstance(A, Lens) or A.k != 2:
            raise TypeError("lens family matches two-cap lenses")
        idx, ok = [], True
        for cap in A.caps:
            ell = min(max(int(math.floor((math.pi - cap.radius) / self.eps)) + 1, 1), self.grid_size - 1)
            w, rho = self._nearest(cap.center.coords)
            r = self.grid_radius(ell + 1)
            ok &= r > 0 and rho + r <= cap.radius + 1e-12
            idx.append((w, ell + 1))
        index = (idx[0][0], idx[1][0], idx[0][1], idx[1][1])
        B = self.member(index)
        return Match(B, index, lens_volume(B), bool(ok))


@lru_cache(maxsize=8)
def _net(d: int, eps: float, seed: int) -> PointSet:
    N, diag = greedy_net(d, eps, Rng(seed), return_diagnostics=True)
    if diag.covering_radius is None or diag.covering_radius > eps:
        raise RuntimeError(f"net not maximal: covering radius {diag.covering_radius} exceeds eps={eps}; "
                           "increase the rejection budget")
    return N


def delta_approx_caps(d: int, gamma: float, *, seed: int = 0) -> ApproxFamily:
    """Caps ``B(w, delta - eps)`` over an eps-net, with ``V(delta) = gamma`` and ``eps = gamma delta / (3d)``."""
    if d < 2 or not (0 < gamma < 1):
        raise ValueError("need d >= 2 and gamma in (0, 1)")
    delta = inverse_cap_volume(d, gamma)
    eps = gamma * delta / (3 * d)
    N = _net(d, eps, seed)
    return ApproxFamily("caps", d, gamma, 0.5, eps, N, delta=delta,
                        info={"net_size": N.n, "member_volume": cap_volume(d, delta - eps)})


def lens_grid_count(gamma: float, eps: float) -> int:
    """Smallest k with pi - k eps <= gamma."""
    return math.ceil((math.pi - gamma) / eps)


def delta_approx_lenses(d: int, gamma: float, *, seed: int = 0) -> ApproxFamily:
    """Lenses over pairs of eps-net points and radii ``pi - i eps``, ``eps = gamma^2 / (12 d)``."""
    if d < 2 or not (0 < gamma < 1):
        raise ValueError("need d >= 2 and gamma in (0, 1)")
    eps = gamma**2 / (12 * d)
    k = lens_grid_count(gamma, eps)
    N = _net(d, eps, seed)
    fam = ApproxFamily("lenses", d, gamma, 0.5, eps, N, grid_size=k + 1, info={"net_size": N.n, "k": k})
    if fam.size > fam.cardinality_bound:
        raise RuntimeError(f"family has {fam.size} members, above the bound {fam.cardinality_bound:.4g}")
    return fam


def n_from_approx(c0: float, gamma: float, family_size: int, variant: str = "lemma") -> float:
    """Point count that suffices for dispersion at most ``gamma``, given an approximation family.

    ``lemma``: 3 ln|N| / (c0 gamma), needs |N| >= 3.
    ``lemma2``: ln(4 c0 gamma |N|) / (c0 gamma), needs gamma < 1/(3 c0) and |N| >= e / (c0 gamma).
    """
    if not (0 < c0 < 1) or not (0 < gamma < 1):
        raise ValueError("need c0 and gamma in (0, 1)")
    if variant == "lemma":
        if family_size < 3:
            raise ValueError("hypothesis violated: family size must be at least 3")
        return 3 * math.log(family_size) / (c0 * gamma)
    if variant == "lemma2":
        if gamma >= 1 / (3 * c0):
            raise ValueError("hypothesis violated: gamma must be below 1/(3 c0)")
        if family_size < math.e / (c0 * gamma):
            raise ValueError("hypothesis violated: family size must be at least e/(c0 gamma)")
        return math.log(4 * c0 * gamma * family_size) / (c0 * gamma)
    raise ValueError(f"unknown variant {variant!r}")


def random_cap_of_volume(d: int, gamma: float, rng: Rng) -> Cap:
    c = uniform_directions(rng.generator(), 1, d)[0]
    return Cap(UnitVector(c), inverse_cap_volume(d, gamma))


def random_lens_of_volume(d: int, gamma: float, rng: Rng, *, min_radius: float = 0.0) -> Lens:
    """A two-cap lens of volume ``gamma`` with random centres and both radii at least ``min_radius``.

    The first radius is drawn uniformly above the radius of a single cap of
    volume ``gamma``; the second is solved for by root-finding.  Draws that
    violate ``min_radius`` or cannot reach ``gamma`` are redrawn.
    """
    gen = rng.generator()
    r0 = inverse_cap_volume(d, gamma)
    for _ in range(1000):
        c1, c2 = uniform_directions(gen, 2, d)
        phi1 = gen.uniform(max(r0, min_radius), math.pi)
        C1 = Cap(UnitVector(c1), phi1)

        def excess(phi2):
            return lens_volume(Lens((C1, Cap(UnitVector(c2), phi2)))) - gamma

        if excess(math.pi) <= 0:
            continue
        phi2 = brentq(excess, 0.0, math.pi, xtol=1e-13)
        if phi2 >= min_radius:
            return Lens((C1, Cap(UnitVector(c2), phi2)))
    raise RuntimeError("could not draw a lens with the requested volume")
