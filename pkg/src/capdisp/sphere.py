"""Geometric primitives on the unit sphere S^d in R^{d+1}.

Points are always stored as ambient Cartesian coordinates. Every object here is
immutable; arrays handed out are read-only views.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

# renormalize only if the norm is off by more than this; keeps file round trips exact
_NORM_SLACK = 1e-14


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise ValueError("cannot normalize a zero or non-finite vector")
    off = np.abs(norms - 1.0) > _NORM_SLACK
    return np.where(off, a / norms, a)


@dataclass(frozen=True)
class Rng:
    """Counter-based random stream identified by ``(seed, stream)``.

    ``generator()`` always returns a fresh Philox generator positioned at the
    start of the stream, so the same ``Rng`` reproduces the same draws no
    matter which thread or process asks for them. Workers should derive their
    own streams with :meth:`child` instead of sharing one.
    """

    seed: int = 0
    stream: int | tuple[int, ...] = 0

    @property
    def key(self) -> tuple[int, ...]:
        return self.stream if isinstance(self.stream, tuple) else (int(self.stream),)

    def child(self, index: int) -> "Rng":
        return Rng(self.seed, (*self.key, int(index)))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed) & (2**64 - 1), spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class UnitVector:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("a point on S^d needs a 1-d coordinate vector of length d+1 >= 2")
        object.__setattr__(self, "coords", _freeze(_normalize_rows(c)))

    @property
    def d(self) -> int:
        return self.coords.size - 1

    def __neg__(self) -> "UnitVector":
        return UnitVector(-self.coords)


@dataclass(frozen=True)
class PointSet:
    """An ordered, non-empty collection of points on a common sphere S^d.

    ``coords`` is an ``(n, d+1)`` array of unit rows. Any sequence of
    ``UnitVector`` objects or of raw coordinate rows is accepted; rows are
    normalized on construction.
    """

    coords: np.ndarray
    label: str | None = None

    def __post_init__(self):
        raw = self.coords
        if isinstance(raw, Sequence) and raw and isinstance(raw[0], UnitVector):
            raw = np.stack([p.coords for p in raw])
        a = np.asarray(raw, dtype=float)
        if a.ndim == 1:
            a = a[None, :]
        if a.ndim != 2 or a.shape[0] < 1:
            raise ValueError("a point set needs at least one point")
        if a.shape[1] < 2:
            raise ValueError("points must live in R^{d+1} with d >= 1")
        object.__setattr__(self, "coords", _freeze(_normalize_rows(a)))

    @property
    def d(self) -> int:
        return self.coords.shape[1] - 1

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def points(self) -> list[UnitVector]:
        return [UnitVector(row) for row in self.coords]

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[UnitVector]:
        return iter(self.points)

    def __getitem__(self, i: int) -> UnitVector:
        return UnitVector(self.coords[i])

    def with_points(self, extra: np.ndarray) -> "PointSet":
        return PointSet(np.vstack([self.coords, np.atleast_2d(extra)]), self.label)


@dataclass(frozen=True)
class Cap:
    """Closed geodesic ball ``B(center, radius)``; equivalently ``<y, center> >= cos(radius)``."""

    center: UnitVector
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, UnitVector):
            object.__setattr__(self, "center", UnitVector(self.center))
        r = float(self.radius)
        if not (0.0 <= r <= np.pi):
            raise ValueError(f"cap radius must lie in [0, pi], got {r}")
        object.__setattr__(self, "radius", r)

    @property
    def d(self) -> int:
        return self.center.d

    def contains(self, y: np.ndarray, *, strict: bool = False) -> np.ndarray:
        """Membership of the rows of ``y``; ``strict`` tests the open cap."""
        g = np.asarray(y, dtype=float) @ self.center.coords
        c = np.cos(self.radius)
        return g > c if strict else g >= c


@dataclass(frozen=True)
class Lens:
    caps: tuple[Cap, ...] = field(default_factory=tuple)

    def __post_init__(self):
        caps = tuple(self.caps)
        if not caps:
            raise ValueError("a lens needs at least one cap")
        if len({c.d for c in caps}) != 1:
            raise ValueError("all caps of a lens must live on the same sphere")
        object.__setattr__(self, "caps", caps)

    @property
    def d(self) -> int:
        return self.caps[0].d

    @property
    def k(self) -> int:
        return len(self.caps)

    def contains(self, y: np.ndarray, *, strict: bool = False) -> np.ndarray:
        out = self.caps[0].contains(y, strict=strict)
        for c in self.caps[1:]:
            out = out & c.contains(y, strict=strict)
        return out


def _coords(x) -> np.ndarray:
    return x.coords if isinstance(x, (UnitVector, PointSet)) else np.asarray(x, dtype=float)


def geodesic_distance(x, y) -> float:
    """``arccos <x, y>`` with the inner product clamped into [-1, 1]."""
    a, b = _coords(x), _coords(y)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: S^{a.shape[-1] - 1} vs S^{b.shape[-1] - 1}")
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))


def pairwise_distances(P, Q=None) -> np.ndarray:
    """All geodesic distances, via ``2 atan2(|x - y|, |x + y|)``.

    Unlike ``arccos`` this keeps full accuracy for nearly equal and nearly
    antipodal pairs.
    """
    a = _coords(P)
    b = a if Q is None else _coords(Q)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError("dimension mismatch")
    diff = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    summ = np.linalg.norm(a[:, None, :] + b[None, :, :], axis=-1)
    return 2.0 * np.arctan2(diff, summ)


def chord_from_geodesic(rho):
    """``|x - y| = 2 sin(rho/2)`` for unit x, y at geodesic distance rho."""
    return 2.0 * np.sin(np.asarray(rho) / 2.0)


def uniform_directions(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = gen.standard_normal((n, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_uniform(d: int, n: int, rng: Rng) -> PointSet:
    """n independent uniform points on S^d (normalized Gaussian vectors)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    return PointSet(uniform_directions(rng.generator(), n, d), label="random_uniform")


def random_rotation(d: int, rng: Rng) -> np.ndarray:
    """Haar-distributed orthogonal (d+1)x(d+1) matrix."""
    g = rng.generator().standard_normal((d + 1, d + 1))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def apply_rotation(P: PointSet, Q: np.ndarray) -> PointSet:
    Q = np.asarray(Q, dtype=float)
    m = P.d + 1
    if Q.shape != (m, m):
        raise ValueError(f"expected a {m}x{m} matrix, got {Q.shape}")
    if np.max(np.abs(Q.T @ Q - np.eye(m))) > 1e-10:
        raise ValueError("matrix is not orthogonal within 1e-10")
    return PointSet(P.coords @ Q.T, P.label)
