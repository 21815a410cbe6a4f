"""Normalized spherical cap volume ``V_d(phi)`` and the inequalities around it.

``V_d(phi)`` is the fraction of S^d covered by a cap of geodesic radius
``phi``.  With ``s = sin^2 t`` the sine-power integral becomes an incomplete
beta function, so

    V_d(phi) = 1/2 * I_{sin^2 phi}(d/2, 1/2)          for phi <= pi/2,

and the complement ``V_d(phi) = 1 - V_d(pi - phi)`` covers the rest.  Near the
equator we use the reflected form ``1/2 - 1/2 * I_{cos^2 phi}(1/2, d/2)``,
which keeps full relative accuracy in ``1/2 - V``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy.special import betainc, erfc, gammaln


V_ATOL = 1e-12
INVERSE_ATOL = 1e-11


def _check_d(d: int, lo: int = 1) -> int:
    if int(d) != d or d < lo:
        raise ValueError(f"dimension d must be an integer >= {lo}, got {d}")
    return int(d)


def _check_phi(phi) -> np.ndarray:
    p = np.asarray(phi, dtype=float)
    if np.any(p < 0) or np.any(p > np.pi) or not np.all(np.isfinite(p)):
        raise ValueError("cap radius must lie in [0, pi]")
    return p


def cap_volume(d: int, phi):
    """Normalized volume of a cap of geodesic radius ``phi`` on S^d.

    Vectorized over ``phi``; returns a float for scalar input.
    """
    d = _check_d(d)
    p = _check_phi(phi)
    lower = np.minimum(p, np.pi - p)  # reflect into [0, pi/2]
    sl, cl = np.sin(lower), np.cos(lower)
    direct = 0.5 * betainc(d / 2.0, 0.5, sl * sl)
    # small caps keep relative accuracy in the direct form, near-hemispheres in the reflected one
    half = np.where(direct < 0.25, direct, 0.5 - 0.5 * betainc(0.5, d / 2.0, cl * cl))
    out = np.where(p <= np.pi / 2, half, 1.0 - half)
    out = np.where(p == np.pi / 2, 0.5, out)
    return float(out) if out.ndim == 0 else out


def log_wallis(d: int) -> float:
    """log of the Wallis integral int_0^{pi/2} sin^{d-1} t dt (any d >= 1)."""
    d = _check_d(d)
    return 0.5 * math.log(math.pi) - math.log(2.0) + gammaln(d / 2.0) - gammaln((d + 1) / 2.0)


def wallis_integral(d: int) -> float:
    """int_0^{pi/2} sin^{d-1} t dt = sqrt(pi)/2 * Gamma(d/2) / Gamma((d+1)/2), for d >= 2."""
    d = _check_d(d)
    if d < 2:
        raise ValueError("the Wallis integral is defined here for d >= 2")
    return math.exp(log_wallis(d))


def cap_volume_density(d: int, phi):
    """Derivative ``V_d'(phi) = sin^{d-1}(phi) / (2 W_d)``, evaluated in log space."""
    d = _check_d(d)
    p = np.asarray(phi, dtype=float)
    s = np.sin(p)
    with np.errstate(divide="ignore"):
        logs = np.where(s > 0, (d - 1) * np.log(np.where(s > 0, s, 1.0)), -np.inf)
    out = np.exp(logs - math.log(2.0) - log_wallis(d))
    if d == 1:
        out = np.full_like(p, 1.0 / math.pi)
    return float(out) if out.ndim == 0 else out


def cap_volume_quad(d: int, phi: float, *, tol: float = 1e-13) -> float:
    """Cap volume by adaptive quadrature of the sine power; cross-check path."""
    d = _check_d(d)
    phi = float(_check_phi(phi))
    lw = log_wallis(d)
    if phi > np.pi / 2:
        return 1.0 - cap_volume_quad(d, np.pi - phi, tol=tol)

    if d == 1:
        return phi / np.pi

    def f(t):
        return math.exp((d - 1) * math.log(math.sin(t)) - lw - math.log(2.0)) if t > 0 else 0.0

    val, _ = integrate.quad(f, 0.0, phi, epsabs=tol, epsrel=1e-13, limit=200)
    return float(val)


def inverse_cap_volume(d: int, gamma: float) -> float:
    """Radius ``phi`` with ``V_d(phi) = gamma`` (V is increasing, so Brent's method on [0, pi])."""
    d = _check_d(d)
    g = float(gamma)
    if not (0.0 <= g <= 1.0):
        raise ValueError("volume fraction must lie in [0, 1]")
    if g == 0.0:
        return 0.0
    if g == 1.0:
        return math.pi
    if g == 0.5:
        return math.pi / 2
    phi = optimize.brentq(lambda t: cap_volume(d, t) - g, 0.0, math.pi, xtol=1e-15, maxiter=200)
    return phi


def gaussian_tail(alpha: float) -> float:
    """P[g >= alpha] for a standard normal g."""
    a = float(alpha)
    if a < 0:
        raise ValueError("alpha must be >= 0")
    return 0.5 * float(erfc(a / math.sqrt(2.0)))


@lru_cache(maxsize=256)
def _sine_integral(d: int, delta: float) -> float:
    """int_0^delta sin^{d-1} s ds = 2 W_d V_d(delta)."""
    return 2.0 * math.exp(log_wallis(d)) * cap_volume(d, delta)


@dataclass
class BoundCheck:
    name: str
    inputs: dict
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class VolumeBoundsReport:
    d: int
    checks: list[BoundCheck] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.passed]

    def by_name(self, prefix: str) -> list[BoundCheck]:
        return [c for c in self.checks if c.name.startswith(prefix)]


def check_volume_bounds(d: int, grid, *, tol: float = 1e-12, pairs: bool = True) -> VolumeBoundsReport:
    """Evaluate every cap-volume inequality on a grid of radii.

    Families (each check is ``lhs <= rhs``):

    * ``i.lower``/``i.upper``   sin^d(phi)/sqrt(2 pi (d+1)) <= V(phi) <= sin^d(phi)/2, phi in (0, pi/2)
    * ``ii.lower``/``ii.upper`` the same with an extra 1/cos(phi) factor, 0 < phi <= arccos(1/sqrt(d+1))
    * ``iii.lower``/``iii.upper`` 1/(3e sqrt(2 pi)) <= V(phi) <= 1/2 for arccos(1/sqrt(d+1)) <= phi <= pi/2
    * ``iv.lower``/``iv.upper`` Gaussian-type sandwich of 1/2 - V(pi/2 - alpha), alpha = pi/2 - phi
    * ``v``                     V(w)/V(delta) <= (w/delta)^d over grid pairs delta <= w
    * ``claim.i``/``claim.ii``  sin(t delta) <= t sin(delta) and delta sin^{d-1} delta <= d int_0^delta sin^{d-1}

    Points outside a family's domain are skipped with a notice.
    """
    d = _check_d(d, 2)
    grid = [float(x) for x in np.atleast_1d(grid)]
    rep = VolumeBoundsReport(d)
    phi0 = math.acos(1.0 / math.sqrt(d + 1))

    def add(name, inputs, lhs, rhs):
        rep.checks.append(BoundCheck(name, inputs, float(lhs), float(rhs), bool(lhs <= rhs + tol)))

    for phi in grid:
        if not (0.0 <= phi <= math.pi):
            rep.notices.append(f"phi={phi}: outside [0, pi], skipped")
            continue
        V = cap_volume(d, phi)
        s, c = math.sin(phi), math.cos(phi)
        if 0 < phi < math.pi / 2:
            add("i.lower", {"phi": phi}, s**d / math.sqrt(2 * math.pi * (d + 1)), V)
            add("i.upper", {"phi": phi}, V, 0.5 * s**d)
            alpha = math.pi / 2 - phi
            mid = 0.5 - V
            lo = math.exp(-(d - 1) * alpha**2 / (2 * math.cos(alpha) ** 2)) * math.sqrt((d - 1) / (2 * math.pi)) * alpha
            add("iv.lower", {"alpha": alpha}, lo, mid)
            add("iv.upper", {"alpha": alpha}, mid, math.sqrt(d / (2 * math.pi)) * alpha)
        else:
            rep.notices.append(f"phi={phi}: outside (0, pi/2), families i and iv skipped")
        if 0 < phi <= phi0:
            add("ii.lower", {"phi": phi}, s**d / (3 * math.sqrt(2 * math.pi * (d + 1)) * c), V)
            add("ii.upper", {"phi": phi}, V, s**d / (math.sqrt(2 * math.pi * d) * c))
        else:
            rep.notices.append(f"phi={phi}: outside (0, arccos(1/sqrt(d+1))], family ii skipped")
        if phi0 <= phi <= math.pi / 2:
            add("iii.lower", {"phi": phi}, 1.0 / (3 * math.e * math.sqrt(2 * math.pi)), V)
            add("iii.upper", {"phi": phi}, V, 0.5)
        else:
            rep.notices.append(f"phi={phi}: outside [arccos(1/sqrt(d+1)), pi/2], family iii skipped")
        if phi > 0:
            add("claim.ii", {"delta": phi}, phi * s ** (d - 1), d * _sine_integral(d, phi))
    if pairs:
        pos = sorted(x for x in grid if 0 < x <= math.pi)
        for i, delta in enumerate(pos):
            Vd = cap_volume(d, delta)
            for w in pos[i:]:
                t = w / delta
                # ratio form is ill-conditioned when V(delta) underflows; compare in log space
                add("v", {"delta": delta, "w": w}, math.log(cap_volume(d, w)), math.log(Vd) + d * math.log(t))
                add("claim.i", {"delta": delta, "t": t}, math.sin(t * delta), t * math.sin(delta))
    return rep
