"""Closed-form dispersion bounds, reference constants and the density identity check.

Each bound is reported with its scope:

* ``any``: holds for every n-point set (a comparison with any observed value is a real test);
* ``iid``: holds for i.i.d. uniform points (with high probability or in expectation);
* ``minimal``: holds for the minimal dispersion only, so an observed configuration may exceed it.

Bounds whose absolute constants are not known carry a caveat and default the
constant to 1; they are evaluated but never treated as binding.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .dispersion import covering_radius_exact
from .sphere import PointSet
from .volume import cap_volume, cap_volume_quad, gaussian_tail

SATISFY_TOL = 1e-9
UNSPECIFIED = "constant unspecified - parameterized (default 1)"

THETA_2 = 2 * math.pi / (3 * math.sqrt(3))


@dataclass
class BoundReport:
    name: str
    quantity: str  # "n*disp_C", "disp_C", "n*disp_L", "n*disp_Lk", "cos_phi"
    direction: str  # "upper" or "lower"
    inputs: dict
    bound: float
    observed: float | None = None
    satisfied: bool | None = None
    caveat: str | None = None
    applicable: bool = True
    scope: str = "minimal"
    note: str = ""

    def observe(self, value: float | None) -> "BoundReport":
        """Attach an observed value; ``satisfied`` is set iff the bound applies."""
        self.observed = None if value is None else float(value)
        if self.observed is None or not self.applicable:
            self.satisfied = None
        elif self.direction == "upper":
            self.satisfied = self.observed <= self.bound + SATISFY_TOL
        else:
            self.satisfied = self.observed >= self.bound - SATISFY_TOL
        return self

    def binding_for(self, kind: str) -> bool:
        """Whether a failure on a configuration of this kind would contradict a theorem."""
        if self.caveat or not self.applicable:
            return False
        return self.scope == "any" or (self.scope == "iid" and kind == "random_uniform")

    def to_dict(self) -> dict:
        return asdict(self)


def rogers_density_bound(d: int) -> float:
    return d * math.log(d) + d * math.log(math.log(d)) + 5 * d


def coxeter_few_rogers_expression(d: int) -> float:
    """d / (e sqrt(e)), the asymptotic order of the simplex lower bound on covering density."""
    return d / (math.e * math.sqrt(math.e))


def reference_constants(d: int) -> dict:
    out = {"coxeter_few_rogers_asymptotic": {"expression": "d/(e*sqrt(e))", "value": coxeter_few_rogers_expression(d),
                                             "note": "asymptotic order of the lower bound; not the density itself"}}
    if d == 2:
        out["theta_2"] = {"expression": "2*pi/(3*sqrt(3))", "value": THETA_2, "note": "hexagonal lattice covering density"}
    if d >= 3:
        out["rogers_upper"] = {"expression": "d ln d + d ln ln d + 5d", "value": rogers_density_bound(d)}
    out["simplex_gap_asymptotic"] = {"expression": "1/sqrt(2 pi d)", "value": 1 / math.sqrt(2 * math.pi * d),
                                     "note": "1/2 - disp_C(d+2, d) ~ this as d grows"}
    out["cross_polytope_asymptotic"] = {"expression": "(2d+2) * P[g >= 1]", "value": (2 * d + 2) * gaussian_tail(1.0),
                                        "note": "asymptotic upper order of n * disp_C(2d+2, d)"}
    return out


def vc_dim_k_caps(d: int, k: int) -> float:
    return 2 * (d + 2) * k * math.log2(3 * k)


def bound_catalog(d: int, n: int, params: dict | None = None, *, observed: dict | None = None) -> list[BoundReport]:
    """Every explicit bound at (d, n).

    ``params`` may set ``C_lnln``, ``C_lens``, ``C_k``, ``c_k``, ``C_cos`` and
    ``k``; unset constants default to 1 with a caveat.  ``observed`` maps a
    quantity name to a measured value.
    """
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    params = dict(params or {})
    observed = observed or {}
    ln = math.log
    reps: list[BoundReport] = []

    def const(key):
        if key in params:
            return float(params[key]), None
        return 1.0, UNSPECIFIED

    def add(rep: BoundReport):
        if not rep.applicable and not rep.note:
            rep.note = "outside the stated range"
        reps.append(rep.observe(observed.get(rep.quantity)))

    inputs = {"d": d, "n": n}
    # trivial regime
    add(BoundReport("trivial_lower", "disp_C", "lower", inputs, 1.0 / n, scope="any", note="disp_C >= 1/n"))
    if n == 1:
        add(BoundReport("trivial_single", "disp_C", "lower", inputs, 1.0, scope="any", note="one point: disp_C = 1"))
    else:
        add(BoundReport("trivial_half", "disp_C", "lower", inputs, 0.5, scope="any", applicable=n <= d + 1,
                        note="n <= d+1: some hemisphere is empty" if n <= d + 1 else "needs n <= d+1"))
    # minimal dispersion upper bounds
    add(BoundReport("triv", "disp_C", "upper", inputs, 1.0 if n == 1 else 0.5,
                    note="disp_C(n, d) <= disp_C(2, d) = 1/2 for n >= 2"))
    add(BoundReport("upper_400", "n*disp_C", "upper", inputs, 400 * d * ln(d), applicable=n >= 2))
    add(BoundReport("upper_lnlnd", "n*disp_C", "upper", inputs, rogers_density_bound(d), applicable=n >= 2))
    C, cav = const("C_lnln")
    ok = n >= 2 * d
    add(BoundReport("upper_lnln", "n*disp_C", "upper", {**inputs, "C": C},
                    C * d * ln(ln(2 * n / d)) if ok and ln(2 * n / d) > 0 else math.nan, caveat=cav,
                    applicable=ok, note="" if ok else "needs n >= 2d"))
    # i.i.d.-valid bounds
    ok = n >= d + 2
    add(BoundReport("upper_vc", "n*disp_C", "upper", inputs,
                    3 * (d + 2) / ln(2) * ln(2 * math.e * n / (d + 2)) if ok else math.nan,
                    scope="iid", applicable=ok, note="in expectation for i.i.d. points" if ok else "needs n >= d+2"))
    add(BoundReport("upper_net", "n*disp_C", "upper", inputs, 12 * d * ln(n) if n >= 2 else math.nan,
                    scope="iid", applicable=n >= 2))
    add(BoundReport("upper_lens_net", "n*disp_L", "upper", inputs, 24 * (d + 1) * ln(n) if n >= 2 else math.nan,
                    scope="iid", applicable=n >= 2))
    C, cav = const("C_lens")
    ok = n >= 32 * d
    add(BoundReport("upper_lens_vc", "n*disp_L", "upper", {**inputs, "C": C},
                    C * d * ln(math.e * n / (32 * d)) if ok else math.nan, caveat=cav, scope="iid",
                    applicable=ok, note="" if ok else "needs n >= 32d"))
    # k-cap intersections
    k = int(params.get("k", 2))
    C, cav = const("C_k")
    c, cav2 = const("c_k")
    klk = d * k * ln(k)
    ok = k >= 2 and n >= C * klk and n / (c * klk) > 1
    add(BoundReport("upper_kcaps", "n*disp_Lk", "upper", {**inputs, "k": k, "C": C, "c": c},
                    C * klk * ln(n / (c * klk)) if ok else math.nan, caveat=cav or cav2, scope="iid",
                    applicable=ok, note="" if ok else "needs k >= 2 and n >= C d k ln k"))
    D = vc_dim_k_caps(d, k) / 2
    ok = k >= 1 and n >= 2 * D
    add(BoundReport("upper_kcaps_explicit", "n*disp_Lk", "upper", {**inputs, "k": k},
                    6 / ln(2) * D * ln(math.e * n / D) if ok else math.nan, scope="iid", applicable=ok,
                    note="VC dimension at most 2(d+2)k log2(3k)" if ok else "needs n >= 2(d+2)k log2(3k)"))
    # inscribed polytopes
    C, cav = const("C_cos")
    ok = n >= d + 2
    add(BoundReport("cos_radius", "cos_phi", "upper", {**inputs, "C": C},
                    C * math.sqrt(ln(n / d) / d) if ok else math.nan, caveat=cav, scope="any",
                    applicable=ok, note="cos phi(P) <= cos phi(n)" if ok else "needs n >= d+2"))
    return reps


def density_identity_check(P: PointSet, *, result=None) -> BoundReport:
    """Check value = V(phi) by two volume paths and the covering inequality n * value >= 1."""
    res = result or covering_radius_exact(P, candidates="auto")
    phi = res.covering_radius
    v_quad = cap_volume_quad(P.d, phi)
    gap = abs(res.value - v_quad)
    rep = BoundReport("density_identity", "n*disp_C", "lower", {"d": P.d, "n": P.n}, 1.0, scope="any",
                      note=f"|value - V(phi)| = {gap:.3e}")
    rep.observe(P.n * res.value)
    rep.satisfied = bool(rep.satisfied and gap <= 1e-10)
    rep.inputs["identity_gap"] = gap
    rep.inputs["beta_path"] = cap_volume(P.d, phi)
    return rep
