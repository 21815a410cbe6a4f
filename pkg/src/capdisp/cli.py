"""Command-line interface: ``capdisp volume|generate|dispersion|vc|nets|bounds|experiment``.

Results go to stdout as JSON.  Exit status is 0 on success, 1 on usage or
input errors and 2 when an experiment recorded per-row failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .configurations import KINDS, generate
from .dispersion import covering_radius
from .experiment import ExperimentConfig, run_experiment
from .io import load_pointset, pointset_to_dict, save_pointset
from .lens import lens_dispersion_estimate
from .nets import delta_approx_caps, delta_approx_lenses
from .sphere import Rng
from .vc import phi_sauer_shelah, shatter_details, traversal_informative, vc_lower_bound_search, vc_traversal_bound
from .volume import cap_volume, inverse_cap_volume


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1, default=_default))


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _cap_json(c) -> dict:
    return {"center": c.center.coords.tolist(), "radius": c.radius}


def cmd_volume(a) -> int:
    if a.inverse is not None:
        phi = inverse_cap_volume(a.d, a.inverse)
        _emit({"d": a.d, "gamma": a.inverse, "phi": phi, "V": cap_volume(a.d, phi)})
    else:
        if a.phi is None:
            raise UsageError("volume needs --phi or --inverse")
        _emit({"d": a.d, "phi": a.phi, "V": cap_volume(a.d, a.phi)})
    return 0


def cmd_generate(a) -> int:
    P = generate(a.kind, a.d, a.n, eps=a.eps, rng=Rng(a.seed), path=a.input)
    save_pointset(P, a.out)
    _emit({"kind": a.kind, "d": P.d, "n": P.n, "out": str(a.out)})
    return 0


def cmd_dispersion(a) -> int:
    P = load_pointset(a.input)
    rng = Rng(a.seed)
    res = covering_radius(P, a.method, restarts=a.restarts, samples=a.samples, rng=rng.child(0))
    out = res.to_dict()
    out["n_value"] = P.n * res.value
    if a.lens:
        lr = lens_dispersion_estimate(P, a.lens_restarts, rng.child(1), cap_result=res)
        out["lens"] = lr.to_dict()
    _emit(out)
    return 0


def cmd_vc(a) -> int:
    if a.vc_cmd == "shatter":
        P = load_pointset(a.input)
        r = shatter_details(P)
        _emit({"m": r.m, "d": P.d, "count": r.count, "undecided": r.undecided, "shattered": r.shattered,
               "sauer_shelah": phi_sauer_shelah(P.d + 2, r.m)})
    elif a.vc_cmd == "search":
        W = vc_lower_bound_search(a.d, a.k, a.trials, Rng(a.seed))
        _emit({"d": a.d, "k": a.k, "trials": a.trials, "found": W is not None,
               "witness": None if W is None else pointset_to_dict(W)})
    else:
        v = vc_traversal_bound(a.m, a.d, a.eps)
        _emit({"m": a.m, "d": a.d, "eps": a.eps, "bound": v if math.isfinite(v) else None,
               "log_bound": math.log(v) if 0 < v < math.inf else None,
               "informative": traversal_informative(a.m, a.d, a.eps)})
    return 0


def cmd_nets(a) -> int:
    make = delta_approx_caps if a.nets_cmd == "caps" else delta_approx_lenses
    F = make(a.d, a.gamma, seed=a.seed)
    out = {"kind": F.kind, "d": F.d, "gamma": F.gamma, "c0": F.c0, "eps": F.eps, "net_size": F.net.n,
           "size": F.size, "cardinality_bound": F.cardinality_bound}
    if F.kind == "caps":
        out["delta"] = F.delta
        out["witnesses"] = [_cap_json(F.member((i,))) for i in range(min(3, F.size))]
    else:
        out["grid_size"] = F.grid_size
        out["witnesses"] = [[_cap_json(c) for c in F.member((0, 1, 1, F.grid_size)).caps]]
    _emit(out)
    return 0


def _kv(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"expected key=value, got {it!r}")
        k, v = it.split("=", 1)
        out[k] = float(v)
    return out


def cmd_bounds(a) -> int:
    observed = _kv(a.observed)
    n = a.n
    if a.input:
        P = load_pointset(a.input)
        res = covering_radius(P, "exact")
        n = P.n
        observed.update({"disp_C": res.value, "n*disp_C": P.n * res.value, "cos_phi": math.cos(res.covering_radius)})
    if n is None:
        raise UsageError("bounds needs --n or --in")
    reps = bnd.bound_catalog(a.d, n, _kv(a.param), observed=observed)
    _emit({"d": a.d, "n": n, "bounds": [r.to_dict() for r in reps], "reference": bnd.reference_constants(a.d)})
    return 0


def cmd_experiment(a) -> int:
    cfg = ExperimentConfig.from_file(a.config)
    res = run_experiment(cfg, threads=a.threads)
    if a.out:
        Path(a.out).write_text(res.to_csv(reproducible=a.reproducible))
    if a.json:
        Path(a.json).write_text(res.to_json(reproducible=a.reproducible))
    if not a.out and not a.json:
        sys.stdout.write(res.to_csv(reproducible=a.reproducible))
    if res.failed:
        print(f"{res.failed} of {len(res.rows)} rows failed", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = Parser(prog="capdisp", description="Spherical cap and lens dispersion toolkit")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=Parser)

    s = sub.add_parser("volume", help="normalized cap volume or its inverse")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--phi", type=float)
    s.add_argument("--inverse", type=float, metavar="GAMMA")
    s.set_defaults(func=cmd_volume)

    s = sub.add_parser("generate", help="write a named configuration to a file")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--in", dest="input", help="source file for --kind from_file")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("dispersion", help="dispersion of a point set file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--method", choices=["exact", "opt", "mc"], default="exact")
    s.add_argument("--restarts", type=int, default=32)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lens", action="store_true", help="also estimate the lens dispersion")
    s.add_argument("--lens-restarts", type=int, default=4)
    s.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("vc", help="shatter counts, shattered-set search, traversal bound")
    vsub = s.add_subparsers(dest="vc_cmd", required=True, parser_class=Parser)
    t = vsub.add_parser("shatter")
    t.add_argument("--in", dest="input", required=True)
    t = vsub.add_parser("search")
    t.add_argument("--d", type=int, required=True)
    t.add_argument("--k", type=int, required=True)
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--seed", type=int, default=0)
    t = vsub.add_parser("bound")
    t.add_argument("--m", type=int, required=True)
    t.add_argument("--d", type=int, required=True)
    t.add_argument("--eps", type=float, required=True)
    s.set_defaults(func=cmd_vc)

    s = sub.add_parser("nets", help="delta-approximation families")
    nsub = s.add_subparsers(dest="nets_cmd", required=True, parser_class=Parser)
    for name in ("caps", "lenses"):
        t = nsub.add_parser(name)
        t.add_argument("--d", type=int, required=True)
        t.add_argument("--gamma", type=float, required=True)
        t.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_nets)

    s = sub.add_parser("bounds", help="evaluate the bound catalogue")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--in", dest="input", help="point set whose exact dispersion is compared")
    s.add_argument("--param", action="append", metavar="NAME=VALUE", help="constant such as C_lnln=2")
    s.add_argument("--observed", action="append", metavar="QUANTITY=VALUE")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("experiment", help="run a JSON-configured grid experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="CSV output file")
    s.add_argument("--json", help="JSON output file")
    s.add_argument("--reproducible", action="store_true", help="omit the timestamp line")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.func(a)
    except (UsageError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"capdisp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
