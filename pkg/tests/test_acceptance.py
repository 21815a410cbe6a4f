"""Acceptance criteria 1 to 12, one PASS/FAIL line each at the stated tolerances.

Seeds are fixed in advance; a failing line is reported as it is.
"""

import json
import math
import time

import numpy as np
import pytest

from capdisp.bounds import density_identity_check
from capdisp.cli import main
from capdisp.configurations import block_simplices, cross_polytope, greedy_net, regular_simplex
from capdisp.dispersion import covering_radius_exact, covering_radius_opt, dispersion_monte_carlo
from capdisp.experiment import ExperimentConfig, run_experiment
from capdisp.lens import lens_dispersion_estimate, lens_volume, lens_volume_monte_carlo
from capdisp.nets import delta_approx_caps, delta_approx_lenses, random_cap_of_volume, random_lens_of_volume
from capdisp.sphere import Cap, Lens, PointSet, Rng, UnitVector, sample_uniform, uniform_directions
from capdisp.vc import (empirical_shatter, phi_sauer_shelah, shatter_details, traversal_epsilon,
                        vc_lower_bound_search, vc_traversal_bound)
from capdisp.volume import cap_volume, check_volume_bounds, gaussian_tail, wallis_integral

SEED = 2026


def circle(n):
    t = 2 * math.pi * np.arange(n) / n
    return PointSet(np.column_stack([np.cos(t), np.sin(t)]))


def verdict(report, k, ok, detail):
    report(f"criterion {k} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


# instances used by the acceptance suite; criterion 5 runs over all of them
def corpus():
    sets = []
    for d in range(2, 9):
        sets += [regular_simplex(d), cross_polytope(d)]
    for d in range(2, 6):
        sets += [block_simplices(d, n) for n in range(d + 2, 2 * d + 3)]
    sets += [circle(n) for n in range(2, 65)]
    for i in range(200):
        d = 2 + i % 5
        sets.append(sample_uniform(d, 1 + i % (d + 1), Rng(SEED, (3, i))))
    for i in range(100):
        sets.append(sample_uniform(3, 12, Rng(SEED, (4, i))))
        sets.append(sample_uniform(2, 20, Rng(SEED, (5, i))))
    for n in (20, 50, 100, 200):
        sets += [sample_uniform(2, n, Rng(SEED, (8, n, s))) for s in range(20)]
    sets += [greedy_net(2, 0.3, Rng(SEED)), greedy_net(3, 0.5, Rng(SEED))]
    return sets


def test_criterion_01_exact_identities(report):
    t0 = time.perf_counter()
    err = 0.0
    for d in range(2, 9):
        err = max(err, abs(covering_radius_exact(regular_simplex(d)).covering_radius - math.acos(1 / (d + 1))),
                  abs(covering_radius_exact(cross_polytope(d)).covering_radius - math.acos(1 / math.sqrt(d + 1))))
    dt = time.perf_counter() - t0
    verdict(report, 1, err <= 1e-9 and dt < 10, f"max radius error {err:.2e} (tol 1e-9), {dt:.2f} s (limit 10 s)")


def test_criterion_02_circle(report):
    err = max(abs(covering_radius_exact(circle(n)).value - 1 / n) for n in range(2, 65))
    verdict(report, 2, err <= 1e-10, f"max |disp - 1/n| over n=2..64 is {err:.2e} (tol 1e-10)")


def test_criterion_03_trivial_regime(report):
    worst = math.inf
    for i in range(200):
        d = 2 + i % 5
        n = 1 + i % (d + 1)
        worst = min(worst, covering_radius_exact(sample_uniform(d, n, Rng(SEED, (3, i)))).value)
    x = np.array([0.0, 0.0, 1.0])
    pair = covering_radius_exact(PointSet(np.vstack([x, -x]))).value
    ok = worst >= 0.5 - 1e-9 and pair == 0.5
    verdict(report, 3, ok, f"min disp over 200 sets with n <= d+1 is {worst:.12f}; antipodal pair gives {pair!r}")


def test_criterion_04_oracle_equivalence(report):
    t0 = time.perf_counter()
    worst, mc_excess = 0.0, -math.inf
    for i in range(100):
        for d, n, tag in ((3, 12, 4), (2, 20, 5)):
            P = sample_uniform(d, n, Rng(SEED, (tag, i)))
            e = covering_radius_exact(P)
            o = covering_radius_opt(P, 50, Rng(SEED, (tag + 10, i)))
            m = dispersion_monte_carlo(P, 20_000, Rng(SEED, (tag + 20, i)))
            worst = max(worst, abs(o.value - e.value))
            mc_excess = max(mc_excess, m.value - e.value)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and mc_excess <= 1e-12 and dt < 120
    verdict(report, 4, ok, f"max |opt - exact| {worst:.2e} (tol 1e-6), max MC - exact {mc_excess:.2e} (tol 1e-12), "
                           f"{dt:.1f} s (limit 120 s)")


def test_criterion_05_density_invariant(report):
    sets = corpus()
    low, gap = math.inf, 0.0
    for P in sets:
        rep = density_identity_check(P)
        low = min(low, rep.observed)
        gap = max(gap, rep.inputs["identity_gap"])
    verdict(report, 5, low >= 1 - 1e-9, f"min n*disp over {len(sets)} corpus instances is {low:.12f} "
                                        f"(max |value - V(phi)| {gap:.1e})")


def test_criterion_06_volume_engine(report):
    half = max(abs(cap_volume(d, math.pi / 2) - 0.5) for d in range(1, 301))
    grid = np.linspace(0, math.pi, 100)
    comp = max(float(np.max(np.abs(cap_volume(d, grid) + cap_volume(d, math.pi - grid) - 1))) for d in (2, 5, 20, 100))
    bad, checks = [], 0
    for d in range(2, 31):
        rep = check_volume_bounds(d, np.linspace(0.01, math.pi - 0.01, 50))
        checks += len(rep.checks)
        bad += [(d, c.name) for c in rep.failures()]
    wallis = all(math.sqrt(math.pi / (2 * d)) <= wallis_integral(d) <= math.sqrt(math.pi / (2 * (d - 1)))
                 for d in range(2, 201))
    ok = half <= 1e-13 and comp <= 1e-12 and not bad and wallis
    verdict(report, 6, ok, f"|V(pi/2)-1/2| {half:.1e}, complement {comp:.1e}, {checks} inequality checks with "
                           f"{len(bad)} failures {bad[:3]}, Wallis sandwich {'holds' if wallis else 'fails'}")


def test_criterion_07_gaussian_asymptotics(report):
    ok, parts = True, []
    for a in (0.5, 1.0, 2.0):
        errs = [abs(cap_volume(d, math.pi / 2 - a / math.sqrt(d)) - gaussian_tail(a)) / gaussian_tail(a)
                for d in (10, 100, 1000)]
        ok &= errs[0] > errs[1] > errs[2] and errs[2] < 0.02
        parts.append(f"alpha={a}: " + ", ".join(f"{e:.2e}" for e in errs))
    verdict(report, 7, ok, "relative errors at d=10,100,1000: " + "; ".join(parts))


def _iid_grid():
    for n in (20, 50, 100, 200):
        for s in range(20):
            yield n, s, sample_uniform(2, n, Rng(SEED, (8, n, s)))


def test_criterion_08_random_upper_bounds(report):
    d = 2
    net_bad, vc_hits, worst = 0, {}, 0.0
    for n, s, P in _iid_grid():
        nd = n * covering_radius_exact(P, candidates="auto").value
        worst = max(worst, nd / (12 * d * math.log(n)))
        net_bad += nd > 12 * d * math.log(n)
        vc_hits[n] = vc_hits.get(n, 0) + (nd <= 3 * (d + 2) / math.log(2) * math.log(2 * math.e * n / (d + 2)))
    ok = net_bad == 0 and min(vc_hits.values()) >= 19
    verdict(report, 8, ok, f"12 d ln n violated in {net_bad}/80 runs (max ratio {worst:.3f}); "
                           f"VC bound met per n: {vc_hits} (need >= 19/20)")


def test_criterion_09_vc_suite(report):
    phi_ok = phi_sauer_shelah(2, 3) == 7 and phi_sauer_shelah(4, 4) == 16 and phi_sauer_shelah(3, 10) == 176
    over, undecided = 0, 0
    for i in range(50):
        m = 1 + i % 12
        P = sample_uniform(2, m, Rng(SEED, (9, i)))
        r = shatter_details(P)
        over += r.count > phi_sauer_shelah(4, m)
        undecided += r.undecided
    W = vc_lower_bound_search(2, 4, 1000, Rng(SEED, 9))
    found = W is not None and empirical_shatter(W) == 16
    trav_bad = 0
    for d in range(2, 11):
        for m in np.unique(np.geomspace(d + 2, 10**6, 200).astype(int)):
            trav_bad += not vc_traversal_bound(int(m), d + 2, traversal_epsilon(int(m), d + 2)) < 1
    ok = phi_ok and over == 0 and found and trav_bad == 0
    verdict(report, 9, ok, f"Sauer-Shelah examples {'exact' if phi_ok else 'wrong'}; {over}/50 sets exceed "
                           f"Phi_4(m) ({undecided} undecided subsets); shattered 4-set "
                           f"{'found' if found else 'not found'}; traversal bound >= 1 at {trav_bad} grid points")


def test_criterion_10_delta_approximation(report):
    t0 = time.perf_counter()
    F = delta_approx_caps(2, 0.05, seed=SEED)
    cap_bad = 0
    for i in range(1000):
        m = F.find_inside(random_cap_of_volume(2, 0.05, Rng(SEED, (10, i))))
        cap_bad += not (m.contained and m.volume >= 0.025)
    G = delta_approx_lenses(2, 0.3, seed=SEED)
    lens_bad = 0
    for i in range(200):
        m = G.find_inside(random_lens_of_volume(2, 0.3, Rng(SEED, (11, i)), min_radius=0.3))
        lens_bad += not (m.contained and m.volume >= 0.15)
    dt = time.perf_counter() - t0
    ok = F.size <= F.cardinality_bound and G.size <= G.cardinality_bound and cap_bad == 0 and lens_bad == 0 \
        and dt < 300
    verdict(report, 10, ok, f"caps: {F.size} <= {F.cardinality_bound:.3g}, {cap_bad}/1000 misses; lenses: "
                            f"{G.size:.3g} <= {G.cardinality_bound:.3g}, {lens_bad}/200 misses; {dt:.0f} s (limit 300 s)")


def _random_lens(d, rng):
    g = rng.generator()
    while True:
        c1, c2 = uniform_directions(g, 2, d)
        L = Lens((Cap(UnitVector(c1), g.uniform(0.2, math.pi - 0.2)), Cap(UnitVector(c2), g.uniform(0.2, math.pi - 0.2))))
        if lens_volume(L) > 0:
            return L


def test_criterion_11_lens_machinery(report):
    worst_z, far = 0.0, 0
    for d in (2, 3):
        for i in range(50):
            L = _random_lens(d, Rng(SEED, (12, d, i)))
            p, se = lens_volume_monte_carlo(L, 10**6, Rng(SEED, (13, d, i)))
            z = abs(lens_volume(L) - p) / se
            worst_z = max(worst_z, z)
            far += z > 3
    below, over, worst_ratio = 0, 0, 0.0
    d = 2
    for n, s, P in _iid_grid():
        cap = covering_radius_exact(P, candidates="auto")
        r = lens_dispersion_estimate(P, 2, Rng(SEED, (14, n, s)), cap_result=cap)
        below += r.value < cap.value
        over += n * r.value > 24 * (d + 1) * math.log(n)
        worst_ratio = max(worst_ratio, n * r.value / (24 * (d + 1) * math.log(n)))
    ok = far == 0 and below == 0 and over == 0
    verdict(report, 11, ok, f"{far}/100 lenses beyond 3 SE of Monte Carlo (max {worst_z:.2f} SE); estimate below cap "
                            f"in {below}/80; 24(d+1) ln n exceeded in {over}/80 (max ratio {worst_ratio:.3f})")


def test_criterion_12_reproducibility(report, tmp_path, monkeypatch, capsys):
    cfg = {"d": [2, 3], "n": [10, 25], "seeds": [0, 1, 2], "kinds": ["random_uniform", "simplex"],
           "lens": True, "lens_restarts": 1}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for i, threads in enumerate(("1", "1", "8")):
        out = tmp_path / f"r{i}.csv"
        js = tmp_path / f"r{i}.json"
        code = main(["experiment", "--config", str(path), "--out", str(out), "--json", str(js), "--reproducible",
                     "--threads", threads])
        assert code == 0
        outs.append((out.read_bytes(), js.read_bytes()))
    monkeypatch.setenv("CAPDISP_THREADS", "3")
    api = run_experiment(ExperimentConfig.from_dict(cfg)).to_csv(reproducible=True).encode()
    capsys.readouterr()
    ok = outs[0] == outs[1] == outs[2] and api == outs[0][0]
    verdict(report, 12, ok, f"rerun, 8-thread and CAPDISP_THREADS=3 outputs byte-identical: {ok} "
                            f"({len(outs[0][0])} CSV bytes)")
