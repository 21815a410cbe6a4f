"""Cap volumes, the named configurations and the density identity n * disp = n * V(phi)."""

import math

from capdisp.bounds import density_identity_check
from capdisp.configurations import block_simplices, cross_polytope, regular_simplex
from capdisp.dispersion import covering_radius_exact
from capdisp.volume import cap_volume, gaussian_tail


def main():
    print("V_d(pi/2 - 1/sqrt(d)) against the Gaussian tail P[g >= 1] =", f"{gaussian_tail(1.0):.6f}")
    for d in (10, 100, 1000, 10000):
        print(f"  d={d:6d}  V={cap_volume(d, math.pi / 2 - 1 / math.sqrt(d)):.6f}")

    print("\nsimplex: phi = arccos(1/(d+1)); 1/2 - disp approaches 1/sqrt(2 pi d)")
    for d in range(2, 9):
        r = covering_radius_exact(regular_simplex(d))
        print(f"  d={d}  phi={r.covering_radius:.12f}  disp={r.value:.6f}  "
              f"(1/2 - disp) sqrt(2 pi d) = {(0.5 - r.value) * math.sqrt(2 * math.pi * d):.4f}")

    print("\ncross-polytope: phi = arccos(1/sqrt(d+1))")
    for d in range(2, 9):
        r = covering_radius_exact(cross_polytope(d))
        print(f"  d={d}  phi={r.covering_radius:.12f}  n*disp={(2 * d + 2) * r.value:.4f}")

    print("\nblock simplices between the two, d=4")
    for n in range(6, 11):
        rep = density_identity_check(block_simplices(4, n))
        print(f"  n={n:2d}  n*disp={rep.observed:.4f}  |value - V(phi)|={rep.inputs['identity_gap']:.1e}")


if __name__ == "__main__":
    main()
