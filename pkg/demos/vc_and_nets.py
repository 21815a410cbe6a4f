"""Shattering by caps on S^2 and the size of the approximation families."""

import math

from capdisp.nets import delta_approx_lenses, n_from_approx
from capdisp.sphere import Rng, sample_uniform
from capdisp.vc import phi_sauer_shelah, shatter_details, traversal_epsilon, vc_lower_bound_search


def main():
    W = vc_lower_bound_search(2, 4, 1000, Rng(0))
    print("4 points on S^2 shattered by caps:", W is not None)
    print("5 points, 200 random trials:", vc_lower_bound_search(2, 5, 200, Rng(0)) is not None)

    print("\nshatter counts of random sets against Sauer-Shelah with VC dimension 4")
    for m in (4, 6, 8, 10, 12):
        r = shatter_details(sample_uniform(2, m, Rng(m)))
        print(f"  m={m:2d}  realized={r.count:5d}  Phi_4(m)={phi_sauer_shelah(4, m):5d}  2^m={2**m}")

    print("\ntraversal eps_m at which the VC bound drops below 1 (d=2, VC dimension 4)")
    for m in (10, 100, 1000, 10**6):
        print(f"  m={m:8d}  eps_m={traversal_epsilon(m, 4):.3e}  m*eps_m={m * traversal_epsilon(m, 4):.2f}")

    F = delta_approx_lenses(2, 0.3)
    print(f"\nlens family for gamma=0.3: {F.size:.3e} members (bound {F.cardinality_bound:.3e}), "
          f"implying dispersion <= 0.3 with n = {n_from_approx(0.5, 0.3, F.size):.0f} points")


if __name__ == "__main__":
    main()
