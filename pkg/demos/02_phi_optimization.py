"""Optimise the parameter curve for a fixed endpoint beta(t0) = beta0.

The linear family reproduces the piecewise closed form; richer families
can only do as well or better.
"""

from liyau import corollary_bound, phi_upper

BETA0, N, K = 0.5, 2, 1.0
FAMILIES = ("linear", "exponential", "rational", "piecewise_linear:3")


def main():
    print(f"{'t0':>6}{'cor12':>10}{'phi1':>10}{'cor15':>10}{'phi2':>10}")
    for t0 in (0.25, 0.5, 1.0, 2.0, 4.0):
        p1 = phi_upper("phi1", BETA0, t0, N, K, families=FAMILIES, seed=0)
        p2 = phi_upper("phi2", BETA0, t0, N, K, families=FAMILIES, seed=0)
        print(f"{t0:>6g}{corollary_bound('cor12', BETA0, t0, N, K):>10.4f}{p1.value:>10.4f}"
              f"{corollary_bound('cor15', BETA0, t0, N, K):>10.4f}{p2.value:>10.4f}")
    best = phi_upper("phi1", BETA0, 1.0, N, K, families=FAMILIES, seed=0)
    print("per-family phi1 at t0 = 1:", {k: round(v, 6) for k, v in best.family_values.items()})


if __name__ == "__main__":
    main()
