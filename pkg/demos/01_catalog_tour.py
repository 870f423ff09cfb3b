"""Evaluate every catalog estimate at one point and print it in normal form.

Run with ``python3 demos/01_catalog_tour.py``.
"""

from liyau import get_estimate

N, K, T = 3, 1.0, 0.5

CATALOG = [
    ("li_yau", {"alpha": 2.0}),
    ("davies_alpha", {"alpha": 2.0}),
    ("davies_beta", {"beta": 0.5}),
    ("hamilton", {}),
    ("hamilton_theta", {"theta": 0.5}),
    ("li_xu", {}),
    ("li_xu_linear", {}),
    ("qian_theta", {"theta": 2 / 3}),
    ("qian_general", {"weight": {"family": "sinh_sq", "params": [K], "T": 2.0}}),
    ("psi1", {"beta_fn": {"family": "rational", "params": [1.0], "T": 2.0}}),
    ("psi2", {"beta_fn": {"family": "exponential", "params": [0.5], "T": 2.0}}),
    ("cor12", {"beta": 0.5}),
    ("cor14", {"beta": 0.5}),
    ("cor15", {"beta": 0.5}),
]


def main():
    print(f"beta(t)|grad f|^2 - f_t <= B(t)   at n={N}, k={K}, t={T}")
    print(f"{'estimate':<15}{'beta':>10}{'B':>12}")
    for name, params in CATALOG:
        beta, bound = get_estimate(name, N, K, **params).evaluate(T)
        print(f"{name:<15}{beta:>10.4f}{bound:>12.4f}")


if __name__ == "__main__":
    main()
