"""Check estimates against the exact heat kernels and show a caught mutation."""

from liyau import ModelManifold, get_estimate, sharpness_ratio, verify_on_grid
from liyau.kernels import make_grid


def main():
    r, t, spec = make_grid(0.0, 20.0, 256, 0.05, 5.0, 256)
    H3 = ModelManifold.hyperbolic3(1.0)
    for name, params in (("davies_beta", {"beta": 0.5}), ("cor14", {"beta": 0.5}),
                         ("li_xu", {}), ("hamilton", {})):
        rep = verify_on_grid(H3, get_estimate(name, 3, H3.k, **params), r, t, spec)
        print(f"H3 {name:<12} max violation {rep.max_violation:+.3e}  tightness {rep.tightness:.4f}")

    E2 = ModelManifold.euclidean(2)
    for b in (0.5, 0.9, 0.99):
        ratio = sharpness_ratio(E2, get_estimate("davies_beta", 2, 0.0, beta=b), 1.0)
        print(f"E2 Davies beta={b}: sup LHS/RHS = {ratio:.6f}")

    bad = get_estimate("davies_beta", 2, 0.0, beta=0.9999).scaled(0.999)
    rep = verify_on_grid(E2, bad, r, t, spec)
    print(f"RHS scaled by 0.999: passed={rep.passed}, worst at {rep.argmax}")


if __name__ == "__main__":
    main()
