"""Solve the radial heat equation and monitor an estimate along the run."""

from liyau import InitialCondition, ModelManifold, RadialGrid, get_estimate, monitor, run_radial_heat
from liyau.simulate import calibrate_slack, kernel_error


def main():
    E3, H3 = ModelManifold.euclidean(3), ModelManifold.hyperbolic3(1.0)
    gauss = InitialCondition("gaussian", t0=0.1)
    for nr, dt in ((241, 0.01), (481, 0.005), (961, 0.0025)):
        err = kernel_error(run_radial_heat(E3, RadialGrid(nr=nr, dt=dt), gauss))
        print(f"nr={nr:<4} dt={dt:<7} kernel L_inf error {err:.3e}")

    g = RadialGrid()
    for m, k in ((E3, 1.0), (H3, 2.0)):
        e = get_estimate("cor14", 3, k, beta=0.5)
        eps = calibrate_slack(m, g, e)
        for ic in (InitialCondition("bump"), InitialCondition("constant_plus_bump", amplitude=5.0)):
            rep = monitor(run_radial_heat(m, g, ic), e, eps_disc=eps)
            print(f"{m.geometry:<12}{ic.kind:<20} eps={eps:.3f}  passed={rep.passed}  "
                  f"max violation {rep.max_violation:+.3f}")


if __name__ == "__main__":
    main()
