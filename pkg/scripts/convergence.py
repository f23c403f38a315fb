"""Print how the N-node CDF approximation and the u_M ratio converge.

    python scripts/convergence.py
"""

import numpy as np

from nomaperf import chebyshev, ergodic
from nomaperf.channel import Geometry, cdf_exact
from nomaperf.numerics import find_root


def cdf_error(geo, order_n, normalize):
    model = chebyshev.build_model(geo, order_n, normalize)
    y_hi = find_root(lambda y: cdf_exact(y, geo) - 0.999, 1e-9, 1e6)
    ys = np.linspace(0.0, y_hi, 200)
    return float(np.max(np.abs(chebyshev.cdf_approx(model, ys) - cdf_exact(ys, geo))))


def main():
    print("sup |F_N - F| on 200 points up to F = 0.999")
    print(f"{'R_D':>4} {'alpha':>5} {'N':>4} {'normalized':>12} {'literal':>12}")
    for radius, alpha in [(5.0, 2.0), (5.0, 3.0), (10.0, 3.0)]:
        geo = Geometry(radius, alpha, 1)
        for order_n in (5, 10, 20, 30, 50):
            print(f"{radius:4g} {alpha:5g} {order_n:4d} {cdf_error(geo, order_n, True):12.3e} "
                  f"{cdf_error(geo, order_n, False):12.3e}")

    print("\nu_M / ((1/c_N) ln M), R_D=5, alpha=2, N=10")
    model = chebyshev.build_model(Geometry(5.0, 2.0, 1), 10)
    for exp in (2, 3, 6, 9, 12, 20, 30, 60):
        sol = ergodic.solve_u_m(model, 10**exp)
        print(f"M=1e{exp:<3d} root={sol.root:10.4f} leading={sol.leading_order:10.4f} "
              f"ratio={sol.root / sol.leading_order:.4f} offset={sol.root - sol.leading_order:+.3f}")


if __name__ == "__main__":
    main()
