"""Going back and forth between natural and expectation parameters."""
import numpy as np

from toricweyl import binomial, categorical, legendre_dual_point, legendre_roundtrip
from toricweyl.errors import OutsidePolytope


def binomial_table():
    fam = binomial(4)
    print("eta    theta       closed form   k(eta)")
    for eta in (0.5, 1.0, 2.0, 3.5):
        dp = legendre_dual_point(fam, [eta])
        q = eta / 4
        print(f"{eta:4.1f}  {dp.theta[0]: .8f}  {np.log(q / (1 - q)): .8f}  {dp.k[0, 0]:.6f}")


def roundtrips():
    rng = np.random.default_rng(1)
    fam = categorical(5)
    worst = 0.0
    for _ in range(50):
        err, dp = legendre_roundtrip(fam, rng.uniform(-3, 3, size=4))
        worst = max(worst, err)
    print("worst theta -> eta -> theta error over 50 points:", worst)


def outside():
    try:
        legendre_dual_point(categorical(3), ["1/2", "1/2"])
    except OutsidePolytope as exc:
        print("boundary point rejected:", exc)


if __name__ == "__main__":
    binomial_table()
    roundtrips()
    outside()
