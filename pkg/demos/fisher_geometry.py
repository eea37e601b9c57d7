"""Fisher metric and alpha-connections of the categorical family on three points."""
import numpy as np

from toricweyl import categorical, christoffel_alpha, fisher, fisher_def, mean_params
from toricweyl.geometry import check_duality_identity, theta_grid


def main():
    fam = categorical(3)
    print(fam)

    # at the origin everything is rational
    print("h(0) exact:", fisher(fam, [0, 0], exact=True).entries.tolist())

    theta = np.array([0.4, -1.2])
    h = fisher(fam, theta).entries
    h_scores = fisher_def(fam, theta).entries
    print("eta(theta):", mean_params(fam, theta))
    print("Hessian route vs score route:", np.abs(h - h_scores).max())

    for alpha in (-1, 0, 1):
        G = christoffel_alpha(fam, theta, alpha).entries
        print(f"alpha={alpha:+d}  max |Gamma_ij,k| = {np.abs(G).max():.4f}")

    rep = check_duality_identity(fam, theta_grid(2))
    print(rep.line())


if __name__ == "__main__":
    main()
