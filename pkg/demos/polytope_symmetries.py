"""Second route: symmetries of the momentum polytope that preserve the dual metric."""
from toricweyl import binomial, categorical, cross_validate, new_family
from toricweyl.polytope import affine_symmetries, metric_symmetries, momentum_polytope, polytope_from_points

square = polytope_from_points([[0, 0], [1, 0], [0, 1], [1, 1], ["1/2", "1/2"]])
print("square vertices:", square.vertices, "centre weights:", [str(w) for w in square.weights[4]])
print("affine symmetries of the square:", len(affine_symmetries(square)))

families = {
    "categorical(4)": categorical(4),
    "binomial(3)": binomial(3),
    "tilted chain": new_family("abcd", [0, 0, 0, "1/7"], [[0], [1], [2], [3]]),
}
for name, fam in families.items():
    poly = momentum_polytope(fam)
    print(f"{name:15s} polytope group {len(affine_symmetries(poly)):3d}   "
          f"metric group {len(metric_symmetries(fam)):3d}")

for name in ("categorical(4)", "binomial(3)"):
    print(name, cross_validate(families[name]).line())
