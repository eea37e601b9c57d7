"""The Kähler structure on the tangent bundle in (q, r) coordinates."""
import numpy as np

from toricweyl import categorical, check_kahler, connector_at, kahler_at
from toricweyl.dombrowski import AffineChange
from toricweyl.geometry import theta_grid

fam = categorical(3)
data = kahler_at(fam, [0.1, 0.3], [1.0, -2.0])
np.set_printoptions(precision=4, suppress=True)
print("g =\n", data.g)
print("omega =\n", data.omega)
print("J =\n", data.J)

print(check_kahler(fam, theta_grid(2, 4)).line())

# the exponential connection is flat in theta and in any affine chart,
# so the connector just reads off the fibre component of the tangent vector
change = AffineChange(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))
print(connector_at(fam, change, [0.1, 0.3, 1.0, -2.0], [0.5, 0.5, 0.25, 0.75]))
