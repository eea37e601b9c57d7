"""The normalizer of the torus as a semidirect product with the Weyl group."""
from fractions import Fraction

from toricweyl import (SemidirectElement, SemidirectModel, TorusElement, binomial, categorical,
                       enumerate_weyl, verify_normalizer_model)
from toricweyl.errors import NonIntegral

report = enumerate_weyl(binomial(2))
model = SemidirectModel(report)
s = 1 - report.identity_index
x = SemidirectElement(TorusElement.of([Fraction(1, 4)]), s)
y = SemidirectElement(TorusElement.of([Fraction(1, 10)]), s)
print("rho(s) =", model.rho[s])
print("x * y =", model.mul(x, y))
print("x * x =", model.mul(x, x))
print("x^-1 =", model.inverse(x))

for fam in (categorical(3), categorical(4), binomial(4)):
    print(fam, verify_normalizer_model(enumerate_weyl(fam), trials=500).line())

# a lattice that is not preserved by the Weyl group
try:
    SemidirectModel(enumerate_weyl(categorical(3)), [[2, 0], [0, 1]])
except NonIntegral as exc:
    print("rejected:", exc, exc.offending)
