"""Weyl groups from permutations of the sample space with affine witnesses."""
from toricweyl import binomial, categorical, enumerate_weyl, new_family


def show(title, fam):
    rep = enumerate_weyl(fam)
    d = rep.descriptors
    print(f"{title:28s} order {rep.order:4d}  {d['name']:14s} abelian={d['abelian']}")
    return rep


def main():
    for m in (3, 4, 5):
        show(f"categorical({m})", categorical(m))
    for n in (2, 3, 4, 5):
        rep = show(f"binomial({n})", binomial(n))
    flip = rep.elements[1 - rep.identity_index]
    print("binomial(5) reversal witness:", flip.to_dict())

    # On three points the family is the whole open simplex for any C,
    # so tilting C leaves all six permutations in place.
    show("categorical(3), C=(0,0,1/7)", new_family("abc", [0, 0, "1/7"], [[1, 0], [0, 1], [0, 0]]))

    # With four collinear points the tilt does break the reversal.
    show("chain, C=(0,0,0,0)", new_family("abcd", [0, 0, 0, 0], [[0], [1], [2], [3]]))
    show("chain, C=(0,0,0,1/7)", new_family("abcd", [0, 0, 0, "1/7"], [[0], [1], [2], [3]]))


if __name__ == "__main__":
    main()
