#!/usr/bin/env python3
"""End-to-end demo on the weighted projective plane P(1,1,2).

Builds the fan with rays e1, e2, -e1-2e2, validates four piecewise
exponential functions, resolves the singular cone, decomposes the sample
class over the Koszul-style spanning classes, prints the duality Gram
matrix and the solved dual basis.
"""

from pexpfan import catalog
from pexpfan.fan import resolve
from pexpfan.ktheory import chi, decompose, dual_basis_solve, gram_matrix, poly_det
from pexpfan.laurent import format_poly
from pexpfan.pexp import gkm_validate


def main() -> None:
    fan = catalog.weighted_p112()
    print("fan rays:", fan.rays)
    print("maximal cones:", fan.maximal_cones)
    print("complete:", fan.is_complete(), " smooth:", fan.is_smooth())

    sub = resolve(fan)
    print("\nresolution rays:", sub.fine.rays)
    print("resolution cones:", sub.fine.maximal_cones)

    sample = catalog.p112_demo_class(fan)
    unit, divisor, point = catalog.p112_spanning_classes(fan)
    for name, f in (("sample", sample), ("unit", unit), ("divisor", divisor), ("point", point)):
        ok = gkm_validate(fan, f.values).ok
        print(f"\n{name}: GKM {'valid' if ok else 'INVALID'}")
        for rayset, v in zip(fan.maximal_cones, f.values):
            print(f"  on cone {list(rayset)}: {format_poly(v)}")

    coeffs = decompose(sample, (unit, divisor, point))
    print("\nsample = sum of coefficients times (unit, divisor, point):")
    for c in coeffs:
        print("  ", format_poly(c))

    print("\nchi(sample) =", format_poly(chi(fan, sample, resolution=sub)))

    cones = catalog.p112_duality_cones(fan)
    gram = gram_matrix(fan, (unit, divisor, point), cones, resolution=sub)
    print("\nGram matrix against (origin, divisor ray, singular cone):")
    for label, row in zip(gram.row_labels, gram.entries):
        print(f"  {label}: " + " | ".join(format_poly(x) for x in row))
    det = poly_det([list(r) for r in gram.entries], fan.rank)
    print("det =", format_poly(det), "(unit in Z[M]:", det.is_unit(), ")")

    duals = dual_basis_solve(fan, cones, (unit, divisor, point), resolution=sub)
    print("\nsolved dual basis (Gram = identity):")
    for j, g in enumerate(duals):
        values = " ; ".join(format_poly(v) for v in g.values)
        print(f"  dual {j}: {values}")


if __name__ == "__main__":
    main()
