"""Stock fans and classes used by the test corpus, the demo data, and the docs."""

from __future__ import annotations

from .fan import Fan
from .laurent import LaurentPoly
from .pexp import CartierData, PiecewiseExponential, from_cartier


def projective_line() -> Fan:
    return Fan.build(1, [(1,), (-1,)], [(0,), (1,)])


def projective_plane() -> Fan:
    return Fan.build(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (0, 2), (1, 2)])


def projective_space(n: int) -> Fan:
    rays = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [tuple(sorted(set(range(n + 1)) - {i})) for i in range(n + 1)]
    return Fan.build(n, rays, cones)


def p1_times_p1() -> Fan:
    rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    return Fan.build(2, rays, [(0, 1), (1, 2), (2, 3), (0, 3)])


def hirzebruch(a: int) -> Fan:
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    return Fan.build(2, rays, [(0, 1), (1, 2), (2, 3), (0, 3)])


def weighted_p112() -> Fan:
    """The complete rank-2 fan with rays e1, e2, -e1-2e2; one cone is singular."""
    return Fan.build(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (0, 2), (1, 2)])


def cube_fan() -> Fan:
    """Complete non-simplicial rank-3 fan: cones over the facets of a cube."""
    verts = [(x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1)]
    idx = {v: i for i, v in enumerate(verts)}
    cones = []
    for axis in range(3):
        for sign in (1, -1):
            face = [v for v in verts if v[axis] == sign]
            cones.append(tuple(sorted(idx[v] for v in face)))
    return Fan.build(3, verts, cones)


def singular_quadric_cone_fan() -> Fan:
    """The affine fan of a single rank-2 cone of multiplicity 2."""
    return Fan.build(2, [(1, 0), (1, 2)], [(0, 1)])


def rank3_multiplicity3_fan() -> Fan:
    """A single simplicial rank-3 cone of multiplicity 3."""
    return Fan.build(3, [(1, 0, 0), (1, 3, 0), (0, 0, 1)], [(0, 1, 2)])


# -- classes on the weighted projective plane ---------------------------------


def p112_demo_class(fan: Fan | None = None) -> PiecewiseExponential:
    """A rank-two-looking class on the P(1,1,2) fan, used throughout the docs."""
    fan = fan or weighted_p112()
    e = LaurentPoly.exponential
    values = (
        e((1, 0)) + e((0, 1)),          # cone <e1, e2>
        e((0, 0)) + e((1, -1)),         # cone <e1, -e1-2e2>
        e((-2, 1)) + e((-1, 0)),        # cone <e2, -e1-2e2>
    )
    return PiecewiseExponential.from_values(fan, values)


def p112_spanning_classes(fan: Fan | None = None) -> tuple[PiecewiseExponential, ...]:
    """Three Koszul-style classes supported on the closed strata of P(1,1,2):
    the unit, a divisor class, and a point class at the singular fixed point."""
    fan = fan or weighted_p112()
    e = LaurentPoly.exponential
    one = LaurentPoly.one(2)
    zero = LaurentPoly.zero(2)
    unit = PiecewiseExponential.from_values(fan, (one, one, one))
    divisor = PiecewiseExponential.from_values(
        fan, (zero, one - e((0, 1)), one - e((2, 0)))
    )
    point = PiecewiseExponential.from_values(
        fan, (zero, (one - e((0, 1))) * (one - e((-2, 1))), zero)
    )
    return unit, divisor, point


def p112_duality_cones(fan: Fan | None = None):
    """The cones paired against the spanning classes: origin, the ray through
    (-1,-2), and the singular maximal cone."""
    fan = fan or weighted_p112()
    return ((), fan.rayset_from_vectors([(-1, -2)]), fan.rayset_from_vectors([(1, 0), (-1, -2)]))


def p2_degree_cartier(fan: Fan, d: int) -> CartierData:
    """Local data of the degree-d class on the projective plane fan (rays
    e1, e2, -e1-e2): the vertex of the d-fold simplex minimizing each cone."""
    exps = []
    for rs in fan.maximal_cones:
        if rs == (0, 1):
            exps.append((0, 0))
        elif rs == (0, 2):
            exps.append((0, d))
        elif rs == (1, 2):
            exps.append((d, 0))
        else:
            raise ValueError("not the standard projective plane fan")
    return CartierData(tuple(exps))


def p1_degree_class(fan: Fan, d: int) -> PiecewiseExponential:
    """The degree-d line bundle class on the projective line fan."""
    return from_cartier(fan, CartierData(((0,), (d,))))
