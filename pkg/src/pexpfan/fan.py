"""Cones and fans: faces, multiplicity, completeness, stars, and resolution.

Cones are strongly convex rational polyhedral cones given by primitive
generators on their extreme rays.  Simplicial cones are handled in any rank;
non-simplicial cones use brute-force facet enumeration over generator
subsets and are limited to ambient rank <= 4.  All geometry is exact.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    ConeNotInFan,
    NonPrimitiveRay,
    NotAFan,
    NotSimplicial,
    NotStronglyConvex,
    RayOutsideSupport,
    ResolutionCheckFailed,
    UnsupportedDimension,
)
from .lattice import (
    Vector,
    annihilator,
    identity_quotient,
    invariant_factors,
    is_primitive,
    kernel_basis,
    mat_vec,
    matrix_rank,
    pair,
    pairing_quotient,
    primitive_vector,
    quotient_lattice,
    saturation_basis,
    smith_normal_form,
    unimodular_inverse,
    vec_add,
    QuotientLattice,
)

RaySet = tuple[int, ...]  # sorted tuple of ray indices; () is the zero cone


def _solve_fractions(matrix, rhs):
    """Solve a square exact linear system over the rationals; None if singular."""
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def extreme_rays_of_region(n: int, ineqs, eqs) -> tuple[Vector, ...]:
    """Primitive extreme rays of the pointed part of {x : A x >= 0, B x = 0}.

    Brute force: every extreme ray is cut out by n-1 independent active
    constraints, so enumerate constraint subsets and keep feasible kernel
    lines.  Directions lying in the lineality space are skipped.
    """
    ineqs = tuple(tuple(a) for a in ineqs)
    eqs = tuple(tuple(b) for b in eqs if any(b))
    r_eq = matrix_rank(eqs)
    k = n - r_eq - 1
    if k < 0:
        return ()
    found = set()
    for subset in itertools.combinations(range(len(ineqs)), k):
        rows = eqs + tuple(ineqs[i] for i in subset)
        if matrix_rank(rows) != n - 1:
            continue
        ker = kernel_basis(rows, n)
        if len(ker) != 1:
            continue
        v = ker[0]
        pos = all(pair(a, v) >= 0 for a in ineqs) and all(pair(b, v) == 0 for b in eqs)
        neg = all(pair(a, v) <= 0 for a in ineqs) and all(pair(b, v) == 0 for b in eqs)
        if pos and neg:
            continue  # lineality direction, not an extreme ray
        if pos:
            found.add(v)
        elif neg:
            found.add(tuple(-x for x in v))
    return tuple(sorted(found))


def span_coordinates(rank: int, vectors) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """(basis, projection) for the saturated lattice Span(vectors) & Z^rank.

    ``basis`` has d vectors; ``projection`` is a d x rank matrix with
    projection @ basis = identity, giving exact coordinates on the span.
    """
    cols = tuple(tuple(v) for v in vectors)
    if not cols:
        return (), ()
    a = tuple(zip(*cols))  # rank x k
    u, d, _ = smith_normal_form(a)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i] != 0)
    uinv = unimodular_inverse(u)
    basis = tuple(tuple(row[i] for row in uinv) for i in range(r))
    proj = tuple(u[i] for i in range(r))
    return basis, proj


@dataclass(frozen=True)
class Cone:
    """A strongly convex rational cone with canonical generators.

    Generators are primitive, lie on the extreme rays, and are sorted, so two
    equal cones compare equal.  ``rank`` is the ambient lattice rank.
    """

    rank: int
    generators: tuple[Vector, ...]

    @staticmethod
    def from_generators(rank: int, vectors) -> "Cone":
        raw = []
        for v in vectors:
            v = tuple(v)
            if len(v) != rank:
                raise ValueError(f"generator {v} has length != rank {rank}")
            if any(v):
                raw.append(primitive_vector(v))
        gens = tuple(sorted(set(raw)))
        if not gens:
            return Cone(rank, ())
        cone = Cone(rank, gens)
        if cone.is_simplicial:
            # independent generators always span a pointed cone of extreme rays
            return cone
        if not cone._is_pointed():
            raise NotStronglyConvex(f"cone on {gens} contains a line")
        extreme = cone._extreme_generators()
        if len(extreme) != len(gens):
            return Cone(rank, extreme)
        return cone

    # -- basic geometry ------------------------------------------------------

    @cached_property
    def dim(self) -> int:
        return matrix_rank(self.generators)

    @property
    def is_simplicial(self) -> bool:
        return len(self.generators) == self.dim

    @cached_property
    def _span(self) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
        return span_coordinates(self.rank, self.generators)

    @property
    def span_basis(self) -> tuple[Vector, ...]:
        return self._span[0]

    @cached_property
    def local_generators(self) -> tuple[Vector, ...]:
        proj = self._span[1]
        return tuple(mat_vec(proj, g) for g in self.generators)

    def _is_pointed(self) -> bool:
        if not self.generators:
            return True
        d = self.dim
        rays = extreme_rays_of_region(d, self.local_generators, ())
        if not rays:
            return d == 0
        interior = rays[0]
        for r in rays[1:]:
            interior = vec_add(interior, r)
        return all(pair(interior, g) > 0 for g in self.local_generators)

    @cached_property
    def local_facets(self) -> tuple[tuple[Vector, tuple[int, ...]], ...]:
        """(inward normal in span coordinates, touching generator indices)."""
        d = self.dim
        g = self.local_generators
        if d == 0:
            return ()
        if not self.is_simplicial and self.rank > 4:
            raise UnsupportedDimension(
                "non-simplicial cones are supported only in rank <= 4"
            )
        found: dict[Vector, tuple[int, ...]] = {}
        for subset in itertools.combinations(range(len(g)), d - 1):
            rows = tuple(g[i] for i in subset)
            if matrix_rank(rows) != d - 1:
                continue
            ker = kernel_basis(rows, d)
            if len(ker) != 1:
                continue
            u = ker[0]
            vals = [pair(u, x) for x in g]
            if all(v >= 0 for v in vals) and any(v > 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals) and any(v < 0 for v in vals):
                u = tuple(-x for x in u)
                vals = [-v for v in vals]
            else:
                continue
            contact = tuple(i for i, v in enumerate(vals) if v == 0)
            found[u] = contact
        return tuple(sorted(found.items()))

    def _extreme_generators(self) -> tuple[Vector, ...]:
        d = self.dim
        if len(self.generators) == d:
            return self.generators
        out = []
        for i, g in enumerate(self.generators):
            rows = [u for u, contact in self.local_facets if i in contact]
            if matrix_rank(tuple(rows)) == d - 1:
                out.append(g)
        return tuple(sorted(out))

    def contains(self, v: Vector) -> bool:
        v = tuple(v)
        if len(v) != self.rank:
            raise ValueError("point has the wrong length")
        if not any(v):
            return True
        if not self.generators:
            return False
        if matrix_rank(self.generators + (v,)) != self.dim:
            return False
        x = mat_vec(self._span[1], v)
        if self.is_simplicial:
            cols = tuple(zip(*self.local_generators))
            lam = _solve_fractions(cols, x)
            return lam is not None and all(l >= 0 for l in lam)
        return all(pair(u, x) >= 0 for u, _ in self.local_facets)

    def faces_as_generator_subsets(self) -> tuple[tuple[int, ...], ...]:
        """Every face, as a sorted tuple of generator indices (incl. () and all)."""
        n = len(self.generators)
        if self.is_simplicial:
            out = []
            for r in range(n + 1):
                out.extend(itertools.combinations(range(n), r))
            return tuple(out)
        faces = {tuple(range(n))}
        frontier = {contact for _, contact in self.local_facets}
        faces |= frontier
        while True:
            new = set()
            for a in faces:
                for b in frontier:
                    c = tuple(sorted(set(a) & set(b)))
                    if c not in faces:
                        new.add(c)
            if not new:
                break
            faces |= new
        faces.add(())
        return tuple(sorted(faces))

    def multiplicity(self) -> int:
        """Index of the sublattice spanned by the generators inside Span & N."""
        if not self.is_simplicial:
            raise NotSimplicial("multiplicity is defined for simplicial cones")
        if self.dim == 0:
            return 1
        prod = 1
        for f in invariant_factors(tuple(zip(*self.local_generators))):
            prod *= f
        return prod

    def facet_normal_ambient(self, contact: tuple[int, ...]) -> Vector:
        """Primitive ambient inward normal of the facet touching ``contact``.

        Only meaningful for full-dimensional cones, where the normal is unique
        up to positive scale.
        """
        rows = tuple(self.generators[i] for i in contact)
        ker = kernel_basis(rows, self.rank)
        if len(ker) != 1:
            raise ValueError("facet normal requested for a non-facet")
        u = ker[0]
        vals = [pair(u, g) for g in self.generators]
        if all(v >= 0 for v in vals):
            return u
        if all(v <= 0 for v in vals):
            return tuple(-x for x in u)
        raise ValueError("contact set is not a facet of the cone")


@dataclass(frozen=True)
class Fan:
    """A fan: primitive rays plus maximal cones given as ray-index tuples."""

    rank: int
    rays: tuple[Vector, ...]
    maximal_cones: tuple[RaySet, ...]

    # -- construction --------------------------------------------------------

    @staticmethod
    def build(rank: int, rays, maximal_cones, validate: bool = True) -> "Fan":
        rays = tuple(tuple(r) for r in rays)
        for r in rays:
            if len(r) != rank:
                raise NotAFan(f"ray {r} has length != rank {rank}")
            if not any(r):
                raise NonPrimitiveRay("the zero vector is not a ray")
            if not is_primitive(r):
                raise NonPrimitiveRay(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise NotAFan("duplicate rays")
        cones = []
        for c in maximal_cones:
            c = tuple(sorted(set(int(i) for i in c)))
            if any(i < 0 or i >= len(rays) for i in c):
                raise NotAFan(f"cone {c} references a missing ray")
            cones.append(c)
        if len(set(cones)) != len(cones):
            raise NotAFan("duplicate maximal cones")
        if not cones:
            raise NotAFan("a fan needs at least the zero cone")
        used = set(i for c in cones for i in c)
        if used != set(range(len(rays))):
            raise NotAFan("every ray must appear in some maximal cone")
        if len(cones) > 1 and () in cones:
            raise NotAFan("the zero cone cannot be maximal next to other cones")
        fan = Fan(rank, rays, tuple(cones))
        if validate:
            fan._validate()
        return fan

    def _validate(self):
        cone_objs = self.cone_objects
        for idx, c in enumerate(self.maximal_cones):
            listed = set(self.rays[i] for i in c)
            if set(cone_objs[idx].generators) != listed:
                raise NotAFan(f"maximal cone {c} lists redundant generators")
        for i, j in itertools.combinations(range(len(self.maximal_cones)), 2):
            a, b = set(self.maximal_cones[i]), set(self.maximal_cones[j])
            if a <= b or b <= a:
                raise NotAFan(f"maximal cone {i} is contained in cone {j}")
            self._check_pair(i, j)

    def _check_pair(self, i: int, j: int):
        ci, cj = self.cone_objects[i], self.cone_objects[j]
        shared = tuple(sorted(set(self.maximal_cones[i]) & set(self.maximal_cones[j])))
        shared_vecs = set(self.rays[k] for k in shared)
        if shared not in self.face_index(i) or shared not in self.face_index(j):
            raise NotAFan(
                f"cones {self.maximal_cones[i]} and {self.maximal_cones[j]} "
                f"meet outside a common face"
            )
        # geometric intersection must equal the cone on the shared rays
        eqs = annihilator(self.rank, ci.generators) + annihilator(self.rank, cj.generators)
        ineqs = []
        for cone in (ci, cj):
            proj = cone._span[1]
            for u_loc, _ in cone.local_facets:
                # pull the span-local normal back to an ambient functional
                u_amb = tuple(sum(u_loc[t] * proj[t][s] for t in range(len(u_loc)))
                              for s in range(self.rank))
                ineqs.append(u_amb)
        rays = extreme_rays_of_region(self.rank, tuple(ineqs), eqs)
        if set(rays) != shared_vecs:
            raise NotAFan(
                f"cones {self.maximal_cones[i]} and {self.maximal_cones[j]} "
                f"intersect in a non-face"
            )

    # -- derived structure -----------------------------------------------------

    @cached_property
    def cone_objects(self) -> tuple[Cone, ...]:
        return tuple(
            Cone.from_generators(self.rank, tuple(self.rays[i] for i in c))
            for c in self.maximal_cones
        )

    def cone(self, index: int) -> Cone:
        return self.cone_objects[index]

    @cached_property
    def _ray_index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.rays)}

    def face_index(self, max_index: int) -> frozenset[RaySet]:
        return self._face_indices[max_index]

    @cached_property
    def _face_indices(self) -> tuple[frozenset[RaySet], ...]:
        out = []
        for idx, cone in enumerate(self.cone_objects):
            gen_to_ray = {g: self._ray_index[g] for g in cone.generators}
            faces = set()
            for subset in cone.faces_as_generator_subsets():
                faces.add(tuple(sorted(gen_to_ray[cone.generators[i]] for i in subset)))
            out.append(frozenset(faces))
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[RaySet, ...]:
        """All cones of the fan, as sorted ray-index tuples (incl. the zero cone)."""
        all_faces = set()
        for fs in self._face_indices:
            all_faces |= fs
        return tuple(sorted(all_faces, key=lambda f: (len(f), f)))

    def has_face(self, rayset) -> bool:
        return tuple(sorted(rayset)) in set(self.faces)

    def face_dim(self, rayset: RaySet) -> int:
        return matrix_rank(tuple(self.rays[i] for i in rayset))

    def face_containing_maximal(self, rayset: RaySet) -> int:
        rs = tuple(sorted(rayset))
        for i in range(len(self.maximal_cones)):
            if rs in self.face_index(i):
                return i
        raise ConeNotInFan(f"{rayset} is not a cone of the fan")

    def require_face(self, rayset) -> RaySet:
        rs = tuple(sorted(rayset))
        if not self.has_face(rs):
            raise ConeNotInFan(f"{list(rayset)} is not a cone of the fan")
        return rs

    def rayset_from_vectors(self, vectors) -> RaySet:
        """Identify a cone of the fan from generator coordinates."""
        idx = []
        for v in vectors:
            v = primitive_vector(tuple(v))
            if v not in self._ray_index:
                raise ConeNotInFan(f"{v} is not a ray of the fan")
            idx.append(self._ray_index[v])
        return self.require_face(idx)

    @cached_property
    def _quotients(self) -> dict[RaySet, QuotientLattice]:
        return {}

    def face_quotient(self, rayset: RaySet) -> QuotientLattice:
        """Quotient M -> M_tau presenting functions on the span of the face.

        For a ray the quotient coordinate of u is exactly <u, generator>; for
        a full-dimensional face the quotient is the identity on M.
        """
        rs = self.require_face(rayset)
        cache = self._quotients
        if rs not in cache:
            gens = tuple(self.rays[i] for i in rs)
            d = matrix_rank(gens)
            if d == self.rank:
                q = identity_quotient(self.rank)
            elif d == 0:
                q = pairing_quotient(self.rank, ())
            elif d == 1:
                q = pairing_quotient(self.rank, (primitive_vector(gens[0]),))
            else:
                q = pairing_quotient(self.rank, saturation_basis(self.rank, gens))
            cache[rs] = q
        return cache[rs]

    def contains_point(self, v: Vector) -> bool:
        return any(c.contains(v) for c in self.cone_objects)

    # -- completeness -----------------------------------------------------------

    def is_complete(self) -> bool:
        """Facet-pairing test: full-dimensional cones, every facet shared by
        exactly two cones sitting on opposite sides, facet graph connected."""
        if self.rank == 0:
            return self.maximal_cones == ((),)
        cones = self.cone_objects
        if any(c.dim != self.rank for c in cones):
            return False
        facet_map: dict[RaySet, list[tuple[int, Vector]]] = {}
        for idx, cone in enumerate(cones):
            gen_to_ray = {g: self._ray_index[g] for g in cone.generators}
            for subset in cone.faces_as_generator_subsets():
                if matrix_rank(tuple(cone.generators[i] for i in subset)) != self.rank - 1:
                    continue
                if len(subset) < self.rank - 1:
                    continue
                rayset = tuple(sorted(gen_to_ray[cone.generators[i]] for i in subset))
                normal = cone.facet_normal_ambient(subset)
                facet_map.setdefault(rayset, []).append((idx, normal))
        adjacency: dict[int, set[int]] = {i: set() for i in range(len(cones))}
        for rayset, entries in facet_map.items():
            if len(entries) != 2:
                return False
            (i, ni), (j, nj) = entries
            if ni != tuple(-x for x in nj):
                return False
            adjacency[i].add(j)
            adjacency[j].add(i)
        seen = {0}
        queue = [0]
        while queue:
            cur = queue.pop()
            for nxt in adjacency[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return len(seen) == len(cones)

    def is_smooth(self) -> bool:
        return all(c.is_simplicial and c.multiplicity() == 1 for c in self.cone_objects)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.maximal_cones],
        }

    @staticmethod
    def from_json(obj: dict) -> "Fan":
        if not isinstance(obj, dict) or not {"rank", "rays", "max_cones"} <= set(obj):
            raise ValueError("fan JSON needs 'rank', 'rays', and 'max_cones'")
        return Fan.build(obj["rank"], [tuple(r) for r in obj["rays"]], obj["max_cones"])


def build_fan(rank: int, rays, maximal_cones) -> Fan:
    return Fan.build(rank, rays, maximal_cones)


def multiplicity(cone: Cone) -> int:
    return cone.multiplicity()


# -- star quotients ---------------------------------------------------------------


def star_quotient(fan: Fan, rayset) -> tuple[Fan, tuple[int, ...], QuotientLattice]:
    """The fan of the orbit closure of a cone, in N/N_tau.

    Returns (quotient fan, lifting, lattice quotient); ``lifting[i]`` is the
    index of the source maximal cone of ``fan`` projecting onto maximal cone i
    of the quotient fan.
    """
    rs = fan.require_face(rayset)
    tau_gens = tuple(fan.rays[i] for i in rs)
    n_tau = saturation_basis(fan.rank, tau_gens)
    quot = quotient_lattice(fan.rank, n_tau)
    if not n_tau:
        return fan, tuple(range(len(fan.maximal_cones))), quot
    new_rank = fan.rank - len(n_tau)

    star = [i for i, c in enumerate(fan.maximal_cones) if set(rs) <= set(c)]
    if not star:
        raise ConeNotInFan("face not contained in any maximal cone")

    images = []
    for i in star:
        cone = fan.cone_objects[i]
        img = Cone.from_generators(
            new_rank, tuple(quot.project_vector(g) for g in cone.generators)
        )
        images.append(img.generators)
    if len(set(images)) != len(images):
        raise NotAFan("star projection produced coinciding cones")

    ray_list: list[Vector] = []
    ray_pos: dict[Vector, int] = {}
    cone_indices = []
    for gens in images:
        idx = []
        for g in gens:
            if g not in ray_pos:
                ray_pos[g] = len(ray_list)
                ray_list.append(g)
            idx.append(ray_pos[g])
        cone_indices.append(tuple(sorted(idx)))
    qfan = Fan.build(new_rank, tuple(ray_list), tuple(cone_indices))
    # Fan.build preserves cone order, so the lifting stays aligned
    return qfan, tuple(star), quot


# -- subdivisions --------------------------------------------------------------------


@dataclass(frozen=True)
class SubdivisionMap:
    """A refinement of fans with the containing-cone assignment recorded."""

    fine: Fan
    coarse: Fan
    assignment: tuple[int, ...]  # fine max cone index -> coarse max cone index

    def __post_init__(self):
        if len(self.assignment) != len(self.fine.maximal_cones):
            raise ValueError("assignment length must match the fine cone count")

    @staticmethod
    def identity(fan: Fan) -> "SubdivisionMap":
        return SubdivisionMap(fan, fan, tuple(range(len(fan.maximal_cones))))

    def to_json(self) -> dict:
        return {
            "fine": self.fine.to_json(),
            "coarse": self.coarse.to_json(),
            "assignment": list(self.assignment),
        }

    @staticmethod
    def from_json(obj: dict) -> "SubdivisionMap":
        return SubdivisionMap(
            Fan.from_json(obj["fine"]),
            Fan.from_json(obj["coarse"]),
            tuple(obj["assignment"]),
        )


def compose_subdivisions(finer: SubdivisionMap, coarser: SubdivisionMap) -> SubdivisionMap:
    """Compose fine -> mid -> coarse refinements (maximal cones keep dimension,
    so the assigned cone is still the minimal one containing each fine cone)."""
    if finer.coarse != coarser.fine:
        raise ValueError("subdivision maps do not compose")
    assignment = tuple(coarser.assignment[i] for i in finer.assignment)
    return SubdivisionMap(finer.fine, coarser.coarse, assignment)


def stellar_subdivision(fan: Fan, ray: Vector) -> SubdivisionMap:
    """Refine by a primitive ray: every cone containing the ray is replaced by
    the joins of the ray with its facets not containing it."""
    ray = tuple(ray)
    if not any(ray):
        raise NonPrimitiveRay("cannot subdivide at the zero vector")
    if not is_primitive(ray):
        raise NonPrimitiveRay(f"{ray} is not primitive")
    containing = [i for i, c in enumerate(fan.cone_objects) if c.contains(ray)]
    if not containing:
        raise RayOutsideSupport(f"{ray} lies outside the support of the fan")

    rays = list(fan.rays)
    if ray in fan._ray_index:
        new_idx = fan._ray_index[ray]
    else:
        new_idx = len(rays)
        rays.append(ray)

    new_cones: list[RaySet] = []
    assignment: list[int] = []
    seen: dict[RaySet, int] = {}

    def emit(rayset: RaySet, source: int):
        if rayset in seen:
            assert assignment[seen[rayset]] == source, "ambiguous subdivision piece"
            return
        seen[rayset] = len(new_cones)
        new_cones.append(rayset)
        assignment.append(source)

    for i, rayset in enumerate(fan.maximal_cones):
        if i not in containing:
            emit(rayset, i)
            continue
        cone = fan.cone_objects[i]
        gen_to_ray = {g: fan._ray_index[g] for g in cone.generators}
        cdim = cone.dim
        for subset in cone.faces_as_generator_subsets():
            if matrix_rank(tuple(cone.generators[t] for t in subset)) != cdim - 1:
                continue
            facet_cone = Cone.from_generators(fan.rank, tuple(cone.generators[t] for t in subset))
            if facet_cone.contains(ray):
                continue
            piece = tuple(sorted(
                set(gen_to_ray[cone.generators[t]] for t in subset) | {new_idx}
            ))
            emit(piece, i)

    used = set(i for c in new_cones for i in c)
    keep = [i for i in range(len(rays)) if i in used]
    remap = {old: new for new, old in enumerate(keep)}
    # a stellar refinement of a fan is a fan; skip the quadratic revalidation
    fine = Fan.build(
        fan.rank,
        tuple(rays[i] for i in keep),
        tuple(tuple(sorted(remap[i] for i in c)) for c in new_cones),
        validate=False,
    )
    return SubdivisionMap(fine, fan, tuple(assignment))


# -- resolution -----------------------------------------------------------------------


def _box_points(cone: Cone) -> list[tuple[Fraction, Vector]]:
    """Nonzero lattice points of the half-open fundamental parallelepiped of a
    simplicial cone, as (coefficient sum, ambient point), sorted."""
    d = cone.dim
    g = cone.local_generators
    basis = cone.span_basis
    lo = tuple(sum(min(0, g[i][c]) for i in range(d)) for c in range(d))
    hi = tuple(sum(max(0, g[i][c]) for i in range(d)) for c in range(d))
    cols = tuple(zip(*g))
    out = []
    for x in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        if not any(x):
            continue
        lam = _solve_fractions(cols, x)
        if lam is None or not all(0 <= l < 1 for l in lam):
            continue
        ambient = tuple(
            sum(x[i] * basis[i][c] for i in range(d)) for c in range(cone.rank)
        )
        out.append((sum(lam), ambient))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def total_excess_multiplicity(fan: Fan) -> int:
    """Sum over maximal cones of (multiplicity - 1); zero iff smooth."""
    return sum(c.multiplicity() - 1 for c in fan.cone_objects)


def resolve(
    fan: Fan,
    *,
    rng: random.Random | None = None,
    extra_rounds: int = 0,
    check_progress: bool = True,
) -> SubdivisionMap:
    """Refine until every maximal cone is smooth; returns the composed map.

    First makes every cone simplicial by stellar subdivisions at existing
    rays, then repeatedly subdivides a singular cone at a parallelepiped
    lattice point of minimal coefficient sum.  With the default deterministic
    choices the result is canonical; an ``rng`` permutes the choice of
    singular cone and the tie-breaks, and ``extra_rounds`` appends smooth
    refinements, both of which produce alternative valid resolutions.

    ``check_progress`` asserts that the total excess multiplicity strictly
    drops at every singular subdivision step.
    """
    current = SubdivisionMap.identity(fan)

    # phase 1: simplicialize by pulling existing rays
    guard = 0
    while any(not c.is_simplicial for c in current.fine.cone_objects):
        guard += 1
        if guard > 1000:
            raise ResolutionCheckFailed("simplicialization did not terminate")
        f = current.fine
        candidates = sorted(
            {f.rays[i]
             for idx, c in enumerate(f.maximal_cones)
             if not f.cone_objects[idx].is_simplicial
             for i in c}
        )
        ray = rng.choice(candidates) if rng else candidates[0]
        step = stellar_subdivision(f, ray)
        if step.fine == f:
            # pulling this ray changed nothing; fall back to the next candidate
            for alt in candidates:
                step = stellar_subdivision(f, alt)
                if step.fine != f:
                    break
            else:
                raise ResolutionCheckFailed("no subdividing ray found")
        current = compose_subdivisions(step, current)

    # phase 2: subdivide singular cones at parallelepiped points
    guard = 0
    while True:
        f = current.fine
        singular = [
            (i, f.cone_objects[i].multiplicity())
            for i in range(len(f.maximal_cones))
            if f.cone_objects[i].multiplicity() > 1
        ]
        if not singular:
            break
        guard += 1
        if guard > 10000:
            raise ResolutionCheckFailed("resolution did not terminate")
        if rng:
            idx = rng.choice([i for i, _ in singular])
        else:
            top = max(m for _, m in singular)
            idx = min(i for i, m in singular if m == top)
        box = _box_points(f.cone_objects[idx])
        assert box, "singular simplicial cone has no parallelepiped points"
        best = box[0][0]
        minimal = [p for s, p in box if s == best]
        point = rng.choice(minimal) if rng else minimal[0]
        before = total_excess_multiplicity(f)
        step = stellar_subdivision(f, primitive_vector(point))
        after = total_excess_multiplicity(step.fine)
        if check_progress and after >= before:
            raise ResolutionCheckFailed(
                f"total excess multiplicity did not drop: {before} -> {after}"
            )
        current = compose_subdivisions(step, current)

    # optional smooth refinements, for resolution-independence experiments
    for _ in range(extra_rounds):
        f = current.fine
        src = rng.randrange(len(f.maximal_cones)) if rng else 0
        cone = f.cone_objects[src]
        if cone.dim < 2:
            continue
        pairs = list(itertools.combinations(range(len(cone.generators)), 2))
        a, b = rng.choice(pairs) if rng else pairs[0]
        ray = primitive_vector(vec_add(cone.generators[a], cone.generators[b]))
        step = stellar_subdivision(f, ray)
        current = compose_subdivisions(step, current)
        assert current.fine.is_smooth()

    return current
