"""Integral piecewise exponential functions on a fan.

A function is stored as one exponential sum per maximal cone.  On a maximal
cone of full dimension the value lives in Z[M] itself; on a lower-dimensional
maximal cone it lives in the quotient Z[M_sigma], with the fan supplying the
canonical quotient presentation.  Face compatibility (the GKM condition) is
what makes the collection a single function on the support.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    FanMismatch,
    GkmViolationError,
    IncompatibleCartierData,
    NotDescendable,
    RankMismatch,
)
from .fan import Fan, RaySet, SubdivisionMap
from .lattice import IntMatrix, Vector, mat_mul
from .laurent import LaurentPoly


def _comparison_matrix(fan_from: Fan, face_from: RaySet, fan_to: Fan, face_to: RaySet) -> IntMatrix:
    """Matrix of M_{face_from} -> M_{face_to}: lift through the section, then
    project.  Well defined whenever Span(face_to) <= Span(face_from)."""
    q_from = fan_from.face_quotient(face_from)
    q_to = fan_to.face_quotient(face_to)
    return mat_mul(q_to.projection, q_from.section)


@dataclass(frozen=True)
class GkmViolation:
    """A failed face compatibility between two maximal cones."""

    cone_a: int
    cone_b: int
    face: RaySet
    restriction_a: LaurentPoly
    restriction_b: LaurentPoly

    def describe(self) -> str:
        return (
            f"maximal cones {self.cone_a} and {self.cone_b} disagree on their "
            f"common face {list(self.face)}: {self.restriction_a} vs {self.restriction_b}"
        )


@dataclass(frozen=True)
class GkmReport:
    ok: bool
    function: "PiecewiseExponential | None"
    violations: tuple[GkmViolation, ...]


@dataclass(frozen=True)
class PiecewiseExponential:
    fan: Fan
    values: tuple[LaurentPoly, ...]

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_values(fan: Fan, values) -> "PiecewiseExponential":
        report = gkm_validate(fan, values)
        if not report.ok:
            raise GkmViolationError(report.violations)
        return report.function

    @staticmethod
    def constant(fan: Fan, c: int) -> "PiecewiseExponential":
        values = tuple(
            LaurentPoly.constant(fan.face_quotient(rs).rank, c)
            for rs in fan.maximal_cones
        )
        return PiecewiseExponential(fan, values)

    @staticmethod
    def global_exponential(fan: Fan, exponent: Vector, coeff: int = 1) -> "PiecewiseExponential":
        g = LaurentPoly.exponential(exponent, coeff)
        return PiecewiseExponential.constant(fan, 1).module_action(g)

    # -- ring structure ---------------------------------------------------

    def _check_fan(self, other: "PiecewiseExponential"):
        if self.fan != other.fan:
            raise FanMismatch("functions live on different fans")

    def _wrap(self, values) -> "PiecewiseExponential":
        # conewise ring operations preserve face compatibility; re-check the
        # invariant in debug mode only
        assert gkm_validate(self.fan, values).ok, "ring operation broke GKM"
        return PiecewiseExponential(self.fan, tuple(values))

    def __add__(self, other: "PiecewiseExponential") -> "PiecewiseExponential":
        self._check_fan(other)
        return self._wrap(tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "PiecewiseExponential") -> "PiecewiseExponential":
        self._check_fan(other)
        return self._wrap(tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, other: "PiecewiseExponential") -> "PiecewiseExponential":
        self._check_fan(other)
        return self._wrap(tuple(a * b for a, b in zip(self.values, other.values)))

    def module_action(self, g: LaurentPoly) -> "PiecewiseExponential":
        """Multiply by a global element of Z[M] (the R(T)-module structure)."""
        if g.rank != self.fan.rank:
            raise RankMismatch("module action needs an ambient exponential sum")
        out = []
        for rs, v in zip(self.fan.maximal_cones, self.values):
            q = self.fan.face_quotient(rs)
            out.append(v * g.map_exponents(q.projection, q.rank))
        return self._wrap(tuple(out))

    def restrict(self, rayset) -> LaurentPoly:
        """Value on a face, in the canonical M_tau coordinates.

        For a ray the coordinate is evaluation on the primitive generator; for
        the zero cone the result is the constant given by the augmentation.
        """
        rs = self.fan.require_face(rayset)
        holder = self.fan.face_containing_maximal(rs)
        phi = _comparison_matrix(self.fan, self.fan.maximal_cones[holder], self.fan, rs)
        return self.values[holder].map_exponents(phi, self.fan.face_quotient(rs).rank)


def coerce_values(fan: Fan, values) -> tuple[LaurentPoly, ...]:
    """Accept per-cone values over M or over the cone's own quotient."""
    if len(values) != len(fan.maximal_cones):
        raise RankMismatch(
            f"{len(values)} values for {len(fan.maximal_cones)} maximal cones"
        )
    out = []
    for rs, v in zip(fan.maximal_cones, values):
        q = fan.face_quotient(rs)
        if v.rank == q.rank:
            out.append(v)
        elif v.rank == fan.rank:
            out.append(v.map_exponents(q.projection, q.rank))
        else:
            raise RankMismatch(
                f"value of rank {v.rank} on a cone of dimension {q.rank} "
                f"in an ambient rank-{fan.rank} fan"
            )
    return tuple(out)


def gkm_validate(fan: Fan, values) -> GkmReport:
    """Check every pairwise face compatibility; violations are results."""
    vals = coerce_values(fan, values)
    violations = []
    n = len(fan.maximal_cones)
    for i in range(n):
        for j in range(i + 1, n):
            shared = tuple(sorted(set(fan.maximal_cones[i]) & set(fan.maximal_cones[j])))
            phi_i = _comparison_matrix(fan, fan.maximal_cones[i], fan, shared)
            phi_j = _comparison_matrix(fan, fan.maximal_cones[j], fan, shared)
            target = fan.face_quotient(shared).rank
            ri = vals[i].map_exponents(phi_i, target)
            rj = vals[j].map_exponents(phi_j, target)
            if ri != rj:
                violations.append(GkmViolation(i, j, shared, ri, rj))
    if violations:
        return GkmReport(False, None, tuple(violations))
    return GkmReport(True, PiecewiseExponential(fan, vals), ())


# -- line bundle classes ------------------------------------------------------


@dataclass(frozen=True)
class CartierData:
    """One character per maximal cone, the local linear data of a line bundle."""

    exponents: tuple[Vector, ...]

    def to_json(self) -> dict:
        return {"m": [list(m) for m in self.exponents]}

    @staticmethod
    def from_json(obj: dict) -> "CartierData":
        if not isinstance(obj, dict) or "m" not in obj:
            raise ValueError("Cartier data JSON needs the key 'm'")
        return CartierData(tuple(tuple(int(x) for x in m) for m in obj["m"]))


def from_cartier(fan: Fan, data: CartierData) -> PiecewiseExponential:
    """The class sigma -> e^{m_sigma} of the line bundle with local data m."""
    exps = tuple(tuple(m) for m in data.exponents)
    if len(exps) != len(fan.maximal_cones):
        raise IncompatibleCartierData("one character per maximal cone is required")
    for m in exps:
        if len(m) != fan.rank:
            raise IncompatibleCartierData(f"character {m} has wrong length")
    n = len(fan.maximal_cones)
    for i in range(n):
        for j in range(i + 1, n):
            shared = tuple(sorted(set(fan.maximal_cones[i]) & set(fan.maximal_cones[j])))
            q = fan.face_quotient(shared)
            diff = tuple(a - b for a, b in zip(exps[i], exps[j]))
            if any(q.project_vector(diff)):
                raise IncompatibleCartierData(
                    f"characters on cones {i} and {j} differ on their common "
                    f"face {list(shared)}"
                )
    values = []
    for rs, m in zip(fan.maximal_cones, exps):
        q = fan.face_quotient(rs)
        values.append(LaurentPoly.exponential(q.project_vector(m)))
    report = gkm_validate(fan, values)
    assert report.ok, "Cartier data passed compatibility but failed GKM"
    return report.function


# -- subdivision functoriality ---------------------------------------------------


def pullback(f: PiecewiseExponential, s: SubdivisionMap) -> PiecewiseExponential:
    """Transport a function to a refinement: each fine maximal cone takes the
    value of its assigned coarse cone."""
    if f.fan != s.coarse:
        raise FanMismatch("function does not live on the coarse fan of the map")
    out = []
    for i, rs in enumerate(s.fine.maximal_cones):
        src = s.coarse.maximal_cones[s.assignment[i]]
        phi = _comparison_matrix(s.coarse, src, s.fine, rs)
        target = s.fine.face_quotient(rs).rank
        out.append(f.values[s.assignment[i]].map_exponents(phi, target))
    return PiecewiseExponential(s.fine, tuple(out))


def descend(f: PiecewiseExponential, s: SubdivisionMap) -> PiecewiseExponential:
    """Inverse of pullback when it exists.

    All fine cones inside one coarse cone must carry equal values as elements
    of Z[M_sigma]; otherwise NotDescendable reports the coarse cone and the
    two differing values.  Note this is strictly stronger than the GKM
    condition on the fine fan.
    """
    if f.fan != s.fine:
        raise FanMismatch("function does not live on the fine fan of the map")
    coarse_values: dict[int, LaurentPoly] = {}
    for i, rs in enumerate(s.fine.maximal_cones):
        tgt = s.coarse.maximal_cones[s.assignment[i]]
        phi = _comparison_matrix(s.fine, rs, s.coarse, tgt)
        target = s.coarse.face_quotient(tgt).rank
        candidate = f.values[i].map_exponents(phi, target)
        prev = coarse_values.get(s.assignment[i])
        if prev is None:
            coarse_values[s.assignment[i]] = candidate
        elif prev != candidate:
            raise NotDescendable(s.assignment[i], prev, candidate)
    values = tuple(coarse_values[i] for i in range(len(s.coarse.maximal_cones)))
    report = gkm_validate(s.coarse, values)
    if not report.ok:
        raise GkmViolationError(report.violations)
    return report.function


def pexp_to_json(f: PiecewiseExponential) -> dict:
    from .laurent import poly_to_json

    return {
        "fan": f.fan.to_json(),
        "values": [poly_to_json(v) for v in f.values],
    }


def pexp_from_json(obj: dict, fan: Fan | None = None) -> PiecewiseExponential:
    from .laurent import poly_from_json

    if not isinstance(obj, dict) or "values" not in obj:
        raise ValueError("piecewise exponential JSON needs 'values'")
    if fan is None:
        if "fan" not in obj:
            raise ValueError("no fan given and none embedded in the JSON")
        fan = Fan.from_json(obj["fan"])
    values = [poly_from_json(v) for v in obj["values"]]
    return PiecewiseExponential.from_values(fan, values)
