"""Projective 2x2 matrices over Z/q^n, the projective line, and coset keys.

Matrices are taken up to unit scalars (elements of PGL2(Z/q^n)); a matrix is
*canonical* when its first unit entry in row-major order equals 1.  Points of
the projective line P^1(Z/q^n) are unimodular pairs (x : y) stored in one of
two canonical shapes: (x : 1), or (1 : y) with y = 0 (mod q).  An ordered
pair of points in general position encodes a right coset of the diagonal
subgroup, which is exactly the stabilizer of ((0:1), (1:0)).
"""

from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidParameterError, SingularMatrixError
from .modarith import PrimePower, legendre

__all__ = [
    "Mat2",
    "ProjPoint",
    "PairCoset",
    "identity",
    "proj_normalize",
    "is_psl",
    "proj_point",
    "mobius",
    "enumerate_p1",
    "pair_coset",
    "coset_key",
    "matrix_inverse",
    "reduce_matrix",
    "reduce_point",
    "reduce_pair",
]


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix [[a, b], [c, d]] over Z/q^n with unit determinant.

    Entries are stored reduced to [0, q^n).  Equality is entrywise; use
    proj_normalize to compare projective classes.
    """

    a: int
    b: int
    c: int
    d: int
    pp: PrimePower

    def __post_init__(self):
        m = self.pp.modulus
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) % m)
        if self.det() % self.pp.p == 0:
            raise SingularMatrixError(
                f"matrix {self.entries()} is singular mod {self.pp.p}"
            )

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.pp.modulus

    def __mul__(self, other: "Mat2") -> "Mat2":
        if self.pp != other.pp:
            raise InvalidParameterError("cannot multiply matrices over different moduli")
        m = self.pp.modulus
        return Mat2(
            (self.a * other.a + self.b * other.c) % m,
            (self.a * other.b + self.b * other.d) % m,
            (self.c * other.a + self.d * other.c) % m,
            (self.c * other.b + self.d * other.d) % m,
            self.pp,
        )

    def inverse(self) -> "Mat2":
        """Adjugate scaled by the determinant inverse (not renormalized)."""
        m = self.pp.modulus
        di = pow(self.det(), -1, m)
        return Mat2(self.d * di, -self.b * di, -self.c * di, self.a * di, self.pp)


def identity(pp: PrimePower) -> Mat2:
    return Mat2(1, 0, 0, 1, pp)


def proj_normalize(m: Mat2) -> Mat2:
    """Scale so the first row-major unit entry equals 1.

    Two matrices have equal canonical forms iff they differ by a unit scalar;
    a unit entry always exists because the determinant is a unit.
    """
    p, mod = m.pp.p, m.pp.modulus
    for e in m.entries():
        if e % p:
            s = pow(e, -1, mod)
            return Mat2(m.a * s, m.b * s, m.c * s, m.d * s, m.pp)
    raise SingularMatrixError("no unit entry found")  # unreachable for valid Mat2


def is_psl(m: Mat2) -> bool:
    """Whether the projective class of m lies in PSL2(Z/q^n).

    Scalars change det by squares, so the class is in PSL iff det is a square
    unit; for odd q a unit is a square mod q^n iff it is a square mod q.
    """
    return legendre(m.det(), m.pp.p) == 1


class ProjPoint(NamedTuple):
    """A point (x : y) of P^1(Z/q^n) in canonical form."""

    x: int
    y: int


class PairCoset(NamedTuple):
    """An ordered pair of projective points in general position.

    Encodes a right coset of the diagonal subgroup: coset_key(m) below.
    """

    p0: ProjPoint
    pinf: ProjPoint


def proj_point(x: int, y: int, pp: PrimePower) -> ProjPoint:
    """Canonicalize the homogeneous pair (x : y); raises if not unimodular."""
    p, mod = pp.p, pp.modulus
    x %= mod
    y %= mod
    if y % p:
        return ProjPoint(x * pow(y, -1, mod) % mod, 1)
    if x % p:
        return ProjPoint(1, y * pow(x, -1, mod) % mod)
    raise InvalidParameterError(f"({x} : {y}) is not a unimodular pair mod {p}**{pp.k}")


def mobius(m: Mat2, pt: ProjPoint) -> ProjPoint:
    """Moebius action (x : y) -> (ax + by : cx + dy), renormalized."""
    return proj_point(m.a * pt.x + m.b * pt.y, m.c * pt.x + m.d * pt.y, m.pp)


def enumerate_p1(pp: PrimePower) -> list:
    """All canonical points of P^1(Z/q^n); count is q^(n-1) * (q + 1)."""
    pts = [ProjPoint(x, 1) for x in range(pp.modulus)]
    pts += [ProjPoint(1, pp.p * t) for t in range(pp.modulus // pp.p)]
    return pts


def pair_coset(p0: ProjPoint, pinf: ProjPoint, pp: PrimePower) -> PairCoset:
    """Validated pair of points in general position (unit column determinant)."""
    det = p0.x * pinf.y - p0.y * pinf.x
    if det % pp.p == 0:
        raise InvalidParameterError(f"points {p0} and {pinf} are not in general position")
    return PairCoset(p0, pinf)


def coset_key(m: Mat2) -> PairCoset:
    """Canonical key of the right diagonal coset A*m: (m^-1 (0:1), m^-1 (1:0)).

    coset_key(m) == coset_key(m') iff A*m == A*m', because the diagonal
    subgroup is exactly the stabilizer of the ordered base pair.
    """
    mi = m.inverse()
    return PairCoset(mobius(mi, ProjPoint(0, 1)), mobius(mi, ProjPoint(1, 0)))


def matrix_inverse(m: Mat2) -> Mat2:
    """Projective inverse in canonical form; m * matrix_inverse(m) ~ identity."""
    return proj_normalize(m.inverse())


def reduce_matrix(m: Mat2, pp_to: PrimePower) -> Mat2:
    """Entrywise reduction mod q^k followed by canonical scaling.

    Compatible with multiplication: reduce(m1 m2) == reduce(m1) reduce(m2)
    projectively.
    """
    if pp_to.p != m.pp.p or pp_to.k > m.pp.k:
        raise InvalidParameterError(f"cannot reduce mod {m.pp.p}**{m.pp.k} to {pp_to.p}**{pp_to.k}")
    mod = pp_to.modulus
    return proj_normalize(Mat2(m.a % mod, m.b % mod, m.c % mod, m.d % mod, pp_to))


def reduce_point(pt: ProjPoint, pp_to: PrimePower) -> ProjPoint:
    """Reduction of a canonical point to a lower level (stays canonical)."""
    mod = pp_to.modulus
    return ProjPoint(pt.x % mod, pt.y % mod)


def reduce_pair(pc: PairCoset, pp_to: PrimePower) -> PairCoset:
    return PairCoset(reduce_point(pc.p0, pp_to), reduce_point(pc.pinf, pp_to))
