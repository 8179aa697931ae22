"""The Heisenberg group H3 and its Lie algebra over generic scalars.

Points are upper triangular unipotent matrices written ``[x, y, z]`` with the
law ``[x,y,z] * [x',y',z'] = [x+x', y+y', z+z'+x*y']``.  Scalars may be
``Fraction``, :class:`~nilflow.scalar.QuadraticNumber` or ``float``; integers
are promoted to ``Fraction`` so that halving and floors stay exact.
"""

from __future__ import annotations

from fractions import Fraction

from .scalar import (
    ParseError,
    QuadraticContext,
    parse_scalar,
    scalar_float,
    scalar_floor,
    scalar_str,
)


def _promote(v):
    if isinstance(v, int):
        return Fraction(v)
    return v


def _check_kinds(p, q) -> None:
    a = isinstance(p, float)
    b = isinstance(q, float)
    if a != b:
        raise TypeError("cannot mix float and exact scalars")


class GroupPoint:
    """Group element [x, y, z]."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z):
        self.x = _promote(x)
        self.y = _promote(y)
        self.z = _promote(z)

    @staticmethod
    def identity() -> "GroupPoint":
        return GroupPoint(0, 0, 0)

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        if not isinstance(other, GroupPoint):
            return NotImplemented
        _check_kinds(self.x, other.x)
        return GroupPoint(
            self.x + other.x,
            self.y + other.y,
            self.z + other.z + self.x * other.y,
        )

    def inverse(self) -> "GroupPoint":
        return GroupPoint(-self.x, -self.y, self.x * self.y - self.z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupPoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.z == other.z

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.z))

    def __str__(self) -> str:
        return f"[{scalar_str(self.x)}, {scalar_str(self.y)}, {scalar_str(self.z)}]"

    def __repr__(self) -> str:
        return f"GroupPoint({self.x!r}, {self.y!r}, {self.z!r})"


class AlgebraVector:
    """Lie-algebra element (alpha, beta, gamma)."""

    __slots__ = ("alpha", "beta", "gamma")

    def __init__(self, alpha, beta, gamma):
        self.alpha = _promote(alpha)
        self.beta = _promote(beta)
        self.gamma = _promote(gamma)

    def scale(self, t) -> "AlgebraVector":
        return AlgebraVector(self.alpha * t, self.beta * t, self.gamma * t)

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        return AlgebraVector(
            self.alpha + other.alpha,
            self.beta + other.beta,
            self.gamma + other.gamma,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraVector):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.beta == other.beta
            and self.gamma == other.gamma
        )

    def __hash__(self) -> int:
        return hash((self.alpha, self.beta, self.gamma))

    def __repr__(self) -> str:
        return f"AlgebraVector({self.alpha!r}, {self.beta!r}, {self.gamma!r})"


class LatticePoint:
    """Element [n, m, p] of the integer lattice."""

    __slots__ = ("n", "m", "p")

    def __init__(self, n: int, m: int, p: int):
        if not all(isinstance(v, int) for v in (n, m, p)):
            raise TypeError("lattice coordinates must be integers")
        self.n = n
        self.m = m
        self.p = p

    def to_group(self) -> GroupPoint:
        return GroupPoint(self.n, self.m, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticePoint):
            return NotImplemented
        return (self.n, self.m, self.p) == (other.n, other.m, other.p)

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.p))

    def __repr__(self) -> str:
        return f"LatticePoint({self.n}, {self.m}, {self.p})"


class NilPoint:
    """Canonical coset representative in [0,1)^3 plus the reducing witness."""

    __slots__ = ("rep", "witness")

    def __init__(self, rep: GroupPoint, witness: LatticePoint):
        self.rep = rep
        self.witness = witness

    def __eq__(self, other) -> bool:
        if not isinstance(other, NilPoint):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self) -> int:
        return hash(self.rep)

    def __repr__(self) -> str:
        return f"NilPoint({self.rep!r}, {self.witness!r})"


def commutator(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    return a * b * a.inverse() * b.inverse()


def exp_point(v: AlgebraVector) -> GroupPoint:
    return GroupPoint(v.alpha, v.beta, v.gamma + v.alpha * v.beta / 2)


def log_point(g: GroupPoint) -> AlgebraVector:
    return AlgebraVector(g.x, g.y, g.z - g.x * g.y / 2)


def bracket(u: AlgebraVector, v: AlgebraVector) -> AlgebraVector:
    """Lie bracket (0, 0, (alpha*beta' - alpha'*beta) / 2)."""
    c = (u.alpha * v.beta - v.alpha * u.beta) / 2
    zero = c - c
    return AlgebraVector(zero, zero, c)


def norm4(g: GroupPoint):
    """Fourth power of the group norm; kept exact by avoiding the root."""
    s = g.x * g.x + g.y * g.y
    w = g.z - g.x * g.y / 2
    return s * s + w * w


def dist(a: GroupPoint, b: GroupPoint) -> float:
    return scalar_float(norm4(a.inverse() * b)) ** 0.25


def flow(v: AlgebraVector, t, g: GroupPoint) -> GroupPoint:
    """Left action of the one-parameter subgroup exp(t*v)."""
    return exp_point(v.scale(t)) * g


def translate(v: AlgebraVector, g: GroupPoint) -> GroupPoint:
    return exp_point(v) * g


def central_flow(t, g: GroupPoint) -> GroupPoint:
    return GroupPoint(g.x, g.y, g.z + t)


def dilate(t, g: GroupPoint) -> GroupPoint:
    """Grading automorphism [x, y, z] -> [t*x, t*y, t^2*z]."""
    return GroupPoint(g.x * t, g.y * t, g.z * t * t)


def canonicalize(g: GroupPoint) -> NilPoint:
    """Reduce to the fundamental cube: find w in the lattice with g*w in [0,1)^3."""
    n = -scalar_floor(g.x)
    m = -scalar_floor(g.y)
    z1 = g.z + g.x * m
    p = -scalar_floor(z1)
    rep = GroupPoint(g.x + n, g.y + m, z1 + p)
    return NilPoint(rep, LatticePoint(n, m, p))


def coset_eq(a: GroupPoint, b: GroupPoint) -> bool:
    """Same right coset modulo the integer lattice."""
    return canonicalize(a).rep == canonicalize(b).rep


def flow_exchange_holds(u: AlgebraVector, v: AlgebraVector, t, s, g: GroupPoint) -> bool:
    """Exchange rule for two flows.

    Swapping the order of Phi_u^t and Phi_v^s costs a central correction with
    exponent (beta*alpha' - beta'*alpha) * t * s; the central flow itself
    commutes with everything.
    """
    delta = u.beta * v.alpha - v.beta * u.alpha
    lhs = flow(v, s, flow(u, t, g))
    rhs = flow(u, t, flow(v, s, central_flow(delta * t * s, g)))
    return lhs == rhs


def parse_group_point(text: str, ctx: QuadraticContext | None = None) -> GroupPoint:
    """Parse '[x, y, z]' with scalar syntax from the scalar module."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"expected '[x, y, z]', got {text!r}")
    parts = s[1:-1].split(",")
    if len(parts) != 3:
        raise ParseError(f"expected three coordinates in {text!r}")
    return GroupPoint(*(parse_scalar(p, ctx) for p in parts))
