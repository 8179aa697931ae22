"""Exact arithmetic in real quadratic fields.

A field element is ``a + b*l`` where ``l`` is the larger root of
``X^2 - T*X + D`` for integers ``T``, ``D`` with positive, non-square
discriminant.  Everything here is exact: signs, floors and comparisons are
decided against the minimal polynomial, never by floating point.  Floats
only appear through :meth:`QuadraticNumber.to_float`, which also returns a
certified absolute error bound.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

# Arbitrary-precision rationals are the stdlib's; they are already stored in
# lowest terms with a positive denominator.
Rational = Fraction

Scalar = Union[int, Fraction, "QuadraticNumber", float]


class ParseError(ValueError):
    """Malformed textual input; ``position`` is the offending index if known."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


def _is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


class QuadraticContext:
    """The field Q(l) for l = (T + sqrt(T^2 - 4D)) / 2, the larger root.

    Rejects perfect-square discriminants: rational roots belong in plain
    ``Fraction`` arithmetic, and irrationality is what keeps ``sign`` and
    ``floor`` total.
    """

    __slots__ = ("trace", "det", "disc", "_lo", "_hi")

    def __init__(self, trace: int, det: int):
        if not isinstance(trace, int) or not isinstance(det, int):
            raise ValueError("context coefficients must be integers")
        disc = trace * trace - 4 * det
        if disc <= 0:
            raise ValueError(f"discriminant {disc} is not positive")
        if _is_perfect_square(disc):
            raise ValueError(f"discriminant {disc} is a perfect square")
        self.trace = trace
        self.det = det
        self.disc = disc
        # Initial enclosure of the larger root from the integer square root.
        r = math.isqrt(disc)
        self._lo = Fraction(trace + r, 2)
        self._hi = Fraction(trace + r + 1, 2)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QuadraticContext)
            and self.trace == other.trace
            and self.det == other.det
        )

    def __hash__(self) -> int:
        return hash((self.trace, self.det))

    def __repr__(self) -> str:
        return f"QuadraticContext({self.trace}, {self.det})"

    @classmethod
    def from_text(cls, text: str) -> "QuadraticContext":
        parts = text.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'T,D', got {text!r}")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError as exc:
            raise ParseError(f"bad context {text!r}: {exc}") from exc

    @property
    def lam(self) -> "QuadraticNumber":
        """The distinguished root as a field element."""
        return QuadraticNumber(0, 1, self)

    def root_exceeds(self, q: Fraction) -> bool:
        """Exact test ``l > q``.

        ``p(q) < 0`` iff q lies strictly between the two roots; otherwise q
        is outside them and the vertex T/2 decides the side.  Equality never
        happens because the root is irrational.
        """
        p = q * q - self.trace * q + self.det
        if p < 0:
            return True
        return q < Fraction(self.trace, 2)

    def bracket(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Rational enclosure of the root, bisected down to ``width``.

        The cached enclosure only ever shrinks, so values stay correct under
        concurrent use (a torn read still brackets the root).
        """
        lo, hi = self._lo, self._hi
        while hi - lo > width:
            mid = (lo + hi) / 2
            if self.root_exceeds(mid):
                lo = mid
            else:
                hi = mid
        self._lo, self._hi = lo, hi
        return lo, hi


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected a rational, got {type(value).__name__}")


class QuadraticNumber:
    """Exact element ``a + b*l`` of a quadratic field."""

    __slots__ = ("a", "b", "ctx")

    def __init__(self, a, b, ctx: QuadraticContext):
        self.a = _as_fraction(a)
        self.b = _as_fraction(b)
        self.ctx = ctx

    # -- construction helpers -------------------------------------------

    def _wrap(self, a: Fraction, b: Fraction) -> "QuadraticNumber":
        return QuadraticNumber(a, b, self.ctx)

    def _coerce(self, other) -> "QuadraticNumber | None":
        if isinstance(other, QuadraticNumber):
            if other.ctx != self.ctx:
                raise ValueError(
                    f"context mismatch: {self.ctx!r} vs {other.ctx!r}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.ctx)
        return None

    # -- ring/field operations ------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # (a + b l)(c + d l) with l^2 = T l - D
        t, d = self.ctx.trace, self.ctx.det
        bd = self.b * o.b
        return self._wrap(
            self.a * o.a - d * bd,
            self.a * o.b + self.b * o.a + t * bd,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.field_norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        # x / y = x * conj(y) / N(y), N(y) rational
        num = self * o.conjugate()
        return self._wrap(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def conjugate(self) -> "QuadraticNumber":
        """Ring automorphism a + b*l -> (a + b*T) - b*l."""
        return self._wrap(self.a + self.b * self.ctx.trace, -self.b)

    def field_norm(self) -> Fraction:
        """N(a + b*l) = a^2 + a*b*T + b^2*D, zero only for the zero element."""
        a, b = self.a, self.b
        return a * a + a * b * self.ctx.trace + b * b * self.ctx.det

    # -- order structure --------------------------------------------------

    def sign(self) -> int:
        """Exact sign under the distinguished-root embedding."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        # a + b*l compared with 0 reduces to l compared with -a/b.
        q = -self.a / self.b
        exceeds = self.ctx.root_exceeds(q)
        if self.b > 0:
            return 1 if exceeds else -1
        return -1 if exceeds else 1

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.ctx.trace, self.ctx.det))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- floor / float export ---------------------------------------------

    def floor(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        n = math.floor(self.to_float()[0])
        # Certify with exact sign tests; the estimate is off by at most one.
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def frac(self) -> "QuadraticNumber":
        return self - self.floor()

    def to_float(self, precision: int = 53) -> tuple[float, float]:
        """Certified approximation: value and an absolute error bound."""
        if precision < 32:
            raise ValueError("precision must be at least 32 bits")
        if self.b == 0:
            v = float(self.a)
            return v, abs(v) * 2.0 ** (1 - precision)
        width = Fraction(1, 2 ** (precision + 3)) / abs(self.b)
        lo, hi = self.ctx.bracket(width)
        mid = self.a + self.b * (lo + hi) / 2
        half = abs(self.b) * (hi - lo) / 2
        v = float(mid)
        return v, float(half) + abs(v) * 2.0 ** (1 - precision)

    def __float__(self) -> float:
        return self.to_float()[0]

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        if self.b >= 0:
            return f"{self.a}+{self.b}*l"
        return f"{self.a}-{-self.b}*l"

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a!r}, {self.b!r}, {self.ctx!r})"


# The golden field: l = (1 + sqrt(5)) / 2.
GOLDEN = QuadraticContext(1, -1)


def floor_mod1(x):
    """Split ``x = n + r`` with integer ``n`` and ``r`` in [0, 1), exactly."""
    if isinstance(x, QuadraticNumber):
        n = x.floor()
        return n, x - n
    if isinstance(x, (int, Fraction)):
        f = _as_fraction(x)
        n = math.floor(f)
        return n, f - n
    n = math.floor(x)
    return n, x - n


def scalar_sign(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def scalar_floor(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.floor()
    return math.floor(x)


def scalar_float(x) -> float:
    if isinstance(x, QuadraticNumber):
        return x.to_float()[0]
    return float(x)


def scalar_str(x) -> str:
    if isinstance(x, QuadraticNumber):
        return str(x)
    if isinstance(x, (int, Fraction)):
        return str(x)
    return repr(x)


_RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?")
_UNSIGNED_RE = re.compile(r"\d+(/\d+)?")


def parse_rational(text: str, offset: int = 0) -> Fraction:
    token = text.strip()
    if not _RATIONAL_RE.fullmatch(token):
        raise ParseError(f"bad rational {token!r}", offset)
    return Fraction(token)


def parse_scalar(text: str, ctx: QuadraticContext | None = None):
    """Parse 'p/q' or 'a+b*l' (also 'l', '-l', 'b*l').

    Returns a ``Fraction`` when no ``l`` term is present, otherwise a
    ``QuadraticNumber`` in ``ctx``.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty scalar", 0)
    if "l" not in s:
        return parse_rational(s)
    if ctx is None:
        raise ParseError(f"{text!r} needs a quadratic context")
    a = Fraction(0)
    b = Fraction(0)
    pos = 0
    while pos < len(s):
        sign = 1
        if s[pos] == "+":
            pos += 1
        elif s[pos] == "-":
            sign = -1
            pos += 1
        m = _UNSIGNED_RE.match(s, pos)
        if m:
            coeff = Fraction(m.group(0))
            pos = m.end()
        else:
            coeff = Fraction(1)
        if pos < len(s) and s[pos] == "*":
            if m is None:
                raise ParseError("'*' without a coefficient", pos)
            pos += 1
            if pos >= len(s) or s[pos] != "l":
                raise ParseError("expected 'l' after '*'", pos)
        if pos < len(s) and s[pos] == "l":
            pos += 1
            b += sign * coeff
        elif m is not None:
            a += sign * coeff
        else:
            raise ParseError(f"cannot parse scalar near index {pos}", pos)
    return QuadraticNumber(a, b, ctx)
