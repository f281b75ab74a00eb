"""Exact arithmetic in towers of quadratic extensions of Q.

A tower is Q = K_0 c K_1 c ... c K_L where K_j = K_{j-1}(sqrt(d_j)) for an
adjoined non-square d_j in K_{j-1}.  Elements are stored as nested pairs
(a, b) meaning a + b*sqrt(d) over the previous level; level 0 is a Fraction.
Depth is capped at two extensions, enough for Q(i) and the quadratic
extension splitting the degree-two factor in the conic-bundle computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

MAX_TOWER_DEPTH = 2

RationalLike = Union[int, Fraction]


class FieldError(ValueError):
    """Raised on malformed tower data or invalid field operations."""


def _is_rational_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    return rn * rn == n and rd * rd == d


@dataclass(frozen=True)
class FieldTower:
    """Ordered list of adjoined square roots, each an element of the level below."""

    radicands: tuple["TowerElement", ...]

    def __init__(self, radicands=()):
        elems = []
        for i, r in enumerate(radicands):
            partial = FieldTower.__new__(FieldTower)
            object.__setattr__(partial, "radicands", tuple(elems))
            x = partial.coerce(r, level=i)
            if x.level > i:
                raise FieldError(f"radicand at level {i + 1} must live in level {i}")
            elems.append(x)
        object.__setattr__(self, "radicands", tuple(elems))
        if len(self.radicands) > MAX_TOWER_DEPTH:
            raise FieldError(f"tower depth capped at {MAX_TOWER_DEPTH}")
        for i, r in enumerate(self.radicands):
            if self._has_square_root(r, i):
                raise FieldError(f"radicand at level {i + 1} is a square in level {i}")

    @property
    def depth(self) -> int:
        return len(self.radicands)

    def _has_square_root(self, x: "TowerElement", level: int) -> bool:
        """Exact square test for x inside K_level (level <= 1)."""
        x = x.normalize()
        if x.level == 0:
            if level == 0:
                return _is_rational_square(x.rat)
            # is a rational a square in K_1 = Q(sqrt(d1))?  x = (u + v*sqrt(d1))^2
            # forces uv = 0, so x or x/d1 must be a rational square
            d1 = self.radicands[0].normalize()
            if d1.level == 0:
                return _is_rational_square(x.rat) or _is_rational_square(x.rat / d1.rat)
            return _is_rational_square(x.rat)
        # x = a + b*sqrt(d1) with b != 0: norm-form check
        a, b = x.parts
        a, b, d1 = a.normalize(), b.normalize(), self.radicands[0].normalize()
        if a.level > 0 or b.level > 0 or d1.level > 0:
            raise FieldError("square testing beyond depth 2 is not supported")
        norm = a.rat * a.rat - b.rat * b.rat * d1.rat
        if not _is_rational_square(norm):
            return False
        root = Fraction(isqrt(norm.numerator), isqrt(norm.denominator))
        for sign in (1, -1):
            u2 = (a.rat + sign * root) / 2
            if u2 != 0 and _is_rational_square(u2):
                return True
        return False

    def coerce(self, value, level: Optional[int] = None) -> "TowerElement":
        if isinstance(value, TowerElement):
            if value.tower is not self and \
                    value.tower._truncated(value.level) != self._truncated(value.level):
                raise FieldError("element belongs to a different tower")
            x = value._retag(self)
        elif isinstance(value, (int, Fraction)):
            x = TowerElement(self, 0, rat=Fraction(value))
        else:
            raise FieldError(f"cannot coerce {value!r} into the tower")
        if level is not None and x.level < level:
            x = x.lift(level)
        return x

    def _truncated(self, depth: int) -> "FieldTower":
        t = FieldTower.__new__(FieldTower)
        object.__setattr__(t, "radicands", self.radicands[:depth])
        return t

    def zero(self, level: int = 0) -> "TowerElement":
        return self.coerce(0, level)

    def one(self, level: int = 0) -> "TowerElement":
        return self.coerce(1, level)

    def sqrt_gen(self, level: int) -> "TowerElement":
        """The adjoined square root generating K_level over K_{level-1}."""
        if not 1 <= level <= self.depth:
            raise FieldError("no generator at that level")
        lower = self.zero(level - 1)
        return TowerElement(self, level, parts=(lower, self.one(level - 1)))

    def __eq__(self, other):
        if not isinstance(other, FieldTower):
            return NotImplemented
        return [r.canonical_key() for r in self.radicands] == \
            [r.canonical_key() for r in other.radicands]

    def __hash__(self):
        return hash(tuple(r.canonical_key() for r in self.radicands))

    def __str__(self):
        if not self.radicands:
            return "Q"
        return "Q(" + ", ".join(f"sqrt({r})" for r in self.radicands) + ")"


@dataclass(frozen=True)
class TowerElement:
    tower: FieldTower
    level: int
    rat: Optional[Fraction] = None
    parts: Optional[tuple["TowerElement", "TowerElement"]] = None

    def __post_init__(self):
        if self.level == 0:
            if self.rat is None:
                raise FieldError("level-0 element needs a rational value")
        elif self.parts is None or len(self.parts) != 2:
            raise FieldError("higher-level element needs two parts")

    # -- structure ---------------------------------------------------------

    def _retag(self, tower: FieldTower) -> "TowerElement":
        if self.tower is tower:
            return self
        if self.level == 0:
            return TowerElement(tower, 0, rat=self.rat)
        a, b = self.parts
        return TowerElement(tower, self.level, parts=(a._retag(tower), b._retag(tower)))

    def lift(self, level: int) -> "TowerElement":
        x = self
        while x.level < level:
            zero = x.tower.zero(x.level)
            x = TowerElement(x.tower, x.level + 1, parts=(x, zero))
        return x

    def normalize(self) -> "TowerElement":
        """Collapse to the lowest level representing the same value."""
        if self.level == 0:
            return self
        a, b = self.parts
        a, b = a.normalize(), b.normalize()
        if b.is_zero():
            return a
        return TowerElement(self.tower, self.level, parts=(a.lift(self.level - 1), b.lift(self.level - 1)))

    def canonical_key(self):
        x = self.normalize()
        if x.level == 0:
            return (0, x.rat)
        a, b = x.parts
        return (x.level, a.canonical_key(), b.canonical_key())

    def is_zero(self) -> bool:
        if self.level == 0:
            return self.rat == 0
        a, b = self.parts
        return a.is_zero() and b.is_zero()

    def is_one(self) -> bool:
        return self.canonical_key() == (0, Fraction(1))

    def is_rational(self) -> bool:
        return self.normalize().level == 0

    def as_rational(self) -> Fraction:
        x = self.normalize()
        if x.level != 0:
            raise FieldError("element is not rational")
        return x.rat

    def _pair(self) -> tuple["TowerElement", "TowerElement"]:
        """(a, b) with self = a + b*sqrt(d_level) at the element's own level."""
        if self.level == 0:
            raise FieldError("level-0 element has no parts")
        return self.parts

    # -- arithmetic --------------------------------------------------------

    def _match(self, other) -> tuple["TowerElement", "TowerElement"]:
        o = self.tower.coerce(other)
        lvl = max(self.level, o.level)
        return self.lift(lvl), o.lift(lvl)

    def __add__(self, other):
        x, y = self._match(other)
        if x.level == 0:
            return TowerElement(self.tower, 0, rat=x.rat + y.rat)
        (a, b), (c, d) = x._pair(), y._pair()
        return TowerElement(self.tower, x.level, parts=(a + c, b + d))

    __radd__ = __add__

    def __neg__(self):
        if self.level == 0:
            return TowerElement(self.tower, 0, rat=-self.rat)
        a, b = self._pair()
        return TowerElement(self.tower, self.level, parts=(-a, -b))

    def __sub__(self, other):
        return self + (-self.tower.coerce(other))

    def __rsub__(self, other):
        return self.tower.coerce(other) - self

    def __mul__(self, other):
        x, y = self._match(other)
        if x.level == 0:
            return TowerElement(self.tower, 0, rat=x.rat * y.rat)
        (a, b), (c, d) = x._pair(), y._pair()
        rad = self.tower.radicands[x.level - 1].lift(x.level - 1)
        return TowerElement(self.tower, x.level,
                            parts=(a * c + (b * d) * rad, a * d + b * c))

    __rmul__ = __mul__

    def inverse(self) -> "TowerElement":
        x = self.normalize()
        if x.is_zero():
            raise ZeroDivisionError("tower element is zero")
        if x.level == 0:
            return TowerElement(self.tower, 0, rat=1 / x.rat)
        a, b = x._pair()
        rad = self.tower.radicands[x.level - 1].lift(x.level - 1)
        norm = a * a - (b * b) * rad  # (a+b*s)(a-b*s)
        ninv = norm.inverse()
        return TowerElement(self.tower, x.level, parts=(a * ninv, -(b * ninv)))

    def __truediv__(self, other):
        o = self.tower.coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.tower.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.tower.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.tower.coerce(other)
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    # -- presentation ------------------------------------------------------

    def components(self) -> tuple["TowerElement", "TowerElement"]:
        """Parts (a, b) at the element's own level, lifted if needed."""
        if self.level == 0:
            raise FieldError("level-0 element has no components")
        return self._pair()

    def rational_vector(self) -> list[Fraction]:
        """Coordinates over the Q-basis of products of adjoined roots (length 2^level)."""
        if self.level == 0:
            return [self.rat]
        a, b = self._pair()
        return a.rational_vector() + b.rational_vector()

    def serialize(self):
        """Nested-pair form: level-0 as [num, den], level-k as [lower, lower]."""
        if self.level == 0:
            return [self.rat.numerator, self.rat.denominator]
        a, b = self._pair()
        return [a.serialize(), b.serialize()]

    def __str__(self):
        x = self.normalize()
        if x.level == 0:
            return str(x.rat)
        a, b = x._pair()
        root = f"r{x.level}"
        if x.level == 1 and self.tower.radicands[0] == -1:
            root = "i"
        return f"({a} + {b}*{root})"

    def __repr__(self):
        return f"TowerElement({self})"


def conjugate(x: TowerElement, level: int) -> TowerElement:
    """Field automorphism negating the adjoined root at the given level.

    Fixes every level strictly below; involutive.
    """
    if level < 1 or level > x.tower.depth:
        raise FieldError("conjugation level out of range")
    if x.level < level:
        return x
    if x.level == level:
        a, b = x._pair()
        return TowerElement(x.tower, x.level, parts=(a, -b))
    a, b = x._pair()
    return TowerElement(x.tower, x.level, parts=(conjugate(a, level), conjugate(b, level)))


# ---------------------------------------------------------------------------
# sums of two squares
# ---------------------------------------------------------------------------


def _factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; inputs in this library stay desk-sized."""
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _sqrt_minus_one_mod(p: int) -> int:
    """x with x^2 = -1 mod p, for prime p = 1 mod 4."""
    for a in range(2, p):
        x = pow(a, (p - 1) // 4, p)
        if (x * x) % p == p - 1:
            return x
    raise ArithmeticError(f"no square root of -1 modulo {p}")


def _two_squares_prime(p: int) -> tuple[int, int]:
    """Write prime p = 1 mod 4 (or p = 2) as a^2 + b^2 by Euclidean descent."""
    if p == 2:
        return 1, 1
    x = _sqrt_minus_one_mod(p)
    if x > p // 2:
        x = p - x
    a, b = p, x
    bound = isqrt(p)
    while b > bound:
        a, b = b, a % b
    c = p - b * b
    r = isqrt(c)
    return b, r


def sum_of_two_squares(q: RationalLike) -> Optional[tuple[Fraction, Fraction]]:
    """Exact (alpha, beta) with alpha^2 + beta^2 = q, or None.

    A rational q is a sum of two rational squares iff q >= 0 and every prime
    p = 3 mod 4 divides numerator*denominator to an even power.  The witness
    is built multiplicatively from Gaussian-integer factorizations.
    """
    q = Fraction(q)
    if q < 0:
        return None
    if q == 0:
        return Fraction(0), Fraction(0)
    n = q.numerator * q.denominator
    a, b = 1, 0  # 1 = 1^2 + 0^2
    for p, e in _factorize(n).items():
        if p % 4 == 3:
            if e % 2:
                return None
            half = pow(p, e // 2)
            a, b = a * half, b * half
        else:
            c, d = _two_squares_prime(p)
            for _ in range(e):
                # (a^2+b^2)(c^2+d^2) = (ac-bd)^2 + (ad+bc)^2
                a, b = a * c - b * d, a * d + b * c
    alpha = Fraction(abs(a), q.denominator)
    beta = Fraction(abs(b), q.denominator)
    if beta < alpha:
        alpha, beta = beta, alpha
    return alpha, beta


def make_gaussian_tower() -> FieldTower:
    """The tower Q(i)."""
    return FieldTower((Fraction(-1),))
