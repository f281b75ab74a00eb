"""Sparse multivariate polynomials over field-tower scalars, graded by a
finitely generated abelian group.

All ideal computations are degree-local linear algebra: the ideals handled
here are homogeneous for the group grading, so membership in degree d equals
membership in the span of the relation multiples of degree d.  No Groebner
bases anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .abgroup import AbelianGroup, GroupElement, GroupHom
from .lattice import fiber_points, grlex_key
from .numfield import FieldTower, TowerElement

Exponent = tuple[int, ...]


class HomogeneityError(ValueError):
    """A polynomial expected to be homogeneous mixes degrees."""


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial: exponent vector -> nonzero tower coefficient."""

    nvars: int
    terms: tuple[tuple[Exponent, TowerElement], ...]

    @staticmethod
    def make(nvars: int, data: Iterable[tuple[Sequence[int], TowerElement]]) -> "Polynomial":
        acc: dict[Exponent, TowerElement] = {}
        for exp, coeff in data:
            e = tuple(int(x) for x in exp)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError("bad exponent vector")
            acc[e] = acc[e] + coeff if e in acc else coeff
        cleaned = tuple(sorted(((e, c) for e, c in acc.items() if not c.is_zero()),
                               key=lambda t: grlex_key(t[0])))
        return Polynomial(nvars, cleaned)

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, ())

    @staticmethod
    def monomial(nvars: int, exp: Sequence[int], coeff: TowerElement) -> "Polynomial":
        return Polynomial.make(nvars, [(exp, coeff)])

    @staticmethod
    def variable(nvars: int, i: int, tower: FieldTower) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return Polynomial.make(nvars, [(e, tower.one())])

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def coeff(self, exp: Exponent) -> Optional[TowerElement]:
        for e, c in self.terms:
            if e == exp:
                return c
        return None

    def leading(self) -> tuple[Exponent, TowerElement]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[-1]

    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.make(self.nvars, list(self.terms) + list(other.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        data = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                data.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Polynomial.make(self.nvars, data)

    def scale(self, c: TowerElement) -> "Polynomial":
        if c.is_zero():
            return Polynomial.zero(self.nvars)
        return Polynomial(self.nvars, tuple((e, c * x) for e, x in self.terms))

    def pow(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        if not self.terms:
            return self if n else _raise_zero_pow()
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            base = base * base
            n >>= 1
        if out is None:
            one = self.terms[0][1].tower.one()
            return Polynomial.monomial(self.nvars, (0,) * self.nvars, one)
        return out

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable i by images[i]; exact expansion."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not self.terms:
            return Polynomial.zero(images[0].nvars if images else 0)
        out_nvars = images[0].nvars if images else 0
        for img in images:
            if img.nvars != out_nvars:
                raise ValueError("images live in different rings")
        acc = Polynomial.zero(out_nvars)
        pow_cache: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, n: int) -> Polynomial:
            key = (i, n)
            if key not in pow_cache:
                pow_cache[key] = images[i].pow(n)
            return pow_cache[key]

        for e, c in self.terms:
            term = None
            for i, n in enumerate(e):
                if n:
                    p = power(i, n)
                    term = p if term is None else term * p
            if term is None:
                tower = c.tower
                term = Polynomial.monomial(out_nvars, (0,) * out_nvars, tower.one())
            acc = acc + term.scale(c)
        return acc

    def map_coeff(self, f: Callable[[TowerElement], TowerElement]) -> "Polynomial":
        return Polynomial.make(self.nvars, [(e, f(c)) for e, c in self.terms])

    def eval_int(self, point: Sequence[int]) -> Fraction:
        """Exact evaluation at an integer point; requires rational coefficients."""
        total = Fraction(0)
        for e, c in self.terms:
            v = c.as_rational()
            for x, n in zip(point, e):
                if n:
                    v *= Fraction(x) ** n
            total += v
        return total

    def render(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms):
            factors = []
            for name, n in zip(names, e):
                if n == 1:
                    factors.append(name)
                elif n > 1:
                    factors.append(f"{name}^{n}")
            coeff_str, sign = _render_coeff(c)
            body = "*".join(factors)
            if body and coeff_str == "1":
                text = body
            elif body:
                text = f"{coeff_str}*{body}"
            else:
                text = coeff_str
            parts.append((sign, text))
        out = ""
        for k, (sign, text) in enumerate(parts):
            if k == 0:
                out = ("-" if sign < 0 else "") + text
            else:
                out += (" - " if sign < 0 else " + ") + text
        return out


def _raise_zero_pow():
    raise ValueError("0^0 is not defined here")


def _render_coeff(c: TowerElement) -> tuple[str, int]:
    """String and sign for a coefficient; rationals render bare, Q(i)-scalars
    as (a+bi), deeper scalars in nested-sqrt form."""
    x = c.normalize()
    if x.level == 0:
        q = x.rat
        return (str(abs(q)), 1 if q >= 0 else -1)
    if x.level == 1 and x.tower.radicands[0] == -1:
        a, b = (p.as_rational() for p in x.components())
        bs = f"{abs(b)}i" if abs(b) != 1 else "i"
        return (f"({a}{'+' if b >= 0 else '-'}{bs})", 1)
    return (str(x), 1)


# ---------------------------------------------------------------------------
# graded presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedPresentation:
    """Graded algebra tower_field[variables] / (relations).

    Every relation must be homogeneous; degrees live in one grading group.
    """

    names: tuple[str, ...]
    degrees: tuple[GroupElement, ...]
    tower: FieldTower
    field_level: int
    relations: tuple[Polynomial, ...] = ()
    grading_group: Optional[AbelianGroup] = None  # required when no variables

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("need one degree per variable")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if self.degrees:
            group = self.degrees[0].parent
            if self.grading_group is not None and self.grading_group != group:
                raise ValueError("grading_group conflicts with degree parents")
            object.__setattr__(self, "grading_group", group)
        elif self.grading_group is None:
            object.__setattr__(self, "grading_group", AbelianGroup(0))
        for g in self.degrees:
            if g.parent != self.group:
                raise ValueError("degrees lie in different groups")
        for rel in self.relations:
            if rel.nvars != self.nvars:
                raise ValueError("relation variable count mismatch")
            if homogeneous_degree(self, rel) is None:
                raise HomogeneityError(
                    f"relation {rel.render(self.names)} is not homogeneous")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def group(self) -> AbelianGroup:
        return self.grading_group

    def degree_hom(self) -> GroupHom:
        cached = getattr(self, "_degree_hom_cache", None)
        if cached is None:
            dom = AbelianGroup(self.nvars)
            rows = [[self.degrees[j].coords[i] for j in range(self.nvars)]
                    for i in range(self.group.ngens)]
            cached = GroupHom(dom, self.group, tuple(tuple(r) for r in rows))
            object.__setattr__(self, "_degree_hom_cache", cached)
        return cached

    def monomial_degree(self, exp: Exponent) -> GroupElement:
        acc = self.group.zero()
        for n, d in zip(exp, self.degrees):
            if n:
                acc = acc + n * d
        return acc

    def one(self) -> TowerElement:
        return self.tower.one(0)

    def var_index(self, name: str) -> int:
        return self.names.index(name)

    def poly_from_terms(self, data) -> Polynomial:
        return Polynomial.make(self.nvars, data)


def homogeneous_degree(pres: GradedPresentation, f: Polynomial) -> Optional[GroupElement]:
    """Common degree of all terms, or None for a mixed polynomial.

    The zero polynomial and constants report degree zero.
    """
    if f.is_zero():
        return pres.group.zero()
    degs = {pres.monomial_degree(e) for e, _ in f.terms}
    if len(degs) == 1:
        return next(iter(degs))
    return None


# ---------------------------------------------------------------------------
# exact linear algebra over the coefficient field
# ---------------------------------------------------------------------------


def rref(rows: list[list], track: bool = False):
    """Reduced row echelon form over any exact field (Fraction or tower).

    Returns (reduced nonzero rows, pivot column indices[, transform rows]):
    transform expresses each reduced row as a combination of the input rows.
    """
    mat = [list(r) for r in rows]
    m = len(mat)
    if m == 0:
        return ([], [], []) if track else ([], [])
    n = len(mat[0])
    trans = [[Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]
    if mat and isinstance(mat[0][0], TowerElement):
        tower = mat[0][0].tower
        trans = [[tower.one() if i == j else tower.zero() for j in range(m)]
                 for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if not _fz(mat[i][c])), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        trans[r], trans[pr] = trans[pr], trans[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        trans[r] = [x * inv for x in trans[r]]
        for i in range(m):
            if i != r and not _fz(mat[i][c]):
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
                trans[i] = [a - f * b for a, b in zip(trans[i], trans[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if track:
        return mat[:r], pivots, trans[:r]
    return mat[:r], pivots


def _fz(x) -> bool:
    if isinstance(x, TowerElement):
        return x.is_zero()
    return x == 0


def kernel_basis(rows: list[list]) -> list[list]:
    """Vectors c with sum c_i * rows[i] = 0, as a reduced echelon basis.

    Computed by eliminating the matrix (rows | identity): reduced rows whose
    left part vanished carry kernel combinations on the right.  The identity
    block has full rank, so no row disappears entirely.
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    if n == 0:
        return [list(r) for r in rref([_unit_row(rows, i, m) for i in range(m)])[0]]
    mat = [list(rows[i]) + _unit_row(rows, i, m) for i in range(m)]
    red, _ = rref(mat)
    ker = [row[n:] for row in red if all(_fz(x) for x in row[:n])]
    ker_rref, _ = rref(ker) if ker else ([], [])
    return ker_rref


def _unit_row(rows, i, m):
    sample = rows[0][0]
    if isinstance(sample, TowerElement):
        tw = sample.tower
        return [tw.one() if j == i else tw.zero() for j in range(m)]
    return [Fraction(1) if j == i else Fraction(0) for j in range(m)]


# ---------------------------------------------------------------------------
# graded pieces
# ---------------------------------------------------------------------------


@dataclass
class GradedPieceData:
    """Monomial fiber of one degree plus the relation-multiple row space.

    Rows are kept over Fraction when every relation coefficient is rational
    (the common case, and much faster); tower versions are built on demand
    for inputs with genuinely irrational coefficients.
    """

    degree: GroupElement
    monomials: list[Exponent]
    index: dict[Exponent, int]
    rel_rows: list[list]
    rel_pivots: list[int]
    quotient_positions: list[int]  # non-pivot monomial slots
    tower: FieldTower
    rational: bool

    @property
    def dimension(self) -> int:
        return len(self.quotient_positions)

    def _tower_rows(self):
        cached = getattr(self, "_tower_rows_cache", None)
        if cached is None:
            if self.rational:
                cached = [[self.tower.coerce(x) for x in row] for row in self.rel_rows]
            else:
                cached = self.rel_rows
            self._tower_rows_cache = cached
        return cached

    def vector_of(self, f: Polynomial) -> list:
        as_rat = self.rational and all(c.is_rational() for _, c in f.terms)
        zero = Fraction(0) if as_rat else self.tower.zero()
        vec = [zero] * len(self.monomials)
        for e, c in f.terms:
            if e not in self.index:
                raise ValueError("polynomial leaves the graded piece")
            vec[self.index[e]] = c.as_rational() if as_rat else c
        return vec

    def reduce(self, vec: list) -> list:
        rational_vec = not any(isinstance(x, TowerElement) for x in vec)
        if rational_vec and self.rational:
            rows = self.rel_rows
        else:
            rows = self._tower_rows()
            if rational_vec:
                vec = [self.tower.coerce(x) for x in vec]
        out = list(vec)
        for row, p in zip(rows, self.rel_pivots):
            if not _fz(out[p]):
                f = out[p]
                out = [a - f * b for a, b in zip(out, row)]
        return out

    def residue_coords(self, vec: list) -> list:
        red = self.reduce(vec)
        return [red[p] for p in self.quotient_positions]


def _fiber_cached(hom: GroupHom, d: GroupElement, cap: Optional[int]):
    cache = _FIBER_CACHE
    key = (hom, d.coords, cap)
    if key not in cache:
        cache[key] = fiber_points(hom, d, cap=cap)
    return cache[key]


_FIBER_CACHE: dict = {}


def residues_in_degree(pres: GradedPresentation, d: GroupElement,
                       items: Sequence[tuple[Exponent, object]],
                       cap: Optional[int] = None) -> list[dict]:
    """Residues of scaled monomials modulo the relation span in one degree.

    items are (ambient exponent, coefficient) pairs of degree d.  Works on
    the closure of the item supports under the relation-multiple row graph:
    rows whose support never meets that closure cannot change the residues,
    which keeps the elimination small.  Residues are canonical (they agree
    with the full-matrix reduced echelon computation).
    """
    hom = pres.degree_hom()
    rows_support: list[list[tuple[Exponent, object]]] = []
    for rel in pres.relations:
        rel_deg = homogeneous_degree(pres, rel)
        for m in _fiber_cached(hom, d - rel_deg, cap):
            rows_support.append([(tuple(a + b for a, b in zip(m, e)), c)
                                 for e, c in rel.terms])
    # closure of the item supports under support overlap
    by_exp: dict[Exponent, list[int]] = {}
    for ri, row in enumerate(rows_support):
        for e, _ in row:
            by_exp.setdefault(e, []).append(ri)
    active: set[Exponent] = set()
    queue = [e for e, _ in items]
    used_rows: set[int] = set()
    while queue:
        e = queue.pop()
        if e in active:
            continue
        active.add(e)
        for ri in by_exp.get(e, ()):
            if ri not in used_rows:
                used_rows.add(ri)
                for e2, _ in rows_support[ri]:
                    if e2 not in active:
                        queue.append(e2)
    cols = sorted(active, key=grlex_key)
    index = {e: i for i, e in enumerate(cols)}
    rational = all(
        (c.is_rational() if isinstance(c, TowerElement) else True)
        for row in (rows_support[ri] for ri in used_rows) for _, c in row)
    rational = rational and all(
        (c.is_rational() if isinstance(c, TowerElement) else True) for _, c in items)
    zero = Fraction(0) if rational else pres.tower.zero()

    def conv(c):
        if isinstance(c, TowerElement):
            return c.as_rational() if rational else c
        return Fraction(c) if rational else pres.tower.coerce(c)

    mat = []
    for ri in sorted(used_rows):
        vec = [zero] * len(cols)
        for e, c in rows_support[ri]:
            vec[index[e]] = vec[index[e]] + conv(c)
        mat.append(vec)
    reduced, pivots = rref(mat) if mat else ([], [])
    out = []
    for e, c in items:
        vec = [zero] * len(cols)
        vec[index[e]] = conv(c)
        for row, p in zip(reduced, pivots):
            if not _fz(vec[p]):
                f = vec[p]
                vec = [a - f * b for a, b in zip(vec, row)]
        out.append({cols[i]: vec[i] for i in range(len(cols)) if not _fz(vec[i])})
    return out


def graded_piece_data(pres: GradedPresentation, d: GroupElement,
                      cap: Optional[int] = None) -> GradedPieceData:
    hom = pres.degree_hom()
    monomials = _fiber_cached(hom, d, cap)
    index = {e: i for i, e in enumerate(monomials)}
    rational = all(c.is_rational() for rel in pres.relations for _, c in rel.terms)
    zero = Fraction(0) if rational else pres.tower.zero()
    rows: list[list] = []
    for rel in pres.relations:
        rel_deg = homogeneous_degree(pres, rel)
        shift_fiber = _fiber_cached(hom, d - rel_deg, cap)
        terms = [(e, c.as_rational() if rational else c) for e, c in rel.terms]
        for m in shift_fiber:
            vec = [zero] * len(monomials)
            ok = True
            for e, c in terms:
                prod = tuple(a + b for a, b in zip(m, e))
                if prod not in index:
                    ok = False
                    break
                vec[index[prod]] = vec[index[prod]] + c
            if not ok:
                # can only happen with a cap cutting the fiber; skip the row
                continue
            rows.append(vec)
    reduced, pivots = rref(rows) if rows else ([], [])
    quotient_positions = [i for i in range(len(monomials)) if i not in pivots]
    return GradedPieceData(d, monomials, index, reduced, pivots,
                           quotient_positions, pres.tower, rational)


def graded_piece(pres: GradedPresentation, d: GroupElement,
                 cap: Optional[int] = None) -> tuple[list[Polynomial], int]:
    """Basis (monomial coset representatives) and exact dimension of the
    degree-d piece of the quotient ring."""
    data = graded_piece_data(pres, d, cap)
    one = pres.tower.one()
    basis = [Polynomial.monomial(pres.nvars, data.monomials[i], one)
             for i in data.quotient_positions]
    return basis, data.dimension


def graded_dimension(pres: GradedPresentation, d: GroupElement,
                     cap: Optional[int] = None) -> int:
    """Exact dimension of the degree-d piece.

    For a principal relation ideal the rank of the multiple matrix equals
    the shifted fiber size (multiplication by a nonzero polynomial is
    injective in the free ring), so no elimination is needed.
    """
    hom = pres.degree_hom()
    fiber = _fiber_cached(hom, d, cap)
    if not fiber:
        return 0
    if not pres.relations:
        return len(fiber)
    if len(pres.relations) == 1 and cap is None:
        rel = pres.relations[0]
        c = homogeneous_degree(pres, rel)
        return len(fiber) - len(_fiber_cached(hom, d - c, cap))
    return graded_piece_data(pres, d, cap).dimension


def ideal_member(pres: GradedPresentation, f: Polynomial,
                 cap: Optional[int] = None
                 ) -> tuple[bool, Optional[list[tuple[int, Exponent, TowerElement]]]]:
    """Exact membership of a homogeneous f in the relation ideal.

    Returns (member, certificate); the certificate lists
    (relation index, multiplier exponent, coefficient) with
    f = sum coeff * x^exp * relation.
    """
    if f.is_zero():
        return True, []
    d = homogeneous_degree(pres, f)
    if d is None:
        raise HomogeneityError("membership requires a homogeneous polynomial")
    hom = pres.degree_hom()
    monomials = fiber_points(hom, d, cap=cap)
    index = {e: i for i, e in enumerate(monomials)}
    zero = pres.tower.zero()
    rows = []
    tags: list[tuple[int, Exponent]] = []
    for ri, rel in enumerate(pres.relations):
        rel_deg = homogeneous_degree(pres, rel)
        for m in fiber_points(hom, d - rel_deg, cap=cap):
            vec = [zero] * len(monomials)
            for e, c in rel.terms:
                prod = tuple(a + b for a, b in zip(m, e))
                vec[index[prod]] = vec[index[prod]] + c
            rows.append(vec)
            tags.append((ri, m))
    fvec = [zero] * len(monomials)
    for e, c in f.terms:
        if e not in index:
            raise ValueError("polynomial is not of the claimed degree")
        fvec[index[e]] = c
    if not rows:
        return False, None
    reduced, pivots, trans = rref(rows, track=True)
    residue = list(fvec)
    combo = [zero] * len(rows)
    for row, p, t in zip(reduced, pivots, trans):
        if not _fz(residue[p]):
            c = residue[p]
            residue = [a - c * b for a, b in zip(residue, row)]
            combo = [a + c * b for a, b in zip(combo, t)]
    if any(not _fz(x) for x in residue):
        return False, None
    certificate = [(tags[i][0], tags[i][1], combo[i])
                   for i in range(len(rows)) if not _fz(combo[i])]
    return True, certificate


# ---------------------------------------------------------------------------
# relation normalization and discovery
# ---------------------------------------------------------------------------


def normalize_relation(f: Polynomial) -> Polynomial:
    """Scale to smallest positive integer content over Q, else monic leading 1."""
    if f.is_zero():
        return f
    coeffs = [c for _, c in f.terms]
    if all(c.is_rational() for c in coeffs):
        rats = [c.as_rational() for c in coeffs]
        from math import gcd
        num = 0
        den = 1
        for q in rats:
            num = gcd(num, q.numerator)
            den = den * q.denominator // gcd(den, q.denominator)
        scale = Fraction(den, num) if num else Fraction(1)
        lead = f.leading()[1].as_rational()
        if lead * scale < 0:
            scale = -scale
        return f.map_coeff(lambda c, s=scale: c * s)
    lead = f.leading()[1]
    inv = lead.inverse()
    return f.map_coeff(lambda c: c * inv)


def discover_relations(
    ambient: GradedPresentation,
    gens: Sequence[tuple[str, Polynomial, GroupElement]],
    degree_map: GroupHom,
    degree_bound: int = 6,
    cap: Optional[int] = None,
) -> list[Polynomial]:
    """Relations among the given generators, as polynomials in the new names.

    Two sources, concatenated without cross-source deduplication, matching
    the output of the standard subalgebra-presentation computation:

    * a sweep over the new-variable monomials of total degree <= degree_bound,
      grouped by new degree: per degree the kernel of the evaluation map into
      the ambient graded piece, minus multiples of relations found earlier in
      the sweep (reduced row echelon basis);
    * ambient relations rewritten verbatim in the new generators whenever
      every term is a product of generator images.
    """
    k = len(gens)
    new_group = degree_map.domain
    for name, img, nd in gens:
        if nd.parent != new_group:
            raise ValueError("generator degree lies outside the new grading group")
        amb_deg = homogeneous_degree(ambient, img)
        if amb_deg is None or (not img.is_zero() and amb_deg != degree_map(nd)):
            raise ValueError(f"generator {name} is not homogeneous of its declared degree")

    one = ambient.tower.one()
    img_cache: dict[Exponent, Polynomial] = {
        (0,) * k: Polynomial.monomial(ambient.nvars, (0,) * ambient.nvars, one)
    }

    def image_of(e: Exponent) -> Polynomial:
        if e in img_cache:
            return img_cache[e]
        i = next(j for j in range(k) if e[j])
        prev = tuple(x - (1 if j == i else 0) for j, x in enumerate(e))
        out = image_of(prev) * gens[i][1]
        img_cache[e] = out
        return out

    all_monomial = all(img.is_monomial() for _, img, _ in gens)
    mono_exps = [img.terms[0][0] if img.is_monomial() else None for _, img, _ in gens]
    mono_coeffs = [img.terms[0][1] if img.is_monomial() else None for _, img, _ in gens]
    rel_term_exps = [e for rel in ambient.relations for e, _ in rel.terms]

    def monomial_image_exp(e: Exponent) -> Exponent:
        out = [0] * ambient.nvars
        for j, n in enumerate(e):
            if n:
                for t in range(ambient.nvars):
                    out[t] += n * mono_exps[j][t]
        return tuple(out)

    def monomial_image_coeff(e: Exponent) -> TowerElement:
        c = one
        for j, n in enumerate(e):
            if n:
                c = c * mono_coeffs[j] ** n
        return c

    # enumerate new monomials up to the bound, grouped by new degree
    groups: dict[tuple[int, ...], list[Exponent]] = {}

    def enumerate_exponents(prefix: list[int], i: int, left: int):
        if i == k:
            e = tuple(prefix)
            nd = new_group.zero()
            for j, n in enumerate(e):
                if n:
                    nd = nd + n * gens[j][2]
            groups.setdefault(nd.coords, []).append(e)
            return
        for v in range(left + 1):
            prefix.append(v)
            enumerate_exponents(prefix, i + 1, left - v)
            prefix.pop()

    enumerate_exponents([], 0, degree_bound)

    class_order = sorted(groups, key=lambda dc: (min(sum(e) for e in groups[dc]), dc))
    found: list[tuple[Polynomial, tuple[int, ...]]] = []  # (relation, new degree coords)

    output: list[Polynomial] = []
    for dc in class_order:
        monos = sorted(groups[dc], key=grlex_key)
        if not any(any(e) for e in monos):
            continue
        nd = new_group.element(list(dc))
        amb_deg = degree_map(nd)
        if all_monomial:
            # the kernel is zero unless two images coincide or a relation
            # term divides some image, so most classes are skipped outright
            img_exps = [monomial_image_exp(e) for e in monos]
            reducible = any(all(a >= b for a, b in zip(ie, re_))
                            for ie in img_exps for re_ in rel_term_exps)
            if not reducible and len(set(img_exps)) == len(img_exps):
                continue
            residues = residues_in_degree(
                ambient, amb_deg,
                [(ie, monomial_image_coeff(e)) for e, ie in zip(monos, img_exps)],
                cap)
        else:
            residues = []
            for e in monos:
                img = image_of(e)
                term_res = residues_in_degree(ambient, amb_deg, list(img.terms), cap)
                acc: dict = {}
                for d_ in term_res:
                    for ex, c in d_.items():
                        acc[ex] = acc.get(ex, 0 * c) + c
                residues.append({ex: c for ex, c in acc.items() if not _fz(c)})
        support = sorted({ex for d_ in residues for ex in d_}, key=grlex_key)
        sidx = {ex: i for i, ex in enumerate(support)}
        rat_mode = not any(isinstance(x, TowerElement) for d_ in residues for x in d_.values())
        zero_v = Fraction(0) if rat_mode else ambient.tower.zero()
        vectors = []
        for d_ in residues:
            vec = [zero_v] * len(support)
            for ex, c in d_.items():
                vec[sidx[ex]] = c if rat_mode else ambient.tower.coerce(c)
            vectors.append(vec)
        rat_mode = rat_mode and all(c.is_rational() for rel, _ in found for _, c in rel.terms)
        if not rat_mode:
            vectors = [[ambient.tower.coerce(x) for x in v] for v in vectors]
        ker = kernel_basis(vectors)
        if not ker:
            continue
        # span of multiples of relations already found in the sweep; all the
        # linear algebra below runs with grlex-descending pivots so that new
        # relations come out in normal form modulo the earlier ones
        known_rows = []
        mono_index = {e: i for i, e in enumerate(monos)}
        nm = len(monos)
        zero = Fraction(0) if rat_mode else ambient.tower.zero()
        for rel, rel_dc in found:
            budget = degree_bound - rel.total_degree()
            terms = [(e, c.as_rational() if rat_mode else c) for e, c in rel.terms]
            for m in groups.get(_sub_coords(dc, rel_dc), []):
                if sum(m) > budget:
                    continue
                prod_ok = True
                vec = [zero] * nm
                for e, c in terms:
                    pe = tuple(a + b for a, b in zip(m, e))
                    if pe not in mono_index:
                        prod_ok = False
                        break
                    vec[mono_index[pe]] = vec[mono_index[pe]] + c
                if prod_ok:
                    known_rows.append(vec[::-1])
        reduced_known, known_pivots = rref(known_rows) if known_rows else ([], [])
        fresh = []
        for kv in ker:
            res = list(kv)[::-1]
            for row, p in zip(reduced_known, known_pivots):
                if not _fz(res[p]):
                    c = res[p]
                    res = [a - c * b for a, b in zip(res, row)]
            if any(not _fz(x) for x in res):
                fresh.append(res)
        if not fresh:
            continue
        fresh_rref, _ = rref(fresh)
        tower = ambient.tower
        for vec in fresh_rref:
            rel = Polynomial.make(k, [(monos[nm - 1 - i], tower.coerce(vec[i]))
                                      for i in range(nm) if not _fz(vec[i])])
            rel = normalize_relation(rel)
            found.append((rel, dc))
            output.append(rel)

    # second source: verbatim rewrites of ambient relations
    for arel in ambient.relations:
        rewritten = _rewrite_in_generators(ambient, gens, arel, degree_bound)
        if rewritten is not None:
            output.append(normalize_relation(rewritten))
    return output


def _sub_coords(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _rewrite_in_generators(ambient, gens, arel: Polynomial,
                           degree_bound: int) -> Optional[Polynomial]:
    """Express an ambient relation exactly as a polynomial in the generators.

    Requires every generator image to be a scaled monomial and every term of
    the relation to decompose as a product of those monomials within the
    total-degree bound.
    """
    mono_gens = []
    for name, img, nd in gens:
        if not img.is_monomial():
            return None
        (e, c), = img.terms
        mono_gens.append((e, c))
    k = len(gens)
    out_terms = []
    for e, c in arel.terms:
        dec = _decompose_exponent(e, mono_gens, degree_bound)
        if dec is None:
            return None
        # divide out the product of the generator coefficients
        scale = c
        for i, n in enumerate(dec):
            for _ in range(n):
                scale = scale * mono_gens[i][1].inverse()
        out_terms.append((tuple(dec), scale))
    return Polynomial.make(k, out_terms)


def _decompose_exponent(e: Exponent, mono_gens, budget: int) -> Optional[list[int]]:
    """Greedy-with-backtracking decomposition of e as a sum of generator
    exponents, at most `budget` factors."""
    k = len(mono_gens)

    def dfs(rest, start, used):
        if all(x == 0 for x in rest):
            return [0] * k
        if used >= budget:
            return None
        for i in range(start, k):
            ge = mono_gens[i][0]
            if any(ge) and all(r >= g for r, g in zip(rest, ge)):
                sub = dfs(tuple(r - g for r, g in zip(rest, ge)), i, used + 1)
                if sub is not None:
                    sub[i] += 1
                    return sub
        return None

    return dfs(tuple(e), 0, 0)
