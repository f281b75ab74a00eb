"""Finitely generated abelian groups via integer matrix normal forms.

Groups are presented as Z^r x Z/d_1 x ... x Z/d_t with coordinates stored
free-part-first.  All structural questions (kernels, quotients, membership)
reduce to Smith/Hermite normal form computations over arbitrary-precision
integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence


class GroupError(ValueError):
    """Raised on malformed group data or mismatched parents."""


# ---------------------------------------------------------------------------
# integer matrix utilities
# ---------------------------------------------------------------------------

IntMatrix = list[list[int]]


def identity_matrix(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    if a and len(a[0]) != k:
        raise GroupError("matrix shapes do not match")
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    oi[j] += c * bt[j]
    return out


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    if a and len(a[0]) != len(v):
        raise GroupError("matrix/vector shapes do not match")
    return [sum(r[j] * v[j] for j in range(len(v))) for r in a]


def smith_normal_form(mat: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U*mat*V = S, U and V unimodular.

    S is diagonal with nonnegative entries, each dividing the next.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    s = [list(row) for row in mat]
    u = identity_matrix(m)
    v = identity_matrix(n)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row[dst] += c * row[src]
        s[dst] = [x + c * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in s:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while t < m and t < n:
        # locate a pivot of minimal absolute value
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = s[i][j]
                if a != 0 and (best is None or abs(a) < best):
                    best = abs(a)
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t; restart when a remainder creates a smaller pivot
        while True:
            dirty = False
            for i in range(t + 1, m):
                if s[i][t]:
                    q = s[i][t] // s[t][t]
                    add_row(t, i, -q)
                    if s[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if s[t][j]:
                    q = s[t][j] // s[t][t]
                    add_col(t, j, -q)
                    if s[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        # pivot must divide the remaining block
        a = s[t][t]
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if s[i][j] % a:
                    add_row(i, t, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            if s[t][t] < 0:
                s[t] = [-x for x in s[t]]
                u[t] = [-x for x in u[t]]
            t += 1
    return u, s, v


def mat_inverse_unimodular(mat: Sequence[Sequence[int]]) -> IntMatrix:
    """Invert a unimodular integer matrix exactly."""
    n = len(mat)
    u, s, v = smith_normal_form(mat)
    for i in range(n):
        if s[i][i] != 1:
            raise GroupError("matrix is not unimodular")
    # mat^-1 = V * S^-1 * U = V * U
    return mat_mul(v, u)


def solve_integer(mat: Sequence[Sequence[int]], rhs: Sequence[int]) -> Optional[list[int]]:
    """One integer solution of mat*x = rhs, or None."""
    sol, _ = solve_integer_with_kernel(mat, rhs)
    return sol


def integer_kernel(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the lattice {x : mat*x = 0}."""
    _, ker = solve_integer_with_kernel(mat, [0] * len(mat))
    return ker


def solve_integer_with_kernel(
    mat: Sequence[Sequence[int]], rhs: Sequence[int]
) -> tuple[Optional[list[int]], list[list[int]]]:
    """Solve mat*x = rhs over Z; return (particular solution or None, kernel basis)."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    if m == 0:
        return [0] * n, identity_matrix(n)
    u, s, v = smith_normal_form(mat)
    c = mat_vec(u, rhs)
    y = [0] * n
    r = min(m, n)
    for i in range(m):
        d = s[i][i] if i < r else 0
        if d:
            if c[i] % d:
                return None, _kernel_from_snf(s, v, m, n)
            y[i] = c[i] // d
        elif c[i]:
            return None, _kernel_from_snf(s, v, m, n)
    x = mat_vec(v, y)
    return x, _kernel_from_snf(s, v, m, n)


def _kernel_from_snf(s, v, m, n) -> list[list[int]]:
    ker = []
    for j in range(n):
        if j >= m or s[j][j] == 0:
            ker.append([v[i][j] for i in range(n)])
    return ker


def hermite_row_reduce(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by the given rows.

    Rows of the result are a canonical basis: pivot entries positive, entries
    above each pivot reduced into [0, pivot).
    """
    rows = [list(r) for r in vectors if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    basis: list[list[int]] = []
    for row in rows:
        basis.append(list(row))
    # column-by-column gcd elimination
    result: list[list[int]] = []
    work = basis
    col = 0
    while col < n and work:
        work.sort(key=lambda r: (r[col] == 0, abs(r[col]) if r[col] else 0))
        if work[0][col] == 0:
            col += 1
            continue
        while True:
            nonzero = [r for r in work[1:] if r[col]]
            if not nonzero:
                break
            p = work[0]
            for r in work[1:]:
                if r[col]:
                    q = r[col] // p[col]
                    for j in range(n):
                        r[j] -= q * p[j]
            work.sort(key=lambda r: (r[col] == 0, abs(r[col]) if r[col] else 0))
        pivot = work[0]
        if pivot[col] < 0:
            pivot[:] = [-x for x in pivot]
        result.append(pivot)
        work = [r for r in work[1:] if any(r)]
        col += 1
    # reduce above-pivot entries
    for i in reversed(range(len(result))):
        pcol = next(j for j in range(n) if result[i][j])
        for k in range(i):
            q = result[k][pcol] // result[i][pcol]
            if q:
                result[k] = [a - q * b for a, b in zip(result[k], result[i])]
    return result


def reduce_mod_lattice(x: Sequence[int], basis: Sequence[Sequence[int]]) -> list[int]:
    """Canonical representative of x modulo the lattice spanned by basis rows."""
    out = list(x)
    for row in hermite_row_reduce(basis):
        pcol = next(j for j in range(len(row)) if row[j])
        q = out[pcol] // row[pcol]
        if q:
            out = [a - q * b for a, b in zip(out, row)]
    return out


# ---------------------------------------------------------------------------
# groups, elements, homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank x prod Z/d for d in torsion_orders."""

    free_rank: int
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise GroupError("free rank must be nonnegative")
        object.__setattr__(self, "torsion_orders", tuple(int(d) for d in self.torsion_orders))
        if any(d < 2 for d in self.torsion_orders):
            raise GroupError("torsion orders must be >= 2")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion_orders)

    def reduce_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise GroupError("coordinate length does not match group signature")
        out = list(int(c) for c in coords)
        for k, d in enumerate(self.torsion_orders):
            out[self.free_rank + k] %= d
        return tuple(out)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, self.reduce_coords(coords))

    def zero(self) -> "GroupElement":
        return self.element([0] * self.ngens)

    def generator(self, i: int) -> "GroupElement":
        coords = [0] * self.ngens
        coords[i] = 1
        return self.element(coords)

    def generators(self) -> list["GroupElement"]:
        return [self.generator(i) for i in range(self.ngens)]

    def torsion_relation_columns(self) -> list[list[int]]:
        """Columns spanning the relations lattice of the presentation Z^ngens -> G."""
        cols = []
        for k, d in enumerate(self.torsion_orders):
            col = [0] * self.ngens
            col[self.free_rank + k] = d
            cols.append(col)
        return cols

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion_orders]
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupElement:
    parent: AbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.parent.reduce_coords(self.coords))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self.parent.element([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self.parent.element([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "GroupElement":
        return self.parent.element([-a for a in self.coords])

    def __rmul__(self, k: int) -> "GroupElement":
        return self.parent.element([k * a for a in self.coords])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _check(self, other: "GroupElement"):
        if self.parent != other.parent:
            raise GroupError("elements have different parent groups")

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by an integer matrix; column j = image of domain generator j."""

    domain: AbelianGroup
    codomain: AbelianGroup
    matrix: tuple[tuple[int, ...], ...]  # row-major, shape (codomain.ngens, domain.ngens)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.codomain.ngens:
            raise GroupError("matrix row count does not match codomain")
        for row in rows:
            if len(row) != self.domain.ngens:
                raise GroupError("matrix column count does not match domain")
        # order of each domain torsion generator must annihilate its image
        for k, d in enumerate(self.domain.torsion_orders):
            j = self.domain.free_rank + k
            img = self.column(j)
            if not (d * img).is_zero():
                raise GroupError("map does not respect domain torsion")

    def column(self, j: int) -> GroupElement:
        return self.codomain.element([self.matrix[i][j] for i in range(self.codomain.ngens)])

    def apply(self, g: GroupElement) -> GroupElement:
        if g.parent != self.domain:
            raise GroupError("element not in the domain")
        return self.codomain.element(mat_vec(self.matrix, list(g.coords)))

    def __call__(self, g: GroupElement) -> GroupElement:
        return self.apply(g)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner."""
        if inner.codomain != self.domain:
            raise GroupError("homs not composable")
        return GroupHom(inner.domain, self.codomain,
                        tuple(tuple(r) for r in mat_mul(self.matrix, inner.matrix)))

    @staticmethod
    def identity(g: AbelianGroup) -> "GroupHom":
        return GroupHom(g, g, tuple(tuple(r) for r in identity_matrix(g.ngens)))

    @staticmethod
    def from_columns(domain: AbelianGroup, codomain: AbelianGroup,
                     columns: Sequence[GroupElement]) -> "GroupHom":
        if len(columns) != domain.ngens:
            raise GroupError("need one column per domain generator")
        rows = [[col.coords[i] for col in columns] for i in range(codomain.ngens)]
        return GroupHom(domain, codomain, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------


def _congruence_matrix(hom_cols: list[list[int]], codomain: AbelianGroup) -> IntMatrix:
    """Matrix of the system 'combination of columns is zero in codomain' as an
    integer system, with slack columns for the codomain torsion."""
    n = len(hom_cols)
    rows: IntMatrix = []
    slack = codomain.torsion_relation_columns()
    for i in range(codomain.ngens):
        rows.append([hom_cols[j][i] for j in range(n)] + [col[i] for col in slack])
    return rows


def subgroup_membership(generators: Sequence[GroupElement], g: GroupElement) -> Optional[list[int]]:
    """Express g as an integer combination of the generators, or None.

    The returned witness is canonical: the Hermite-reduced representative of
    the solution modulo the relation lattice.
    """
    if not generators:
        return [] if g.is_zero() else None
    parent = generators[0].parent
    for h in generators:
        if h.parent != parent:
            raise GroupError("generators have mixed parent groups")
    if g.parent != parent:
        raise GroupError("element parent differs from generator parent")
    cols = [list(h.coords) for h in generators]
    mat = _congruence_matrix(cols, parent)
    sol, ker = solve_integer_with_kernel(mat, list(g.coords))
    if sol is None:
        return None
    k = len(generators)
    reduced = reduce_mod_lattice(sol, [row[:k] for row in ker])
    return reduced[:k]


def quotient(group: AbelianGroup, subgroup_gens: Sequence[GroupElement]
             ) -> tuple[AbelianGroup, GroupHom]:
    """Quotient of group by the subgroup generated by subgroup_gens.

    Returns (Q, projection).  The kernel of the projection is exactly the
    given subgroup (plus the presentation's torsion relations), never its
    saturation.
    """
    for h in subgroup_gens:
        if h.parent != group:
            raise GroupError("subgroup generators must lie in the group")
    s = group.ngens
    rel_cols = [list(h.coords) for h in subgroup_gens] + group.torsion_relation_columns()
    if not rel_cols:
        q = AbelianGroup(s)
        return q, GroupHom(group, q, tuple(tuple(r) for r in identity_matrix(s)))
    rel = [[col[i] for col in rel_cols] for i in range(s)]
    u, snf, _ = smith_normal_form(rel)
    r = min(s, len(rel_cols))
    diag = [snf[i][i] for i in range(r)] + [0] * (s - r)
    free_rows = [i for i in range(s) if diag[i] == 0]
    tors_rows = [i for i in range(s) if diag[i] >= 2]
    q = AbelianGroup(len(free_rows), tuple(diag[i] for i in tors_rows))
    proj_rows = [u[i] for i in free_rows] + [u[i] for i in tors_rows]
    proj = GroupHom(group, q, tuple(tuple(r) for r in proj_rows))
    return q, proj


def hom_kernel(f: GroupHom) -> tuple[AbelianGroup, GroupHom]:
    """Kernel of f with its inclusion into the domain."""
    a, b = f.domain, f.codomain
    sa = a.ngens
    cols = [list(f.column(j).coords) for j in range(sa)]
    mat = _congruence_matrix(cols, b)
    ker = integer_kernel(mat)
    lattice = [v[:sa] for v in ker] + a.torsion_relation_columns()
    lbasis = hermite_row_reduce(lattice)
    if not lbasis:
        k = AbelianGroup(0)
        return k, GroupHom(k, a, tuple(() for _ in range(sa)))
    # relations among the lattice generators inside a: coefficient vectors c
    # with sum c_i * lbasis_i lying in the torsion-relation lattice of a
    tors = a.torsion_relation_columns()
    sys_rows: IntMatrix = []
    for i in range(sa):
        sys_rows.append([v[i] for v in lbasis] + [col[i] for col in tors])
    rel_c = [v[: len(lbasis)] for v in integer_kernel(sys_rows)]
    kgroup_src = AbelianGroup(len(lbasis))
    kq, kproj = quotient(kgroup_src, [kgroup_src.element(c) for c in rel_c])
    # generators of the kernel group expressed in a-coordinates: invert the
    # projection on a section of its generators
    gen_coords = []
    for i in range(kq.ngens):
        target = [0] * kq.ngens
        target[i] = 1
        sol = solve_integer(list(kproj.matrix), target)
        if sol is None:
            raise GroupError("internal error: projection section failed")
        vec = [0] * sa
        for c, bv in zip(sol, lbasis):
            for t in range(sa):
                vec[t] += c * bv[t]
        gen_coords.append(a.reduce_coords(vec))
    rows = [[gen_coords[j][i] for j in range(kq.ngens)] for i in range(sa)]
    inclusion = GroupHom(kq, a, tuple(tuple(r) for r in rows))
    return kq, inclusion


def hom_image_on_quotient(f: GroupHom, proj: GroupHom) -> GroupHom:
    """Hom induced by f on the quotient defined by proj (same source group).

    Requires f to preserve the kernel of proj; the result maps proj(x) to
    proj(f(x)).
    """
    if f.domain != proj.domain or f.codomain != proj.domain:
        raise GroupError("expected an endomorphism of the projection source")
    q = proj.codomain
    cols = []
    for i in range(q.ngens):
        target = [0] * q.ngens
        target[i] = 1
        mat = _congruence_matrix([list(proj.column(j).coords) for j in range(proj.domain.ngens)], q)
        sol = solve_integer(mat, target)
        if sol is None:
            raise GroupError("projection is not surjective")
        lift = proj.domain.element(sol[: proj.domain.ngens])
        cols.append(proj(f(lift)))
    return GroupHom.from_columns(q, q, cols)
