"""Degree-fiber enumeration and Hilbert bases of fiber monoids.

The two engines:

* exact Fourier-Motzkin elimination over Fractions drives a DFS that lists
  all nonnegative integer solutions of Q*e = d (fiber_points);
* a Contejean-Devie completion lists the minimal nonzero solutions of
  homogeneous systems, which gives pointedness certificates and Hilbert
  bases of fiber monoids.

Torsion coordinates of the grading group are turned into exact equations by
slack variables after reducing the torsion rows into [0, order).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Optional, Sequence

from .abgroup import AbelianGroup, GroupElement, GroupHom, quotient

DEFAULT_COMPLETION_CAP = 64


class UnboundedFiberError(ValueError):
    """A degree fiber is infinite and no enumeration cap was supplied."""


class NonPointedMonoidError(ValueError):
    """The grading admits a nonzero nonnegative vector of degree zero."""

    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(f"grading is not pointed; witness {self.witness}")


class CompletionCapError(RuntimeError):
    """Safety cap on the completion total degree was exceeded."""


def grlex_key(e: Sequence[int]):
    return (sum(e), tuple(e))


# ---------------------------------------------------------------------------
# torsion-to-slack encoding
# ---------------------------------------------------------------------------


def _extended_system(hom: GroupHom) -> tuple[list[list[int]], list[int], int]:
    """Integer matrix for 'Q*e = d in G' as exact equations.

    Returns (rows, moduli_per_extra_column, n_slack).  Rows cover the free
    coordinates verbatim and each torsion coordinate as
    (reduced row)*e - order*s = rhs with a fresh slack variable s >= 0.
    Torsion rows are reduced into [0, order) so slack values stay
    nonnegative whenever e >= 0 and the congruence holds with rhs reduced.
    """
    g = hom.codomain
    n = hom.domain.ngens
    free = g.free_rank
    orders = g.torsion_orders
    rows: list[list[int]] = []
    for i in range(free):
        rows.append(list(hom.matrix[i]) + [0] * len(orders))
    for k, d in enumerate(orders):
        row = [x % d for x in hom.matrix[free + k]]
        slack = [0] * len(orders)
        slack[k] = -d
        rows.append(row + slack)
    return rows, list(orders), len(orders)


# ---------------------------------------------------------------------------
# Contejean-Devie completion
# ---------------------------------------------------------------------------


def _minimal_nonneg_solutions(rows: Sequence[Sequence[int]], ncols: int,
                              cap: int = DEFAULT_COMPLETION_CAP) -> list[tuple[int, ...]]:
    """Minimal nonzero solutions of rows*x = 0, x >= 0, by breadth-first
    completion with the scalar-product descent criterion."""
    m = len(rows)
    cols = [tuple(rows[i][j] for i in range(m)) for j in range(ncols)]

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    minimal: list[tuple[int, ...]] = []

    def dominated(t):
        return any(all(a >= b for a, b in zip(t, s)) for s in minimal)

    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for j in range(ncols):
        t = tuple(1 if i == j else 0 for i in range(ncols))
        frontier[t] = cols[j]
    degree = 1
    while frontier:
        if degree > cap:
            raise CompletionCapError(
                f"completion exceeded total degree {cap}; "
                "the input grading is likely not pointed")
        next_frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
        for t, w in frontier.items():
            if all(x == 0 for x in w):
                if not dominated(t):
                    minimal.append(t)
                continue
            for j in range(ncols):
                if dot(w, cols[j]) < 0:
                    child = tuple(t[i] + (1 if i == j else 0) for i in range(ncols))
                    if child in next_frontier or dominated(child):
                        continue
                    next_frontier[child] = tuple(a + b for a, b in zip(w, cols[j]))
        frontier = next_frontier
        degree += 1
    minimal.sort(key=grlex_key)
    return minimal


def is_pointed(hom: GroupHom, cap: int = DEFAULT_COMPLETION_CAP) -> bool:
    """True iff the only nonnegative vector of degree zero is zero."""
    witness = pointedness_witness(hom, cap)
    return witness is None


def pointedness_witness(hom: GroupHom, cap: int = DEFAULT_COMPLETION_CAP
                        ) -> Optional[tuple[int, ...]]:
    """A nonzero e >= 0 with hom(e) = 0, or None when pointed."""
    n = hom.domain.ngens
    if hom.domain.torsion_orders:
        raise ValueError("degree maps must have free domain")
    if n == 0:
        return None
    rows, _, nslack = _extended_system(hom)
    sols = _minimal_nonneg_solutions(rows, n + nslack, cap)
    for s in sols:
        e = s[:n]
        if any(e):
            return e
    return None


# ---------------------------------------------------------------------------
# fiber enumeration
# ---------------------------------------------------------------------------


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    mat = [row[:] for row in rows]
    m = len(mat)
    n = len(mat[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return mat[:r], pivots


def _fourier_motzkin_stages(constraints: list[tuple[tuple[Fraction, ...], Fraction]],
                            nparams: int) -> list[list[tuple[tuple[Fraction, ...], Fraction]]]:
    """Stage lists for DFS: stages[j] holds constraints on parameters 0..j only.

    A constraint ((c_0..c_{p-1}), k) means sum c_j t_j + k >= 0.
    """
    stages: list[list[tuple[tuple[Fraction, ...], Fraction]]] = [[] for _ in range(nparams + 1)]
    current = constraints
    for j in reversed(range(nparams)):
        stay, pos, neg = [], [], []
        for coeffs, k in current:
            if any(coeffs[t] != 0 for t in range(j + 1, nparams)):
                continue  # already consumed at a later stage
            if coeffs[j] > 0:
                pos.append((coeffs, k))
            elif coeffs[j] < 0:
                neg.append((coeffs, k))
            else:
                stay.append((coeffs, k))
        stages[j + 1] = pos + neg
        combined = list(stay)
        for pc, pk in pos:
            for nc, nk in neg:
                a, b = pc[j], -nc[j]
                coeffs = tuple(a * nc[t] + b * pc[t] for t in range(nparams))
                combined.append((coeffs, a * nk + b * pk))
        # dedup to keep the blowup in check
        current = list({(c, k) for c, k in combined})
    stages[0] = [c for c in current if all(x == 0 for x in c[0])]
    return stages


def fiber_points(hom: GroupHom, target: GroupElement,
                 cap: Optional[int] = None) -> list[tuple[int, ...]]:
    """All e >= 0 with hom(e) = target, graded-lex ordered.

    cap, when given, bounds every coordinate; without it an infinite fiber
    raises UnboundedFiberError.
    """
    if hom.domain.torsion_orders:
        raise ValueError("degree maps must have free domain")
    if target.parent != hom.codomain:
        raise ValueError("target degree lies in the wrong group")
    n = hom.domain.ngens
    g = hom.codomain
    if n == 0:
        return [()] if target.is_zero() else []

    free = g.free_rank
    arows = [[Fraction(hom.matrix[i][j]) for j in range(n)] for i in range(free)]
    brhs = [Fraction(target.coords[i]) for i in range(free)]

    aug = [arows[i] + [brhs[i]] for i in range(free)]
    red, pivots = _rref(aug) if aug else ([], [])
    if n in pivots:
        return []  # free part inconsistent
    basic = [c for c in pivots if c < n]
    params = [c for c in range(n) if c not in basic]

    # e_i as affine functions of the parameters
    exprs: list[tuple[list[Fraction], Fraction]] = []
    for i in range(n):
        if i in basic:
            r = basic.index(i)
            coeffs = [-red[r][p] for p in params]
            const = red[r][n]
        else:
            coeffs = [Fraction(1) if p == i else Fraction(0) for p in params]
            const = Fraction(0)
        exprs.append((coeffs, const))

    p = len(params)
    constraints: list[tuple[tuple[Fraction, ...], Fraction]] = []
    for coeffs, const in exprs:
        constraints.append((tuple(coeffs), const))  # e_i >= 0
        if cap is not None:
            constraints.append((tuple(-c for c in coeffs), Fraction(cap) - const))
    for coeffs, k in constraints:
        if all(c == 0 for c in coeffs) and k < 0:
            return []
    stages = _fourier_motzkin_stages([c for c in constraints
                                      if any(x != 0 for x in c[0])], p)
    for coeffs, k in stages[0]:
        if k < 0:
            return []

    tors_rows = [hom.matrix[free + t] for t in range(len(g.torsion_orders))]
    tors_rhs = [target.coords[free + t] for t in range(len(g.torsion_orders))]
    orders = g.torsion_orders

    out: list[tuple[int, ...]] = []
    assignment: list[int] = []

    def bounds_at(stage: int) -> Optional[tuple[int, int]]:
        lo, hi = None, None
        j = stage - 1
        for coeffs, k in stages[stage]:
            val = k + sum(coeffs[t] * assignment[t] for t in range(j))
            c = coeffs[j]
            if c > 0:
                b = -val / c
                lo = b if lo is None or b > lo else lo
            else:
                b = val / (-c)
                hi = b if hi is None or b < hi else hi
        if lo is None or hi is None:
            raise UnboundedFiberError(
                "fiber is infinite; supply an enumeration cap")
        return ceil(lo), floor(hi)

    def dfs(stage: int):
        if stage > p:
            e = []
            for coeffs, const in exprs:
                v = const + sum(c * t for c, t in zip(coeffs, assignment))
                if v.denominator != 1 or v < 0:
                    return
                e.append(int(v))
            if cap is not None and any(x > cap for x in e):
                return
            for row, rhs, d in zip(tors_rows, tors_rhs, orders):
                if (sum(r * x for r, x in zip(row, e)) - rhs) % d:
                    return
            out.append(tuple(e))
            return
        lo, hi = bounds_at(stage)
        for v in range(lo, hi + 1):
            assignment.append(v)
            dfs(stage + 1)
            assignment.pop()

    dfs(1)
    out.sort(key=grlex_key)
    return out


# ---------------------------------------------------------------------------
# fiber monoids and Hilbert bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberMonoid:
    """Monoid {e >= 0 : degree_hom(e) lies in the subgroup generated by
    target_subgroup}."""

    degree_hom: GroupHom
    target_subgroup: tuple[GroupElement, ...] = ()

    def __post_init__(self):
        if self.degree_hom.domain.torsion_orders:
            raise ValueError("degree maps must have free domain")
        g = self.degree_hom.codomain
        for h in self.target_subgroup:
            if h.parent != g:
                raise ValueError("subgroup generators lie in the wrong group")
        object.__setattr__(self, "target_subgroup", tuple(self.target_subgroup))

    @property
    def nvars(self) -> int:
        return self.degree_hom.domain.ngens

    def quotient_hom(self) -> GroupHom:
        """Composite Z^n -> G -> G/H whose kernel-in-the-orthant is the monoid."""
        cached = getattr(self, "_quotient_hom", None)
        if cached is None:
            g = self.degree_hom.codomain
            _, proj = quotient(g, list(self.target_subgroup))
            cached = proj.compose(self.degree_hom)
            object.__setattr__(self, "_quotient_hom", cached)
        return cached

    def contains(self, e: Sequence[int]) -> bool:
        if len(e) != self.nvars or any(x < 0 for x in e):
            return False
        proj = self.quotient_hom()
        return proj(proj.domain.element(list(e))).is_zero()


def hilbert_basis(fm: FiberMonoid, cap: int = DEFAULT_COMPLETION_CAP) -> list[tuple[int, ...]]:
    """Minimal generating set of the fiber monoid, graded-lex ordered.

    Requires the grading to be pointed; the completion runs on the composite
    map into G/H with torsion treated through slack variables.
    """
    witness = pointedness_witness(fm.degree_hom, cap)
    if witness is not None:
        raise NonPointedMonoidError(witness)
    n = fm.nvars
    if n == 0:
        return []
    composite = fm.quotient_hom()
    rows, _, nslack = _extended_system(composite)
    sols = _minimal_nonneg_solutions(rows, n + nslack, cap)
    basis = sorted({s[:n] for s in sols if any(s[:n])}, key=grlex_key)
    return basis


def monoid_decompose(fm: FiberMonoid, basis: Sequence[Sequence[int]],
                     e: Sequence[int]) -> Optional[list[int]]:
    """Indices (with multiplicity, ascending) expressing e as a sum of basis
    elements, or None if no decomposition exists.

    Raises ValueError when e is not a monoid element at all.
    """
    if not fm.contains(e):
        raise ValueError(f"{tuple(e)} is not in the fiber monoid")
    order = sorted(range(len(basis)), key=lambda i: grlex_key(basis[i]), reverse=True)
    target = tuple(e)
    seen: set[tuple[int, ...]] = set()

    def dfs(rest: tuple[int, ...], start: int) -> Optional[list[int]]:
        if all(x == 0 for x in rest):
            return []
        if rest in seen:
            return None
        for pos in range(start, len(order)):
            i = order[pos]
            b = basis[i]
            if all(r >= x for r, x in zip(rest, b)) and any(b):
                sub = dfs(tuple(r - x for r, x in zip(rest, b)), pos)
                if sub is not None:
                    return [i] + sub
        seen.add(rest)
        return None

    result = dfs(target, 0)
    return sorted(result) if result is not None else None
