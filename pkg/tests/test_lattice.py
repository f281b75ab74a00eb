import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from coxcalc.abgroup import AbelianGroup, GroupHom, quotient
from coxcalc.lattice import (
    FiberMonoid,
    NonPointedMonoidError,
    UnboundedFiberError,
    fiber_points,
    grlex_key,
    hilbert_basis,
    is_pointed,
    monoid_decompose,
    pointedness_witness,
)

Z6 = AbelianGroup(6)
Z9 = AbelianGroup(9)
Z10 = AbelianGroup(10)

DP4_COLUMNS = [
    [0, 0, 1, -1, 0, 0],
    [0, 1, -1, 0, 0, 0],
    [1, -1, -1, 0, 0, -1],
    [0, 0, 0, 1, -1, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [1, -1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, -1],
    [2, -1, -1, -1, -1, 0],
]

DP4_H_COLUMNS = [
    [0, 0, 1, -1, 0, 0],
    [0, 1, -1, 0, 0, 0],
    [1, -1, -1, 1, -1, -1],
    [0, 0, 0, 0, 1, 1],
]


def hom_from_columns(cols, codomain):
    dom = AbelianGroup(len(cols))
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(codomain.ngens)]
    return GroupHom(dom, codomain, tuple(tuple(r) for r in rows))


DP4_Q = hom_from_columns(DP4_COLUMNS, Z6)

# descended seven-generator degrees in the rank-4 invariant basis
XI_COLUMNS = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 0, 1, 1],
    [4, 2, 3, 2],
    [2, 1, 2, 2],
]
Z4 = AbelianGroup(4)
XI_Q = hom_from_columns(XI_COLUMNS, Z4)


def chatelet_identity_data():
    """Degree map Z^10 -> Pic for the conic-bundle surface with split quartic."""

    def pair(i):
        v = [0] * 10
        v[2 * i] = 1
        v[2 * i + 1] = 1
        return v

    rel = []
    for j in (2, 3, 4):
        rel.append([a - b for a, b in zip(pair(1), pair(j))])
    r = [0] * 10
    for idx in (0, 2, 4):
        r[idx] += 1
    for idx in (1, 7, 9):
        r[idx] -= 1
    rel.append(r)
    pic, proj = quotient(Z10, [Z10.element(v) for v in rel])
    return pic, proj


class TestFiberPoints:
    def test_compositions(self):
        z = AbelianGroup(1)
        q = hom_from_columns([[1], [1]], z)
        pts = fiber_points(q, z.element([3]))
        assert pts == [(0, 3), (1, 2), (2, 1), (3, 0)]

    def test_zero_degree_pointed(self):
        pts = fiber_points(DP4_Q, Z6.zero())
        assert pts == [(0,) * 9]

    def test_dp4_anticanonical_xi_fiber(self):
        d = Z4.element([4, 2, 3, 2])
        pts = fiber_points(XI_Q, d)
        expected = {
            (2, 2, 1, 0, 2, 0, 0),
            (4, 2, 3, 2, 0, 0, 0),
            (3, 2, 2, 1, 1, 0, 0),
            (2, 1, 1, 0, 0, 0, 1),
            (0, 0, 0, 0, 0, 1, 0),
        }
        assert set(pts) == expected
        assert pts == sorted(pts, key=grlex_key)

    def test_unbounded_requires_cap(self):
        z = AbelianGroup(1)
        q = hom_from_columns([[1], [-1]], z)
        with pytest.raises(UnboundedFiberError):
            fiber_points(q, z.element([0]))
        pts = fiber_points(q, z.element([0]), cap=2)
        assert pts == [(0, 0), (1, 1), (2, 2)]

    def test_empty_variable_set(self):
        z = AbelianGroup(1)
        q = GroupHom(AbelianGroup(0), z, ((),))
        assert fiber_points(q, z.zero()) == [()]
        assert fiber_points(q, z.element([1])) == []

    def test_torsion_congruence(self):
        g = AbelianGroup(1, (2,))
        q = GroupHom(AbelianGroup(2), g, ((1, 1), (1, 0)))
        pts = fiber_points(q, g.element([2, 1]))
        assert pts == [(1, 1)]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_matches_bruteforce(self, seed):
        rng = random.Random(seed)
        nvars = rng.randint(1, 4)
        g = AbelianGroup(rng.randint(1, 2))
        cols = [[rng.randint(-2, 3) for _ in range(g.ngens)] for _ in range(nvars)]
        q = hom_from_columns(cols, g)
        d = g.element([rng.randint(-4, 8) for _ in range(g.ngens)])
        cap = 6
        pts = fiber_points(q, d, cap=cap)
        brute = [e for e in product(range(cap + 1), repeat=nvars)
                 if q(q.domain.element(list(e))) == d]
        assert pts == sorted(brute, key=grlex_key)


class TestIsPointed:
    def test_dp4(self):
        assert is_pointed(DP4_Q)

    def test_symmetric_kernel(self):
        z = AbelianGroup(1)
        q = hom_from_columns([[1], [-1]], z)
        assert not is_pointed(q)
        assert pointedness_witness(q) == (1, 1)

    def test_empty(self):
        z = AbelianGroup(1)
        q = GroupHom(AbelianGroup(0), z, ((),))
        assert is_pointed(q)

    def test_pure_torsion_not_pointed(self):
        g = AbelianGroup(0, (2,))
        q = GroupHom(AbelianGroup(1), g, ((1,),))
        assert pointedness_witness(q) == (2,)


class TestHilbertBasis:
    def test_dp4_eight_generators(self):
        fm = FiberMonoid(DP4_Q, tuple(Z6.element(c) for c in DP4_H_COLUMNS))
        basis = hilbert_basis(fm)
        expected = sorted([
            (1, 0, 0, 0, 0, 0, 0, 0, 0),              # eta1
            (0, 1, 0, 0, 0, 0, 0, 0, 0),              # eta2
            (0, 0, 0, 0, 0, 0, 1, 0, 0),              # eta7
            (0, 0, 1, 1, 0, 0, 0, 0, 0),              # eta3*eta4
            (0, 0, 0, 0, 1, 1, 0, 0, 0),              # eta5*eta6
            (0, 0, 0, 0, 0, 0, 0, 1, 1),              # eta8*eta9
            (0, 0, 1, 0, 2, 0, 0, 1, 0),              # eta3*eta5^2*eta8
            (0, 0, 0, 1, 0, 2, 0, 0, 1),              # eta4*eta6^2*eta9
        ], key=grlex_key)
        assert basis == expected

    def test_whole_group(self):
        fm = FiberMonoid(DP4_Q, tuple(Z6.generators()))
        basis = hilbert_basis(fm)
        units = [tuple(1 if i == j else 0 for i in range(9)) for j in range(9)]
        assert basis == sorted(units, key=grlex_key)

    def test_chatelet_seven_generators(self):
        pic, proj = chatelet_identity_data()
        # invariant rank-2 subgroup generated by [L0+ + L0-] and [L1+ + L1-]
        h0 = proj(Z10.element([1, 1, 0, 0, 0, 0, 0, 0, 0, 0]))
        h1 = proj(Z10.element([0, 0, 1, 1, 0, 0, 0, 0, 0, 0]))
        fm = FiberMonoid(proj, (h0, h1))
        basis = hilbert_basis(fm)
        expected = sorted([
            (2, 0, 1, 0, 1, 0, 1, 0, 1, 0),   # z+ = eta0+^2 * prod eta_j+
            (0, 2, 0, 1, 0, 1, 0, 1, 0, 1),   # z-
            (1, 1, 0, 0, 0, 0, 0, 0, 0, 0),   # z0
            (0, 0, 1, 1, 0, 0, 0, 0, 0, 0),   # z1
            (0, 0, 0, 0, 1, 1, 0, 0, 0, 0),   # z2
            (0, 0, 0, 0, 0, 0, 1, 1, 0, 0),   # z3
            (0, 0, 0, 0, 0, 0, 0, 0, 1, 1),   # z4
        ], key=grlex_key)
        assert basis == expected

    def test_p1xp1_antidiagonal_empty(self):
        z2 = AbelianGroup(2)
        q = hom_from_columns([[1, 0], [1, 0], [0, 1], [0, 1]], z2)
        fm = FiberMonoid(q, (z2.element([1, -1]),))
        assert hilbert_basis(fm) == []

    def test_non_pointed_raises(self):
        z = AbelianGroup(1)
        q = hom_from_columns([[1], [-1]], z)
        fm = FiberMonoid(q, ())
        with pytest.raises(NonPointedMonoidError):
            hilbert_basis(fm)


class TestMonoidDecompose:
    def setup_method(self):
        self.fm = FiberMonoid(DP4_Q, tuple(Z6.element(c) for c in DP4_H_COLUMNS))
        self.basis = hilbert_basis(self.fm)

    def test_product_of_two(self):
        b34 = (0, 0, 1, 1, 0, 0, 0, 0, 0)
        b56 = (0, 0, 0, 0, 1, 1, 0, 0, 0)
        e = tuple(a + b for a, b in zip(b34, b56))
        dec = monoid_decompose(self.fm, self.basis, e)
        assert dec is not None
        assert sorted([self.basis.index(b34), self.basis.index(b56)]) == dec

    def test_zero(self):
        assert monoid_decompose(self.fm, self.basis, (0,) * 9) == []

    def test_not_in_monoid(self):
        with pytest.raises(ValueError):
            monoid_decompose(self.fm, self.basis, (1, 0, 1, 0, 0, 0, 0, 0, 0))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_sums(self, seed):
        rng = random.Random(seed)
        parts = [rng.randrange(len(self.basis)) for _ in range(3)]
        e = tuple(sum(self.basis[i][k] for i in parts) for k in range(9))
        dec = monoid_decompose(self.fm, self.basis, e)
        assert dec is not None
        recomposed = tuple(sum(self.basis[i][k] for i in dec) for k in range(9))
        assert recomposed == e


def brute_force_minimal(q, h_gens, box):
    g = q.codomain
    _, proj = quotient(g, list(h_gens))
    members = []
    n = q.domain.ngens
    for e in product(range(box + 1), repeat=n):
        if any(e) and proj(q(q.domain.element(list(e)))).is_zero():
            members.append(e)
    minimal = []
    for e in members:
        if not any(all(x >= y for x, y in zip(e, f)) for f in members if f != e
                   and all(x >= y for x, y in zip(e, f))):
            minimal.append(e)
    minimal = [e for e in members
               if not any(f != e and all(x >= y for x, y in zip(e, f)) for f in members)]
    return sorted(minimal, key=grlex_key)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_hilbert_matches_bruteforce(seed):
    rng = random.Random(seed)
    nvars = rng.randint(1, 4)
    g = AbelianGroup(2)
    cols = [[rng.randint(-2, 3) for _ in range(2)] for _ in range(nvars)]
    q = hom_from_columns(cols, g)
    h_gens = []
    if rng.random() < 0.5:
        h_gens.append(g.element([rng.randint(-2, 2), rng.randint(-2, 2)]))
    fm = FiberMonoid(q, tuple(h_gens))
    try:
        basis = hilbert_basis(fm)
    except NonPointedMonoidError:
        assert pointedness_witness(q) is not None
        return
    box = 8
    expected = brute_force_minimal(q, h_gens, box)
    got_in_box = [e for e in basis if all(x <= box for x in e)]
    assert got_in_box == expected
    # completeness: every box element decomposes
    members = [e for e in product(range(5), repeat=nvars) if fm.contains(e)]
    for e in members:
        assert monoid_decompose(fm, basis, e) is not None
