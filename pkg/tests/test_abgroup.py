import random

import pytest
from hypothesis import given, settings, strategies as st

from coxcalc.abgroup import (
    AbelianGroup,
    GroupError,
    GroupHom,
    hermite_row_reduce,
    hom_kernel,
    integer_kernel,
    mat_mul,
    mat_inverse_unimodular,
    quotient,
    smith_normal_form,
    solve_integer,
    subgroup_membership,
)

Z6 = AbelianGroup(6)
Z9 = AbelianGroup(9)

# degree columns of the nine exceptional classes on the D4 quartic del Pezzo,
# written in the l0..l5 basis of the geometric Picard group
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


def dp4_degree_hom() -> GroupHom:
    rows = [[DP4_COLUMNS[j][i] for j in range(9)] for i in range(6)]
    return GroupHom(Z9, Z6, tuple(tuple(r) for r in rows))


def is_unimodular(m):
    u, s, v = smith_normal_form(m)
    return all(s[i][i] == 1 for i in range(len(m)))


class TestSmithNormalForm:
    def test_identity(self):
        u, s, v = smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert s == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert u == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert v == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_two_by_two(self):
        m = [[2, 4], [6, 8]]
        u, s, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, m), v) == s
        assert is_unimodular(u) and is_unimodular(v)
        # invariant factors from gcds of minors: gcd of entries = 2,
        # determinant = -8, so the factors are 2 and 8/2 = 4
        assert [s[0][0], s[1][1]] == [2, 4]

    def test_zero(self):
        u, s, v = smith_normal_form([[0]])
        assert s == [[0]]

    @given(st.lists(st.lists(st.integers(-9, 9), min_size=1, max_size=4),
                    min_size=1, max_size=4).filter(
                        lambda rows: len({len(r) for r in rows}) == 1))
    @settings(max_examples=200, deadline=None)
    def test_recomposition_random(self, rows):
        u, s, v = smith_normal_form(rows)
        assert mat_mul(mat_mul(u, rows), v) == s
        assert is_unimodular(u)
        assert is_unimodular(v)
        # divisibility chain
        diag = [s[i][i] for i in range(min(len(s), len(s[0])))]
        for a, b in zip(diag, diag[1:]):
            if a and b:
                assert b % a == 0
            if a == 0:
                assert b == 0

    def test_unimodular_inverse(self):
        m = [[1, 2], [1, 3]]
        inv = mat_inverse_unimodular(m)
        assert mat_mul(m, inv) == [[1, 0], [0, 1]]


class TestSolve:
    def test_simple(self):
        assert solve_integer([[2]], [4]) == [2]
        assert solve_integer([[2]], [3]) is None

    def test_kernel(self):
        ker = integer_kernel([[1, 1, 1]])
        assert len(ker) == 2
        for v in ker:
            assert sum(v) == 0

    def test_hermite_reduce(self):
        basis = hermite_row_reduce([[2, 0], [0, 3], [2, 3]])
        assert basis == [[2, 0], [0, 3]]


class TestKernel:
    def test_dp4_kernel(self):
        phi = dp4_degree_hom()
        k, inc = hom_kernel(phi)
        assert k.free_rank == 3 and k.torsion_orders == ()
        # composed map is zero
        for j in range(k.ngens):
            assert phi(inc.column(j)).is_zero()
        # the three stated kernel vectors lie in the kernel and span it
        e7 = Z9.element([-1, 0, -1, -1, -1, -1, 1, 0, 0])
        e8 = Z9.element([-2, -1, -1, -2, 0, -2, 0, 1, 0])
        e9 = Z9.element([-2, -1, -2, -1, -2, 0, 0, 0, 1])
        kgens = [inc.column(j) for j in range(3)]
        for e in (e7, e8, e9):
            assert phi(e).is_zero()
            assert subgroup_membership(kgens, e) is not None
        for g in kgens:
            assert subgroup_membership([e7, e8, e9], g) is not None

    def test_chatelet_kernel_rank(self):
        # ten classes, four relations: the identity-type degree map has a
        # rank-4 kernel
        z10 = AbelianGroup(10)
        # order: 0+,0-,1+,1-,2+,2-,3+,3-,4+,4-
        def pair(i):
            v = [0] * 10
            v[2 * i] = 1
            v[2 * i + 1] = 1
            return v
        rel = []
        for j in (2, 3, 4):
            r = [a - b for a, b in zip(pair(1), pair(j))]
            rel.append(r)
        r = [0] * 10
        for idx in (0, 2, 4):  # 0+,1+,2+
            r[idx] += 1
        for idx in (1, 7, 9):  # 0-,3-,4-
            r[idx] -= 1
        rel.append(r)
        pic, proj = quotient(z10, [z10.element(v) for v in rel])
        assert pic.free_rank == 6 and pic.torsion_orders == ()
        k, _ = hom_kernel(proj)
        assert k.free_rank == 4 and k.torsion_orders == ()

    def test_identity_kernel(self):
        k, _ = hom_kernel(GroupHom.identity(Z6))
        assert k.ngens == 0

    def test_torsion_kernels(self):
        z = AbelianGroup(1)
        z4 = AbelianGroup(0, (4,))
        f = GroupHom(z, z4, ((2,),))
        k, inc = hom_kernel(f)
        assert k.free_rank == 1 and k.torsion_orders == ()
        assert inc.column(0).coords in ((2,), (-2,))
        z2 = AbelianGroup(0, (2,))
        g = GroupHom(z4, z2, ((1,),))
        k2, inc2 = hom_kernel(g)
        assert k2.free_rank == 0 and k2.torsion_orders == (2,)
        assert inc2.column(0).coords == (2,)


class TestMembership:
    def test_dp4_anticanonical(self):
        h = [Z6.element(c) for c in DP4_H_COLUMNS]
        anti = Z6.element([3, -1, -1, -1, -1, -1])
        coeffs = subgroup_membership(h, anti)
        assert coeffs == [4, 2, 3, 2]

    def test_l5_not_in_h(self):
        h = [Z6.element(c) for c in DP4_H_COLUMNS]
        l5 = Z6.element([0, 0, 0, 0, 0, 1])
        assert subgroup_membership(h, l5) is None

    def test_zero(self):
        h = [Z6.element(c) for c in DP4_H_COLUMNS]
        assert subgroup_membership(h, Z6.zero()) == [0, 0, 0, 0]

    def test_mixed_parent_raises(self):
        h = [Z6.element(c) for c in DP4_H_COLUMNS]
        with pytest.raises(GroupError):
            subgroup_membership(h, Z9.zero())

    def test_torsion_membership(self):
        g = AbelianGroup(1, (4,))
        h = [g.element([1, 2])]
        assert subgroup_membership(h, g.element([3, 2])) == [3]
        assert subgroup_membership(h, g.element([0, 1])) is None


class TestQuotient:
    def test_cyclic(self):
        z = AbelianGroup(1)
        q, proj = quotient(z, [z.element([2])])
        assert q.free_rank == 0 and q.torsion_orders == (2,)
        assert proj(z.element([2])).is_zero()
        assert not proj(z.element([1])).is_zero()

    def test_rank_drop(self):
        z2 = AbelianGroup(2)
        q, proj = quotient(z2, [z2.element([1, -1])])
        assert q.free_rank == 1 and q.torsion_orders == ()
        assert proj(z2.element([1, -1])).is_zero()
        assert not proj(z2.element([1, 0])).is_zero()

    def test_dp4_quotient(self):
        h = [Z6.element(c) for c in DP4_H_COLUMNS]
        q, proj = quotient(Z6, h)
        assert q.free_rank == 2 and q.torsion_orders == ()
        for x in h:
            assert proj(x).is_zero()

    def test_not_saturated(self):
        z = AbelianGroup(1)
        q, proj = quotient(z, [z.element([4])])
        assert q.torsion_orders == (4,)
        assert not proj(z.element([2])).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_membership_matches_projection(seed):
    rng = random.Random(seed)
    g = AbelianGroup(rng.randint(1, 3), tuple(rng.choice([2, 3, 4]) for _ in range(rng.randint(0, 1))))
    gens = [g.element([rng.randint(-2, 2) for _ in range(g.ngens)]) for _ in range(rng.randint(1, 3))]
    probe = g.element([rng.randint(-3, 3) for _ in range(g.ngens)])
    q, proj = quotient(g, gens)
    coeffs = subgroup_membership(gens, probe)
    assert (coeffs is not None) == proj(probe).is_zero()
    if coeffs is not None:
        acc = g.zero()
        for c, h in zip(coeffs, gens):
            acc = acc + c * h
        assert acc == probe


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_kernel_matches_bruteforce(seed):
    rng = random.Random(seed)
    rows = rng.randint(1, 2)
    cols = rng.randint(1, 3)
    dom = AbelianGroup(cols)
    cod = AbelianGroup(rows)
    mat = tuple(tuple(rng.randint(-2, 2) for _ in range(cols)) for _ in range(rows))
    f = GroupHom(dom, cod, mat)
    k, inc = hom_kernel(f)
    kgens = [inc.column(j) for j in range(k.ngens)]
    # brute force within a small box
    from itertools import product
    for coords in product(range(-2, 3), repeat=cols):
        e = dom.element(coords)
        in_kernel = f(e).is_zero()
        witness = subgroup_membership(kgens, e) if kgens else ([] if e.is_zero() else None)
        assert (witness is not None) == in_kernel
