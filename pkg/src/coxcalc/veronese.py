"""Pullback of graded presentations along grading-group morphisms.

The Veronese subalgebra of a presentation relative to a subgroup H of the
grading group is generated by the Hilbert-basis monomials of the fiber
monoid; its relations are found degree-locally up to a total-degree bound.
General pullbacks factor through the image and add kernel variables mapping
to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .abgroup import AbelianGroup, GroupElement, GroupHom, hom_kernel, subgroup_membership
from .lattice import (
    DEFAULT_COMPLETION_CAP,
    FiberMonoid,
    fiber_points,
    grlex_key,
    hilbert_basis,
)
from .numfield import TowerElement
from .polyalg import (
    GradedPresentation,
    Polynomial,
    discover_relations,
    homogeneous_degree,
    residues_in_degree,
    rref,
    _fz,
)

DEFAULT_DEGREE_BOUND = 6


@dataclass(frozen=True)
class PullbackResult:
    """A presentation of a pullback algebra together with the embedding data.

    generator_images[i] is the image of the i-th new variable inside the
    ambient presentation; degree_map sends new degrees to ambient degrees.
    """

    presentation: GradedPresentation
    ambient: GradedPresentation
    generator_images: tuple[Polynomial, ...]
    degree_map: GroupHom
    degree_bound_used: int

    def __post_init__(self):
        if len(self.generator_images) != self.presentation.nvars:
            raise ValueError("need one image per generator")

    def gens_for_discovery(self) -> list[tuple[str, Polynomial, GroupElement]]:
        return [(self.presentation.names[i], self.generator_images[i],
                 self.presentation.degrees[i])
                for i in range(self.presentation.nvars)]

    @staticmethod
    def identity(pres: GradedPresentation) -> "PullbackResult":
        images = tuple(Polynomial.variable(pres.nvars, i, pres.tower)
                       for i in range(pres.nvars))
        return PullbackResult(pres, pres, images,
                              GroupHom.identity(pres.group), DEFAULT_DEGREE_BOUND)


def default_generator_name(ambient_names: Sequence[str], exp: Sequence[int]) -> str:
    parts = []
    for name, n in zip(ambient_names, exp):
        if n == 1:
            parts.append(name)
        elif n > 1:
            parts.append(f"{name}p{n}")
    return "_".join(parts) if parts else "one"


def veronese_subalgebra(pres: GradedPresentation,
                        subgroup: Sequence[GroupElement],
                        degree_bound: int = DEFAULT_DEGREE_BOUND,
                        cap: int = DEFAULT_COMPLETION_CAP,
                        names: Optional[Sequence[str]] = None) -> PullbackResult:
    """Presentation of the subalgebra of elements with degree in the given
    subgroup.

    Generators are the Hilbert-basis monomials of the fiber monoid; their
    degrees are recorded in coordinates relative to the subgroup generators.
    """
    subgroup = list(subgroup)
    for h in subgroup:
        if h.parent != pres.group:
            raise ValueError("subgroup generators lie in the wrong group")
    new_group = AbelianGroup(len(subgroup))
    degree_map = GroupHom.from_columns(new_group, pres.group,
                                       subgroup) if subgroup else \
        GroupHom(new_group, pres.group, tuple(() for _ in range(pres.group.ngens)))

    fm = FiberMonoid(pres.degree_hom(), tuple(subgroup))
    basis = hilbert_basis(fm, cap)

    gen_names = list(names) if names is not None else \
        [default_generator_name(pres.names, e) for e in basis]
    if len(gen_names) != len(basis):
        raise ValueError("need one name per Veronese generator")

    one = pres.tower.one()
    gens = []
    for name, e in zip(gen_names, basis):
        img = Polynomial.monomial(pres.nvars, e, one)
        amb_deg = pres.monomial_degree(e)
        coeffs = subgroup_membership(subgroup, amb_deg)
        if coeffs is None:
            raise RuntimeError("Hilbert basis degree escaped the subgroup")
        gens.append((name, img, new_group.element(coeffs)))

    relations = discover_relations(pres, gens, degree_map, degree_bound, cap=None)
    new_pres = GradedPresentation(
        names=tuple(gen_names),
        degrees=tuple(g[2] for g in gens),
        tower=pres.tower,
        field_level=pres.field_level,
        relations=tuple(relations),
        grading_group=new_group,
    )
    return PullbackResult(new_pres, pres, tuple(g[1] for g in gens),
                          degree_map, degree_bound)


def pullback_general(pres: GradedPresentation, phi: GroupHom,
                     degree_bound: int = DEFAULT_DEGREE_BOUND,
                     cap: int = DEFAULT_COMPLETION_CAP,
                     names: Optional[Sequence[str]] = None) -> PullbackResult:
    """Pullback of the grading along an arbitrary homomorphism phi: M' -> M.

    Factors through the image: Veronese generators lift to chosen
    phi-preimages of their degrees, and each monoid generator of ker(phi)
    contributes a variable whose image is the constant 1.
    """
    if phi.codomain != pres.group:
        raise ValueError("morphism must land in the grading group")
    new_group = phi.domain
    image_gens = [phi.column(j) for j in range(new_group.ngens)]

    fm = FiberMonoid(pres.degree_hom(), tuple(image_gens))
    basis = hilbert_basis(fm, cap)

    one = pres.tower.one()
    gens = []
    auto_names = []
    for e in basis:
        img = Polynomial.monomial(pres.nvars, e, one)
        amb_deg = pres.monomial_degree(e)
        coeffs = subgroup_membership(image_gens, amb_deg)
        if coeffs is None:
            raise RuntimeError("Hilbert basis degree escaped the image")
        gens.append((None, img, new_group.element(coeffs)))
        auto_names.append(default_generator_name(pres.names, e))

    kernel, inclusion = hom_kernel(phi)
    kmonoid_gens: list[GroupElement] = []
    for j in range(kernel.ngens):
        col = inclusion.column(j)
        kmonoid_gens.append(col)
        if j < kernel.free_rank:
            kmonoid_gens.append(-col)
    const = Polynomial.monomial(pres.nvars, (0,) * pres.nvars, one)
    for idx, kdeg in enumerate(kmonoid_gens):
        gens.append((None, const, kdeg))
        auto_names.append(f"u{idx + 1}")

    gen_names = list(names) if names is not None else auto_names
    if len(gen_names) != len(gens):
        raise ValueError("need one name per generator")
    gens = [(gen_names[i], gens[i][1], gens[i][2]) for i in range(len(gens))]

    relations = discover_relations(pres, gens, phi, degree_bound, cap=None)
    new_pres = GradedPresentation(
        names=tuple(gen_names),
        degrees=tuple(g[2] for g in gens),
        tower=pres.tower,
        field_level=pres.field_level,
        relations=tuple(relations),
        grading_group=new_group,
    )
    return PullbackResult(new_pres, pres, tuple(g[1] for g in gens),
                          phi, degree_bound)


# ---------------------------------------------------------------------------
# generator minimization
# ---------------------------------------------------------------------------


def restrict_scalars(vec: Sequence[TowerElement], from_level: int,
                     to_level: int) -> list[TowerElement]:
    """Split tower coordinates into 2^(from-to) coordinates over the subfield."""
    out = list(vec)
    for lvl in range(from_level, to_level, -1):
        nxt = []
        for x in out:
            x = x.lift(lvl) if x.level < lvl else x
            a, b = x.components()
            nxt.extend([a, b])
        out = nxt
    return out


def _image_in_subalgebra(pr: PullbackResult, candidate: int,
                         removable_mask: list[bool]) -> bool:
    """Does the candidate's image lie in the subalgebra generated by the
    other (kept) generators, degreewise up to the recorded bound?"""
    pres = pr.presentation
    amb = pr.ambient
    bound = pr.degree_bound_used
    target_deg = pres.degrees[candidate]
    kept = [i for i in range(pres.nvars) if i != candidate and not removable_mask[i]]
    if not kept:
        return False
    # monomials in the kept generators matching the candidate's new degree
    sub_group = AbelianGroup(len(kept))
    cols = [pres.degrees[i] for i in kept]
    sub_hom = GroupHom.from_columns(sub_group, pres.group, cols)
    monos = [m for m in fiber_points(sub_hom, target_deg, cap=bound)
             if sum(m) <= bound]
    if not monos:
        return False
    # ambient images of those monomials and of the candidate
    items = []
    polys = []
    for m in monos:
        p = None
        for slot, n in zip(kept, m):
            if n:
                q = pr.generator_images[slot].pow(n)
                p = q if p is None else p * q
        if p is None:
            p = Polynomial.monomial(amb.nvars, (0,) * amb.nvars, amb.tower.one())
        polys.append(p)
    cand_poly = pr.generator_images[candidate]
    amb_deg = pr.degree_map(target_deg)
    all_terms = [t for p in polys + [cand_poly] for t in p.terms]
    residue_dicts = residues_in_degree(amb, amb_deg, all_terms)
    # reassemble residues per polynomial
    res_per_poly = []
    pos = 0
    for p in polys + [cand_poly]:
        acc: dict = {}
        for _ in p.terms:
            for ex, c in residue_dicts[pos].items():
                acc[ex] = acc.get(ex, 0 * c) + c
            pos += 1
        res_per_poly.append({ex: c for ex, c in acc.items() if not _fz(c)})
    support = sorted({ex for d in res_per_poly for ex in d}, key=grlex_key)
    sidx = {ex: i for i, ex in enumerate(support)}
    tower = amb.tower
    fl_amb, fl_new = amb.field_level, pres.field_level
    rows = []
    for d in res_per_poly:
        vec = [tower.zero() for _ in support]
        for ex, c in d.items():
            vec[sidx[ex]] = tower.coerce(c)
        if fl_new < fl_amb:
            vec = restrict_scalars(vec, fl_amb, fl_new)
        rows.append(vec)
    target = rows[-1]
    gen_rows = rows[:-1]
    if all(_fz(x) for x in target):
        return True
    reduced, pivots = rref(gen_rows)
    res = list(target)
    for row, p_ in zip(reduced, pivots):
        if not _fz(res[p_]):
            c = res[p_]
            res = [a - c * b for a, b in zip(res, row)]
    return all(_fz(x) for x in res)


def minimize_generators(pr: PullbackResult,
                        protected: Sequence[int] = ()) -> PullbackResult:
    """Drop generators whose images lie in the subalgebra of the others.

    Removal order: largest ambient total degree first, ties broken by
    graded-lex on the image leading exponent.  Relations are re-discovered
    once the generator set stabilizes.  Indices in `protected` are never
    removed.
    """
    pres = pr.presentation
    n = pres.nvars
    removable = [False] * n

    def order_key(i):
        img = pr.generator_images[i]
        if img.is_zero():
            return (0, ())
        e, _ = img.leading()
        return (sum(e), e)

    changed = True
    while changed:
        changed = False
        candidates = [i for i in range(n) if not removable[i] and i not in protected]
        candidates.sort(key=order_key, reverse=True)
        for i in candidates:
            removable[i] = True
            if _image_in_subalgebra(pr, i, removable):
                changed = True
                break
            removable[i] = False
    kept = [i for i in range(n) if not removable[i]]
    if len(kept) == n:
        return pr
    gens = [(pres.names[i], pr.generator_images[i], pres.degrees[i]) for i in kept]
    relations = discover_relations(pr.ambient, gens, pr.degree_map,
                                   pr.degree_bound_used, cap=None)
    new_pres = GradedPresentation(
        names=tuple(pres.names[i] for i in kept),
        degrees=tuple(pres.degrees[i] for i in kept),
        tower=pres.tower,
        field_level=pres.field_level,
        relations=tuple(relations),
        grading_group=pres.group,
    )
    return PullbackResult(new_pres, pr.ambient,
                          tuple(pr.generator_images[i] for i in kept),
                          pr.degree_map, pr.degree_bound_used)
