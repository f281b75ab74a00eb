"""coxcalc: exact computations with graded algebra presentations.

Submodules
----------
abgroup   finitely generated abelian groups and integer normal forms
lattice   degree-fiber enumeration and Hilbert bases of fiber monoids
numfield  exact arithmetic in towers of quadratic extensions of Q
polyalg   sparse graded polynomials and degree-local ideal linear algebra
veronese  pullback/Veronese presentations and generator minimization
galois    semilinear actions, descent to the fixed field, cocycle twisting
torsor    irrelevant ideals and torsor point parameterization checks
document  text document format shared by the fixtures and the CLI
cli       command-line entry point
"""

__version__ = "0.1.0"
