"""Stratification tables for moduli of abelian varieties with Iwahori level.

Subpackages:
  weyl      extended affine Weyl group of GSp_2g, admissible elements
  eo        final sequences / final elements and EO stratum numerics
  ffalg     exact GF(p^k) linear algebra, semilinear maps, symplectic forms
  dieudonne mod-p Dieudonne modules, canonical filtration, normal forms
  flags     enumeration and KR typing of F/V-stable symplectic flags
  fixtures  the parametrized flag families shipped as evaluable fixtures
  strata    ES tables, point counts, dimension and component reports
  cli       command line front end
"""

__version__ = "0.1.0"
