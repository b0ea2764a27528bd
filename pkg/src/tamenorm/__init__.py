"""tamenorm: exact-arithmetic certificates for the local combinatorics of
anticyclotomic norm relations.

Modules:
  exactnum   -- Q[s, z]/(s^2 - ell, Phi_k(z)) scalars and polynomials
  qcomb      -- Gaussian binomials, rank/chain counts, lambda/b coefficients
  lattice    -- the lattice poset, inclusion-exclusion and measure identities
  hecke      -- U_m cosets, phi assembly, orbit/stabilizer and parahoric data
  lfactor    -- Frobenius polynomials, central L-values, group-algebra form
  mackey     -- cohomology-functor axioms, Hecke maps, ordinary projector
  classfield -- ring class groups via binary quadratic forms
  cli        -- certificate-emitting command line (entry point: tamenorm)
"""

__version__ = "0.1.0"

from .exactnum import ExactScalar, NotInvertibleError, Poly, Rational
from .qcomb import QCombContext

__all__ = [
    "ExactScalar",
    "NotInvertibleError",
    "Poly",
    "QCombContext",
    "Rational",
    "__version__",
]
