"""Certified symmetry breaking for pseudo-Boolean formulas.

Submodules:
  constraints  -- PB constraint algebra (normalize/negate/substitute/polish/RUP)
  parsing      -- OPB, DIMACS CNF and proof format parsers/serializers
  orders       -- preorder definitions with auxiliary variables
  checker      -- the proof state machine
  breaker      -- proof-logging lex-leader symmetry breaker
  bench        -- crafted benchmark families and brute-force oracles
  cli          -- command line entry points
"""

__version__ = "0.1.0"
