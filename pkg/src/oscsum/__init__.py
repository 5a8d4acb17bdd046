"""Numerical toolkit for oscillatory sums of Hecke eigenvalues.

Modules:
    arith: sieves, divisors, Ramanujan sums.
    forms: eigenvalues of level-one cusp forms and their cache.
    quad: windows, special functions and oscillatory quadrature.
    deltamethod: the delta-symbol expansion and Poisson summation.
    voronoi: Voronoi summation and the resonance sum.
    phase: stationary-phase estimates and the concrete integrals.
    twist: twisted sums, harnesses, L(1) and the gamma factor.
    exppair: exact exponent-pair search.
    cli: the ``oscsum`` command.
"""

__version__ = "0.1.0"
