"""Exact GF(2) computations for homological slice spectral sequences.

Modules: ``f2core`` (polynomial rings, presentations, linear algebra),
``steenrod`` (dual Steenrod algebra), ``hsss`` (the motivic spectral
sequences for heights 1 to 3), ``bockstein`` (the rho-Bockstein route),
``comodule`` (the comodules M_m and their duals), ``arithsq`` (the
arithmetic square), ``equivariant`` (the RO(C_2)-graded run for k_R) and
``cli``.
"""

__version__ = "0.1.0"
