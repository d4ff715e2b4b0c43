"""Numerics for generalized hypergeometric coherent states.

Two one-parameter families of Fock-basis coherent states are covered:
the `bessel` family, normalized by 0F1 with weight density on (0, inf),
and the `jacobi` family, normalized by 2F1 with weight density on (0, 1).
The package builds the states, certifies their resolution of identity by
a radial moment test, checks the reproducing-kernel properties, performs
coherent-state quantization of elementary symbols with a discrepancy
ledger against published closed forms, and evaluates dynamical and
thermal observables.
"""

__version__ = "0.1.0"

from .states import Family, FamilyParams, FockVector  # noqa: F401

__all__ = ["Family", "FamilyParams", "FockVector", "__version__"]
