"""Shrinkage estimation for spherically symmetric location families.

The package provides the harmonic-prior generalized Bayes estimator for
the mean of a spherically symmetric distribution, audits of sufficient
minimaxity conditions, admissibility diagnostics for regularly varying
priors (exponential-average sequences, Blyth-style decay, Brown-type
integral tests), and a paired Monte Carlo risk simulator, together with
the quadrature kernel and integral identities backing all of it.
"""

from sphereshrink import (
    minimax_audit,
    numerics,
    radial_convolution,
    radial_models,
    risk_sim,
    rv_priors,
    shrinkage,
    special_integrals,
)

__all__ = [
    "numerics",
    "radial_models",
    "rv_priors",
    "radial_convolution",
    "shrinkage",
    "minimax_audit",
    "risk_sim",
    "special_integrals",
]

__version__ = "0.1.0"
