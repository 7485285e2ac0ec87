"""Exact engine for cohomology of twisted symmetric cotangent powers on
complete intersections in projective space, with explicit residue witnesses,
determinantal symmetric forms, and finite-field base-locus scanning.

All geometric computations run over the rationals; kernel dimensions of
rational matrices are the same over Q as over any extension field, so the
exact rational answers are the complex-analytic ones.
"""

__version__ = "0.1.0"

from . import cech, ci_engine, exactalg, fermat, lambdacalc, poly, rng  # noqa: F401
