"""Exact chain complexes over integral group rings of finite groups.

Modules: ``groupring`` (ring arithmetic, flattening), ``intmat`` (Smith form
and integer solving), ``complex`` (free chain complexes, homology,
cohomology with local coefficients), ``silence`` (the retraction criterion
with certificates), ``kzero`` (projective class representatives, Tate
data), ``realize`` (realization complexes), ``transform`` (duality,
products, cancellation, additivity) and ``cli``.
"""

__version__ = "0.1.0"
