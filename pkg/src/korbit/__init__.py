"""Exact Lie algebra workbench for fields on homogeneous spaces.

Modules: ``liealg`` (structure constants), ``geometry`` (invariant metric,
connection, curvature), ``orbits`` (coadjoint orbits, Casimirs), ``expr``
(symbolic expressions), ``lambdarep`` (canonical transitions and
lambda-representation operators), ``clifford``, ``fields`` and ``semt``.
"""

__version__ = "0.1.0"
