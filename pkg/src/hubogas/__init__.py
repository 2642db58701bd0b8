"""Binary-encoded HUBO formulations for Grover adaptive search.

Submodules: :mod:`boolpoly` (pseudo-Boolean polynomials), :mod:`encoding`
(index codes), :mod:`problems` (graph coloring and TSP builders),
:mod:`circuit` (``A_y`` synthesis and resource counts), :mod:`simulator`,
:mod:`gas`, :mod:`analysis` and :mod:`experiments`.
"""

__version__ = "0.1.0"

from ._jit import backend_name  # noqa: E402

__all__ = ["__version__", "backend_name"]
