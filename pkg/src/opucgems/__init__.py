"""Exact-algebra and numerical laboratory for higher-order sum rules of
orthogonal polynomials on the unit circle.

Submodules:

* ``laurent``  - exact sparse Laurent polynomial engine
* ``trig``     - nonnegative trigonometric weights H, Z_H and V
* ``opuc``     - Verblunsky sequences, GGT truncations, sum-rule numerics
* ``algmodel`` - the quotient-ring model, trace expansions and G'_2k
* ``lab``      - sequence families, condition diagnostics, experiments
* ``cli``      - command-line entry point
"""

__all__ = ["laurent", "trig", "opuc", "algmodel", "lab", "cli"]
__version__ = "0.1.0"
