"""Minimal-dissipation effective Hamiltonians for open quantum systems."""

try:
    from ._effham import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _effham import *  # noqa: F401,F403  (build-tree layout)
