"""Numerics for information spreading on expanding Clifford trees.

Exact recursions for the accessible-subgroup distribution, joint and
eavesdropping variants, an annealed two-replica recursion, and a
Monte-Carlo stabilizer oracle that validates all of them.
"""

__version__ = "0.1.0"

from .algebra import DIMS, LABELS, Label

__all__ = ["DIMS", "LABELS", "Label", "__version__"]
