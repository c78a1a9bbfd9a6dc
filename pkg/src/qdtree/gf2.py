"""Backend selection for the bit-packed GF(2) kernels.

The compiled extension (_gf2_cy) is preferred when importable; otherwise the
NumPy fallback (_gf2_py) is used.  Set QDTREE_BACKEND=python or
QDTREE_BACKEND=compiled to force a choice; forcing the compiled backend when
it is not built raises at import time.
"""

import os

_requested = os.environ.get("QDTREE_BACKEND", "").strip().lower()

if _requested in ("", "compiled"):
    try:
        from . import _gf2_cy as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _gf2_py as _impl
        BACKEND = "python"
elif _requested == "python":
    from . import _gf2_py as _impl
    BACKEND = "python"
else:
    raise ValueError(f"unknown QDTREE_BACKEND={_requested!r}")

cnot = _impl.cnot
perm_gate = _impl.perm_gate
eliminate = _impl.eliminate
rank_bits = _impl.rank_bits


def get_backend(name):
    """Return the named backend module ('python' or 'compiled')."""
    if name == "python":
        from . import _gf2_py
        return _gf2_py
    if name == "compiled":
        from . import _gf2_cy
        return _gf2_cy
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        from . import _gf2_cy  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names
