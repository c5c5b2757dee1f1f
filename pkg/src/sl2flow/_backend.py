"""Kernel backend selection: compiled extension when available."""

from __future__ import annotations

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _core = None
    HAVE_COMPILED = False

from . import _kernel


def resolve(name: str = "auto"):
    """Return (backend_name, kernel_callable) for real-mode integration."""
    if name == "auto":
        name = "compiled" if HAVE_COMPILED else "python"
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but sl2flow._core is not built")
        return "compiled", _core.integrate_c
    if name == "python":
        return "python", None
    raise ValueError(f"unknown backend {name!r}")
