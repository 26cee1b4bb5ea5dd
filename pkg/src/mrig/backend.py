"""Sampler backend selection: compiled extension when available, numpy fallback.

Set MRIG_BACKEND=python or MRIG_BACKEND=compiled to force one side
(the benchmark and the backend-agreement test use this).
"""

from __future__ import annotations

import os

from . import _batched

try:
    from . import _sampler_core

    HAVE_COMPILED = True
except ImportError:
    _sampler_core = None
    HAVE_COMPILED = False

_forced = os.environ.get("MRIG_BACKEND", "").lower()
if _forced == "compiled" and not HAVE_COMPILED:
    raise ImportError("MRIG_BACKEND=compiled but the extension is not built")

if _forced == "python" or not HAVE_COMPILED:
    BACKEND = "python"
    sample_kernel = _batched.sample_kernel
else:
    BACKEND = "compiled"
    sample_kernel = _sampler_core.sample_kernel


def get_kernel(name: str):
    """Return a specific backend's kernel, regardless of the default selection."""
    if name == "python":
        return _batched.sample_kernel
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ImportError("compiled backend is not built")
        return _sampler_core.sample_kernel
    raise ValueError(f"unknown backend {name!r}")
