"""Kernel backend selection.

The package ships a compiled extension (``fastkern``) for the Monte Carlo
inner loops and a pure numpy reference (``pykern``).  Both implement the same
API with bit-identical results; the compiled one is picked when available.

Set the environment variable ``TORUSCOVER_KERNEL`` to ``python`` or
``compiled`` to force a backend (``compiled`` raises if the extension did not
build).  ``get_backend`` returns a backend module by name, which the parity
tests and the benchmark use to run both side by side.
"""

from __future__ import annotations

import os

from . import pykern

_FORCED = os.environ.get("TORUSCOVER_KERNEL", "").strip().lower()

try:
    from . import fastkern as _fast
except ImportError:
    _fast = None

if _FORCED in ("python", "py"):
    _active = pykern
elif _FORCED in ("compiled", "fast", "c"):
    if _fast is None:
        raise ImportError(
            "TORUSCOVER_KERNEL=compiled but the fastkern extension is not "
            "built; reinstall the package or unset the variable"
        )
    _active = _fast
elif _FORCED not in ("", "auto"):
    raise ImportError(f"unknown TORUSCOVER_KERNEL value: {_FORCED!r}")
else:
    _active = _fast if _fast is not None else pykern

BACKEND_NAME = _active.BACKEND_NAME

mix64 = _active.mix64
raw_words = _active.raw_words
uniforms = _active.uniforms
uniform_matrix = _active.uniform_matrix
cover_miss_flags = _active.cover_miss_flags
first_hit_point = _active.first_hit_point
first_hit_ranges = _active.first_hit_ranges
count_in_cube = _active.count_in_cube
raster_union = _active.raster_union


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    if _fast is not None:
        names.append("compiled")
    return tuple(names)


def get_backend(name: str):
    """Return a backend module by name ('python' or 'compiled')."""
    if name == "python":
        return pykern
    if name == "compiled":
        if _fast is None:
            raise ValueError("compiled backend is not available")
        return _fast
    raise ValueError(f"unknown backend {name!r}")
