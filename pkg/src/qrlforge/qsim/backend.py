"""Kernel backend selection: compiled extension when present, NumPy otherwise.

Set ``QRLFORGE_FORCE_PYTHON=1`` to force the NumPy fallback (used by the
kernel benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_python = os.environ.get("QRLFORGE_FORCE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = _kernels_py
        COMPILED = False

BACKEND_NAME = "cython" if COMPILED else "python"

run_circuit = _impl.run_circuit
apply_circuit_inplace = _impl.apply_circuit_inplace
expectations = _impl.expectations
parameter_shift = _impl.parameter_shift


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by name, for benchmarks and tests."""
    impls: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels

        impls["cython"] = _kernels
    except ImportError:
        pass
    return impls
