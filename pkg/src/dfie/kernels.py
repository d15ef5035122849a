"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``DFIE_PURE_PYTHON=1`` to force the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("DFIE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from dfie._kernels import hhat, jhat, legendre_column, scaled_bessel  # noqa: F401

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        pass

if BACKEND == "python":
    from dfie._kernels_py import hhat, jhat, legendre_column, scaled_bessel  # noqa: F401

__all__ = ["BACKEND", "hhat", "jhat", "legendre_column", "scaled_bessel"]
