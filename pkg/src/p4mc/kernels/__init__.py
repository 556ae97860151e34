"""Bit-kernel backend selection.

Two interchangeable implementations exist: `p4mc.kernels.pure` (always
available) and the compiled `p4mc._bitkern` extension (built by setup.py
when Cython and a C compiler are present). The fastest available backend
is chosen at import time; set P4MC_PURE=1 to force the pure one, or call
use_backend() to switch at runtime (the engine resolves kernels through
this module on every call, so switching affects live Switch objects).
"""

from __future__ import annotations

import os

from . import pure

_BACKENDS = {"pure": pure}

try:
    from .. import _bitkern

    _BACKENDS["cython"] = _bitkern
except ImportError:
    pass

active_name = "pure"
extract_bits = pure.extract_bits
deposit_bits = pure.deposit_bits
copy_bits = pure.copy_bits
checksum16 = pure.checksum16


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> None:
    global active_name, extract_bits, deposit_bits, copy_bits, checksum16
    try:
        mod = _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        ) from None
    active_name = name
    extract_bits = mod.extract_bits
    deposit_bits = mod.deposit_bits
    copy_bits = mod.copy_bits
    checksum16 = mod.checksum16


use_backend(
    "cython" if "cython" in _BACKENDS and os.environ.get("P4MC_PURE") != "1" else "pure"
)
