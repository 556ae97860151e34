"""Pure-Python bit kernels.

The packet engine stores headers and payload as MSB-first (network order)
bit strings packed into byte buffers. These four functions are its entire
hot path; `p4mc._bitkern` is a compiled drop-in replacement with the same
signatures and semantics (see kernels/__init__.py for selection).
"""

from __future__ import annotations


def extract_bits(data, offset: int, width: int) -> int:
    """Read `width` bits starting `offset` bits into `data`, MSB first."""
    if width == 0:
        return 0
    end = offset + width
    first = offset >> 3
    last = (end + 7) >> 3
    chunk = int.from_bytes(bytes(data[first:last]), "big")
    shift = (last << 3) - end
    return (chunk >> shift) & ((1 << width) - 1)


def deposit_bits(buf, offset: int, width: int, value: int) -> None:
    """Write the low `width` bits of `value` at bit `offset` of `buf`."""
    if width == 0:
        return
    end = offset + width
    first = offset >> 3
    last = (end + 7) >> 3
    chunk = int.from_bytes(bytes(buf[first:last]), "big")
    shift = (last << 3) - end
    mask = ((1 << width) - 1) << shift
    chunk = (chunk & ~mask) | ((value << shift) & mask)
    buf[first:last] = chunk.to_bytes(last - first, "big")


def copy_bits(dst, dst_offset: int, src, src_offset: int, width: int) -> None:
    """Copy a bit range between buffers; ranges must not alias."""
    while width > 0:
        step = 64 if width > 64 else width
        deposit_bits(dst, dst_offset, step, extract_bits(src, src_offset, step))
        dst_offset += step
        src_offset += step
        width -= step


def checksum16(data) -> int:
    """16-bit ones'-complement checksum of `data` (odd byte padded with 0)."""
    total = 0
    n = len(data)
    for i in range(0, n - 1, 2):
        total += (data[i] << 8) | data[i + 1]
    if n & 1:
        total += data[n - 1] << 8
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF
