# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bit kernels; drop-in replacement for p4mc.kernels.pure.

Semantics match the pure module exactly: MSB-first bit addressing, values
deposited modulo 2**width, 16-bit ones'-complement checksum with the odd
trailing byte padded on the right. Widths above 64 take a chunked slow
path so the two backends stay interchangeable for any field width.
"""

from libc.stdint cimport uint64_t


cdef uint64_t _extract_small(const unsigned char[:] data, Py_ssize_t offset,
                             unsigned int width):
    cdef uint64_t value = 0
    cdef Py_ssize_t bit = offset
    cdef unsigned int remaining = width
    cdef unsigned int avail, take
    cdef unsigned char b
    while remaining:
        b = data[bit >> 3]
        avail = 8 - (bit & 7)
        take = remaining if remaining < avail else avail
        value = (value << take) | <uint64_t>((b >> (avail - take)) & ((1 << take) - 1))
        bit += take
        remaining -= take
    return value


cdef void _deposit_small(unsigned char[:] buf, Py_ssize_t offset,
                         unsigned int width, uint64_t value):
    cdef Py_ssize_t bit = offset
    cdef unsigned int remaining = width
    cdef unsigned int avail, take, shift_b
    cdef unsigned char chunk, mask
    while remaining:
        avail = 8 - (bit & 7)
        take = remaining if remaining < avail else avail
        chunk = <unsigned char>((value >> (remaining - take)) & ((1 << take) - 1))
        shift_b = avail - take
        mask = <unsigned char>(((1 << take) - 1) << shift_b)
        buf[bit >> 3] = (buf[bit >> 3] & ~mask) | (chunk << shift_b)
        bit += take
        remaining -= take


def extract_bits(const unsigned char[:] data, Py_ssize_t offset, Py_ssize_t width):
    """Read `width` bits starting `offset` bits into `data`, MSB first."""
    if width == 0:
        return 0
    if width <= 64:
        return _extract_small(data, offset, <unsigned int>width)
    # wide fields: assemble 64-bit chunks into a Python int
    result = 0
    cdef Py_ssize_t step
    while width > 0:
        step = 64 if width > 64 else width
        result = (result << step) | _extract_small(data, offset, <unsigned int>step)
        offset += step
        width -= step
    return result


def deposit_bits(unsigned char[:] buf, Py_ssize_t offset, Py_ssize_t width, value):
    """Write the low `width` bits of `value` at bit `offset` of `buf`."""
    if width == 0:
        return
    cdef Py_ssize_t step, done
    if width <= 64:
        _deposit_small(buf, offset, <unsigned int>width,
                       <uint64_t>(value & 0xFFFFFFFFFFFFFFFF))
        return
    done = 0
    while done < width:
        step = width - done
        if step > 64:
            step = 64
        _deposit_small(buf, offset + done, <unsigned int>step,
                       <uint64_t>((value >> (width - done - step)) & 0xFFFFFFFFFFFFFFFF))
        done += step


def copy_bits(unsigned char[:] dst, Py_ssize_t dst_offset,
              const unsigned char[:] src, Py_ssize_t src_offset, Py_ssize_t width):
    """Copy a bit range between buffers; ranges must not alias."""
    cdef Py_ssize_t step
    while width > 0:
        step = 64 if width > 64 else width
        _deposit_small(dst, dst_offset, <unsigned int>step,
                       _extract_small(src, src_offset, <unsigned int>step))
        dst_offset += step
        src_offset += step
        width -= step


def checksum16(const unsigned char[:] data):
    """16-bit ones'-complement checksum of `data` (odd byte padded with 0)."""
    cdef uint64_t total = 0
    cdef Py_ssize_t i, n = data.shape[0]
    for i in range(0, n - 1, 2):
        total += (<uint64_t>data[i] << 8) | data[i + 1]
    if n & 1:
        total += <uint64_t>data[n - 1] << 8
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return <int>(~total & 0xFFFF)
