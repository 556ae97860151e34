"""Bit-kernel tests: oracles from int.from_bytes, backend equivalence."""

from __future__ import annotations

import os
import random
import subprocess
import sys

import pytest

from p4mc import kernels

try:
    from hypothesis import given, settings
    from hypothesis import strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False

BACKENDS = kernels.available_backends()


def oracle_extract(data: bytes, offset: int, width: int) -> int:
    """Whole-buffer big-int oracle, independent of the kernel's windowing."""
    total = len(data) * 8
    whole = int.from_bytes(data, "big")
    return (whole >> (total - offset - width)) & ((1 << width) - 1) if width else 0


def oracle_deposit(data: bytes, offset: int, width: int, value: int) -> bytes:
    total = len(data) * 8
    whole = int.from_bytes(data, "big")
    if width:
        shift = total - offset - width
        mask = ((1 << width) - 1) << shift
        whole = (whole & ~mask) | ((value << shift) & mask)
    return whole.to_bytes(len(data), "big")


def oracle_checksum(data: bytes) -> int:
    if len(data) & 1:
        data = data + b"\x00"
    total = sum((data[i] << 8) | data[i + 1] for i in range(0, len(data), 2))
    while total > 0xFFFF:
        total = (total & 0xFFFF) + (total >> 16)
    return total ^ 0xFFFF


@pytest.fixture(params=BACKENDS)
def backend(request):
    saved = kernels.active_name
    kernels.use_backend(request.param)
    yield kernels
    kernels.use_backend(saved)


def test_both_backends_available():
    assert "pure" in BACKENDS
    assert "cython" in BACKENDS


def test_extract_random_against_oracle(backend):
    rng = random.Random(101)
    for _ in range(500):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        total = len(data) * 8
        width = rng.randrange(0, min(total, 80) + 1)
        offset = rng.randrange(0, total - width + 1)
        got = backend.extract_bits(bytearray(data), offset, width)
        assert got == oracle_extract(data, offset, width)


def test_deposit_random_against_oracle(backend):
    rng = random.Random(202)
    for _ in range(500):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        total = len(data) * 8
        width = rng.randrange(0, min(total, 80) + 1)
        offset = rng.randrange(0, total - width + 1)
        value = rng.getrandbits(width + rng.randrange(4)) if width else 0
        buf = bytearray(data)
        backend.deposit_bits(buf, offset, width, value)
        assert bytes(buf) == oracle_deposit(data, offset, width, value)


def test_deposit_masks_high_bits(backend):
    buf = bytearray(2)
    backend.deposit_bits(buf, 4, 8, 0xFFF)
    assert bytes(buf) == bytes([0x0F, 0xF0])


def test_extract_zero_width(backend):
    assert backend.extract_bits(bytearray(b"\xff\xff"), 3, 0) == 0


def test_deposit_zero_width_is_noop(backend):
    buf = bytearray(b"\xab\xcd")
    backend.deposit_bits(buf, 5, 0, 0x7)
    assert bytes(buf) == b"\xab\xcd"


def test_extract_full_buffer(backend):
    data = bytes(range(1, 9))
    assert backend.extract_bits(bytearray(data), 0, 64) == int.from_bytes(data, "big")


def test_copy_bits_random_against_oracle(backend):
    rng = random.Random(303)
    for _ in range(300):
        src = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        dst = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        width = rng.randrange(0, min(len(src), len(dst)) * 8 + 1)
        so = rng.randrange(0, len(src) * 8 - width + 1)
        do = rng.randrange(0, len(dst) * 8 - width + 1)
        buf = bytearray(dst)
        backend.copy_bits(buf, do, bytearray(src), so, width)
        expect = oracle_deposit(dst, do, width, oracle_extract(src, so, width))
        assert bytes(buf) == expect


def test_copy_bits_wider_than_64(backend):
    src = bytes(range(32))
    buf = bytearray(32)
    backend.copy_bits(buf, 7, bytearray(src), 7, 200)
    expect = oracle_deposit(bytes(32), 7, 200, oracle_extract(src, 7, 200))
    assert bytes(buf) == expect


def test_checksum_known_vector(backend):
    # Classic IPv4 header example: checksum field (bytes 10..11) zeroed.
    header = bytes.fromhex("4500003c1c4640004006" + "0000" + "ac100a63ac100a0c")
    assert backend.checksum16(header) == 0xB1E6
    # Re-inserting the checksum makes the full header sum to zero.
    full = bytes.fromhex("4500003c1c4640004006b1e6ac100a63ac100a0c")
    assert backend.checksum16(full) == 0


def test_checksum_random_against_oracle(backend):
    rng = random.Random(404)
    for _ in range(300):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))
        assert backend.checksum16(data) == oracle_checksum(data)


def test_checksum_odd_length_pads_zero(backend):
    assert backend.checksum16(b"\x12") == oracle_checksum(b"\x12")
    assert backend.checksum16(b"") == 0xFFFF


def test_backends_agree_on_random_workload():
    rng = random.Random(505)
    cases = []
    for _ in range(400):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 24)))
        total = len(data) * 8
        width = rng.randrange(0, min(total, 72) + 1)
        offset = rng.randrange(0, total - width + 1)
        value = rng.getrandbits(width) if width else 0
        cases.append((data, offset, width, value))
    results = {}
    for name in BACKENDS:
        mod = __import__("p4mc._bitkern", fromlist=["x"]) if name == "cython" else None
        from p4mc.kernels import pure

        mod = mod or pure
        out = []
        for data, offset, width, value in cases:
            buf = bytearray(data)
            mod.deposit_bits(buf, offset, width, value)
            out.append(
                (
                    mod.extract_bits(bytearray(data), offset, width),
                    bytes(buf),
                    mod.checksum16(data),
                )
            )
        results[name] = out
    first, *rest = results.values()
    for other in rest:
        assert other == first


def test_use_backend_switches_live_bindings():
    saved = kernels.active_name
    try:
        kernels.use_backend("pure")
        from p4mc.kernels import pure

        assert kernels.extract_bits is pure.extract_bits
        assert kernels.active_name == "pure"
        if "cython" in BACKENDS:
            kernels.use_backend("cython")
            assert kernels.extract_bits is not pure.extract_bits
            assert kernels.active_name == "cython"
    finally:
        kernels.use_backend(saved)


def test_use_backend_unknown_name():
    with pytest.raises(ValueError, match="unknown backend"):
        kernels.use_backend("fortran")


def test_p4mc_pure_env_forces_pure_backend():
    env = dict(os.environ, P4MC_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from p4mc import kernels; print(kernels.active_name)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "pure"


if HAVE_HYPOTHESIS:

    @settings(max_examples=200, deadline=None)
    @given(
        data=st.binary(min_size=1, max_size=32),
        offset_seed=st.integers(min_value=0, max_value=10**9),
        width_seed=st.integers(min_value=0, max_value=10**9),
        value=st.integers(min_value=0),
    )
    def test_deposit_extract_roundtrip(data, offset_seed, width_seed, value):
        total = len(data) * 8
        width = width_seed % (total + 1)
        offset = offset_seed % (total - width + 1)
        for name in BACKENDS:
            saved = kernels.active_name
            kernels.use_backend(name)
            try:
                buf = bytearray(data)
                kernels.deposit_bits(buf, offset, width, value)
                got = kernels.extract_bits(buf, offset, width)
                assert got == value & ((1 << width) - 1) if width else got == 0
                # Bits outside the window are untouched.
                before = oracle_extract(data, 0, offset)
                assert kernels.extract_bits(buf, 0, offset) == before
                tail = total - offset - width
                assert kernels.extract_bits(buf, offset + width, tail) == (
                    oracle_extract(data, offset + width, tail)
                )
            finally:
                kernels.use_backend(saved)
