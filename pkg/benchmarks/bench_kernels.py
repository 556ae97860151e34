"""Compare the pure-Python and compiled bit-kernel backends.

Times the four kernels on randomized workloads, then an end-to-end
packet run through the edge-switch program, once per backend:

    python3 benchmarks/bench_kernels.py [--loops N] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import time
from pathlib import Path

from p4mc import compile_file, kernels, new_switch, parse_rules_json

ROOT = Path(__file__).resolve().parent.parent
PROGRAM = ROOT / "programs" / "mtag_edge.p4"
RULES = ROOT / "programs" / "mtag_edge_rules.json"
PACKETS = ROOT / "programs" / "mtag_packets.txt"


def _packets() -> list[bytes]:
    out = []
    for raw in PACKETS.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(bytes.fromhex(line))
    return out


def make_workloads(seed: int, loops: int):
    rng = random.Random(seed)
    buf = bytearray(rng.randbytes(256))
    total = len(buf) * 8
    ops = []
    for _ in range(loops):
        width = rng.randint(1, 64)
        ops.append((rng.randrange(0, total - width), width, rng.getrandbits(width)))
    blocks = [bytes(rng.randbytes(rng.randint(20, 64))) for _ in range(64)]
    return buf, ops, blocks


def bench_kernels(buf, ops, blocks) -> dict[str, float]:
    scratch = bytearray(len(buf))
    results = {}

    start = time.perf_counter()
    for offset, width, _ in ops:
        kernels.extract_bits(buf, offset, width)
    results["extract_bits"] = (time.perf_counter() - start) / len(ops)

    start = time.perf_counter()
    for offset, width, value in ops:
        kernels.deposit_bits(buf, offset, width, value)
    results["deposit_bits"] = (time.perf_counter() - start) / len(ops)

    start = time.perf_counter()
    for offset, width, _ in ops:
        kernels.copy_bits(scratch, offset, buf, offset, width)
    results["copy_bits"] = (time.perf_counter() - start) / len(ops)

    rounds = max(1, len(ops) // len(blocks))
    start = time.perf_counter()
    for _ in range(rounds):
        for block in blocks:
            kernels.checksum16(block)
    results["checksum16"] = (time.perf_counter() - start) / (rounds * len(blocks))
    return results


def bench_switch(loops: int) -> float:
    config = compile_file(PROGRAM).config
    sw = new_switch(config)
    for rule in parse_rules_json(RULES.read_text()):
        sw.insert_rule(rule)
    packets = _packets()
    rounds = max(1, loops // (len(packets) * 20))
    start = time.perf_counter()
    for _ in range(rounds):
        for pkt in packets:
            sw.process_packet(1, pkt)
    return (time.perf_counter() - start) / (rounds * len(packets))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--loops", type=int, default=200_000, help="ops per kernel")
    ap.add_argument("--seed", type=int, default=2014, help="workload seed")
    args = ap.parse_args(argv)

    buf, ops, blocks = make_workloads(args.seed, args.loops)
    names = kernels.available_backends()
    micro = {}
    macro = {}
    for name in names:
        kernels.use_backend(name)
        micro[name] = bench_kernels(bytearray(buf), ops, blocks)
        macro[name] = bench_switch(args.loops)

    width = max(len(k) for k in list(micro[names[0]]) + ["process_packet"])
    header = f"{'benchmark':<{width}}" + "".join(f"  {n:>12}" for n in names)
    if len(names) == 2:
        header += "  speedup"
    print(header)
    for kernel in micro[names[0]]:
        row = f"{kernel:<{width}}"
        for name in names:
            row += f"  {micro[name][kernel] * 1e9:>9.1f} ns"
        if len(names) == 2:
            a, b = (micro[n][kernel] for n in names)
            row += f"  {max(a, b) / min(a, b):>6.2f}x"
        print(row)
    row = f"{'process_packet':<{width}}"
    for name in names:
        row += f"  {macro[name] * 1e6:>9.2f} us"
    if len(names) == 2:
        a, b = (macro[n] for n in names)
        row += f"  {max(a, b) / min(a, b):>6.2f}x"
    print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
