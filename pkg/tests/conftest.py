from pathlib import Path

import pytest

from p4mc.toolchain import CompileOutput, compile_file

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

MTAG_EDGE = PROGRAMS / "mtag_edge.p4"
MTAG_EDGE_PARALLEL = PROGRAMS / "mtag_edge_parallel.p4"
MTAG_RULES = PROGRAMS / "mtag_edge_rules.json"
MTAG_PACKETS = PROGRAMS / "mtag_packets.txt"


def read_packets(path: Path) -> list[bytes]:
    packets = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            packets.append(bytes.fromhex(line))
    return packets


@pytest.fixture(scope="session")
def mtag_edge() -> CompileOutput:
    return compile_file(MTAG_EDGE)


@pytest.fixture(scope="session")
def mtag_parallel() -> CompileOutput:
    return compile_file(MTAG_EDGE_PARALLEL)


@pytest.fixture(scope="session")
def corpus() -> list[bytes]:
    return read_packets(MTAG_PACKETS)
