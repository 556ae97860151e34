"""Per-packet runtime state: header stores, metadata, payload, trace."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import kernels
from ..parser_compiler import ParseResult
from ..semantics import METADATA, FieldRef
from ..target_config import TargetConfig
from .trace import TraceEvent


@dataclass
class PacketState:
    config: TargetConfig
    stores: dict[str, bytearray]
    valid: dict[str, bool]
    meta: bytearray
    defined: set[str]
    payload: bytearray
    payload_bits: int
    trace: list[TraceEvent] = field(default_factory=list)

    @classmethod
    def from_parse(cls, config: TargetConfig, data: bytes, result: ParseResult) -> "PacketState":
        stores = {
            layout.name: bytearray((layout.width + 7) // 8)
            for layout in config.headers
        }
        valid = {layout.name: False for layout in config.headers}
        for name, offset, width in result.headers:
            kernels.copy_bits(stores[name], 0, data, offset, width)
            valid[name] = True
        start = result.consumed_bits
        payload_bits = len(data) * 8 - start
        payload = bytearray((payload_bits + 7) // 8)
        if payload_bits:
            kernels.copy_bits(payload, 0, data, start, payload_bits)
        meta = bytearray((config.metadata.width + 7) // 8)
        return cls(config, stores, valid, meta, set(), payload, payload_bits)

    def snapshot(self) -> "PacketState":
        """Copy of all field-visible state; shares config and trace list."""
        return PacketState(
            self.config,
            {name: bytearray(store) for name, store in self.stores.items()},
            dict(self.valid),
            bytearray(self.meta),
            set(self.defined),
            self.payload,
            self.payload_bits,
            self.trace,
        )

    def is_valid(self, header: str) -> bool:
        if header == METADATA:
            return True
        return self.valid[header]

    def _store(self, header: str) -> bytearray:
        if header == METADATA:
            return self.meta
        return self.stores[header]

    def read_field(self, ref: FieldRef) -> int:
        """Field value as seen by matching and predicates; invalid reads as 0."""
        if not self.is_valid(ref.header):
            return 0
        return kernels.extract_bits(self._store(ref.header), ref.offset, ref.width)

    def write_field(self, ref: FieldRef, value: int) -> None:
        kernels.deposit_bits(self._store(ref.header), ref.offset, ref.width, value)
        if ref.header == METADATA:
            self.defined.add(ref.field)

    def is_defined(self, ref: FieldRef) -> bool:
        if ref.header == METADATA:
            return ref.field in self.defined
        return self.valid[ref.header]

    def add_header(self, header: str) -> None:
        store = self.stores[header]
        for i in range(len(store)):
            store[i] = 0
        self.valid[header] = True

    def remove_header(self, header: str) -> None:
        self.valid[header] = False

    def metadata_field(self, name: str) -> FieldRef | None:
        return self.config.metadata.find(name)

    def deparse(self) -> bytes:
        """Concatenate valid headers in deparse order, then the payload."""
        total = sum(
            self.config.header(name).width
            for name in self.config.deparse_order
            if self.valid[name]
        )
        total += self.payload_bits
        out = bytearray((total + 7) // 8)
        cursor = 0
        for name in self.config.deparse_order:
            if not self.valid[name]:
                continue
            width = self.config.header(name).width
            kernels.copy_bits(out, cursor, self.stores[name], 0, width)
            cursor += width
        if self.payload_bits:
            kernels.copy_bits(out, cursor, self.payload, 0, self.payload_bits)
        return bytes(out)
