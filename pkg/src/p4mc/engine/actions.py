"""Two-phase action execution against a PacketState."""

from __future__ import annotations

from .. import kernels
from ..semantics import Const, FieldRef, HeaderRef, Operand, Param, RCall
from ..target_config import ConfigAction
from . import trace
from .packet import PacketState

INGRESS_ERROR = "ingress_error"

_ADD = "add"
_REMOVE = "remove"
_SET = "set"


def _operand_value(state: PacketState, operand: Operand, params: tuple[int, ...]) -> int:
    if isinstance(operand, Const):
        return operand.value
    if isinstance(operand, Param):
        return params[operand.index]
    assert isinstance(operand, FieldRef)
    return state.read_field(operand)


def _invalid_source(state: PacketState, operands: list[Operand]) -> str | None:
    """Header name of the first invalid header a read operand touches."""
    for operand in operands:
        if isinstance(operand, FieldRef) and not state.is_valid(operand.header):
            return operand.header
    return None


def _flag_error(state: PacketState, call: RCall, header: str) -> None:
    state.trace.append(trace.action_error_event(call.name, header))
    error = state.metadata_field(INGRESS_ERROR)
    assert error is not None
    state.write_field(error, 1)


def execute_action(
    state: PacketState, action: ConfigAction, params: tuple[int, ...]
) -> None:
    """Run an action body: read every operand first, then commit writes in order.

    A primitive that reads a field of an invalid header at entry, or writes
    one at commit time, is skipped; the packet keeps moving with
    metadata.ingress_error set and an ACTION_ERROR trace event recorded.
    """
    plan: list[tuple[str, RCall, FieldRef | str, int]] = []
    for call in action.body:
        if call.name == "add_header":
            target = call.args[0]
            assert isinstance(target, HeaderRef)
            plan.append((_ADD, call, target.name, 0))
            continue
        if call.name == "remove_header":
            target = call.args[0]
            assert isinstance(target, HeaderRef)
            plan.append((_REMOVE, call, target.name, 0))
            continue
        dest = call.args[0]
        assert isinstance(dest, FieldRef)
        reads = list(call.args[1:])
        if call.name == "set_field" and len(call.args) == 3:
            reads.append(dest)
        if call.name == "increment":
            reads.append(dest)
        bad = _invalid_source(state, reads)
        if bad is not None:
            _flag_error(state, call, bad)
            continue
        value = _compute(state, call, dest, params)
        plan.append((_SET, call, dest, value))
    for kind, call, target, value in plan:
        if kind == _ADD:
            assert isinstance(target, str)
            old = state.is_valid(target)
            state.add_header(target)
            state.trace.append(
                trace.primitive_event(call.name, target, old, True)
            )
        elif kind == _REMOVE:
            assert isinstance(target, str)
            old = state.is_valid(target)
            state.remove_header(target)
            state.trace.append(
                trace.primitive_event(call.name, target, old, False)
            )
        else:
            assert isinstance(target, FieldRef)
            if not state.is_valid(target.header):
                _flag_error(state, call, target.header)
                continue
            old = state.read_field(target)
            state.write_field(target, value)
            state.trace.append(
                trace.primitive_event(
                    call.name, str(target), old, state.read_field(target)
                )
            )


def _compute(
    state: PacketState, call: RCall, dest: FieldRef, params: tuple[int, ...]
) -> int:
    """Value a field-writing primitive will deposit, truncated to the field."""
    limit = (1 << dest.width) - 1
    if call.name == "set_field":
        value = _operand_value(state, call.args[1], params)
        if len(call.args) == 3:
            mask = _operand_value(state, call.args[2], params)
            old = state.read_field(dest)
            value = (old & ~mask) | (value & mask)
        return value & limit
    if call.name == "copy_field":
        return _operand_value(state, call.args[1], params) & limit
    if call.name == "increment":
        old = state.read_field(dest)
        delta = _operand_value(state, call.args[1], params)
        return (old + delta) & limit
    assert call.name == "checksum"
    return _checksum_value(state, call.args[1:], params) & limit


def _checksum_value(
    state: PacketState, sources: tuple[Operand, ...], params: tuple[int, ...]
) -> int:
    """Ones-complement 16-bit sum over the bit-concatenated source fields."""
    total_bits = 0
    for operand in sources:
        assert isinstance(operand, FieldRef)
        total_bits += operand.width
    buf = bytearray((total_bits + 7) // 8)
    cursor = 0
    for operand in sources:
        assert isinstance(operand, FieldRef)
        kernels.deposit_bits(buf, cursor, operand.width, state.read_field(operand))
        cursor += operand.width
    return kernels.checksum16(bytes(buf))
