"""Lower parser declarations into a flat state table and drive it.

Every state contributes one row per switch case (mask all-ones over the
select field) plus exactly one trailing wildcard row (mask 0): the declared
default, the unconditional transition, or the implicit transition to STOP
for unhandled select values. Truncation (too few remaining bits for the
next header) is the only parse-time ERROR.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import (
    CyclicParserGraph,
    InternalInconsistency,
    MissingStartState,
    UndeclaredNextState,
)
from .frontend.ast import STOP
from .semantics import CheckedProgram, SSwitch, STransition

ERROR = "error"
START = "start"


@dataclass(frozen=True)
class StateTableEntry:
    current_state: str
    lookup_value: int
    lookup_mask: int  # all-ones over the select width; 0 for the wildcard row
    next_state: str  # a state name or STOP
    priority: int  # row order within the state; the wildcard row is last


@dataclass(frozen=True)
class StateExtraction:
    """What entering a state does: which header to pull, and (for switching
    states) where the select field sits inside that header."""

    state: str
    header: str | None  # None only for `start`
    header_width: int
    select_offset: int | None
    select_width: int | None


@dataclass(frozen=True)
class ParserProgram:
    entries: tuple[StateTableEntry, ...]
    plan: dict[str, StateExtraction]
    start: str


@dataclass(frozen=True)
class ParseResult:
    headers: tuple[tuple[str, int, int], ...]  # (name, bit offset, bit width)
    final: str  # STOP or ERROR
    consumed_bits: int
    error: str | None = None


def _targets(state_body: STransition | SSwitch) -> list[str]:
    if isinstance(state_body, STransition):
        return [state_body.next_state]
    out = [nxt for _value, nxt in state_body.cases]
    if state_body.default is not None:
        out.append(state_body.default)
    return out


def compile_parser(prog: CheckedProgram) -> ParserProgram:
    states = {s.name: s for s in prog.parser_states}
    if START not in states:
        raise MissingStartState("parser has no 'start' state")

    for state in prog.parser_states:
        for target in _targets(state.body):
            if target != STOP and target not in states:
                raise UndeclaredNextState(
                    f"state {state.name!r} transitions to undeclared state {target!r}"
                )

    # reject any cycle reachable from start (headers are singletons, so a
    # state may not be revisited along a parse path)
    on_path: set[str] = set()
    finished: set[str] = set()

    def visit(name: str) -> None:
        if name in finished:
            return
        if name in on_path:
            raise CyclicParserGraph(f"parser state {name!r} is reachable from itself")
        on_path.add(name)
        for target in _targets(states[name].body):
            if target != STOP:
                visit(target)
        on_path.discard(name)
        finished.add(name)

    visit(START)

    entries: list[StateTableEntry] = []
    plan: dict[str, StateExtraction] = {}
    for state in prog.parser_states:
        header = prog.header(state.header) if state.header else None
        if isinstance(state.body, STransition):
            plan[state.name] = StateExtraction(
                state.name,
                state.header,
                header.width if header else 0,
                None,
                None,
            )
            entries.append(StateTableEntry(state.name, 0, 0, state.body.next_state, 0))
        else:
            sel = state.body.field
            plan[state.name] = StateExtraction(
                state.name,
                state.header,
                header.width if header else 0,
                sel.offset,
                sel.width,
            )
            mask = (1 << sel.width) - 1
            priority = 0
            for value, nxt in state.body.cases:
                entries.append(StateTableEntry(state.name, value, mask, nxt, priority))
                priority += 1
            default = state.body.default if state.body.default is not None else STOP
            entries.append(StateTableEntry(state.name, 0, 0, default, priority))
    return ParserProgram(tuple(entries), plan, START)


def simulate_parse(pp: ParserProgram, data: bytes) -> ParseResult:
    """Run the state table over `data`; never raises on packet contents."""
    rows: dict[str, list[StateTableEntry]] = {}
    for entry in pp.entries:
        rows.setdefault(entry.current_state, []).append(entry)
    for state_rows in rows.values():
        state_rows.sort(key=lambda e: e.priority)

    total_bits = len(data) * 8
    headers: list[tuple[str, int, int]] = []
    offset = 0
    state = pp.start
    for _step in range(len(pp.plan) + 1):
        ext = pp.plan[state]
        header_start = offset
        if ext.header is not None:
            if offset + ext.header_width > total_bits:
                return ParseResult(
                    tuple(headers),
                    ERROR,
                    offset,
                    f"truncated: state {state!r} needs {ext.header_width} bits, "
                    f"{total_bits - offset} remain",
                )
            headers.append((ext.header, offset, ext.header_width))
            offset += ext.header_width
        value = 0
        if ext.select_width:
            value = kernels.extract_bits(data, header_start + ext.select_offset, ext.select_width)
        nxt = None
        for row in rows[state]:
            if (value & row.lookup_mask) == row.lookup_value:
                nxt = row.next_state
                break
        if nxt is None or nxt == STOP:
            return ParseResult(tuple(headers), STOP, offset)
        state = nxt
    raise InternalInconsistency("parser did not terminate; state table is cyclic")


def deparse_order(prog: CheckedProgram) -> list[str]:
    """Header emission order for rebuilding packets.

    Headers on the parse graph come first, in the order a packet traversing
    every state would extract them (topological order of the state graph
    reachable from start, declaration order breaking ties between
    incomparable states); headers no parser state extracts follow in
    declaration order. add_header relies on this: a header inserted by an
    action lands at the position the parse graph implies.
    """
    states = {s.name: s for s in prog.parser_states}
    order: list[str] = []
    if START in states:
        # longest-path layering of the acyclic state graph gives the
        # traversal order; ties broken by declaration order of the states
        reach: list[str] = []
        seen: set[str] = set()
        queue = [START]
        while queue:
            name = queue.pop()
            if name in seen or name not in states:
                continue
            seen.add(name)
            reach.append(name)
            queue.extend(t for t in _targets(states[name].body) if t != STOP)
        depth: dict[str, int] = {}

        def walk(name: str) -> int:
            if name in depth:
                return depth[name]
            depth[name] = 0  # placeholder; graph is acyclic post-compile
            best = 0
            for target in _targets(states[name].body):
                if target != STOP and target in states:
                    best = max(best, walk(target) + 1)
            depth[name] = best
            return best

        start_depth = walk(START) if START in states else 0
        decl_index = {s.name: i for i, s in enumerate(prog.parser_states)}
        layered = sorted(
            (name for name in reach if states[name].header is not None),
            key=lambda n: (start_depth - depth[n], decl_index[n]),
        )
        order.extend(states[n].header for n in layered)
    emitted = set(order)
    for header in prog.headers:
        if header.name not in emitted:
            order.append(header.name)
    return order
