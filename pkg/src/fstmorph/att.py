"""AT&T text exchange format and the symbol-table sidecar.

One arc per line "src<TAB>dst<TAB>in<TAB>out", final states as a lone
state number, epsilon spelled "@0@", UTF-8, "\n" newlines.  Export
renumbers states in BFS order so identical machines serialize to
identical bytes, and import accepts exactly what export produces.
"""

from __future__ import annotations

from .errors import ParseError
from .fst import EPSILON_ID, Transducer, _trim
from .symbols import EPSILON_TEXT, SymbolTable


def export_att(t: Transducer, table: SymbolTable) -> str:
    def name(sid):
        return EPSILON_TEXT if sid == EPSILON_ID else table.resolve(sid)

    trimmed = _trim(table, t.num_states, t.start, t.finals, t.arcs)
    lines = []
    for src, i, o, dst in trimmed.arcs:
        lines.append(f"{src}\t{dst}\t{name(i)}\t{name(o)}")
    for f in sorted(trimmed.finals):
        lines.append(str(f))
    return "\n".join(lines) + ("\n" if lines else "")


def import_att(text: str, table: SymbolTable) -> Transducer:
    arcs = []
    finals = set()
    states = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            try:
                finals.add(int(parts[0]))
            except ValueError:
                raise ParseError(f"bad final-state line {line!r}", line=lineno)
            states.add(int(parts[0]))
        elif len(parts) == 4:
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"bad state number in {line!r}", line=lineno)
            i = EPSILON_ID if parts[2] == EPSILON_TEXT else table.intern(parts[2]).id
            o = EPSILON_ID if parts[3] == EPSILON_TEXT else table.intern(parts[3]).id
            arcs.append((src, i, o, dst))
            states.update((src, dst))
        else:
            raise ParseError(f"expected 1 or 4 tab-separated fields: {line!r}",
                             line=lineno)
    if not states:
        return Transducer(table, 1, 0, frozenset(), ())
    num = max(states) + 1
    return Transducer(table, num, 0, finals, arcs)


def export_symbols(table: SymbolTable) -> str:
    """Sidecar listing every symbol: id, text, multichar flag."""
    lines = []
    for sym in table.symbols():
        if sym.id == EPSILON_ID:
            continue
        flag = "m" if table.is_multichar(sym.id) else "-"
        lines.append(f"{sym.id}\t{sym.text}\t{flag}")
    return "\n".join(lines) + ("\n" if lines else "")


def import_symbols(text: str) -> SymbolTable:
    table = SymbolTable()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"bad symbol line {line!r}", line=lineno)
        sid, sym_text, flag = int(parts[0]), parts[1], parts[2]
        if flag == "m":
            sym = table.declare_multichar(sym_text)
        else:
            sym = table.intern(sym_text)
        if sym.id != sid:
            raise ParseError(
                f"symbol file ids are not dense at line {lineno}", line=lineno
            )
    return table
