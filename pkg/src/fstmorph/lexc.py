"""Continuation-lexicon (lexc-subset) parsing and compilation.

Grammar:

    source      ::= { multichars | lexicon }
    multichars  ::= "Multichar_Symbols" symbol*        (until next keyword)
    lexicon     ::= "LEXICON" name entry*
    entry       ::= [ analysis [ ":" surface ] ] contlex [ '"' gloss '"' ] ";"

'!' starts a comment to end of line, '%' escapes the next code point,
"#" is the end-of-word continuation, a lone "0" field is epsilon.
Several files compiled together share one namespace: concatenate their
sources in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fst
from .errors import ParseError
from .symbols import SymbolTable

END = "#"

_KEYWORDS = ("Multichar_Symbols", "LEXICON")


@dataclass
class LexEntry:
    analysis: list  # symbol ids (lemma chars + tags)
    surface: list  # symbol ids (stem chars + triggers + archiphonemes)
    contlex: str
    gloss: str = None
    line: int = 0
    analysis_text: str = ""
    surface_text: str = None  # None when no ':' was given


@dataclass
class LexiconAst:
    multichar_decls: list  # symbol texts, declaration order
    lexicons: dict  # name -> list of LexEntry, insertion order
    table: SymbolTable

    @property
    def root(self):
        return self.lexicons["Root"]


@dataclass
class GlossTable:
    rows: dict  # (lemma text, POS tag) -> list of gloss strings

    def lookup(self, lemma, pos):
        return self.rows.get((lemma, pos), [])


def _strip_comment(line):
    out = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "%" and i + 1 < len(line):
            out.append(line[i : i + 2])
            i += 2
            continue
        if ch == "!":
            break
        out.append(ch)
        i += 1
    return "".join(out)


def _split_fields(line, lineno, filename):
    """Whitespace-split honoring '%' escapes and one quoted gloss."""
    fields = []
    gloss = None
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and line[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated gloss quote", filename, lineno)
            if gloss is not None:
                raise ParseError("more than one gloss on entry", filename, lineno)
            gloss = line[i + 1 : j]
            i = j + 1
            continue
        j = i
        buf = []
        while j < n:
            c = line[j]
            if c == "%" and j + 1 < n:
                buf.append(line[j : j + 2])
                j += 2
                continue
            if c.isspace() or c == '"':
                break
            buf.append(c)
            j += 1
        fields.append("".join(buf))
        i = j
    return fields, gloss


def _split_entry_pair(text, lineno, filename):
    """Split analysis:surface at the first unescaped ':'."""
    i = 0
    while i < len(text):
        if text[i] == "%" and i + 1 < len(text):
            i += 2
            continue
        if text[i] == ":":
            return text[:i], text[i + 1 :]
        i += 1
    return text, None


def parse_lexc(source: str, table: SymbolTable = None,
               filename: str = None) -> LexiconAst:
    if table is None:
        table = SymbolTable()
    multichar_decls = []
    lexicons = {}
    current = None  # (name, entries)
    mode = None  # None | "multichar" | "lexicon"
    pending = []  # raw entry fields awaiting ';' (entries may span lines)
    pending_gloss = None
    pending_line = 0

    def flush_entry():
        nonlocal pending, pending_gloss
        fields = pending
        gloss = pending_gloss
        pending = []
        pending_gloss = None
        if not fields:
            raise ParseError("empty entry", filename, pending_line)
        if current is None:
            raise ParseError("entry outside any LEXICON", filename, pending_line)
        contlex = fields[-1]
        if len(fields) > 2:
            raise ParseError(
                f"too many fields in entry: {' '.join(fields)!r}",
                filename, pending_line)
        if len(fields) == 2:
            ana_txt, sur_txt = _split_entry_pair(fields[0], pending_line,
                                                 filename)
        else:
            ana_txt, sur_txt = "", None
        analysis = table.tokenize(ana_txt) if ana_txt else []
        surface = table.tokenize(sur_txt) if sur_txt is not None else analysis
        current[1].append(
            LexEntry(
                [s.id for s in analysis],
                [s.id for s in surface],
                contlex,
                gloss,
                pending_line,
                ana_txt,
                sur_txt,
            )
        )

    for lineno, raw in enumerate(source.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        fields, gloss = _split_fields(line, lineno, filename)
        if fields and fields[0] == "Multichar_Symbols":
            mode = "multichar"
            fields = fields[1:]
        if fields and fields[0] == "LEXICON":
            if len(fields) < 2:
                raise ParseError("LEXICON without a name", filename, lineno)
            name = fields[1]
            if name in lexicons:
                raise ParseError(f"duplicate LEXICON {name!r}", filename, lineno)
            lexicons[name] = []
            current = (name, lexicons[name])
            mode = "lexicon"
            fields = fields[2:]
        if mode == "multichar":
            for f in fields:
                table.declare_multichar(f)
                multichar_decls.append(f)
            continue
        if mode is None and fields:
            raise ParseError(
                f"unexpected {fields[0]!r} before any section", filename, lineno)
        # entry material, possibly continuing a previous line
        if gloss is not None:
            if pending_gloss is not None:
                raise ParseError("more than one gloss on entry", filename, lineno)
            pending_gloss = gloss
        for f in fields:
            if not pending:
                pending_line = lineno
            if f == ";":
                flush_entry()
            elif f.endswith(";") and not f.endswith("%;"):
                pending.append(f[:-1])
                flush_entry()
            else:
                pending.append(f)
    if pending or pending_gloss is not None:
        raise ParseError("entry not terminated by ';'", filename, pending_line)

    ast = LexiconAst(multichar_decls, lexicons, table)
    _validate(ast, filename)
    return ast


def _validate(ast, filename=None):
    if "Root" not in ast.lexicons:
        raise ParseError("no LEXICON Root defined", filename)
    for name, entries in ast.lexicons.items():
        for e in entries:
            if e.contlex != END and e.contlex not in ast.lexicons:
                raise ParseError(
                    f"undefined continuation lexicon {e.contlex!r}"
                    f" (referenced from {name})", filename, e.line)


def contlex_cycles(ast: LexiconAst) -> list:
    """Cycles in the continuation graph (legal: compounding), as name lists."""
    graph = {
        name: {e.contlex for e in entries if e.contlex != END}
        for name, entries in ast.lexicons.items()
    }
    cycles = []
    color = {}

    def visit(node, path):
        color[node] = "grey"
        path.append(node)
        for nxt in sorted(graph.get(node, ())):
            if color.get(nxt) == "grey":
                cycles.append(path[path.index(nxt):] + [nxt])
            elif nxt not in color:
                visit(nxt, path)
        path.pop()
        color[node] = "black"

    visit("Root", [])
    return cycles


def compile_lexicon(ast: LexiconAst) -> fst.Transducer:
    """One sub-network per lexicon; every entry is an analysis:surface
    arc chain ending in an epsilon transition into its continuation."""
    table = ast.table
    state_of = {}
    counter = [0]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    for name in ast.lexicons:
        state_of[name] = fresh()
    final = fresh()
    state_of[END] = final

    arcs = []
    for name, entries in ast.lexicons.items():
        for e in entries:
            cur = state_of[name]
            n = max(len(e.analysis), len(e.surface))
            for k in range(n):
                i = e.analysis[k] if k < len(e.analysis) else fst.EPSILON_ID
                o = e.surface[k] if k < len(e.surface) else fst.EPSILON_ID
                nxt = fresh()
                arcs.append((cur, i, o, nxt))
                cur = nxt
            arcs.append((cur, fst.EPSILON_ID, fst.EPSILON_ID,
                         state_of[e.contlex]))
    return fst._trim(table, counter[0], state_of["Root"], {final}, arcs)


def extract_glosses(ast: LexiconAst) -> GlossTable:
    """Rows for entries that carry both a POS tag and a gloss."""
    table = ast.table
    rows = {}
    for entries in ast.lexicons.values():
        for e in entries:
            if e.gloss is None:
                continue
            lemma, pos = split_lemma_pos(e.analysis, table)
            if pos is None:
                continue
            rows.setdefault((lemma, pos), []).append(e.gloss)
    return GlossTable(rows)


def split_lemma_pos(analysis_ids, table):
    """Lemma text and first tag of an analysis-side symbol sequence."""
    lemma = []
    pos = None
    for sid in analysis_ids:
        text = table.resolve(sid)
        if text.startswith("+"):
            pos = text
            break
        lemma.append(text)
    return "".join(lemma), pos


def pretty(ast: LexiconAst) -> str:
    """Canonical re-rendering; re-parsing yields an equivalent AST."""
    out = []
    if ast.multichar_decls:
        out.append("Multichar_Symbols")
        out.append("  " + " ".join(ast.multichar_decls))
        out.append("")
    for name, entries in ast.lexicons.items():
        out.append(f"LEXICON {name}")
        for e in entries:
            parts = []
            if e.analysis_text or e.surface_text is not None:
                if e.surface_text is not None:
                    parts.append(f"{e.analysis_text}:{e.surface_text}")
                else:
                    parts.append(e.analysis_text)
            parts.append(e.contlex)
            if e.gloss is not None:
                parts.append(f'"{e.gloss}"')
            parts.append(";")
            out.append("  " + " ".join(parts))
        out.append("")
    return "\n".join(out)
