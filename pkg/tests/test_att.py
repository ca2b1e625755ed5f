import pytest

from fstmorph import att, fst
from fstmorph.errors import ParseError
from fstmorph.symbols import EPSILON_ID, EPSILON_TEXT, SymbolTable


@pytest.fixture
def table():
    t = SymbolTable()
    for c in "ab":
        t.intern(c)
    t.declare_multichar("+N")
    return t


def test_export_format(table):
    a = table.id_of("a")
    n = table.id_of("+N")
    t = fst._trim(table, 3, 0, {2},
                  [(0, a, EPSILON_ID, 1), (1, n, n, 2)])
    text = att.export_att(t, table)
    lines = text.splitlines()
    assert lines[0] == f"0\t1\ta\t{EPSILON_TEXT}"
    assert lines[1] == "1\t2\t+N\t+N"
    assert lines[2] == "2"  # final state on its own line


def test_round_trip_byte_identical(table):
    a, b = table.id_of("a"), table.id_of("b")
    t = fst.union(fst.string_pair(table, [a, b], [b]),
                  fst.string_acceptor(table, [b]))
    first = att.export_att(t, table)
    again = att.export_att(att.import_att(first, table), table)
    assert first == again


def test_symbols_sidecar_round_trip(table):
    text = att.export_symbols(table)
    restored = att.import_symbols(text)
    assert att.export_symbols(restored) == text
    # multichar declarations survive, so tokenization still works
    assert [s.text for s in restored.tokenize("ab+N")] == ["a", "b", "+N"]


def test_import_rejects_bad_lines(table):
    with pytest.raises(ParseError):
        att.import_att("0\t1\ta", table)  # not enough columns
