import pytest

from fstmorph import fst, lexc
from fstmorph.errors import ParseError
from fstmorph.symbols import SymbolTable

BASIC = """
Multichar_Symbols +N +Sg +Nom %^TRIG

LEXICON Root
radio+N:radio N_RADIO "radio" ;
K ;                      ! epsilon entry: only a continuation

LEXICON K
kala+N:kala N_RADIO ;

LEXICON N_RADIO
+Sg+Nom:%^TRIG # ;
"""


def strings(ast):
    net = lexc.compile_lexicon(ast)
    paths = fst.enumerate_paths(net, 30, 100)
    table = ast.table
    return {(table.render(p[0]), table.render(p[1])) for p in paths.pairs}


def test_parse_and_compile_basic():
    ast = lexc.parse_lexc(BASIC)
    assert set(ast.lexicons) == {"Root", "K", "N_RADIO"}
    assert strings(ast) == {
        ("radio+N+Sg+Nom", "radio%^TRIG"),
        ("kala+N+Sg+Nom", "kala%^TRIG"),
    }


def test_entry_without_surface_side():
    # "ana CONTLEX ;" uses the analysis string on both sides
    ast = lexc.parse_lexc(
        "LEXICON Root\nab X ;\nLEXICON X\n# ;\n")
    assert strings(ast) == {("ab", "ab")}


def test_epsilon_surface_field():
    # a lone 0 on one side is the empty string
    ast = lexc.parse_lexc(
        "Multichar_Symbols +X\nLEXICON Root\n+X:0 E ;\nLEXICON E\n# ;\n")
    assert strings(ast) == {("+X", "")}


def test_gloss_extraction():
    ast = lexc.parse_lexc(BASIC)
    glosses = lexc.extract_glosses(ast)
    assert glosses.lookup("radio", "+N") == ["radio"]
    assert glosses.lookup("kala", "+N") == []


def test_undefined_contlex_reports_line():
    with pytest.raises(ParseError) as info:
        lexc.parse_lexc("LEXICON Root\nfoo BAD ;\n")
    assert "BAD" in str(info.value)
    assert "2" in str(info.value)


def test_missing_root():
    with pytest.raises(ParseError, match="Root"):
        lexc.parse_lexc("LEXICON A\nfoo # ;\n")


def test_duplicate_lexicon():
    with pytest.raises(ParseError, match="duplicate"):
        lexc.parse_lexc("LEXICON Root\nx # ;\nLEXICON Root\ny # ;\n")


def test_unterminated_gloss():
    with pytest.raises(ParseError, match="gloss"):
        lexc.parse_lexc('LEXICON Root\nfoo # "no end ;\n')


def test_unterminated_entry():
    with pytest.raises(ParseError, match="';'"):
        lexc.parse_lexc("LEXICON Root\nfoo #\n")


def test_shared_namespace_across_sources():
    table = SymbolTable()
    src1 = "LEXICON Root\nab NEXT ;\n"
    src2 = "LEXICON NEXT\ncd # ;\n"
    ast = lexc.parse_lexc(src1 + src2, table)
    assert strings(ast) == {("abcd", "abcd")}


def test_contlex_cycle_detection():
    cyclic = ("LEXICON Root\na Step ;\n"
              "LEXICON Step\nb Root ;\nc # ;\n")
    ast = lexc.parse_lexc(cyclic)
    cycles = lexc.contlex_cycles(ast)
    assert cycles and set(cycles[0]) >= {"Root", "Step"}
    assert lexc.contlex_cycles(lexc.parse_lexc(BASIC)) == []


def test_pretty_round_trip():
    ast = lexc.parse_lexc(BASIC)
    again = lexc.parse_lexc(lexc.pretty(ast))
    assert strings(again) == strings(ast)
    assert lexc.pretty(again) == lexc.pretty(ast)


def test_escaped_specials_in_stems():
    src = ("Multichar_Symbols %{ie%}\n"
           "LEXICON Root\nt%{ie%}t:t%{ie%}t X ;\nLEXICON X\n# ;\n")
    ast = lexc.parse_lexc(src)
    (pair,) = strings(ast)
    assert pair == ("t%{ie%}t", "t%{ie%}t")
    # three symbols on each side: t, {ie}, t
    assert len(ast.root[0].analysis) == 3
