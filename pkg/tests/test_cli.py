import io
import json

import pytest

from fstmorph import cli, testkit

from conftest import FIXTURE_DIR


def fixture_args():
    return [str(FIXTURE_DIR / "roots.lexc"), str(FIXTURE_DIR / "affixes.lexc"),
            "--rules", str(FIXTURE_DIR / "phonology.twol")]


def full_args():
    return fixture_args() + [
        "--orthography", str(FIXTURE_DIR / "orthography.tsv"),
        "--relax", str(FIXTURE_DIR / "relax.tsv")]


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("artifacts")
    code = cli.main(["compile", *full_args(), "--out", str(out)])
    assert code == 0
    return out


def run(argv, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin_text))
    return cli.main(argv)


def test_compile_writes_artifacts(artifacts):
    names = {p.name for p in artifacts.iterdir()}
    assert names == {"generator.att", "analyzer.att", "symbols.tsv",
                     "glosses.tsv", "manifest.json"}


def test_compile_deterministic(artifacts, tmp_path):
    again = tmp_path / "again"
    assert cli.main(["compile", *full_args(), "--out", str(again)]) == 0
    for name in ("generator.att", "analyzer.att", "symbols.tsv",
                 "glosses.tsv", "manifest.json"):
        assert (again / name).read_bytes() == (artifacts / name).read_bytes()


def test_lookup_down(artifacts, capsys, monkeypatch):
    code = run(["lookup", str(artifacts), "--direction", "down"],
               "algg+N+Sg+Gen\n", monkeypatch)
    assert code == 0
    assert capsys.readouterr().out == "algg+N+Sg+Gen\taalǥ\n"


def test_lookup_up_and_unknown(artifacts, capsys, monkeypatch):
    code = run(["lookup", str(artifacts), "--direction", "up"],
               "radio\nzzzz\n", monkeypatch)
    assert code == 0
    assert capsys.readouterr().out == "radio\tradio+N+Sg+Nom\nzzzz\t+?\n"


def test_test_command_passes(capsys):
    code = cli.main(["test", *full_args(),
                     "--suite", str(FIXTURE_DIR / "suite.txt")])
    assert code == 0
    out = capsys.readouterr().out
    assert "gen: 16 passed, 0 failed" in out
    assert "ana: 16 passed, 0 failed" in out


def test_test_command_json(capsys):
    code = cli.main(["test", *full_args(), "--json",
                     "--suite", str(FIXTURE_DIR / "suite.txt")])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    rows = [json.loads(line) for line in lines]
    assert all(r["status"] == "pass" for r in rows)
    assert {r["direction"] for r in rows} == {"gen", "ana"}


def test_test_command_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("algg+N+Sg+Gen: wrong\n", encoding="utf-8")
    assert cli.main(["test", *full_args(), "--suite", str(bad)]) == 1


def test_missing_file_is_usage_error(capsys):
    code = cli.main(["test", "missing.lexc", "--rules", "x.twol",
                     "--suite", "s.txt"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_is_usage_error(tmp_path, capsys):
    broken = tmp_path / "broken.lexc"
    broken.write_text("LEXICON Root\nfoo UNDEFINED ;\n", encoding="utf-8")
    code = cli.main(["compile", str(broken),
                     "--rules", str(FIXTURE_DIR / "phonology.twol"),
                     "--out", str(tmp_path / "o")])
    assert code == 2
    assert "UNDEFINED" in capsys.readouterr().err


def test_stats_matches_library(capsys, fixture_parsed, pipeline):
    assert cli.main(["stats", *full_args()]) == 0
    out = capsys.readouterr().out
    _, ast, _ = fixture_parsed
    assert out == testkit.coverage_stats(ast, pipeline).to_table()


def test_att_export_import_round_trip(artifacts, tmp_path, capsys):
    assert cli.main(["export-att", str(artifacts)]) == 0
    first = capsys.readouterr().out
    att_file = tmp_path / "g.att"
    att_file.write_text(first, encoding="utf-8")
    assert cli.main(["import-att", str(att_file),
                     "--symbols", str(artifacts / "symbols.tsv")]) == 0
    assert capsys.readouterr().out == first
