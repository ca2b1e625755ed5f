"""End-to-end generator/analyzer assembly and apply-up/apply-down lookup.

The generator is the lexicon composed with the compiled rule transducer;
the analyzer is its inversion.  Two orthography modes are supported:

* pedagogical (default): surface forms keep the enriched spelling; the
  analyzer additionally accepts the normative spelling of each form.
* normative: the orthography filter is composed onto the surface side,
  so no pedagogical-only symbol ever surfaces.

A spell-relax transducer, when configured, lets analysis fall back to
orthographic variants; such readings carry relaxed=True.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fst, lexc, twol
from .errors import FstMorphError, PipelineError
from .symbols import EPSILON_ID, SymbolTable, UnknownSymbolError

MODES = ("pedagogical", "normative")


@dataclass
class Analysis:
    text: str
    relaxed: bool = False
    glosses: list = field(default_factory=list)

    def __str__(self):
        return self.text


@dataclass
class Pipeline:
    table: SymbolTable
    lexicon: fst.Transducer
    rules: fst.Transducer
    generator: fst.Transducer
    analyzer: fst.Transducer
    mode: str
    relax: fst.Transducer = None
    glosses: lexc.GlossTable = None


def _mapping_transducer(table, alphabet_ids, mapping, keep_original):
    """One-state transducer: identity over alphabet_ids except that each
    key of mapping rewrites to its variants (and, if keep_original, may
    also stay put).  A variant of EPSILON_ID deletes the key."""
    arcs = []
    seen_keys = set()
    mapped = set()
    for key, variants in mapping:
        if key in seen_keys:
            raise FstMorphError(
                f"duplicate mapping for symbol {table.resolve(key)!r}")
        seen_keys.add(key)
        for v in variants:
            arcs.append((0, key, v, 0))
            mapped.add(v)
        if keep_original:
            arcs.append((0, key, key, 0))
    for sid in set(alphabet_ids) | mapped:
        if sid != EPSILON_ID and sid not in seen_keys:
            arcs.append((0, sid, sid, 0))
    return fst._trim(table, 1, 0, {0}, arcs)


def build_orthography_filter(table, mapping, alphabet_ids) -> fst.Transducer:
    """Strict pedagogical→normative rewriting, identity elsewhere.

    mapping: list of (pedagogical symbol id, normative symbol id).
    """
    if not mapping:
        raise FstMorphError("orthography mapping is empty")
    keys = {k for k, _ in mapping}
    for _, v in mapping:
        if v in keys:
            raise FstMorphError(
                f"normative symbol {table.resolve(v)!r} is also a "
                "pedagogical key")
    return _mapping_transducer(
        table, alphabet_ids, [(k, [v]) for k, v in mapping],
        keep_original=False)


def build_relax(table, spec, alphabet_ids) -> fst.Transducer:
    """Surface→surface transducer reading each strict symbol also from
    its accepted variants (EPSILON_ID variant: the symbol may be absent).

    spec: list of (strict symbol id, list of variant ids).
    """
    return _mapping_transducer(table, alphabet_ids, spec, keep_original=True)


def surface_alphabet(machine: fst.Transducer) -> set:
    return {o for _, _, o, _ in machine.arcs if o != EPSILON_ID}


def _check_leaks(generator, table):
    leaked = sorted(
        table.resolve(o) for o in surface_alphabet(generator)
        if table.is_multichar(o))
    if leaked:
        raise PipelineError(
            "trigger or archiphoneme symbols leak to the surface: "
            + ", ".join(leaked)
            + " (no rule realizes them; check the rule file's Alphabet)")


def _sample_path(machine, max_len=40):
    paths = fst.enumerate_paths(machine, max_len, 1)
    return paths.pairs[0] if paths.pairs else None


def _restricted_rules(lexicon, ruleset, strategy):
    """Rule transducer restricted to the lexicon's stem-side strings.

    Intersecting the full rule set over the whole pair alphabet can
    explode; constraining the pair strings to those whose lexical
    projection the lexicon actually emits (with insertion pairs allowed
    anywhere) keeps every intermediate automaton lexicon-sized while
    leaving the composed generator unchanged.
    """
    if strategy not in ("direct", "reversed"):
        raise FstMorphError(f"bad combination strategy {strategy!r}")
    table = ruleset.table
    stems = fst.minimize(fst.project(lexicon, side="output"))
    by_lex = {}
    insertions = []
    for pid in ruleset.alphabet.pair_ids():
        l, _ = table.pair_parts(pid)
        if l == EPSILON_ID:
            insertions.append(pid)
        else:
            by_lex.setdefault(l, []).append(pid)
    arcs = []
    for src, i, _, dst in stems.arcs:
        for pid in by_lex.get(i, ()):
            arcs.append((src, pid, pid, dst))
    for q in range(stems.num_states):
        for pid in insertions:
            arcs.append((q, pid, pid, q))
    domain = fst._trim(table, stems.num_states, stems.start, stems.finals,
                       arcs)
    compiled = [twol.compile_rule(r, ruleset) for r in ruleset.rules]
    if strategy == "reversed" and compiled:
        acc = fst.reversed_intersect([domain] + compiled)
    else:
        acc = domain
        for r in compiled:
            acc = fst.minimize(fst.intersect(acc, r))
    return twol.pairs_to_transducer(acc, table)


def build_pipeline(lexicon_ast: lexc.LexiconAst, ruleset: twol.RuleSet,
                   mode: str = "pedagogical", orthography=None,
                   relax_spec=None, strategy: str = "direct") -> Pipeline:
    """Assemble generator and analyzer from parsed lexicon and rules.

    orthography: list of (pedagogical id, normative id); required in
    normative mode, used for accept-both analysis in pedagogical mode.
    relax_spec: list of (strict id, [variant ids]) or None.
    """
    if mode not in MODES:
        raise FstMorphError(f"unknown mode {mode!r}")
    table = lexicon_ast.table
    lexicon = lexc.compile_lexicon(lexicon_ast)
    rules = _restricted_rules(lexicon, ruleset, strategy)
    generator = fst.compose(lexicon, rules)
    if fst.is_empty(generator):
        sample = _sample_path(lexicon)
        hint = ""
        if sample is not None:
            hint = (" (example lexicon string with no rule-conforming "
                    f"realization: {table.render(sample[0])!r})")
        raise PipelineError("generator relation is empty: no lexicon "
                            "string passes the rules" + hint)
    _check_leaks(generator, table)

    surf = surface_alphabet(generator)
    analyzer_source = generator
    if mode == "normative":
        if not orthography:
            raise FstMorphError("normative mode requires an orthography "
                                "mapping")
        filt = build_orthography_filter(table, orthography, surf)
        generator = fst.compose(generator, filt)
        analyzer_source = generator
    elif orthography:
        # Accept the normative spelling of every form as well.
        opt = _mapping_transducer(
            table, surf, [(k, [v]) for k, v in orthography],
            keep_original=True)
        analyzer_source = fst.compose(generator, opt)

    analyzer = fst.invert(analyzer_source)
    relax = None
    if relax_spec:
        relax = build_relax(table, relax_spec,
                            surface_alphabet(analyzer_source))
    return Pipeline(table, lexicon, rules, generator, analyzer, mode,
                    relax, lexc.extract_glosses(lexicon_ast))


def _tokenize_strict(table, text):
    return [s.id for s in table.tokenize(text, intern_new=False)]


def _apply(machine, table, ids, max_len, max_count):
    acceptor = fst.string_pair(table, ids, ids)
    out = fst.compose(acceptor, machine)
    paths = fst.enumerate_paths(out, max_len, max_count)
    results = sorted({table.render(p[1]) for p in paths.pairs})
    return results, paths.truncated


def generate(pipeline: Pipeline, analysis: str, max_count: int = 100,
             max_len: int = 200) -> list:
    """Apply-down: analysis string → surface forms."""
    ids = _tokenize_strict(pipeline.table, analysis)
    forms, _ = _apply(pipeline.generator, pipeline.table, ids,
                      max_len, max_count)
    return forms


def _attach_glosses(pipeline, texts, relaxed):
    out = []
    for text in texts:
        glosses = []
        if pipeline.glosses is not None:
            ids = _tokenize_strict(pipeline.table, text)
            lemma, pos = lexc.split_lemma_pos(ids, pipeline.table)
            if pos is not None:
                glosses = pipeline.glosses.lookup(lemma, pos)
        out.append(Analysis(text, relaxed, glosses))
    return out


def analyze(pipeline: Pipeline, surface: str, max_count: int = 100,
            max_len: int = 200) -> list:
    """Apply-up: surface form → analyses; falls back to spell-relaxed
    readings (relaxed=True) only when the strict analysis is empty."""
    ids = _tokenize_strict(pipeline.table, surface)
    strict, _ = _apply(pipeline.analyzer, pipeline.table, ids,
                       max_len, max_count)
    if strict:
        return _attach_glosses(pipeline, strict, False)
    if pipeline.relax is None:
        return []
    variant_reader = fst.invert(pipeline.relax)
    acceptor = fst.string_pair(pipeline.table, ids, ids)
    chain = fst.compose(fst.compose(acceptor, variant_reader),
                        pipeline.analyzer)
    paths = fst.enumerate_paths(chain, max_len, max_count)
    relaxed = sorted({pipeline.table.render(p[1]) for p in paths.pairs})
    return _attach_glosses(pipeline, relaxed, True)


def load_pipeline(lexc_texts, twol_text, mode: str = "pedagogical",
                  orthography_text=None, relax_text=None,
                  strategy: str = "direct") -> Pipeline:
    """Parse lexicon and rule sources into one shared symbol table and
    assemble the pipeline.  Multiple lexicon files share a namespace."""
    table = SymbolTable()
    ast = lexc.parse_lexc("\n".join(lexc_texts), table)
    ruleset = twol.parse_twol(twol_text, table)
    orthography = None
    if orthography_text is not None:
        orthography = [(k, vs[0]) for k, vs in
                       parse_mapping_file(orthography_text, table)]
    relax_spec = None
    if relax_text is not None:
        relax_spec = parse_mapping_file(relax_text, table)
    return build_pipeline(ast, ruleset, mode, orthography, relax_spec,
                          strategy)


def parse_mapping_file(text, table, filename=None):
    """Two-column TSV of symbol → variant; '0' in column 2 means the
    symbol may be absent.  Returns list of (symbol id, [variant ids])."""
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise FstMorphError(
                f"{filename or '<mapping>'}:{lineno}: expected two "
                f"tab-separated columns, got {raw!r}")
        key = table.symbol_for(cols[0]).id
        variant = (EPSILON_ID if cols[1] == "0"
                   else table.symbol_for(cols[1]).id)
        rows.setdefault(key, []).append(variant)
    return list(rows.items())
