"""Two-level rule parsing, semantics, and compilation.

Rules are parallel constraints over equal-length strings of feasible
lexical:surface pairs; epsilon is a real "0" member of a pair until
pairs_to_transducer converts the combined acceptor for composition.

check_rule is the executable definition of rule semantics and is kept
independent of the acceptor compiler: it matches context regexes
directly on the pair string, while compile_rule goes through the
finite-state algebra.  Their agreement is the module's central test.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from . import fst
from .errors import ParseError, FstMorphError
from .symbols import EPSILON_ID, SymbolTable, unescape, nfc

OPERATORS = ("=>", "<=", "<=>", "/<=")


# ---------------------------------------------------------------------------
# regex AST over feasible pairs


@dataclass(frozen=True)
class Atom:
    """One pair-class: each side a symbol id, a set name, or None (any).
    Epsilon sides are the id 0."""

    left: object
    right: object


@dataclass(frozen=True)
class Seq:
    items: tuple


@dataclass(frozen=True)
class Alt:
    items: tuple


@dataclass(frozen=True)
class Star:
    item: object


@dataclass(frozen=True)
class Plus:
    item: object


@dataclass(frozen=True)
class Opt:
    item: object


EPSILON_RE = Seq(())


@dataclass
class FeasiblePairs:
    """Closed alphabet of declared lexical:surface pairs."""

    table: SymbolTable
    pairs: list  # of (lexical id, surface id), declaration order

    def __post_init__(self):
        if not self.pairs:
            raise FstMorphError("feasible-pair alphabet is empty")
        self._set = set(self.pairs)

    def __contains__(self, pair):
        return pair in self._set

    def pair_ids(self):
        return [self.table.pair_symbol(l, s).id for l, s in self.pairs]

    def pair_id(self, l, s):
        if (l, s) not in self._set:
            raise FstMorphError(
                f"pair {self.table.resolve(l)}:{self.table.resolve(s)}"
                " is not in the feasible-pair alphabet"
            )
        return self.table.pair_symbol(l, s).id


@dataclass
class TwolRule:
    name: str
    center: tuple  # (lexical id, surface id)
    op: str
    contexts: list  # of (left regex, right regex)
    line: int = 0


@dataclass
class RuleSet:
    alphabet: FeasiblePairs
    sets: dict  # name -> list of symbol ids
    rules: list

    @property
    def table(self):
        return self.alphabet.table


# ---------------------------------------------------------------------------
# source tokenizer / parser

_SPECIALS = set("()|*+?_;\"")


def _strip_comments(line):
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


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    glued: bool  # no whitespace between this and the previous token
    quoted: bool = False


def _lex(source):
    toks = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = _strip_comments(raw)
        i = 0
        prev_end = -2  # nothing glues across line starts
        while i < len(line):
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            glued = i == prev_end
            if ch == '"':
                j = line.find('"', i + 1)
                if j < 0:
                    raise ParseError("unterminated rule name quote", line=lineno)
                toks.append(_Tok(line[i + 1 : j], lineno, glued, quoted=True))
                i = j + 1
            elif ch in _SPECIALS:
                toks.append(_Tok(ch, lineno, glued))
                i += 1
            else:
                j = i
                buf = []
                while j < len(line):
                    c = line[j]
                    if c == "%" and j + 1 < len(line):
                        buf.append(line[j : j + 2])
                        j += 2
                        continue
                    if c.isspace() or c in _SPECIALS:
                        break
                    buf.append(c)
                    j += 1
                toks.append(_Tok("".join(buf), lineno, glued))
                i = j
            prev_end = i
    return toks


def _split_pair_token(text):
    """Split a symbol token at the single unescaped ':' if present."""
    depth_i = None
    i = 0
    while i < len(text):
        if text[i] == "%" and i + 1 < len(text):
            i += 2
            continue
        if text[i] == ":":
            if depth_i is not None:
                raise ParseError(f"more than one ':' in pair {text!r}")
            depth_i = i
        i += 1
    if depth_i is None:
        return text, None
    return text[:depth_i], text[depth_i + 1 :]


class _Parser:
    def __init__(self, source, table, filename=None):
        self.toks = _lex(source)
        self.pos = 0
        self.table = table
        self.filename = filename
        self.sets = {}
        self.set_names = set()
        self.pairs = []
        self.pair_set = set()

    def err(self, msg, tok=None):
        line = tok.line if tok is not None else (
            self.toks[self.pos - 1].line if self.toks and self.pos else None
        )
        raise ParseError(msg, filename=self.filename, line=line)

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of rule file", filename=self.filename)
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text or tok.quoted:
            self.err(f"expected {text!r}, got {tok.text!r}", tok)
        return tok

    # -- sections ----------------------------------------------------------

    def parse(self):
        self.expect("Alphabet")
        self.parse_alphabet()
        tok = self.peek()
        if tok and tok.text == "Sets" and not tok.quoted:
            self.next()
            self.parse_sets()
        rules = []
        if self.peek() is not None:
            self.expect("Rules")
            rules = self.parse_rules()
        alphabet = FeasiblePairs(self.table, self.pairs)
        return RuleSet(alphabet, self.sets, rules)

    def _symbol_or_eps(self, text, tok):
        if text == "" or text is None:
            self.err("empty symbol in pair", tok)
        if text == "0":
            return EPSILON_ID
        return self.table.symbol_for(text).id

    def parse_alphabet(self):
        while True:
            tok = self.next()
            if tok.text == ";" and not tok.quoted:
                break
            l_txt, r_txt = _split_pair_token(tok.text)
            l = self._symbol_or_eps(l_txt, tok)
            r = self._symbol_or_eps(r_txt, tok) if r_txt is not None else l
            if (l, r) == (EPSILON_ID, EPSILON_ID):
                self.err("0:0 is not a feasible pair", tok)
            if (l, r) not in self.pair_set:
                self.pair_set.add((l, r))
                self.pairs.append((l, r))
        if not self.pairs:
            self.err("Alphabet section declares no pairs")

    def parse_sets(self):
        while True:
            tok = self.peek()
            if tok is None:
                self.err("unexpected end of file in Sets section")
            if tok.text == "Rules" and not tok.quoted:
                return
            name = self.next()
            self.expect("=")
            members = []
            while True:
                t = self.next()
                if t.text == ";" and not t.quoted:
                    break
                members.append(self.table.symbol_for(t.text).id)
            if name.text in self.sets:
                self.err(f"duplicate set {name.text!r}", name)
            self.sets[name.text] = members
            self.set_names.add(name.text)

    def parse_rules(self):
        rules = []
        names = set()
        while self.peek() is not None:
            name_tok = self.next()
            if not name_tok.quoted:
                self.err(f"expected quoted rule name, got {name_tok.text!r}",
                         name_tok)
            if name_tok.text in names:
                self.err(f"duplicate rule name {name_tok.text!r}", name_tok)
            names.add(name_tok.text)
            center_tok = self.next()
            l_txt, r_txt = _split_pair_token(center_tok.text)
            l = self._symbol_or_eps(l_txt, center_tok)
            r = (self._symbol_or_eps(r_txt, center_tok)
                 if r_txt is not None else l)
            op_tok = self.next()
            if op_tok.text not in OPERATORS:
                self.err(f"expected rule operator, got {op_tok.text!r}", op_tok)
            contexts = []
            while True:
                nxt = self.peek()
                if nxt is None or nxt.quoted:
                    break
                contexts.append(self.parse_context())
            if not contexts:
                self.err(f"rule {name_tok.text!r} has no contexts", name_tok)
            rules.append(TwolRule(name_tok.text, (l, r), op_tok.text,
                                  contexts, name_tok.line))
        return rules

    # -- context regexes ---------------------------------------------------

    def parse_context(self):
        left_toks, right_toks = [], []
        side = left_toks
        seen_slot = False
        while True:
            tok = self.next()
            if tok.text == ";" and not tok.quoted:
                break
            if tok.text == "_" and not tok.quoted:
                if seen_slot:
                    self.err("more than one '_' in context", tok)
                seen_slot = True
                side = right_toks
                continue
            side.append(tok)
        if not seen_slot:
            self.err("context lacks '_' slot")
        return (self._regex(left_toks), self._regex(right_toks))

    def _regex(self, toks):
        if not toks:
            return EPSILON_RE
        stream = _TokStream(toks, self)
        node = self._alt(stream)
        if stream.peek() is not None:
            self.err(f"unexpected {stream.peek().text!r} in context regex",
                     stream.peek())
        return node

    def _alt(self, stream):
        branches = [self._seq(stream)]
        while stream.peek() is not None and stream.peek().text == "|":
            stream.next()
            branches.append(self._seq(stream))
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def _seq(self, stream):
        items = []
        while True:
            tok = stream.peek()
            if tok is None or tok.text in (")", "|"):
                break
            items.append(self._factor(stream))
        if len(items) == 1:
            return items[0]
        return Seq(tuple(items))

    def _factor(self, stream):
        node = self._atom(stream)
        while True:
            tok = stream.peek()
            if tok is None:
                break
            if tok.text == "*":
                stream.next()
                node = Star(node)
            elif tok.text == "+":
                stream.next()
                node = Plus(node)
            elif tok.text == "?" and tok.glued:
                stream.next()
                node = Opt(node)
            else:
                break
        return node

    def _atom(self, stream):
        tok = stream.next()
        if tok.text == "(":
            node = self._alt(stream)
            closing = stream.next()
            if closing is None or closing.text != ")":
                self.err("unbalanced '(' in context regex", tok)
            return node
        if tok.text == "?":
            return Atom(None, None)
        if tok.text in ("*", "+", "|", ")"):
            self.err(f"misplaced {tok.text!r} in context regex", tok)
        l_txt, r_txt = _split_pair_token(tok.text)
        return Atom(self._side_spec(l_txt, tok),
                    self._side_spec(r_txt if r_txt is not None else l_txt, tok))

    def _side_spec(self, text, tok):
        if text == "":
            return None  # "x:" / ":y" — open side
        if text == "0":
            return EPSILON_ID
        content = unescape(nfc(text))
        if content in self.set_names or text in self.set_names:
            return ("set", text if text in self.set_names else content)
        sid = self.table.content_id(text)
        if sid is None:
            self.err(f"unknown set or symbol {text!r}", tok)
        return sid


class _TokStream:
    def __init__(self, toks, parser):
        self.toks = toks
        self.i = 0
        self.parser = parser

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            self.parser.err("unexpected end of context regex")
        self.i += 1
        return tok


def parse_twol(source: str, table: SymbolTable = None,
               filename: str = None) -> RuleSet:
    """Parse a rule file: Alphabet, optional Sets, then named rules."""
    if table is None:
        table = SymbolTable()
    ruleset = _Parser(source, table, filename).parse()
    _validate(ruleset)
    return ruleset


def _validate(ruleset):
    """Explicit pair atoms and rule centers must be resolvable."""
    for rule in ruleset.rules:
        if rule.op in ("=>", "<=>", "/<=") and \
                rule.center not in ruleset.alphabet:
            table = ruleset.table
            a, b = rule.center
            raise ParseError(
                f"rule {rule.name!r}: center pair "
                f"{table.render([a]) or '0'}:{table.render([b]) or '0'} "
                f"is not a feasible pair", line=rule.line)
        for left, right in rule.contexts:
            for atom in _atoms(left) + _atoms(right):
                for side in (atom.left, atom.right):
                    if isinstance(side, tuple) and side[0] == "set":
                        if side[1] not in ruleset.sets:
                            raise ParseError(
                                f"rule {rule.name!r} references unknown set"
                                f" {side[1]!r}", line=rule.line)
                _matching_pairs(atom, ruleset)  # raises on unknown sets


def _atoms(node):
    if isinstance(node, Atom):
        return [node]
    if isinstance(node, (Star, Plus, Opt)):
        return _atoms(node.item)
    if isinstance(node, (Seq, Alt)):
        return [a for item in node.items for a in _atoms(item)]
    return []


# ---------------------------------------------------------------------------
# semantics


def _side_matches(spec, sid, ruleset):
    if spec is None:
        return True
    if isinstance(spec, tuple) and spec[0] == "set":
        members = ruleset.sets.get(spec[1])
        if members is None:
            raise ParseError(f"unknown set {spec[1]!r}")
        return sid in members
    return sid == spec


def _matching_pairs(atom, ruleset):
    return [
        p
        for p in ruleset.alphabet.pairs
        if _side_matches(atom.left, p[0], ruleset)
        and _side_matches(atom.right, p[1], ruleset)
    ]


def _match_ends(node, seq, start, ruleset):
    """End positions reachable by matching node on seq from start."""
    if isinstance(node, Atom):
        if start < len(seq) and _side_matches(node.left, seq[start][0], ruleset) \
                and _side_matches(node.right, seq[start][1], ruleset):
            return {start + 1}
        return set()
    if isinstance(node, Seq):
        ends = {start}
        for item in node.items:
            ends = {e for p in ends for e in _match_ends(item, seq, p, ruleset)}
            if not ends:
                break
        return ends
    if isinstance(node, Alt):
        out = set()
        for item in node.items:
            out |= _match_ends(item, seq, start, ruleset)
        return out
    if isinstance(node, Star):
        ends = {start}
        frontier = {start}
        while frontier:
            nxt = set()
            for p in frontier:
                nxt |= _match_ends(node.item, seq, p, ruleset)
            frontier = nxt - ends
            ends |= nxt
        return ends
    if isinstance(node, Plus):
        return {
            e
            for p in _match_ends(node.item, seq, start, ruleset)
            for e in _match_ends(Star(node.item), seq, p, ruleset)
        }
    if isinstance(node, Opt):
        return {start} | _match_ends(node.item, seq, start, ruleset)
    raise TypeError(f"bad regex node {node!r}")


def _context_holds(rule_ctx, seq, i, ruleset):
    left, right = rule_ctx
    left_ok = any(
        i in _match_ends(left, seq, j, ruleset) for j in range(i + 1)
    )
    if not left_ok:
        return False
    return bool(_match_ends(right, seq, i + 1, ruleset))


def check_rule(rule: TwolRule, s, ruleset: RuleSet) -> bool:
    """Semantic oracle: does the feasible-pair string s satisfy the rule?

    A context (L, R) holds at i when some prefix s[0..i) ends in a match
    of L and some prefix of s[i+1..) matches R.
    """
    for pair in s:
        if pair not in ruleset.alphabet:
            raise FstMorphError(f"infeasible pair {pair!r} in rule string")
    a, b = rule.center
    for i, (l, r) in enumerate(s):
        any_holds = any(_context_holds(c, s, i, ruleset) for c in rule.contexts)
        if rule.op == "=>":
            if (l, r) == (a, b) and not any_holds:
                return False
        elif rule.op == "<=":
            if l == a and any_holds and r != b:
                return False
        elif rule.op == "<=>":
            if (l, r) == (a, b) and not any_holds:
                return False
            if l == a and any_holds and r != b:
                return False
        elif rule.op == "/<=":
            if (l, r) == (a, b) and any_holds:
                return False
        else:
            raise ValueError(f"bad operator {rule.op!r}")
    return True


# ---------------------------------------------------------------------------
# compilation


def _regex_to_fst(node, ruleset):
    table = ruleset.table
    if isinstance(node, Atom):
        pids = [ruleset.alphabet.pair_id(*p) for p in _matching_pairs(node, ruleset)]
        if not pids:
            return fst.empty(table)
        return fst.symbol_set_acceptor(table, pids)
    if isinstance(node, Seq):
        acc = fst.epsilon_machine(table)
        for item in node.items:
            acc = fst.concat(acc, _regex_to_fst(item, ruleset))
        return acc
    if isinstance(node, Alt):
        acc = fst.empty(table)
        for item in node.items:
            acc = fst.union(acc, _regex_to_fst(item, ruleset))
        return acc
    if isinstance(node, Star):
        return fst.star(_regex_to_fst(node.item, ruleset))
    if isinstance(node, Plus):
        return fst.plus(_regex_to_fst(node.item, ruleset))
    if isinstance(node, Opt):
        return fst.option(_regex_to_fst(node.item, ruleset))
    raise TypeError(f"bad regex node {node!r}")


def compile_rule(rule: TwolRule, ruleset: RuleSet) -> fst.Transducer:
    """Acceptor over pair symbols: exactly the strings check_rule accepts."""
    table = ruleset.table
    alphabet = ruleset.alphabet
    pids = alphabet.pair_ids()
    a, b = rule.center
    if rule.op in ("=>", "<=>", "/<=") and (a, b) not in alphabet:
        raise FstMorphError(
            f"rule {rule.name!r}: center pair is not feasible"
        )
    pi_star = fst.sigma_star(table, pids)

    prefixes, suffixes = [], []
    for left, right in rule.contexts:
        p = fst.determinize(fst.concat(pi_star, _regex_to_fst(left, ruleset)))
        s = fst.determinize(fst.concat(_regex_to_fst(right, ruleset), pi_star))
        prefixes.append(p)
        suffixes.append(s)

    def not_(m):
        return fst.complement(m, pids)

    def violations_restriction(center_fst):
        """Strings u·c·v where no context has both sides satisfied."""
        terms = []
        k = len(rule.contexts)
        for choice in itertools.product((False, True), repeat=k):
            # True: the prefix side fails for that context
            pre = pi_star
            for j, pref_fails in enumerate(choice):
                if pref_fails:
                    pre = fst.intersect(pre, not_(prefixes[j]))
            suf = pi_star
            for j, pref_fails in enumerate(choice):
                if not pref_fails:
                    suf = fst.intersect(suf, not_(suffixes[j]))
            terms.append(fst.concat(fst.concat(pre, center_fst), suf))
        acc = fst.empty(table)
        for term in terms:
            acc = fst.union(acc, term)
        return acc

    def violations_coercion(wrong_fst):
        acc = fst.empty(table)
        for p, s in zip(prefixes, suffixes):
            acc = fst.union(acc, fst.concat(fst.concat(p, wrong_fst), s))
        return acc

    center_pairs = [p for p in alphabet.pairs if p == (a, b)]
    center_fst = (
        fst.symbol_set_acceptor(table, [alphabet.pair_id(a, b)])
        if center_pairs
        else fst.empty(table)
    )
    wrong = [alphabet.pair_id(l, s) for l, s in alphabet.pairs
             if l == a and s != b]
    wrong_fst = (fst.symbol_set_acceptor(table, wrong)
                 if wrong else fst.empty(table))

    if rule.op == "=>":
        viol = violations_restriction(center_fst)
    elif rule.op == "<=":
        viol = violations_coercion(wrong_fst)
    elif rule.op == "<=>":
        viol = fst.union(violations_restriction(center_fst),
                         violations_coercion(wrong_fst))
    elif rule.op == "/<=":
        viol = violations_coercion(center_fst)
    else:
        raise ValueError(f"bad operator {rule.op!r}")

    return fst.minimize(not_(viol))


def combine_rules(ruleset: RuleSet, strategy: str = "direct") -> fst.Transducer:
    """Intersection of all compiled rule acceptors over the pair alphabet."""
    if strategy not in ("direct", "reversed"):
        raise ValueError(f"bad combination strategy {strategy!r}")
    table = ruleset.table
    pids = ruleset.alphabet.pair_ids()
    compiled = [compile_rule(r, ruleset) for r in ruleset.rules]
    if not compiled:
        return fst.sigma_star(table, pids)
    if strategy == "reversed":
        acc = fst.reversed_intersect(compiled)
    else:
        acc = compiled[0]
        for r in compiled[1:]:
            acc = fst.minimize(fst.intersect(acc, r))
    acc = fst.minimize(acc)
    if fst.is_empty(acc):
        warnings.warn("rule set is contradictory: combined language is empty",
                      stacklevel=2)
    return acc


def pairs_to_transducer(acceptor: fst.Transducer,
                        table: SymbolTable) -> fst.Transducer:
    """Reinterpret an acceptor over pair symbols as a transducer."""
    arcs = []
    for src, i, o, dst in acceptor.arcs:
        if i != o:
            raise FstMorphError("pair acceptor expected (in == out)")
        if i == EPSILON_ID:
            arcs.append((src, EPSILON_ID, EPSILON_ID, dst))
        else:
            l, s = table.pair_parts(i)
            arcs.append((src, l, s, dst))
    return fst._trim(table, acceptor.num_states, acceptor.start,
                     acceptor.finals, arcs)
