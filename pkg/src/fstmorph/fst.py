"""Unweighted finite-state transducers and the algorithm suite.

Transducers are immutable after construction: every operation returns a
fresh, trimmed machine with deterministically ordered arcs and BFS state
numbering, so identical inputs give bit-identical results.  Arc labels
are symbol ids from one shared SymbolTable; id 0 is epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AlphabetMismatchError, NotAnAcceptorError
from .symbols import EPSILON_ID, SymbolTable


class Transducer:
    """States 0..num_states-1, arcs (src, in, out, dst), one start state."""

    __slots__ = ("table", "num_states", "start", "finals", "arcs", "_adj")

    def __init__(self, table, num_states, start, finals, arcs):
        self.table = table
        self.num_states = num_states
        self.start = start
        self.finals = frozenset(finals)
        self.arcs = tuple(sorted(arcs))
        self._adj = None
        assert start < num_states
        assert all(s < num_states for s in self.finals)
        assert all(a[0] < num_states and a[3] < num_states for a in self.arcs)

    def arcs_from(self, state):
        if self._adj is None:
            adj = [[] for _ in range(self.num_states)]
            for a in self.arcs:
                adj[a[0]].append(a)
            self._adj = adj
        return self._adj[state]

    def is_acceptor(self):
        return all(i == o for _, i, o, _ in self.arcs)

    def input_labels(self):
        return {i for _, i, _, _ in self.arcs if i != EPSILON_ID}

    def output_labels(self):
        return {o for _, _, o, _ in self.arcs if o != EPSILON_ID}

    def labels(self):
        return self.input_labels() | self.output_labels()

    def __repr__(self):
        return (
            f"<Transducer states={self.num_states} arcs={len(self.arcs)} "
            f"finals={len(self.finals)}>"
        )


@dataclass
class PathSet:
    """Deduplicated (input, output) symbol-id sequences, shortlex order."""

    pairs: list
    truncated: bool = False

    def as_text(self, table):
        return [(table.render(i), table.render(o)) for i, o in self.pairs]


def _check_tables(*ts):
    tables = {id(t.table) for t in ts}
    if len(tables) > 1:
        raise AlphabetMismatchError("transducers use different symbol tables")


def _require_acceptor(*ts):
    for t in ts:
        if not t.is_acceptor():
            raise NotAnAcceptorError("operation requires an acceptor (in == out)")


def _trim(table, num_states, start, finals, arcs):
    """Keep states reachable from start and co-reachable to a final,
    renumber in BFS order from the start state."""
    fwd = {}
    for src, _, _, dst in arcs:
        fwd.setdefault(src, set()).add(dst)
    reach = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for d in fwd.get(s, ()):
            if d not in reach:
                reach.add(d)
                stack.append(d)
    bwd = {}
    for src, _, _, dst in arcs:
        bwd.setdefault(dst, set()).add(src)
    coreach = set(f for f in finals if f in reach)
    stack = list(coreach)
    while stack:
        s = stack.pop()
        for p in bwd.get(s, ()):
            if p in coreach:
                continue
            if p in reach:
                coreach.add(p)
                stack.append(p)
    keep = reach & coreach
    if start not in keep:
        return Transducer(table, 1, 0, frozenset(), ())
    adj = {}
    for a in sorted(arcs):
        if a[0] in keep and a[3] in keep:
            adj.setdefault(a[0], []).append(a)
    order = {start: 0}
    queue = [start]
    qi = 0
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        for _, _, _, dst in adj.get(s, ()):
            if dst not in order:
                order[dst] = len(order)
                queue.append(dst)
    new_arcs = []
    for src, lst in adj.items():
        for _, i, o, dst in lst:
            new_arcs.append((order[src], i, o, order[dst]))
    new_finals = {order[s] for s in finals if s in keep}
    return Transducer(table, len(order), 0, new_finals, new_arcs)


# ---------------------------------------------------------------------------
# constructors


def empty(table: SymbolTable) -> Transducer:
    return Transducer(table, 1, 0, frozenset(), ())


def epsilon_machine(table: SymbolTable) -> Transducer:
    return Transducer(table, 1, 0, {0}, ())


def string_pair(table, in_ids, out_ids) -> Transducer:
    """Single-path transducer mapping in_ids to out_ids.

    Unequal lengths are padded with epsilon on the shorter side,
    left-aligned (symbols consumed in lockstep from the start).
    """
    n = max(len(in_ids), len(out_ids))
    arcs = []
    for k in range(n):
        i = in_ids[k] if k < len(in_ids) else EPSILON_ID
        o = out_ids[k] if k < len(out_ids) else EPSILON_ID
        arcs.append((k, i, o, k + 1))
    return Transducer(table, n + 1, 0, {n}, arcs)


def string_acceptor(table, ids) -> Transducer:
    return string_pair(table, ids, ids)


def symbol_set_acceptor(table, ids) -> Transducer:
    """One-arc-per-symbol acceptor of the given single symbols."""
    arcs = [(0, sid, sid, 1) for sid in sorted(set(ids))]
    return Transducer(table, 2, 0, {1}, arcs)


def sigma_star(table, ids) -> Transducer:
    """Acceptor of all strings over the given symbol set."""
    arcs = [(0, sid, sid, 0) for sid in sorted(set(ids))]
    return Transducer(table, 1, 0, {0}, arcs)


# ---------------------------------------------------------------------------
# rational operations


def union(a: Transducer, b: Transducer) -> Transducer:
    _check_tables(a, b)
    off_a, off_b = 1, 1 + a.num_states
    arcs = [(0, EPSILON_ID, EPSILON_ID, off_a + a.start),
            (0, EPSILON_ID, EPSILON_ID, off_b + b.start)]
    arcs += [(s + off_a, i, o, d + off_a) for s, i, o, d in a.arcs]
    arcs += [(s + off_b, i, o, d + off_b) for s, i, o, d in b.arcs]
    finals = {f + off_a for f in a.finals} | {f + off_b for f in b.finals}
    return _trim(a.table, 1 + a.num_states + b.num_states, 0, finals, arcs)


def concat(a: Transducer, b: Transducer) -> Transducer:
    _check_tables(a, b)
    off_b = a.num_states
    arcs = list(a.arcs)
    arcs += [(s + off_b, i, o, d + off_b) for s, i, o, d in b.arcs]
    arcs += [(f, EPSILON_ID, EPSILON_ID, b.start + off_b) for f in a.finals]
    finals = {f + off_b for f in b.finals}
    return _trim(a.table, a.num_states + b.num_states, 0, finals, arcs)


def star(a: Transducer) -> Transducer:
    off = 1
    arcs = [(0, EPSILON_ID, EPSILON_ID, a.start + off)]
    arcs += [(s + off, i, o, d + off) for s, i, o, d in a.arcs]
    arcs += [(f + off, EPSILON_ID, EPSILON_ID, 0) for f in a.finals]
    return _trim(a.table, a.num_states + 1, 0, {0}, arcs)


def plus(a: Transducer) -> Transducer:
    return concat(a, star(a))


def option(a: Transducer) -> Transducer:
    return union(a, epsilon_machine(a.table))


# ---------------------------------------------------------------------------
# structural operations


def invert(a: Transducer) -> Transducer:
    arcs = [(s, o, i, d) for s, i, o, d in a.arcs]
    return _trim(a.table, a.num_states, a.start, a.finals, arcs)


def reverse(a: Transducer) -> Transducer:
    off = 1  # fresh start state 0
    arcs = [(d + off, i, o, s + off) for s, i, o, d in a.arcs]
    arcs += [(0, EPSILON_ID, EPSILON_ID, f + off) for f in a.finals]
    return _trim(a.table, a.num_states + 1, 0, {a.start + off}, arcs)


def project(a: Transducer, side: str) -> Transducer:
    if side not in ("upper", "lower", "input", "output"):
        raise ValueError(f"bad projection side {side!r}")
    keep_input = side in ("upper", "input")
    arcs = []
    for s, i, o, d in a.arcs:
        lab = i if keep_input else o
        arcs.append((s, lab, lab, d))
    return _trim(a.table, a.num_states, a.start, a.finals, arcs)


# ---------------------------------------------------------------------------
# composition with the three-state epsilon filter


def compose(a: Transducer, b: Transducer) -> Transducer:
    """Exact relation composition; the epsilon filter guarantees each
    composed path is represented exactly once."""
    _check_tables(a, b)
    b_by_input = {}
    for arc in b.arcs:
        b_by_input.setdefault((arc[0], arc[1]), []).append(arc)

    start = (a.start, b.start, 0)
    index = {start: 0}
    queue = [start]
    arcs = []
    finals = set()
    qi = 0
    while qi < len(queue):
        s1, s2, f = queue[qi]
        src = index[(s1, s2, f)]
        qi += 1
        if s1 in a.finals and s2 in b.finals:
            finals.add(src)

        def add(i, o, dst_key):
            dst = index.get(dst_key)
            if dst is None:
                dst = index[dst_key] = len(index)
                queue.append(dst_key)
            arcs.append((src, i, o, dst))

        for _, i1, o1, d1 in a.arcs_from(s1):
            if o1 != EPSILON_ID:
                for _, _, o2, d2 in b_by_input.get((s2, o1), ()):
                    add(i1, o2, (d1, d2, 0))
            else:
                # a moves alone on epsilon output: filter 0 or 1 -> 1
                if f in (0, 1):
                    add(i1, EPSILON_ID, (d1, s2, 1))
                # both move on epsilon: only from filter 0
                if f == 0:
                    for _, _, o2, d2 in b_by_input.get((s2, EPSILON_ID), ()):
                        add(i1, o2, (d1, d2, 0))
        # b moves alone on epsilon input: filter 0 or 2 -> 2
        if f in (0, 2):
            for _, _, o2, d2 in b_by_input.get((s2, EPSILON_ID), ()):
                add(EPSILON_ID, o2, (s1, d2, 2))

    return _trim(a.table, len(index), 0, finals, arcs)


# ---------------------------------------------------------------------------
# acceptor algebra


def _eps_closure(t, states):
    seen = set(states)
    stack = list(states)
    while stack:
        s = stack.pop()
        for _, i, o, d in t.arcs_from(s):
            if i == EPSILON_ID and o == EPSILON_ID and d not in seen:
                seen.add(d)
                stack.append(d)
    return frozenset(seen)


def determinize(a: Transducer) -> Transducer:
    """Subset construction; acceptors only (epsilon arcs are removed)."""
    _require_acceptor(a)
    closure_of = [None] * a.num_states  # per-state closure, computed once

    def closure(states):
        out = set()
        for s in states:
            c = closure_of[s]
            if c is None:
                c = closure_of[s] = _eps_closure(a, {s})
            out |= c
        return frozenset(out)

    start = closure({a.start})
    index = {start: 0}
    queue = [start]
    arcs = []
    finals = set()
    qi = 0
    while qi < len(queue):
        cur = queue[qi]
        src = index[cur]
        qi += 1
        if cur & a.finals:
            finals.add(src)
        moves = {}
        for s in cur:
            for _, i, _, d in a.arcs_from(s):
                if i != EPSILON_ID:
                    moves.setdefault(i, set()).add(d)
        for lab in sorted(moves):
            nxt = closure(moves[lab])
            dst = index.get(nxt)
            if dst is None:
                dst = index[nxt] = len(index)
                queue.append(nxt)
            arcs.append((src, lab, lab, dst))
    return _trim(a.table, len(index), 0, finals, arcs)


def minimize(a: Transducer) -> Transducer:
    """Hopcroft partition refinement on the determinized acceptor."""
    _require_acceptor(a)
    d = determinize(a)
    if d.num_states == 0:
        return d
    # Complete with a sink so partial transitions refine correctly.
    sink = d.num_states
    n = sink + 1
    syms = sorted({i for _, i, _, _ in d.arcs})
    delta = [dict() for _ in range(n)]
    for src, i, _, dst in d.arcs:
        delta[src][i] = dst
    inverse = {c: [[] for _ in range(n)] for c in syms}
    for q in range(n):
        for c in syms:
            inverse[c][delta[q].get(c, sink)].append(q)

    finals = set(d.finals)
    nonfinals = set(range(n)) - finals
    partition = [s for s in (finals, nonfinals) if s]
    block_of = [0] * n
    for b, block in enumerate(partition):
        for q in block:
            block_of[q] = b
    work = {min(range(len(partition)), key=lambda b: len(partition[b]))} \
        if len(partition) > 1 else set(range(len(partition)))
    while work:
        a_idx = work.pop()
        splitter = list(partition[a_idx])
        for c in syms:
            pred = set()
            for q in splitter:
                pred.update(inverse[c][q])
            touched = {}
            for q in pred:
                touched.setdefault(block_of[q], set()).add(q)
            for b, hit in touched.items():
                if len(hit) == len(partition[b]):
                    continue
                rest = partition[b] - hit
                new_idx = len(partition)
                if len(hit) <= len(rest):
                    partition[b] = rest
                    partition.append(hit)
                    moved = hit
                else:
                    partition[b] = hit
                    partition.append(rest)
                    moved = rest
                for q in moved:
                    block_of[q] = new_idx
                if b in work:
                    work.add(new_idx)
                else:
                    work.add(new_idx if len(partition[new_idx])
                             <= len(partition[b]) else b)

    start_b = block_of[d.start]
    final_bs = {block_of[q] for q in d.finals}
    arcs = {(block_of[src], i, i, block_of[dst])
            for src, i, _, dst in d.arcs}
    return _trim(a.table, len(partition), start_b, final_bs, sorted(arcs))


def complement(a: Transducer, alphabet) -> Transducer:
    """Sigma* minus L(a), relative to an explicit closed alphabet."""
    _require_acceptor(a)
    alphabet = sorted(set(alphabet))
    if EPSILON_ID in alphabet:
        raise ValueError("epsilon cannot be a complement alphabet member")
    d = determinize(a)
    sink = d.num_states
    arcs = list(d.arcs)
    have = {(s, i) for s, i, _, _ in d.arcs}
    for s in range(d.num_states):
        for lab in alphabet:
            if (s, lab) not in have:
                arcs.append((s, lab, lab, sink))
    for lab in alphabet:
        arcs.append((sink, lab, lab, sink))
    finals = {s for s in range(d.num_states + 1) if s not in d.finals}
    return _trim(d.table, d.num_states + 1, d.start, finals, arcs)


def intersect(a: Transducer, b: Transducer) -> Transducer:
    _check_tables(a, b)
    _require_acceptor(a, b)
    da, db = determinize(a), determinize(b)
    start = (da.start, db.start)
    index = {start: 0}
    queue = [start]
    arcs = []
    finals = set()
    qi = 0
    while qi < len(queue):
        s1, s2 = queue[qi]
        src = index[(s1, s2)]
        qi += 1
        if s1 in da.finals and s2 in db.finals:
            finals.add(src)
        moves2 = {i: d for _, i, _, d in db.arcs_from(s2)}
        for _, i, _, d1 in da.arcs_from(s1):
            d2 = moves2.get(i)
            if d2 is None:
                continue
            key = (d1, d2)
            dst = index.get(key)
            if dst is None:
                dst = index[key] = len(index)
                queue.append(key)
            arcs.append((src, i, i, dst))
    return _trim(a.table, len(index), 0, finals, arcs)


def difference(a: Transducer, b: Transducer, alphabet) -> Transducer:
    return intersect(a, complement(b, alphabet))


def reversed_intersect(rules) -> Transducer:
    """Intersect rule acceptors in the reversed domain.

    Language-equal to folding intersect directly; kept as a distinct code
    path because right-to-left determinization of rule automata tends to
    keep intermediate results smaller.
    """
    rules = list(rules)
    if not rules:
        raise ValueError("reversed_intersect needs at least one acceptor")
    _require_acceptor(*rules)
    acc = determinize(reverse(rules[0]))
    for r in rules[1:]:
        acc = minimize(intersect(acc, determinize(reverse(r))))
    return determinize(reverse(acc))


# ---------------------------------------------------------------------------
# path enumeration and decision helpers


def enumerate_paths(a: Transducer, max_input_len: int, max_count: int) -> PathSet:
    """All (input, output) pairs with input length <= max_input_len,
    deterministic shortlex order; cyclic machines are truncated."""
    if max_input_len < 0 or max_count <= 0:
        raise ValueError("enumeration bounds must be positive")
    found = set()
    truncated = False
    # stack entries: (state, input tuple, output tuple, eps_arcs_used)
    stack = [(a.start, (), (), frozenset())]
    while stack:
        state, inp, out, eps_used = stack.pop()
        if state in a.finals:
            if len(found) >= max_count:
                truncated = True
                continue
            found.add((inp, out))
        for arc in reversed(a.arcs_from(state)):
            _, i, o, d = arc
            if i == EPSILON_ID:
                # epsilon-input cycles give infinitely many outputs; cut
                # once a run of non-consuming arcs repeats an arc
                if arc in eps_used:
                    truncated = True
                    continue
                stack.append((d, inp, out + ((o,) if o else ()),
                              eps_used | {arc}))
            else:
                if len(inp) >= max_input_len:
                    truncated = True
                    continue
                stack.append((d, inp + (i,), out + ((o,) if o else ()),
                              frozenset()))
        if len(found) > max_count:
            truncated = True
            break
    pairs = sorted(found, key=lambda p: (len(p[0]), p[0], len(p[1]), p[1]))
    if len(pairs) > max_count:
        pairs = pairs[:max_count]
        truncated = True
    return PathSet(pairs, truncated)


def language(a: Transducer, max_len: int) -> set:
    """Set of accepted strings (id tuples) up to max_len; acceptors only."""
    d = determinize(a)
    out = set()
    stack = [(d.start, ())]
    while stack:
        state, s = stack.pop()
        if state in d.finals:
            out.add(s)
        if len(s) == max_len:
            continue
        for _, i, _, dst in d.arcs_from(state):
            stack.append((dst, s + (i,)))
    return out


def is_empty(a: Transducer) -> bool:
    # machines are trimmed on construction, so emptiness == no finals
    return len(a.finals) == 0


def equivalent_acceptors(a: Transducer, b: Transducer, max_len: int = 8) -> bool:
    """Exact language equivalence for acceptors (difference-emptiness);
    bounded path-set comparison otherwise."""
    _check_tables(a, b)
    if a.is_acceptor() and b.is_acceptor():
        sigma = a.labels() | b.labels()
        return is_empty(difference(a, b, sigma)) and is_empty(
            difference(b, a, sigma)
        )
    pa = enumerate_paths(a, max_len, 1_000_000)
    pb = enumerate_paths(b, max_len, 1_000_000)
    return set(pa.pairs) == set(pb.pairs)
