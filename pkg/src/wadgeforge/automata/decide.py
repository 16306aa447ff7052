"""Exact acceptance decisions for pushdown automata.

Finite words: the automaton is multiplied with the input positions; the
question becomes configuration reachability in a pushdown system, solved
by backward saturation of a small automaton over configurations.

Ultimately periodic words: the automaton is multiplied with the input
lasso; a run is accepting iff it can reach a configuration whose head
pumps itself while both visiting an accepting control and reading input.
The pumping heads fall out of a saturated pop relation plus a cycle
analysis of the finite head graph.

Independent oracles (a derivation chart for finite words, a bounded
configuration-graph search for lassos) live here too; the test suite
cross-checks the saturation answers against them.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from typing import Hashable, Iterable, Optional, Sequence

from ..words import Word
from .core import Pda

# A system rule is (control, top, control', push, reads) with |push| <= 2
# after normalization; `reads` marks rules that consume an input letter.
Rule = tuple[Hashable, str, Hashable, tuple[str, ...], bool]

_fresh_counter = itertools.count()


def _normalize(rules: Iterable[Rule]) -> list[Rule]:
    out: list[Rule] = []
    for p, top, q, push, reads in rules:
        if len(push) <= 2:
            out.append((p, top, q, push, reads))
            continue
        # build the pushed word bottom-up through fresh intermediate states
        mid = ("#norm", next(_fresh_counter))
        out.append((p, top, (mid, 0), (push[-1],), reads))
        for i in range(len(push) - 2, 0, -1):
            out.append(((mid, len(push) - 2 - i), push[i + 1], (mid, len(push) - 1 - i),
                        (push[i], push[i + 1]), False))
        out.append(((mid, len(push) - 2), push[1], q, (push[0], push[1]), False))
    return out


class _PAuto:
    """Automaton over configurations: edges control --symbol--> node."""

    def __init__(self):
        self.edges: set[tuple] = set()
        self.by_src: dict[tuple, set] = defaultdict(set)
        self.finals: set = set()
        self.worklist: deque = deque()

    def add(self, p, sym, q) -> None:
        edge = (p, sym, q)
        if edge not in self.edges:
            self.edges.add(edge)
            self.by_src[(p, sym)].add(q)
            self.worklist.append(edge)

    def accepts_single(self, p, sym) -> bool:
        return bool(self.by_src[(p, sym)] & self.finals)


def _saturate(rules: Sequence[Rule], pa: _PAuto) -> None:
    """Backward saturation: afterwards pa accepts pre* of its start set."""
    by_pop: dict[tuple, list] = defaultdict(list)
    by_one: dict[tuple, list] = defaultdict(list)
    by_two_first: dict[tuple, list] = defaultdict(list)
    waiting: dict[tuple, set] = defaultdict(set)
    for rule in rules:
        p, top, q, push, _reads = rule
        if len(push) == 0:
            pa.add(p, top, q)
        elif len(push) == 1:
            by_one[(q, push[0])].append((p, top))
        else:
            by_two_first[(q, push[0])].append((p, top, push[1]))
    while pa.worklist:
        x, sym, y = pa.worklist.popleft()
        for p, top in by_one[(x, sym)]:
            pa.add(p, top, y)
        for p, top, g2 in by_two_first[(x, sym)]:
            waiting[(y, g2)].add((p, top))
            for s in list(pa.by_src[(y, g2)]):
                pa.add(p, top, s)
        for p, top in list(waiting[(x, sym)]):
            pa.add(p, top, y)


def _finite_rules(pda: Pda, word: Sequence[str]) -> list[Rule]:
    n = len(word)
    rules: list[Rule] = []
    for p, a, top, q, push in pda.transitions:
        if a is None:
            for i in range(n + 1):
                rules.append((((p, i)), top, (q, i), push, False))
        else:
            for i in range(n):
                if word[i] == a:
                    rules.append((((p, i)), top, (q, i + 1), push, True))
    return _normalize(rules)


def accepts_finite(pda: Pda, word: Sequence[str]) -> bool:
    """Some run over the whole word ends in a final state (any stack)."""
    if not pda.finals:
        return False
    n = len(word)
    rules = _finite_rules(pda, word)
    pa = _PAuto()
    univ = "#univ"
    pa.finals.add(univ)
    for f in pda.finals:
        pa.finals.add((f, n))  # run may end with an empty stack
        for g in pda.stack_alphabet:
            pa.add((f, n), g, univ)
    for g in pda.stack_alphabet:
        pa.add(univ, g, univ)
    _saturate(rules, pa)
    return pa.accepts_single((pda.initial, 0), pda.initial_stack)


# -- lasso acceptance ---------------------------------------------------


def _lasso_rules(pda: Pda, u: Sequence[str], v: Sequence[str]) -> list[Rule]:
    letters = tuple(u) + tuple(v)
    total = len(letters)
    wrap = len(u)

    def nxt(i: int) -> int:
        return i + 1 if i + 1 < total else wrap

    rules: list[Rule] = []
    for p, a, top, q, push in pda.transitions:
        if a is None:
            for i in range(total):
                rules.append(((p, i), top, (q, i), push, False))
        else:
            for i in range(total):
                if letters[i] == a:
                    rules.append(((p, i), top, (q, nxt(i)), push, True))
    return _normalize(rules)


def _pop_relation(rules: Sequence[Rule], is_g) -> dict:
    """Facts (p, top, q) -> set of (g, r): (p,[top]) can empty onto q.

    g records an accepting-control visit anywhere along the run (endpoints
    included), r records that at least one input letter was consumed.
    """
    facts: dict[tuple, set] = defaultdict(set)
    by_head: dict[tuple, set] = defaultdict(set)   # (p, top) -> {(q, g, r)}
    by_exact: dict[tuple, set] = defaultdict(set)  # (p, top, q) -> {(g, r)}
    worklist: deque = deque()

    def add(p, top, q, g, r):
        if (g, r) not in facts[(p, top, q)]:
            facts[(p, top, q)].add((g, r))
            by_head[(p, top)].add((q, g, r))
            by_exact[(p, top, q)].add((g, r))
            worklist.append((p, top, q, g, r))

    one_rules: dict[tuple, list] = defaultdict(list)
    two_first: dict[tuple, list] = defaultdict(list)
    two_second: dict[str, list] = defaultdict(list)
    for rule in rules:
        p, top, q, push, reads = rule
        base_g = is_g(p) or is_g(q)
        if len(push) == 0:
            add(p, top, q, base_g, reads)
        elif len(push) == 1:
            one_rules[(q, push[0])].append((p, top, reads))
        else:
            two_first[(q, push[0])].append(rule)
            two_second[push[1]].append(rule)
    while worklist:
        x, sym, y, g, r = worklist.popleft()
        for p, top, reads in one_rules[(x, sym)]:
            add(p, top, y, g or is_g(p), r or reads)
        for rule in two_first[(x, sym)]:
            # the new fact is the first hop; compose with known second hops
            p, top, q, push, reads = rule
            for (t2, g2, r2) in list(by_head[(y, push[1])]):
                add(p, top, t2, g or g2 or is_g(p), r or r2 or reads)
        for rule in two_second[sym]:
            # the new fact is the second hop; find matching first hops
            p, top, q, push, reads = rule
            for (g1, r1) in list(by_exact[(q, push[0], x)]):
                add(p, top, y, g1 or g or is_g(p), r1 or r or reads)
    return facts


def _head_graph(rules: Sequence[Rule], facts: dict, is_g) -> dict:
    by_head: dict[tuple, list] = defaultdict(list)
    for (p, top, tgt), flags in facts.items():
        for g, r in flags:
            by_head[(p, top)].append((tgt, g, r))
    edges: dict[tuple, list] = defaultdict(list)
    for p, top, q, push, reads in rules:
        base_g = is_g(p) or is_g(q)
        if len(push) >= 1:
            edges[(p, top)].append(((q, push[0]), base_g, reads))
        if len(push) == 2:
            for (t, g, r) in by_head[(q, push[0])]:
                edges[(p, top)].append(((t, push[1]), g or is_g(p), r or reads))
    return edges


def _sccs(nodes, edges) -> list[list]:
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[list] = []
    counter = itertools.count()

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for (nxt, _g, _r) in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                result.append(comp)
    return result


def _repeating_heads(rules: Sequence[Rule], is_g) -> set:
    facts = _pop_relation(rules, is_g)
    edges = _head_graph(rules, facts, is_g)
    nodes = set(edges)
    for outs in edges.values():
        nodes.update(head for head, _g, _r in outs)
    repeating: set = set()
    for comp in _sccs(nodes, edges):
        members = set(comp)
        has_g = has_r = has_edge = False
        for node in comp:
            for (tgt, g, r) in edges.get(node, ()):
                if tgt in members:
                    has_edge = True
                    has_g = has_g or g
                    has_r = has_r or r
        if has_edge and has_g and has_r:
            repeating.update(members)
    return repeating


def accepts_up(pda: Pda, u: Sequence[str], v: Sequence[str]) -> bool:
    """Some run over u.v^w visits a Büchi control infinitely often."""
    if not pda.buchi or not v:
        return False
    rules = _lasso_rules(pda, u, v)
    buchi = pda.buchi

    def is_g(control) -> bool:
        return isinstance(control, tuple) and len(control) == 2 and control[0] in buchi

    repeating = _repeating_heads(rules, is_g)
    if not repeating:
        return False
    pa = _PAuto()
    univ = "#univ"
    pa.finals.add(univ)
    syms = {top for _p, top, _q, _push, _r in rules}
    syms.update(s for _p, _t, _q, push, _r in rules for s in push)
    syms.add(pda.initial_stack)
    for (q, top) in repeating:
        pa.add(q, top, univ)
    for g in syms:
        pa.add(univ, g, univ)
    _saturate(rules, pa)
    return pa.accepts_single((pda.initial, 0), pda.initial_stack)


# -- word-level front end ------------------------------------------------


def word_symbols(word: Word) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return (tuple(l.text() for l in word.stem),
            tuple(l.text() for l in word.period))


def accepts_word(pda: Pda, word: Word) -> bool:
    u, v = word_symbols(word)
    if word.is_finite:
        return accepts_finite(pda, u)
    return accepts_up(pda, u, v)


# -- independent oracles --------------------------------------------------


def accepts_finite_chart(pda: Pda, word: Sequence[str]) -> bool:
    """Derivation-chart decision: items (i, p, top, j, q) mean that from
    (p, [top]) the automaton can read word[i:j] and empty the stack in q.
    Acceptance goes through an explicit drain from final states."""
    if not pda.finals:
        return False
    n = len(word)
    drain = "#drain"
    raw = [(p, a, top, q, push) for p, a, top, q, push in pda.transitions]
    for f in pda.finals:
        for g in pda.stack_alphabet:
            raw.append((f, None, g, drain, ()))
    for g in pda.stack_alphabet:
        raw.append((drain, None, g, drain, ()))
    rules = []
    for p, a, top, q, push in raw:
        chained = _normalize([(p, top, q, tuple(push), a is not None)])
        for i, (pp, tt, qq, ww, reads) in enumerate(chained):
            rules.append((pp, a if reads else None, tt, qq, ww))

    items: set[tuple] = set()

    def starts(a):
        if a is None:
            return [(i, i) for i in range(n + 1)]
        return [(i, i + 1) for i in range(n) if word[i] == a]

    changed = True
    while changed:
        changed = False
        for p, a, top, q, push in rules:
            for (i, i2) in starts(a):
                if len(push) == 0:
                    if (i, p, top, i2, q) not in items:
                        items.add((i, p, top, i2, q))
                        changed = True
                elif len(push) == 1:
                    for item in list(items):
                        if item[0] == i2 and item[1] == q and item[2] == push[0]:
                            new = (i, p, top, item[3], item[4])
                            if new not in items:
                                items.add(new)
                                changed = True
                else:
                    for item in list(items):
                        if item[0] == i2 and item[1] == q and item[2] == push[0]:
                            k, t = item[3], item[4]
                            for item2 in list(items):
                                if item2[0] == k and item2[1] == t and item2[2] == push[1]:
                                    new = (i, p, top, item2[3], item2[4])
                                    if new not in items:
                                        items.add(new)
                                        changed = True
    targets = set(pda.finals) | {drain}
    return any((0, pda.initial, pda.initial_stack, n, x) in items for x in targets)


def accepts_up_bounded(pda: Pda, u: Sequence[str], v: Sequence[str],
                       max_configs: int = 20000, max_stack: int = 50) -> Optional[bool]:
    """Bounded configuration-graph search; None when inconclusive."""
    if not pda.buchi or not v:
        return False
    letters = tuple(u) + tuple(v)
    total = len(letters)
    wrap = len(u)

    def nxt(i):
        return i + 1 if i + 1 < total else wrap

    by_read = defaultdict(list)
    by_silent = defaultdict(list)
    for p, a, top, q, push in pda.transitions:
        if a is None:
            by_silent[(p, top)].append((q, push))
        else:
            by_read[(p, a, top)].append((q, push))

    init = ((pda.initial, 0), (pda.initial_stack,))
    nodes = {init}
    edges: dict = defaultdict(list)
    todo = deque([init])
    truncated = False
    while todo:
        cfg = todo.popleft()
        (state, i), stack = cfg
        if not stack:
            continue
        succs = []
        for q, push in by_silent[(state, stack[0])]:
            succs.append((((q, i), push + stack[1:]), False))
        for q, push in by_read[(state, letters[i], stack[0])]:
            succs.append((((q, nxt(i)), push + stack[1:]), True))
        for nxt_cfg, reads in succs:
            if len(nxt_cfg[1]) > max_stack:
                truncated = True
                continue
            edges[cfg].append((nxt_cfg, reads))
            if nxt_cfg not in nodes:
                if len(nodes) >= max_configs:
                    truncated = True
                    continue
                nodes.add(nxt_cfg)
                todo.append(nxt_cfg)

    graph = {cfg: [(dst, False, reads) for dst, reads in outs]
             for cfg, outs in edges.items()}
    for comp in _sccs(nodes, graph):
        members = set(comp)
        has_edge = has_read = False
        for node in comp:
            for (dst, _g, reads) in graph.get(node, ()):
                if dst in members:
                    has_edge = True
                    has_read = has_read or reads
        has_buchi = any(node[0][0] in pda.buchi for node in comp)
        if has_edge and has_read and has_buchi:
            return True
    return None if truncated else False


def enumerate_accepted(pda: Pda, maxlen: int,
                       alphabet: Optional[Iterable[str]] = None,
                       max_configs: int = 2_000_000) -> set[tuple[str, ...]]:
    """All accepted finite words up to maxlen, by shared-prefix search."""
    letters = sorted(alphabet if alphabet is not None else pda.alphabet)
    by_read = defaultdict(list)
    by_silent = defaultdict(list)
    for p, a, top, q, push in pda.transitions:
        if a is None:
            by_silent[(p, top)].append((q, push))
        else:
            by_read[(p, a, top)].append((q, push))
    budget = [max_configs]
    stack_cap = 4 * maxlen + 12

    def closure(configs: frozenset) -> frozenset:
        seen = set(configs)
        todo = list(configs)
        while todo:
            state, stack = todo.pop()
            if not stack:
                continue
            for q, push in by_silent[(state, stack[0])]:
                nxt_cfg = (q, push + stack[1:])
                if len(nxt_cfg[1]) > stack_cap:
                    raise RuntimeError("stack growth exceeds enumeration cap")
                if nxt_cfg not in seen:
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise RuntimeError("enumeration config budget exceeded")
                    seen.add(nxt_cfg)
                    todo.append(nxt_cfg)
        return frozenset(seen)

    accepted: set[tuple[str, ...]] = set()
    start = closure(frozenset({(pda.initial, (pda.initial_stack,))}))
    work = [((), start)]
    while work:
        prefix, configs = work.pop()
        if any(state in pda.finals for state, _stack in configs):
            accepted.add(prefix)
        if len(prefix) == maxlen:
            continue
        for a in letters:
            step = set()
            for state, stack in configs:
                if not stack:
                    continue
                for q, push in by_read[(state, a, stack[0])]:
                    step.add((q, push + stack[1:]))
            if step:
                work.append((prefix + (a,), closure(frozenset(step))))
    return accepted
