"""Language closure constructions on pushdown automata.

Each construction realizes a semantic operation on finitary/infinitary
languages: finite union, intersection with a regular language (both
acceptance modes at once), left concatenation by a regular language of
finite words, and letter-by-letter substitution with nonempty finitary
context-free images.
"""

from __future__ import annotations

from typing import Mapping

from .core import AutomatonError, FiniteAutomaton, Pda, make_pda
from .decide import accepts_finite


def _lift(tag, transitions):
    return [((tag, s), a, top, (tag, d), push) for s, a, top, d, push in transitions]


def union(p: Pda, q: Pda) -> Pda:
    """Words accepted by either machine (finite and infinite alike)."""
    z = "#Zu"
    states = {("u", 0)} | {("L", s) for s in p.states} | {("R", s) for s in q.states}
    transitions = _lift("L", p.transitions) + _lift("R", q.transitions)
    transitions.append(((("u", 0)), None, z, ("L", p.initial), (p.initial_stack,)))
    transitions.append(((("u", 0)), None, z, ("R", q.initial), (q.initial_stack,)))
    return make_pda(
        states,
        p.alphabet | q.alphabet,
        p.stack_alphabet | q.stack_alphabet | {z},
        ("u", 0),
        z,
        transitions,
        finals={("L", s) for s in p.finals} | {("R", s) for s in q.finals},
        buchi={("L", s) for s in p.buchi} | {("R", s) for s in q.buchi},
    )


def _copy_update(c, p_state, f_state, p_buchi, f_buchi):
    base = 1 if c == 0 else c
    if base == 1 and p_state in p_buchi:
        base = 2
    if base == 2 and f_state in f_buchi:
        base = 0  # switch completed; this is the marked copy
    return base


def intersect_regular(p: Pda, r: FiniteAutomaton) -> Pda:
    """Product with a finite automaton.

    Finite words need both final sets; infinite words need both Büchi sets
    infinitely often, tracked with the usual two-copy switch (copy 0 marks
    a completed switch and carries the Büchi condition).
    """
    fa_step = {}
    for src, sym, dst in r.transitions:
        fa_step.setdefault((src, sym), set()).add(dst)
    transitions = []
    states = set()
    initial = (p.initial, r.initial, 1)
    states.add(initial)
    todo = [initial]
    trans_by_state = {}
    for t in p.transitions:
        trans_by_state.setdefault(t[0], []).append(t)
    while todo:
        state = todo.pop()
        s, f, c = state
        for _src, a, top, dst, push in trans_by_state.get(s, ()):
            if a is None:
                targets = [(dst, f)]
            else:
                targets = [(dst, f2) for f2 in fa_step.get((f, a), ())]
            for s2, f2 in targets:
                c2 = _copy_update(c, s2, f2, p.buchi, r.buchi)
                nxt = (s2, f2, c2)
                if nxt not in states:
                    states.add(nxt)
                    todo.append(nxt)
                transitions.append((state, a, top, nxt, push))
    finals = {st for st in states if st[0] in p.finals and st[1] in r.finals}
    buchi = {st for st in states if st[2] == 0}
    if not finals and not buchi:
        return make_pda(states | {("#dead",)}, p.alphabet, p.stack_alphabet,
                        initial, p.initial_stack, transitions, finals={("#dead",)})
    return make_pda(states, p.alphabet, p.stack_alphabet, initial,
                    p.initial_stack, transitions, finals, buchi)


def concat_left_regular(r: FiniteAutomaton, p: Pda) -> Pda:
    """L(r).L(p) for a regular prefix language of finite words."""
    if r.buchi:
        raise AutomatonError("prefix language must be finitary")
    z = "#Zc"
    states = {("F", f) for f in r.states} | {("P", s) for s in p.states}
    transitions = [(("F", src), sym, z, ("F", dst), (z,)) for src, sym, dst in r.transitions]
    for f in r.finals:
        transitions.append((("F", f), None, z, ("P", p.initial), (p.initial_stack,)))
    transitions += _lift("P", p.transitions)
    return make_pda(
        states,
        r.alphabet | p.alphabet,
        p.stack_alphabet | {z},
        ("F", r.initial),
        z,
        transitions,
        finals={("P", s) for s in p.finals},
        buchi={("P", s) for s in p.buchi},
    )


def substitute(p: Pda, images: Mapping[str, Pda]) -> Pda:
    """Replace each letter a by the finitary language of images[a].

    Every image must be free of the empty word (checked); the outer
    machine's own stack survives a sub-parse because each sub-machine works
    above the outer top on tagged symbols and drains them afterwards.
    """
    for a, sub in images.items():
        if accepts_finite(sub, ()):
            raise AutomatonError(f"image of {a!r} contains the empty word")
        if not sub.finals:
            raise AutomatonError(f"image of {a!r} accepts no finite words")

    def tag(a, sym):
        return ("sub", a, sym)

    states = {("M", s) for s in p.states}
    transitions = []
    stack = set(p.stack_alphabet)
    alphabet = set(p.alphabet) - set(images)
    outer = sorted(p.transitions, key=str)
    for i, (q, a, top, q2, push) in enumerate(outer):
        if a not in images:
            transitions.append((("M", q), a, top, ("M", q2), push))
            continue
        sub = images[a]
        alphabet |= sub.alphabet
        stack |= {tag(a, g) for g in sub.stack_alphabet}
        entry = ("S", i, sub.initial)
        states.add(entry)
        transitions.append((("M", q), None, top, entry, (tag(a, sub.initial_stack), top)))
        for ss, sa, stop, sd, spush in sub.transitions:
            states.add(("S", i, ss))
            states.add(("S", i, sd))
            transitions.append((("S", i, ss), sa, tag(a, stop), ("S", i, sd),
                                tuple(tag(a, g) for g in spush)))
        drain = ("D", i)
        states.add(drain)
        for mf in sub.finals:
            states.add(("S", i, mf))
            for g in sub.stack_alphabet:
                transitions.append((("S", i, mf), None, tag(a, g), drain, ()))
            # the sub-run may have emptied its own block already
            transitions.append((("S", i, mf), None, top, ("M", q2), push))
        for g in sub.stack_alphabet:
            transitions.append((drain, None, tag(a, g), drain, ()))
        transitions.append((drain, None, top, ("M", q2), push))
    return make_pda(
        states,
        alphabet,
        stack,
        ("M", p.initial),
        p.initial_stack,
        transitions,
        finals={("M", s) for s in p.finals},
        buchi={("M", s) for s in p.buchi},
    )
