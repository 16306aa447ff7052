"""Pushdown and finite automata with dual acceptance.

A Pda carries two acceptance sets at once: `finals` accepts finite words
(final control state after the input, any stack) and `buchi` accepts
infinite words (some run visits the set infinitely often).  Infinitary
languages, which mix finite and infinite words, are therefore one object.

Transitions are quintuples (source, input-or-None, stack-top, target,
push), where push replaces the popped top and its first symbol becomes
the new top.  None reads nothing (a silent move).
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

Transition = tuple[Hashable, Optional[str], str, Hashable, tuple[str, ...]]


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Pda:
    states: frozenset
    alphabet: frozenset[str]
    stack_alphabet: frozenset[str]
    initial: Hashable
    initial_stack: str
    transitions: frozenset[Transition]
    finals: frozenset
    buchi: frozenset

    def __post_init__(self):
        if self.initial not in self.states:
            raise AutomatonError("initial state not declared")
        if self.initial_stack not in self.stack_alphabet:
            raise AutomatonError("initial stack symbol not declared")
        if not (self.finals <= self.states and self.buchi <= self.states):
            raise AutomatonError("acceptance states not declared")
        if not self.finals and not self.buchi:
            raise AutomatonError("at least one acceptance set must be nonempty")
        for src, inp, top, dst, push in self.transitions:
            if src not in self.states or dst not in self.states:
                raise AutomatonError(f"transition uses undeclared state: {(src, dst)}")
            if inp is not None and inp not in self.alphabet:
                raise AutomatonError(f"transition reads undeclared letter {inp!r}")
            if top not in self.stack_alphabet or any(s not in self.stack_alphabet for s in push):
                raise AutomatonError("transition uses undeclared stack symbol")
        self._check_silent_loops()

    def _check_silent_loops(self):
        # a silent transition that pushes back exactly its popped top makes
        # no progress; cycles of those would loop without consuming input
        edges = defaultdict(set)
        for src, inp, top, dst, push in self.transitions:
            if inp is None and push == (top,):
                edges[(src, top)].add((dst, top))
        color: dict = {}

        def visit(node):
            color[node] = 1
            for nxt in edges[node]:
                if color.get(nxt) == 1:
                    raise AutomatonError("unproductive silent loop")
                if nxt not in color:
                    visit(nxt)
            color[node] = 2

        for node in list(edges):
            if node not in color:
                visit(node)


def make_pda(states, alphabet, stack_alphabet, initial, initial_stack,
             transitions, finals=(), buchi=()) -> Pda:
    transitions = frozenset(
        (src, inp, top, dst, tuple(push)) for src, inp, top, dst, push in transitions
    )
    return Pda(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        stack_alphabet=frozenset(stack_alphabet),
        initial=initial,
        initial_stack=initial_stack,
        transitions=transitions,
        finals=frozenset(finals),
        buchi=frozenset(buchi),
    )


@dataclass(frozen=True)
class FiniteAutomaton:
    states: frozenset
    alphabet: frozenset[str]
    initial: Hashable
    transitions: frozenset[tuple[Hashable, str, Hashable]]
    finals: frozenset
    buchi: frozenset

    def __post_init__(self):
        if self.initial not in self.states:
            raise AutomatonError("initial state not declared")
        if not (self.finals <= self.states and self.buchi <= self.states):
            raise AutomatonError("acceptance states not declared")
        for src, sym, dst in self.transitions:
            if src not in self.states or dst not in self.states or sym not in self.alphabet:
                raise AutomatonError("transition uses undeclared state or letter")

    def step(self, states: set, symbol: str) -> set:
        out = set()
        for src, sym, dst in self.transitions:
            if sym == symbol and src in states:
                out.add(dst)
        return out


def make_fa(states, alphabet, initial, transitions, finals=(), buchi=()) -> FiniteAutomaton:
    return FiniteAutomaton(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        initial=initial,
        transitions=frozenset(transitions),
        finals=frozenset(finals),
        buchi=frozenset(buchi),
    )


def fa_to_pda(fa: FiniteAutomaton) -> Pda:
    """Lift a finite automaton to a stack-inert pushdown automaton."""
    z = "Z"
    transitions = [(src, sym, z, dst, (z,)) for src, sym, dst in fa.transitions]
    return make_pda(fa.states, fa.alphabet, {z}, fa.initial, z,
                    transitions, fa.finals, fa.buchi)


def trim(pda: Pda) -> Pda:
    """Drop states that are unreachable or cannot reach acceptance."""
    fwd = defaultdict(set)
    bwd = defaultdict(set)
    for src, _inp, _top, dst, _push in pda.transitions:
        fwd[src].add(dst)
        bwd[dst].add(src)

    def closure(seeds, edges):
        seen = set(seeds)
        todo = deque(seeds)
        while todo:
            node = todo.popleft()
            for nxt in edges[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    reach = closure({pda.initial}, fwd)
    live = closure((pda.finals | pda.buchi) & reach, bwd)
    keep = reach & live
    if pda.initial not in keep:
        # empty language; keep a two-state shell so validation still holds
        dead = ("#trim", "dead")
        return make_pda({pda.initial, dead}, pda.alphabet, pda.stack_alphabet,
                        pda.initial, pda.initial_stack, (), finals={dead})
    transitions = [t for t in pda.transitions if t[0] in keep and t[3] in keep]
    stack_syms = {pda.initial_stack}
    for _src, _inp, top, _dst, push in transitions:
        stack_syms.add(top)
        stack_syms.update(push)
    return make_pda(keep, pda.alphabet, stack_syms, pda.initial, pda.initial_stack,
                    transitions, pda.finals & keep, pda.buchi & keep)


def universal_pda(alphabet: Iterable[str]) -> Pda:
    """All finite and infinite words over the alphabet."""
    alphabet = frozenset(alphabet)
    transitions = [("u", a, "Z", "u", ("Z",)) for a in alphabet]
    return make_pda({"u"}, alphabet, {"Z"}, "u", "Z", transitions,
                    finals={"u"}, buchi={"u"})


def empty_pda(alphabet: Iterable[str]) -> Pda:
    """No words at all; the unreachable final state satisfies validation."""
    return make_pda({"i", "f"}, frozenset(alphabet), {"Z"}, "i", "Z", (),
                    finals={"f"})


# -- serialization -----------------------------------------------------
#
# Line oriented, whitespace separated, stable ordering.  State names are
# renumbered q0, q1, ... so structurally equal machines print identically.


def serialize_pda(pda: Pda) -> str:
    order = sorted(pda.states, key=lambda s: (s != pda.initial, str(s)))
    name = {s: f"q{i}" for i, s in enumerate(order)}
    lines = ["wadgeforge-pda v1"]
    for s in order:
        flags = []
        if s == pda.initial:
            flags.append("initial")
        if s in pda.finals:
            flags.append("final")
        if s in pda.buchi:
            flags.append("buchi")
        lines.append(" ".join(["state", name[s]] + flags))
    for a in sorted(pda.alphabet):
        lines.append(f"input {a}")
    for g in sorted(pda.stack_alphabet, key=lambda s: (s != pda.initial_stack, str(s))):
        flags = " initial" if g == pda.initial_stack else ""
        lines.append(f"stack {g}{flags}")
    rows = sorted(
        (name[src], inp if inp is not None else "-", top, name[dst],
         " ".join(push) if push else "-")
        for src, inp, top, dst, push in pda.transitions
    )
    for src, inp, top, dst, push in rows:
        lines.append(f"trans {src} {inp} {top} {dst} -> {push}")
    return "\n".join(lines) + "\n"


def parse_pda(text: str) -> Pda:
    states, alphabet, stack = [], [], []
    initial = initial_stack = None
    finals, buchi, transitions = set(), set(), []
    lines = [l.strip() for l in text.strip().splitlines() if l.strip()]
    if not lines or lines[0] != "wadgeforge-pda v1":
        raise AutomatonError("missing wadgeforge-pda v1 header")
    for line in lines[1:]:
        parts = line.split()
        kind = parts[0]
        if kind == "state":
            states.append(parts[1])
            if "initial" in parts[2:]:
                initial = parts[1]
            if "final" in parts[2:]:
                finals.add(parts[1])
            if "buchi" in parts[2:]:
                buchi.add(parts[1])
        elif kind == "input":
            alphabet.append(parts[1])
        elif kind == "stack":
            stack.append(parts[1])
            if "initial" in parts[2:]:
                initial_stack = parts[1]
        elif kind == "trans":
            src, inp, top, dst, arrow, *push = parts[1:]
            if arrow != "->":
                raise AutomatonError(f"malformed transition line: {line}")
            push_word = () if push == ["-"] else tuple(push)
            transitions.append((src, None if inp == "-" else inp, top, dst, push_word))
        else:
            raise AutomatonError(f"unknown directive {kind!r}")
    if initial is None or initial_stack is None:
        raise AutomatonError("missing initial state or initial stack symbol")
    return make_pda(states, alphabet, stack, initial, initial_stack,
                    transitions, finals, buchi)
