"""Machines for the degree-raising operations on conciliating languages.

build_d_pda      letter-padding closure (ignore a fresh letter d)
build_sum_pda    the ordered sum: a prefix over the small alphabet, then a
                 marker letter choosing the big language or its complement
build_tilde_pda  single-eraser exponentiation (forgiving or strict)
build_bullet_pda iterated exponentiation: prefix-counted, fence-coded
                 staged erasure plus the junk fallback language

The eraser machines guess which input letters will eventually be erased
and buffer them on the stack above the simulated base machine; surviving
letters can only be fed to the base when the buffer is empty, which is
exactly the order the staged semantics demands.

For the iterated machine the buffered victims are stack frames
[content, FLOOR, PAIR^m]: m counts the *smallest* stage index that acted
directly above the frame so far.  An acting stage-j eraser spends its four
fence runs as: B verifies j < m strictly on the victim's own record,
C verifies a victim-eraser's index i < j, D destructively compares j with
the record below (leaving one junk counter per excess D), and E drains the
junk counters and rebuilds that record exactly.  This enforces that inner
erasure pairs always carry strictly larger stage numbers than the pairs
around them, which characterizes the claims realizable by staged
evaluation; wrong guesses die locally.
"""

from __future__ import annotations

from typing import Iterable, Optional

from ..words import Mode
from .core import AutomatonError, Pda, make_pda
from .named import FENCE


def _route_buchi(a: Pda, target, fed=None):
    """Target state for a lifted a-transition, pulsing on Büchi entries."""
    if target in a.buchi:
        return ("FP", target) if fed is None else ("FP", target, fed)
    return ("M", target) if fed is None else ("M", target, fed)


def build_d_pda(a: Pda, d: str) -> Pda:
    """Words x over alphabet(a) + {d} with x minus all d's in L(a)."""
    if d in a.alphabet:
        raise AutomatonError(f"padding letter {d!r} already in the alphabet")
    trans = []
    stack = set(a.stack_alphabet)
    for q, x, top, q2, push in a.transitions:
        tgt = ("P", q2) if q2 in a.buchi else ("N", q2)
        trans.append((("N", q), x, top, tgt, push))
    for q in a.states:
        for top in stack:
            trans.append((("N", q), d, top, ("N", q), (top,)))
    for q in a.buchi:
        for top in stack:
            trans.append((("P", q), None, top, ("N", q), (top,)))
    for f in a.finals:
        for top in stack:
            trans.append((("N", f), d, top, ("TAIL",), (top,)))
    for top in stack:
        trans.append((("TAIL",), d, top, ("TAIL",), (top,)))
    states = {("N", q) for q in a.states} | {("P", q) for q in a.buchi} | {("TAIL",)}
    return make_pda(states, a.alphabet | {d}, stack, ("N", a.initial),
                    a.initial_stack, trans,
                    finals={("N", f) for f in a.finals} | {("TAIL",)},
                    buchi={("P", q) for q in a.buchi} | {("TAIL",)})


def build_sum_pda(big: Pda, big_complement: Pda, small: Pda,
                  plus: Iterable[str], minus: Iterable[str]) -> Pda:
    """The ordered sum of big over small.

    A word belongs when it stays over small's alphabet and lies in small,
    or when its first letter outside small's alphabet is a plus letter and
    the tail lies in big, or a minus letter and the tail lies outside big.
    The complement machine for big must be supplied: pushdown languages do
    not complement, so the minus branch needs its own automaton, widened by
    the caller to the full ambient alphabet.
    """
    plus, minus = frozenset(plus), frozenset(minus)
    if not plus or not minus or plus & minus:
        raise AutomatonError("plus/minus letters must be nonempty and disjoint")
    if (plus | minus) & small.alphabet:
        raise AutomatonError("plus/minus letters must be fresh for the small side")
    z = "#Zs"

    def lift(tag, m: Pda):
        return [((tag, s), x, top, (tag, d), push) for s, x, top, d, push in m.transitions]

    trans = lift("A", small) + lift("B", big) + lift("C", big_complement)
    trans.append((("I",), None, z, ("A", small.initial), (small.initial_stack,)))
    trans.append((("I",), None, z, ("SCAN",), (z,)))
    for x in sorted(small.alphabet):
        trans.append((("SCAN",), x, z, ("SCAN",), (z,)))
    for x in sorted(plus):
        trans.append((("SCAN",), x, z, ("B", big.initial), (big.initial_stack,)))
    for x in sorted(minus):
        trans.append((("SCAN",), x, z, ("C", big_complement.initial),
                      (big_complement.initial_stack,)))
    states = ({("I",), ("SCAN",)}
              | {("A", s) for s in small.states}
              | {("B", s) for s in big.states}
              | {("C", s) for s in big_complement.states})
    return make_pda(
        states,
        small.alphabet | big.alphabet | big_complement.alphabet | plus | minus,
        small.stack_alphabet | big.stack_alphabet | big_complement.stack_alphabet | {z},
        ("I",), z, trans,
        finals=({("A", s) for s in small.finals} | {("B", s) for s in big.finals}
                | {("C", s) for s in big_complement.finals}),
        buchi=({("A", s) for s in small.buchi} | {("B", s) for s in big.buchi}
               | {("C", s) for s in big_complement.buchi}),
    )


def build_tilde_pda(a: Pda, eraser: str, mode: Mode = Mode.TILDE) -> Pda:
    """Single-eraser exponentiation of L(a).

    Letters guessed to be erased are buffered on the stack; the eraser pops
    the newest buffered letter.  Survivors are fed to the base machine,
    possible only with an empty buffer.  In forgiving mode an eraser with
    an empty buffer is a no-op provided nothing was ever fed; in strict
    mode that branch dies (the evaluation would be undefined).
    """
    if eraser in a.alphabet:
        raise AutomatonError("eraser letter must be fresh")
    zt = "#Zt"
    a_tops = set(a.stack_alphabet)
    vic = {c: ("v", c) for c in a.alphabet}
    all_tops = a_tops | {zt} | set(vic.values())
    empty_tops = a_tops | {zt}

    trans = []
    states = set()

    def add(src, x, top, dst, push):
        states.add(src)
        states.add(dst)
        trans.append((src, x, top, dst, push))

    init = ("M", a.initial, False)
    add(("I",), None, zt, init, (a.initial_stack, zt))
    for fed in (False, True):
        for q, x, top, q2, push in a.transitions:
            fed2 = fed or (x is not None)
            src = ("M", q, fed)
            add(src, x, top, _route_buchi(a, q2, push, fed2), push)
        for q2 in a.buchi:
            for top in all_tops:
                add(("FP", q2, fed), None, top, ("M", q2, fed), (top,))
        for q in a.states:
            src = ("M", q, fed)
            for c in sorted(a.alphabet):
                for top in all_tops:
                    add(src, c, top, src, (vic[c], top))
            for c in sorted(a.alphabet):
                add(src, eraser, vic[c], src, ())
            if mode is Mode.TILDE and not fed:
                for top in empty_tops:
                    add(src, eraser, top, src, (top,))
            if q in a.finals:
                for top in all_tops:
                    add(src, None, top, ("T", fed), (top,))
                for top in empty_tops:
                    add(src, None, top, ("FIN",), (top,))
        # tail mode: the base run is frozen; everything left must erase
        tail = ("T", fed)
        for c in sorted(a.alphabet):
            for top in all_tops:
                add(tail, c, top, tail, (vic[c], top))
            add(tail, eraser, vic[c], ("TC", fed), ())
        for top in empty_tops:
            add(("TC", fed), None, top, ("TP", fed), (top,))
            add(("TP", fed), None, top, tail, (top,))
            add(tail, None, top, ("FIN",), (top,))
            if mode is Mode.TILDE and not fed:
                add(tail, eraser, top, ("TP", fed), (top,))
        for c in sorted(a.alphabet):
            add(("TC", fed), None, vic[c], tail, (vic[c],))
    buchi = {s for s in states if s[0] in ("FP", "TP")}
    return make_pda(states, a.alphabet | {eraser}, all_tops | {zt},
                    ("I",), zt, trans, finals={("FIN",)}, buchi=buchi)


# -- iterated exponentiation ------------------------------------------------

LET = "let"     # buffered plain letter: stack symbol ('let', c)
FLOOR = "#fl"   # separates a frame's record from its content
PAIR = "#pr"    # one unit of a frame's stage record
GAM = "#gm"     # fence-content top marker
IDX = "#ix"     # one unit of a buffered eraser's own index
EPSM = "#ep"    # fence-content bottom marker
KT = "#kt"      # transient junk counter during a record rebuild


def build_bullet_pda(a: Pda, junk_language: Optional[Pda] = None) -> Pda:
    """Iterated exponentiation of L(a) over the fence-coded alphabet.

    The word shape is a^n b t.  The staged part simulates the strict
    staged erasure of the decoded t (see the module docstring for the
    frame/record discipline); the junk part (built by the caller from the
    named languages, passed as junk_language) covers every word of the
    enclosing shape containing a miscoded or over-budget fence.
    """
    from .closures import union  # local import to avoid a cycle

    sigma = sorted(a.alphabet)
    reserved = set(FENCE) | {"a", "b"}
    if set(sigma) & reserved:
        raise AutomatonError("base alphabet collides with the fence letters")
    zb = "#Zb"
    vic = {c: (LET, c) for c in sigma}
    frame_tops = {FLOOR, PAIR}
    a_tops = set(a.stack_alphabet)
    empty_tops = a_tops | {zb}
    all_tops = a_tops | {zb} | set(vic.values()) | {FLOOR, PAIR, GAM, IDX, EPSM, KT}

    trans = []
    states = set()

    def add(src, x, top, dst, push):
        states.add(src)
        states.add(dst)
        trans.append((src, x, top, dst, push))

    def main(mode, q):
        return (mode, q, "main")

    def ph(mode, q, phase):
        return (mode, q, phase)

    add(("pre", 1), "a", zb, ("pre", 2), (zb,))
    add(("pre", 2), "a", zb, ("pre", 2), (zb,))
    add(("pre", 2), "b", zb, main("F", a.initial), (a.initial_stack, zb))

    for q, x, top, q2, push in a.transitions:
        tgt = ("FP", q2) if q2 in a.buchi else main("F", q2)
        add(main("F", q), x, top, tgt, push)
    for q2 in a.buchi:
        for top in all_tops:
            add(("FP", q2), None, top, main("F", q2), (top,))
    for q in a.finals:
        for top in all_tops:
            add(main("F", q), None, top, main("T", q), (top,))

    for mode in ("F", "T"):
        for q in a.states:
            m = main(mode, q)
            if mode == "T" and q not in a.finals:
                continue  # tail mode is only entered at accepting controls
            # buffered plain letters: a new frame with an empty record
            for c in sigma:
                for top in all_tops - {GAM, IDX, EPSM, KT}:
                    add(m, c, top, m, (FLOOR, vic[c], top))
            if mode == "F":
                for f in a.finals:
                    if q == f:
                        for top in empty_tops:
                            add(m, None, top, ("FIN",), (top,))
            else:
                for top in empty_tops:
                    add(m, None, top, ("FIN",), (top,))
            # fence start: guess buffered eraser (push) or acting eraser
            for top in all_tops - {GAM, IDX, EPSM, KT}:
                add(m, "α", top, ph(mode, q, "vB0"), (EPSM, top))
            for top in frame_tops:
                add(m, "α", top, ph(mode, q, "aB0"), (top,))

            # buffered eraser: push its own index, one unit per B
            add(ph(mode, q, "vB0"), "B", EPSM, ph(mode, q, "vB"), (IDX, EPSM))
            add(ph(mode, q, "vB"), "B", IDX, ph(mode, q, "vB"), (IDX, IDX))
            add(ph(mode, q, "vB"), "C", IDX, ph(mode, q, "vC"), (IDX,))
            add(ph(mode, q, "vC"), "C", IDX, ph(mode, q, "vC"), (IDX,))
            add(ph(mode, q, "vC"), "D", IDX, ph(mode, q, "vD"), (IDX,))
            add(ph(mode, q, "vD"), "D", IDX, ph(mode, q, "vD"), (IDX,))
            add(ph(mode, q, "vD"), "E", IDX, ph(mode, q, "vE"), (IDX,))
            add(ph(mode, q, "vE"), "E", IDX, ph(mode, q, "vE"), (IDX,))
            add(ph(mode, q, "vE"), "β", IDX, m, (FLOOR, GAM, IDX))

            # acting eraser, B run: strict check against the victim's record
            add(ph(mode, q, "aB0"), "B", PAIR, ph(mode, q, "aBpop"), ())
            add(ph(mode, q, "aB0"), "B", FLOOR, ph(mode, q, "aBvac"), (FLOOR,))
            add(ph(mode, q, "aBpop"), "B", PAIR, ph(mode, q, "aBpop"), ())
            add(ph(mode, q, "aBpop"), None, PAIR, ph(mode, q, "aBdrn"), (PAIR,))
            add(ph(mode, q, "aBdrn"), None, PAIR, ph(mode, q, "aBdrn"), ())
            add(ph(mode, q, "aBdrn"), None, FLOOR, ph(mode, q, "aC0"), ())
            add(ph(mode, q, "aBvac"), "B", FLOOR, ph(mode, q, "aBvac"), (FLOOR,))
            add(ph(mode, q, "aBvac"), None, FLOOR, ph(mode, q, "aC0"), ())

            # C run: pop the victim's content, checking an eraser's index
            add(ph(mode, q, "aC0"), "C", GAM, ph(mode, q, "aCidx"), ())
            for c in sigma:
                add(ph(mode, q, "aC0"), "C", vic[c], ph(mode, q, "aClet"), ())
            add(ph(mode, q, "aCidx"), "C", IDX, ph(mode, q, "aCidx"), ())
            add(ph(mode, q, "aCidx"), None, EPSM, ph(mode, q, "aCfree"), ())
            below = frame_tops | empty_tops
            for st in ("aCfree", "aClet"):
                for top in below:
                    add(ph(mode, q, st), "C", top, ph(mode, q, st), (top,))
                # D run entry decides how the record below is merged
                add(ph(mode, q, st), "D", PAIR, ph(mode, q, "aDpop"), ())
                add(ph(mode, q, st), "D", FLOOR, ph(mode, q, "aDfree"), (FLOOR,))
                for top in empty_tops:
                    add(ph(mode, q, st), "D", top, ph(mode, q, "aDnone"), (top,))
            add(ph(mode, q, "aDpop"), "D", PAIR, ph(mode, q, "aDpop"), ())
            add(ph(mode, q, "aDpop"), "D", FLOOR, ph(mode, q, "aDjunk"), (KT, FLOOR))
            add(ph(mode, q, "aDjunk"), "D", KT, ph(mode, q, "aDjunk"), (KT, KT))
            add(ph(mode, q, "aDfree"), "D", FLOOR, ph(mode, q, "aDfree"), (FLOOR,))
            for top in empty_tops:
                add(ph(mode, q, "aDnone"), "D", top, ph(mode, q, "aDnone"), (top,))

            # E run: rebuild the merged record, then β returns to main
            add(ph(mode, q, "aDpop"), None, PAIR, ph(mode, q, "aDdrn"), (PAIR,))
            add(ph(mode, q, "aDdrn"), None, PAIR, ph(mode, q, "aDdrn"), ())
            add(ph(mode, q, "aDdrn"), None, FLOOR, ph(mode, q, "aEwr"), (FLOOR,))
            add(ph(mode, q, "aDpop"), "E", FLOOR, ph(mode, q, "aEwr"), (PAIR, FLOOR))
            add(ph(mode, q, "aDjunk"), "E", KT, ph(mode, q, "aEpop"), ())
            add(ph(mode, q, "aEpop"), "E", KT, ph(mode, q, "aEpop"), ())
            add(ph(mode, q, "aEpop"), "E", FLOOR, ph(mode, q, "aEwr"), (PAIR, FLOOR))
            add(ph(mode, q, "aDfree"), "E", FLOOR, ph(mode, q, "aEwr"), (PAIR, FLOOR))
            add(ph(mode, q, "aEwr"), "E", PAIR, ph(mode, q, "aEwr"), (PAIR, PAIR))
            add(ph(mode, q, "aEwr"), "E", FLOOR, ph(mode, q, "aEwr"), (PAIR, FLOOR))
            add(ph(mode, q, "aEwr"), "β", PAIR, m, (PAIR,))
            for top in empty_tops:
                add(ph(mode, q, "aDnone"), "E", top, ph(mode, q, "aEnone"), (top,))
                add(ph(mode, q, "aEnone"), "E", top, ph(mode, q, "aEnone"), (top,))
                if mode == "T":
                    add(ph(mode, q, "aEnone"), "β", top, ("TP", q), (top,))
                else:
                    add(ph(mode, q, "aEnone"), "β", top, m, (top,))
            if mode == "T":
                for top in all_tops:
                    add(("TP", q), None, top, main("T", q), (top,))

    alphabet = set(sigma) | set(FENCE) | {"a", "b"}
    buchi = {s for s in states if s[0] in ("FP", "TP")}
    staged = make_pda(states, alphabet, all_tops, ("pre", 1), zb, trans,
                      finals={("FIN",)}, buchi=buchi)
    if junk_language is None:
        return staged
    return union(staged, junk_language)


def bullet_junk_pda(sigma: Iterable[str]) -> Pda:
    """Enclosing-shape words containing a junk fence: L.(square)^{<=w} ∩ R."""
    from .closures import intersect_regular, union  # avoid import cycle
    from .core import trim
    from .named import l_pda, r_fa, x_square

    base = l_pda(sigma)
    square = sorted(x_square(sigma))
    trans = list(base.transitions)
    for f in base.finals:
        for top in base.stack_alphabet:
            trans.append((f, None, top, "#sink", (top,)))
    for s in square:
        for top in base.stack_alphabet:
            trans.append(("#sink", s, top, "#sink", (top,)))
    extended = make_pda(set(base.states) | {"#sink"}, base.alphabet,
                        base.stack_alphabet, base.initial, base.initial_stack,
                        trans, finals=set(base.finals) | {"#sink"},
                        buchi={"#sink"})
    return trim(intersect_regular(extended, r_fa(sigma)))


def build_bullet(a: Pda) -> Pda:
    """The full iterated-exponentiation language of L(a)."""
    return build_bullet_pda(a, bullet_junk_pda(sorted(a.alphabet)))
