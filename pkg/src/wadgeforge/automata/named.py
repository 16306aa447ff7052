"""The named finitary and infinitary languages used by the constructions.

Every machine comes with a matching definitional predicate (`pred_*`) so
the automata can be checked against the set definitions word by word.
Alphabet conventions: `sigma` is the base alphabet (plain symbols), the
fence letters are α B C D E β, the outer prefix letters are a and b, and
the two grid separators reuse C and B.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .closures import concat_left_regular, intersect_regular, substitute, union
from .core import FiniteAutomaton, Pda, fa_to_pda, make_fa, make_pda, trim

FENCE = ("α", "β", "B", "C", "D", "E")


def x_square(sigma: Iterable[str]) -> frozenset[str]:
    return frozenset(sigma) | frozenset(FENCE)


# -- counting languages over sigma + separators --------------------------


def d1_pda(sigma: Iterable[str]) -> Pda:
    """u B v with u, v separator-free and equally long."""
    sigma = sorted(sigma)
    trans = []
    for s in sigma:
        trans += [("u", s, "Z", "u", ("T", "Z")), ("u", s, "T", "u", ("T", "T")),
                  ("v", s, "T", "v", ())]
    trans += [("u", "B", "Z", "v", ("Z",)), ("u", "B", "T", "v", ("T",)),
              ("v", None, "Z", "acc", ("Z",))]
    return make_pda({"u", "v", "acc"}, set(sigma) | {"B", "C"}, {"Z", "T"},
                    "u", "Z", trans, finals={"acc"})


def pred_d1(word: Sequence[str], sigma: frozenset[str]) -> bool:
    if any(l not in sigma | {"B"} for l in word):
        return False
    if word.count("B") != 1:
        return False
    i = word.index("B")
    return i == len(word) - 1 - i


def d2_pda(sigma: Iterable[str]) -> Pda:
    """w C z with w, z separator-free and |z| = |w| + 1."""
    sigma = sorted(sigma)
    trans = []
    for s in sigma:
        trans += [("w", s, "Z", "w", ("T", "Z")), ("w", s, "T", "w", ("T", "T")),
                  ("z", s, "T", "z", ()), ("z", s, "Z", "acc", ("Z",))]
    trans += [("w", "C", "Z", "z", ("Z",)), ("w", "C", "T", "z", ("T",))]
    return make_pda({"w", "z", "acc"}, set(sigma) | {"B", "C"}, {"Z", "T"},
                    "w", "Z", trans, finals={"acc"})


def pred_d2(word: Sequence[str], sigma: frozenset[str]) -> bool:
    if any(l not in sigma | {"C"} for l in word):
        return False
    if word.count("C") != 1:
        return False
    i = word.index("C")
    return len(word) - 1 - i == i + 1


def d_pda(sigma: Iterable[str]) -> Pda:
    return trim(union(d1_pda(sigma), d2_pda(sigma)))


# -- separator-count language --------------------------------------------


def c_pda(sigma: Iterable[str]) -> Pda:
    """Words w.u with k separators in w and a trailing run u of length != k+1.

    The trailing run starts right after the last separator, so the split
    into counting phase and comparison phase may only be guessed there
    (state p: at word start or just after a separator).
    """
    sigma = sorted(sigma)
    trans = []
    for src in ("p", "q"):
        for sep in ("C", "B"):
            trans += [(src, sep, "Z", "p", ("K", "Z")), (src, sep, "K", "p", ("K", "K"))]
        for s in sigma:
            trans += [(src, s, "Z", "q", ("Z",)), (src, s, "K", "q", ("K",))]
    for s in sigma:
        trans += [("le", s, "K", "le", ()), ("le", s, "Z", "eq", ("Z",)),
                  ("eq", s, "Z", "gt", ("Z",)), ("gt", s, "Z", "gt", ("Z",))]
    trans += [("p", None, "Z", "le", ("Z",)), ("p", None, "K", "le", ("K",))]
    return make_pda({"p", "q", "le", "eq", "gt"}, set(sigma) | {"B", "C"},
                    {"Z", "K"}, "p", "Z", trans, finals={"le", "gt"})


def pred_c(word: Sequence[str], sigma: frozenset[str]) -> bool:
    k = sum(1 for l in word if l in ("C", "B"))
    tail = 0
    for l in reversed(word):
        if l in ("C", "B"):
            break
        tail += 1
    return tail != k + 1


# -- fence languages over a, b and the square alphabet --------------------


def _run_counter(letter: str, sigma_rest: list[str]) -> Pda:
    """a^n b u letter^j with u over the square alphabet and j > n."""
    square = sorted(set(sigma_rest) | set(FENCE))
    trans = [("a1", "a", "Z", "a2", ("N", "Z")),
             ("a2", "a", "N", "a2", ("N", "N")),
             ("a2", "b", "N", "mid", ("N",))]
    for s in square:
        trans.append(("mid", s, "N", "mid", ("N",)))
    trans.append(("mid", None, "N", "pop", ("N",)))
    trans += [("pop", letter, "N", "pop", ()),
              ("pop", letter, "Z", "over", ("Z",)),
              ("over", letter, "Z", "over", ("Z",))]
    return make_pda({"a1", "a2", "mid", "pop", "over"},
                    set(square) | {"a", "b"}, {"Z", "N"},
                    "a1", "Z", trans, finals={"over"})


def lb_pda(sigma):
    return _run_counter("B", sorted(sigma))


def lc_pda(sigma):
    return _run_counter("C", sorted(sigma))


def ld_pda(sigma):
    return _run_counter("D", sorted(sigma))


def le_pda(sigma):
    return _run_counter("E", sorted(sigma))


def pred_run_counter(word: Sequence[str], letter: str, sigma: frozenset[str]) -> bool:
    n = 0
    while n < len(word) and word[n] == "a":
        n += 1
    if n < 1 or n >= len(word) or word[n] != "b":
        return False
    rest = word[n + 1:]
    square = x_square(sigma)
    if any(l not in square for l in rest):
        return False
    j = 0
    for l in reversed(rest):
        if l != letter:
            break
        j += 1
    return j > n


def _fence_mismatch(first: str, second: str, sigma: Iterable[str]) -> Pda:
    """u α B^j C^k D^l E^m β with unequal adjacent runs of first/second.

    The prefix u is a^+ b followed by anything over the square alphabet.
    After a guessed α the machine pushes one counter per `first` letter and
    pops per `second` letter; only branches witnessing an inequality reach
    the final state, with the trailing runs checked for shape alone.
    """
    square = sorted(x_square(sigma))
    order = ["B", "C", "D", "E"]
    fi = order.index(first)
    si = fi + 1
    assert order[si] == second

    trans = [("a1", "a", "Z", "a2", ("Z",)),
             ("a2", "a", "Z", "a2", ("Z",)),
             ("a2", "b", "Z", "mid", ("Z",))]
    for s in square:
        trans.append(("mid", s, "Z", "mid", ("Z",)))
    trans.append(("mid", "α", "Z", "alpha", ("Z",)))

    def entry(i: int, src: str, tops=("Z",)):
        """Transitions entering run i (consuming one of its letters)."""
        letter = order[i]
        out = []
        for top in tops:
            if i == fi:
                out.append((src, letter, top, ("run", i), ("P", top)))
            elif i == si:
                # only reachable with P on top: the first run pushed >= 1
                out.append((src, letter, "P", ("pop", i), ()))
            else:
                tag = "pre" if i < fi else "post"
                out.append((src, letter, top, (tag, i), (top,)))
        return out

    # chain of runs: alpha -> run 0 -> ... -> run 3 -> fin
    trans += entry(0, "alpha")
    for i in range(4):
        letter = order[i]
        nxt = order[i + 1] if i < 3 else "β"
        if i < fi:
            trans.append((("pre", i), letter, "Z", ("pre", i), ("Z",)))
            trans += entry(i + 1, ("pre", i))
        elif i == fi:
            trans += [(("run", i), letter, "P", ("run", i), ("P", "P"))]
            trans += entry(i + 1, ("run", i), tops=("P",))
        elif i == si:
            trans += [(("pop", i), letter, "P", ("pop", i), ()),
                      (("pop", i), letter, "Z", ("less", i), ("Z",)),
                      (("less", i), letter, "Z", ("less", i), ("Z",))]
            # leaving with leftovers (top P) or after overshoot witnesses
            # the inequality; leaving on Z from `pop` means equality: dead
            for src, top in ((("pop", i), "P"), (("less", i), "Z")):
                if i < 3:
                    dst = ("post", i + 1)
                else:
                    dst = "fin"
                trans.append((src, nxt, top, dst, (top,)))
        else:
            for top in ("Z", "P"):
                trans.append((("post", i), letter, top, ("post", i), (top,)))
                dst = ("post", i + 1) if i < 3 else "fin"
                trans.append((("post", i), nxt, top, dst, (top,)))
    states = {t[0] for t in trans} | {t[3] for t in trans} | {"fin"}
    return make_pda(states, set(square) | {"a", "b"}, {"Z", "P"},
                    "a1", "Z", trans, finals={"fin"})


def _fence_parse(word: Sequence[str]):
    """Run lengths of a final complete fence, or None."""
    if not word or word[-1] != "β":
        return None
    i = len(word) - 2
    runs = []
    for letter in ("E", "D", "C", "B"):
        count = 0
        while i >= 0 and word[i] == letter:
            count += 1
            i -= 1
        if count == 0:
            return None
        runs.append(count)
    if i < 0 or word[i] != "α":
        return None
    m, l, k, j = runs
    return (j, k, l, m), i  # type: ignore[return-value]


def _pred_fence(word: Sequence[str], idx1: int, idx2: int, sigma: frozenset[str]) -> bool:
    parsed = _fence_parse(word)
    if parsed is None:
        return False
    runs, alpha_pos = parsed
    prefix = word[:alpha_pos]
    n = 0
    while n < len(prefix) and prefix[n] == "a":
        n += 1
    if n < 1 or n >= len(prefix) or prefix[n] != "b":
        return False
    square = x_square(sigma)
    if any(l not in square for l in prefix[n + 1:]):
        return False
    return runs[idx1] != runs[idx2]


def lbc_pda(sigma):
    return _fence_mismatch("B", "C", sigma)


def pred_lbc(word, sigma):
    return _pred_fence(word, 0, 1, sigma)


def lcd_pda(sigma):
    return _fence_mismatch("C", "D", sigma)


def pred_lcd(word, sigma):
    return _pred_fence(word, 1, 2, sigma)


def lde_pda(sigma):
    return _fence_mismatch("D", "E", sigma)


def pred_lde(word, sigma):
    return _pred_fence(word, 2, 3, sigma)


def l_pda(sigma) -> Pda:
    """Union of the seven junk-witness languages."""
    machines = [lb_pda(sigma), lc_pda(sigma), ld_pda(sigma), le_pda(sigma),
                lbc_pda(sigma), lcd_pda(sigma), lde_pda(sigma)]
    out = machines[0]
    for m in machines[1:]:
        out = union(out, m)
    return trim(out)


def pred_l(word, sigma):
    return (any(pred_run_counter(word, x, sigma) for x in ("B", "C", "D", "E"))
            or pred_lbc(word, sigma) or pred_lcd(word, sigma) or pred_lde(word, sigma))


# -- the enclosing shape language -----------------------------------------


def r_fa(sigma: Iterable[str]) -> FiniteAutomaton:
    """a^+ b (sigma | α B^+ C^+ D^+ E^+ β)^{<=w}: finite and infinite."""
    sigma = sorted(sigma)
    trans = [("S", "a", "A"), ("A", "a", "A"), ("A", "b", "OUT")]
    for s in sigma:
        trans.append(("OUT", s, "OUT"))
    trans += [("OUT", "α", "W0"), ("W0", "B", "WB"), ("WB", "B", "WB"),
              ("WB", "C", "WC"), ("WC", "C", "WC"), ("WC", "D", "WD"),
              ("WD", "D", "WD"), ("WD", "E", "WE"), ("WE", "E", "WE"),
              ("WE", "β", "OUT")]
    states = {"S", "A", "OUT", "W0", "WB", "WC", "WD", "WE"}
    return make_fa(states, set(sigma) | set(FENCE) | {"a", "b"}, "S", trans,
                   finals={"OUT"}, buchi={"OUT"})


def r_pda(sigma) -> Pda:
    return fa_to_pda(r_fa(sigma))


def pred_r_finite(word: Sequence[str], sigma: frozenset[str]) -> bool:
    fa = r_fa(sigma)
    states = {fa.initial}
    for letter in word:
        states = fa.step(states, letter)
        if not states:
            return False
    return bool(states & fa.finals)


# -- grid-code complement --------------------------------------------------


def c1_pda(sigma: Iterable[str]) -> Pda:
    """Infinite words whose separator subsequence is not C B C B ... forever."""
    sigma = sorted(sigma)
    trans = [("d0", "C", "Z", "d1", ("Z",)), ("d0", "B", "Z", "dead", ("Z",)),
             ("d1", "B", "Z", "d0", ("Z",)), ("d1", "C", "Z", "dead", ("Z",))]
    for s in sigma:
        trans += [("d0", s, "Z", "d0", ("Z",)), ("d1", s, "Z", "d1", ("Z",)),
                  ("d0", s, "Z", "tail", ("Z",)), ("d1", s, "Z", "tail", ("Z",)),
                  ("tail", s, "Z", "tail", ("Z",))]
    for s in sigma + ["C", "B"]:
        trans.append(("dead", s, "Z", "dead", ("Z",)))
    return make_pda({"d0", "d1", "dead", "tail"}, set(sigma) | {"C", "B"},
                    {"Z"}, "d0", "Z", trans, buchi={"dead", "tail"})


def pred_c1_up(stem: Sequence[str], period: Sequence[str]) -> bool:
    """Definitional check on an ultimately periodic word."""
    seps_p = [l for l in period if l in ("C", "B")]
    if not seps_p:
        return True  # finitely many separators
    seq = [l for l in stem if l in ("C", "B")] + seps_p + seps_p
    expected = "C"
    for l in seq:
        if l != expected:
            return True
        expected = "B" if expected == "C" else "C"
    # alternates over two full periods: it alternates forever
    return False


def c2_pda(sigma: Iterable[str]) -> Pda:
    """A miscounted block followed by a separator and any infinite tail."""
    base = c_pda(sigma)
    trans = list(base.transitions)
    for f in base.finals:
        for sep in ("C", "B"):
            for top in base.stack_alphabet:
                trans.append((f, sep, top, "all", (top,)))
    for s in sorted(base.alphabet):
        for top in base.stack_alphabet:
            trans.append(("all", s, top, "all", (top,)))
    return make_pda(set(base.states) | {"all"}, base.alphabet, base.stack_alphabet,
                    base.initial, base.initial_stack, trans, buchi={"all"})


def h_complement_pda(sigma) -> Pda:
    """Infinite words that are not valid diagonal grid codes."""
    return trim(union(c1_pda(sigma), c2_pda(sigma)))


# -- column-test language ---------------------------------------------------


def bw_cw_fa(sigma: Iterable[str]) -> FiniteAutomaton:
    """(sigma* B sigma* C)^w, deterministic with a completion mark."""
    sigma = sorted(sigma)
    trans = []
    for src in ("e0", "e0m"):
        for s in sigma:
            trans.append((src, s, "e0"))
        trans.append((src, "B", "e1"))
    for s in sigma:
        trans.append(("e1", s, "e1"))
    trans.append(("e1", "C", "e0m"))
    return make_fa({"e0", "e0m", "e1"}, set(sigma) | {"B", "C"}, "e0", trans,
                   buchi={"e0m"})


def prefix_fa(sigma: Iterable[str]) -> FiniteAutomaton:
    """(sigma* C sigma* B)* sigma* C, finite words ending at the C."""
    sigma = sorted(sigma)
    trans = []
    for s in sigma:
        trans += [("p0", s, "p0"), ("p1", s, "p2"), ("p2", s, "p2")]
    trans += [("p0", "C", "p1"), ("p1", "B", "p0"), ("p2", "B", "p0"),
              ("p2", "C", "p1")]
    return make_fa({"p0", "p1", "p2"}, set(sigma) | {"B", "C"}, "p0", trans,
                   finals={"p1"})


def _letter_then(letter: str, body: Pda) -> Pda:
    """The language {letter} . L(body)."""
    z = "#Zl"
    states = {("i", 0)} | {("b", s) for s in body.states}
    trans = [(("i", 0), letter, z, ("b", body.initial), (body.initial_stack,))]
    trans += [(("b", s), a, top, ("b", d), push) for s, a, top, d, push in body.transitions]
    return make_pda(states, body.alphabet | {letter}, body.stack_alphabet | {z},
                    ("i", 0), z, trans,
                    finals={("b", s) for s in body.finals},
                    buchi={("b", s) for s in body.buchi})


def build_ce(l: Pda, sigma: Iterable[str]) -> Pda:
    """Column-test language of l: grid codes whose tracked column is in l.

    Substitutes every base letter by letter.(length-coded filler), keeps
    only words with the alternating-separator spine, and prepends the
    regular ramp that positions the tracked column.
    """
    sigma = sorted(sigma)
    if not frozenset(l.alphabet) <= frozenset(sigma):
        raise ValueError("column language must be over the base alphabet")
    filler = d_pda(sigma)
    images = {a: _letter_then(a, filler) for a in sigma}
    sub = trim(substitute(l, images))
    inter = trim(intersect_regular(sub, bw_cw_fa(sigma)))
    return trim(concat_left_regular(prefix_fa(sigma), inter))


def build_sigma_omega_complete(l: Pda, sigma: Iterable[str]) -> Pda:
    """Union of the column-test language with the non-code words."""
    return trim(union(build_ce(l, sigma), h_complement_pda(sigma)))


# -- registry ---------------------------------------------------------------

_BUILDERS = {
    "D1": d1_pda,
    "D2": d2_pda,
    "D": d_pda,
    "C": c_pda,
    "C1": c1_pda,
    "C2": c2_pda,
    "LB": lb_pda,
    "LC": lc_pda,
    "LD": ld_pda,
    "LE": le_pda,
    "LBC": lbc_pda,
    "LCD": lcd_pda,
    "LDE": lde_pda,
    "L": l_pda,
    "R": r_pda,
    "h_complement": h_complement_pda,
}


def named_language_names() -> list[str]:
    return sorted(_BUILDERS)


def make_named(name: str, sigma: Iterable[str] = ("x", "y")) -> Pda:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown language name {name!r}") from None
    return builder(sigma)
