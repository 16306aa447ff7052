"""Finite and ultimately periodic words, eraser evaluation, codings.

Words are either finite or of the shape stem.period^w (stored canonically:
primitive period, shortest stem).  Letters carry a role: plain, marker
(structural separators) or eraser with a positive stage index.

An eraser evaluates as a back-space: processing left to right, it deletes
the most recent surviving letter.  Two conventions exist for a back-space
hitting an empty result: the forgiving one ignores it, the strict one makes
the whole evaluation undefined.  On infinite words the value is the word
determined by the stabilizing prefixes of the partial evaluations; for
ultimately periodic input this limit is computed in closed form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence


class Role(Enum):
    PLAIN = "plain"
    ERASER = "eraser"
    MARKER = "marker"


class Mode(Enum):
    TILDE = "tilde"    # back-space on empty is a no-op
    APPROX = "approx"  # back-space on empty makes the value undefined


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


class StabilizationLimitError(RuntimeError):
    """Repeat detection exceeded the configured step budget."""


class UnsupportedWordError(ValueError):
    """A periodic word cannot be aligned with the requested structure."""


class WordParseError(ValueError):
    pass


@dataclass(frozen=True)
class Letter:
    symbol: str
    role: Role = Role.PLAIN
    index: int = 0

    def __post_init__(self):
        if self.role is Role.ERASER and self.index < 1:
            raise ValueError("eraser letters need a positive stage index")
        if self.role is not Role.ERASER and self.index != 0:
            raise ValueError("only erasers carry an index")

    def text(self) -> str:
        if self.role is Role.ERASER:
            return "~" if self.index == 1 else f"~{self.index}"
        return self.symbol

    def __repr__(self):
        return f"Letter({self.text()!r})"


def plain(symbol: str) -> Letter:
    return Letter(symbol, Role.PLAIN)


def marker(symbol: str) -> Letter:
    return Letter(symbol, Role.MARKER)


def eraser(index: int) -> Letter:
    return Letter(f"~{index}", Role.ERASER, index)


# Shared marker letters: prefix markers, eraser-code fence and runs, and
# the two diagonal-coding separators (which reuse the B/C markers).
MARK_A = marker("a")
MARK_PB = marker("b")
MARK_ALPHA = marker("α")
MARK_BETA = marker("β")
MARK_B = marker("B")
MARK_C = marker("C")
MARK_D = marker("D")
MARK_E = marker("E")

CODE_MARKERS = frozenset({MARK_ALPHA, MARK_BETA, MARK_B, MARK_C, MARK_D, MARK_E})
SUP_MARKERS = frozenset({MARK_A, MARK_PB}) | CODE_MARKERS


@dataclass(frozen=True)
class Word:
    stem: tuple[Letter, ...]
    period: tuple[Letter, ...]
    alphabet: frozenset[Letter]

    @property
    def is_finite(self) -> bool:
        return not self.period

    def letters(self) -> frozenset[Letter]:
        return frozenset(self.stem) | frozenset(self.period)

    def at(self, i: int) -> Letter:
        if i < len(self.stem):
            return self.stem[i]
        if self.is_finite:
            raise IndexError(i)
        return self.period[(i - len(self.stem)) % len(self.period)]

    def prefix(self, k: int) -> tuple[Letter, ...]:
        if self.is_finite and k > len(self.stem):
            raise IndexError(k)
        return tuple(self.at(i) for i in range(k))

    def drop(self, k: int) -> "Word":
        """The word with its first k letters removed."""
        if k <= len(self.stem):
            return Word.make(self.stem[k:], self.period, self.alphabet)
        if self.is_finite:
            raise IndexError(k)
        r = (k - len(self.stem)) % len(self.period)
        return Word.make((), self.period[r:] + self.period[:r], self.alphabet)

    def __len__(self) -> int:
        if not self.is_finite:
            raise ValueError("infinite word has no length")
        return len(self.stem)

    @staticmethod
    def make(stem: Iterable[Letter], period: Iterable[Letter] = (),
             alphabet: Optional[Iterable[Letter]] = None) -> "Word":
        stem_t = tuple(stem)
        period_t = tuple(period)
        if period_t:
            period_t = _primitive(period_t)
            while stem_t and stem_t[-1] == period_t[-1]:
                stem_t = stem_t[:-1]
                period_t = (period_t[-1],) + period_t[:-1]
        letters = frozenset(stem_t) | frozenset(period_t)
        alpha = frozenset(alphabet) if alphabet is not None else letters
        if not letters <= alpha:
            raise ValueError("word uses letters outside its alphabet")
        return Word(stem_t, period_t, alpha)

    def with_alphabet(self, alphabet: Iterable[Letter]) -> "Word":
        return Word.make(self.stem, self.period, alphabet)

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"Word({format_word(self)!r})"


def _primitive(period: tuple[Letter, ...]) -> tuple[Letter, ...]:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period == period[:d] * (n // d):
            return period[:d]
    return period


def finite_word(letters: Iterable[Letter],
                alphabet: Optional[Iterable[Letter]] = None) -> Word:
    return Word.make(letters, (), alphabet)


def up_word(stem: Iterable[Letter], period: Iterable[Letter],
            alphabet: Optional[Iterable[Letter]] = None) -> Word:
    period_t = tuple(period)
    if not period_t:
        raise ValueError("period must be nonempty")
    return Word.make(stem, period_t, alphabet)


EMPTY_WORD = finite_word(())


# -- text syntax -------------------------------------------------------
#
# Letters are single visible characters; `~j` is the j-th eraser (`~`
# alone is `~1`); an ultimately periodic word is written stem(period)^w.

_ERASER_RE = re.compile(r"~(\d*)")


def _parse_letters(text: str, markers: frozenset[str]) -> tuple[Letter, ...]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "~":
            m = _ERASER_RE.match(text, i)
            digits = m.group(1)
            out.append(eraser(int(digits) if digits else 1))
            i = m.end()
        else:
            out.append(marker(ch) if ch in markers else plain(ch))
            i += 1
    return tuple(out)


def parse_word(text: str, markers: Iterable[str] = (),
               alphabet: Optional[Iterable[Letter]] = None) -> Word:
    marker_set = frozenset(markers)
    text = text.strip()
    m = re.fullmatch(r"(.*?)\((.+)\)\^w", text)
    if m:
        stem = _parse_letters(m.group(1), marker_set)
        period = _parse_letters(m.group(2), marker_set)
        return up_word(stem, period, alphabet)
    if "(" in text or ")" in text:
        raise WordParseError("malformed periodic word; expected stem(period)^w")
    return finite_word(_parse_letters(text, marker_set), alphabet)


def format_word(w: Word) -> str:
    stem = "".join(l.text() for l in w.stem)
    if w.is_finite:
        return stem
    return f"{stem}({''.join(l.text() for l in w.period)})^w"


# -- eraser evaluation -------------------------------------------------


def _is_active(letter: Letter, index: int) -> bool:
    return letter.role is Role.ERASER and letter.index == index


def _eval_finite(stack: list, letters: Sequence[Letter], index: int,
                 mode: Mode, dip: list) -> bool:
    """Process letters onto stack; False means the value is undefined."""
    for letter in letters:
        if _is_active(letter, index):
            if stack:
                stack.pop()
            elif mode is Mode.APPROX:
                return False
        else:
            stack.append(letter)
        if dip is not None and len(stack) < dip[0]:
            dip[0] = len(stack)
    return True


def _pass_profile(period: Sequence[Letter], index: int) -> tuple[int, list]:
    """Max pop depth of one pass and the rebuilt suffix above that depth."""
    h = 0
    low = 0
    for letter in period:
        h += -1 if _is_active(letter, index) else 1
        low = min(low, h)
    depth = -low
    sentinel = object()
    stack: list = [sentinel] * depth
    ok = _eval_finite(stack, period, index, Mode.TILDE, None)
    assert ok and all(x is not sentinel for x in stack)
    return depth, stack


def evaluate_stage(w: Word, index: int, mode: Mode,
                   step_limit: int = 10**6):
    """Evaluate the stage-`index` erasers of w; other letters are opaque.

    Returns a Word, or UNDEFINED in strict mode when a back-space hits an
    empty result.  Raises StabilizationLimitError when repeat detection
    exceeds step_limit processed letters.
    """
    alphabet = frozenset(l for l in w.alphabet if not _is_active(l, index))
    stack: list = []
    if not _eval_finite(stack, w.stem, index, mode, None):
        return UNDEFINED
    if w.is_finite:
        return finite_word(stack, alphabet)

    depth, rebuilt = _pass_profile(w.period, index)
    net = len(rebuilt) - depth
    seen: dict[tuple, int] = {}
    dips: list[int] = []
    steps = 0
    while True:
        if len(stack) >= depth and net > 0:
            # every later pass consumes exactly `depth` and adds `rebuilt`,
            # so the stable region grows forever and the tail is periodic
            stable = stack[: len(stack) - depth]
            return up_word(stable, rebuilt[:net], alphabet)
        key = tuple(stack)
        if key in seen:
            start = seen[key]
            cut = min(dips[start:])
            return finite_word(stack[:cut], alphabet)
        seen[key] = len(dips)
        dip = [len(stack)]
        if not _eval_finite(stack, w.period, index, mode, dip):
            return UNDEFINED
        dips.append(dip[0])
        steps += len(w.period)
        if steps > step_limit:
            raise StabilizationLimitError(
                f"no repeat within {step_limit} steps")


def eraser_indices(w: Word) -> set[int]:
    return {l.index for l in w.alphabet if l.role is Role.ERASER}


def eraser_eval(w: Word, mode: Mode, step_limit: int = 10**6):
    """Single-eraser evaluation; the alphabet must declare exactly one."""
    indices = eraser_indices(w)
    if len(indices) != 1:
        raise ValueError(f"expected exactly one eraser, found {sorted(indices)}")
    return evaluate_stage(w, indices.pop(), mode, step_limit)


def staged_eval(w: Word, mode: Mode, stages: Optional[int] = None,
                step_limit: int = 10**6):
    """Evaluate erasers stage by stage, highest index first."""
    if stages is None:
        indices = eraser_indices(w)
        stages = max(indices) if indices else 0
    for index in range(stages, 0, -1):
        w = evaluate_stage(w, index, mode, step_limit)
        if w is UNDEFINED:
            return UNDEFINED
    return w


def remove_letter(w: Word, d: Letter) -> Word:
    """Delete every occurrence of d; a d^w tail collapses to a finite word."""
    stem = tuple(l for l in w.stem if l != d)
    period = tuple(l for l in w.period if l != d)
    alphabet = frozenset(l for l in w.alphabet if l != d)
    if not period:
        return finite_word(stem, alphabet)
    return up_word(stem, period, alphabet)


# -- eraser coding -----------------------------------------------------
#
# The j-th eraser is flattened to the fence word α B^j C^j D^j E^j β so
# that staged words live over one fixed finite alphabet.  Decoding rebuilds
# the erasers, reporting which well-formedness constraint failed.


def _encode_letter(letter: Letter) -> tuple[Letter, ...]:
    if letter.role is not Role.ERASER:
        return (letter,)
    j = letter.index
    return (MARK_ALPHA,) + (MARK_B,) * j + (MARK_C,) * j + (MARK_D,) * j + (MARK_E,) * j + (MARK_BETA,)


def encode_erasers(w: Word) -> Word:
    stem = tuple(x for l in w.stem for x in _encode_letter(l))
    period = tuple(x for l in w.period for x in _encode_letter(l))
    alphabet = frozenset(l for l in w.alphabet if l.role is not Role.ERASER) | CODE_MARKERS
    if not period:
        return finite_word(stem, alphabet)
    return up_word(stem, period, alphabet)


@dataclass(frozen=True)
class DecodeResult:
    word: Optional[Word] = None
    reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.word is not None

    @property
    def junk(self) -> bool:
        """Malformed through run counts or index budget, not block shape."""
        return self.reason is not None and self.reason != "shape"


_PHASES = ("OUT", "ALPHA", "B", "C", "D", "E")


class _CodeScanner:
    """Block discipline scanner: plain letters or α B+ C+ D+ E+ β fences."""

    def __init__(self):
        self.phase = "OUT"
        self.counts = [0, 0, 0, 0]
        self.rejected = False
        self.emitted: list = []  # Letter or (j, k, l, m) tuples

    def boundary_key(self):
        return (self.phase, tuple(self.counts))

    def feed(self, letter: Letter) -> None:
        if self.rejected:
            return
        ph = self.phase
        if letter == MARK_ALPHA:
            if ph != "OUT":
                self.rejected = True
                return
            self.phase = "ALPHA"
            self.counts = [0, 0, 0, 0]
        elif letter == MARK_B:
            if ph not in ("ALPHA", "B"):
                self.rejected = True
                return
            self.phase = "B"
            self.counts[0] += 1
        elif letter == MARK_C:
            if ph not in ("B", "C"):
                self.rejected = True
                return
            self.phase = "C"
            self.counts[1] += 1
        elif letter == MARK_D:
            if ph not in ("C", "D"):
                self.rejected = True
                return
            self.phase = "D"
            self.counts[2] += 1
        elif letter == MARK_E:
            if ph not in ("D", "E"):
                self.rejected = True
                return
            self.phase = "E"
            self.counts[3] += 1
        elif letter == MARK_BETA:
            if ph != "E":
                self.rejected = True
                return
            self.phase = "OUT"
            self.emitted.append(tuple(self.counts))
        else:
            if ph != "OUT":
                self.rejected = True
                return
            self.emitted.append(letter)


def _scan_structure(w: Word, max_passes: int = 12):
    """Scan the block structure of w.

    Returns (stem_items, period_items) of emitted items, where period_items
    is () for finite words, or a DecodeResult carrying the shape failure.
    """
    scanner = _CodeScanner()
    for letter in w.stem:
        scanner.feed(letter)
        if scanner.rejected:
            return DecodeResult(reason="shape")
    if w.is_finite:
        if scanner.phase != "OUT":
            return DecodeResult(reason="shape")
        return list(scanner.emitted), []
    boundary_seen = {scanner.boundary_key(): 0}
    phase_seen = {scanner.phase: 0}
    marks = [len(scanner.emitted)]
    for p in range(1, max_passes + 1):
        for letter in w.period:
            scanner.feed(letter)
            if scanner.rejected:
                return DecodeResult(reason="shape")
        marks.append(len(scanner.emitted))
        key = scanner.boundary_key()
        if key in boundary_seen:
            start = boundary_seen[key]
            stem_items = scanner.emitted[: marks[start]]
            period_items = scanner.emitted[marks[start]: marks[p]]
            if not period_items:
                # an infinite tail that decodes to nothing is not a valid
                # block concatenation
                return DecodeResult(reason="shape")
            return stem_items, period_items
        boundary_seen[key] = p
        # a pass that repeats its phase without emitting anything can only
        # be an unterminated fence growing forever
        if scanner.phase in phase_seen and marks[p] == marks[phase_seen[scanner.phase]]:
            return DecodeResult(reason="shape")
        phase_seen[scanner.phase] = p
    raise UnsupportedWordError("periodic block structure did not stabilize")


def _segment_reason(counts: tuple[int, int, int, int], budget: Optional[int]) -> Optional[str]:
    j, k, l, m = counts
    if j != k:
        return "count:BC"
    if k != l:
        return "count:CD"
    if l != m:
        return "count:DE"
    if budget is not None and j > budget:
        return "index"
    return None


def decode_erasers(w: Word, budget: int) -> DecodeResult:
    """Invert encode_erasers, enforcing an eraser index budget.

    The reason fields mirror the well-formedness constraints: "shape" for a
    broken block discipline, "count:XY" for unequal fence runs, "index" for
    a coded stage above the budget.
    """
    scanned = _scan_structure(w)
    if isinstance(scanned, DecodeResult):
        return scanned
    stem_items, period_items = scanned
    for item in stem_items + period_items:
        if isinstance(item, tuple):
            reason = _segment_reason(item, budget)
            if reason:
                return DecodeResult(reason=reason)

    def rebuild(items):
        out = []
        for item in items:
            if isinstance(item, tuple):
                out.append(eraser(item[0]))
            else:
                out.append(item)
        return tuple(out)

    plain_letters = frozenset(l for l in w.alphabet if l not in CODE_MARKERS)
    alphabet = plain_letters | frozenset(eraser(i) for i in range(1, budget + 1))
    stem = rebuild(stem_items)
    if not period_items:
        return DecodeResult(word=finite_word(stem, alphabet))
    return DecodeResult(word=up_word(stem, rebuild(period_items), alphabet))


def split_sup_prefix(w: Word) -> Optional[tuple[int, Word]]:
    """Split w as a^n b t with n >= 1; None when the prefix is absent."""
    limit = len(w.stem) + (len(w.period) if not w.is_finite else 0) + 1
    n = 0
    while True:
        if w.is_finite and n >= len(w.stem):
            return None
        if n >= limit:
            return None  # a^w: the b never arrives
        letter = w.at(n)
        if letter == MARK_A:
            n += 1
            continue
        if letter == MARK_PB and n >= 1:
            return n, w.drop(n + 1)
        return None


# -- diagonal coding of square grids ------------------------------------
#
# A depth-p triangular prefix of an infinite grid is flattened by
# enumerating anti-diagonals with alternating orientation, separated by
# alternating C/B markers.


@dataclass(frozen=True)
class GridPrefix:
    rows: tuple[tuple[Letter, ...], ...]  # rows[m-1][n-1], m+n <= depth+1

    def __post_init__(self):
        depth = len(self.rows)
        for m, row in enumerate(self.rows, start=1):
            if len(row) != depth + 1 - m:
                raise ValueError("grid cells must fill a triangle")
            for letter in row:
                if letter in (MARK_B, MARK_C):
                    raise ValueError("grid letters must avoid the separators")

    @property
    def depth(self) -> int:
        return len(self.rows)

    def cell(self, m: int, n: int) -> Letter:
        if m < 1 or n < 1 or m + n > self.depth + 1:
            raise IndexError((m, n))
        return self.rows[m - 1][n - 1]

    def alphabet(self) -> frozenset[Letter]:
        return frozenset(l for row in self.rows for l in row)


def grid_from_cells(depth: int, cells: dict[tuple[int, int], Letter]) -> GridPrefix:
    rows = tuple(
        tuple(cells[(m, n)] for n in range(1, depth + 2 - m))
        for m in range(1, depth + 1)
    )
    return GridPrefix(rows)


def diag_u(g: GridPrefix, p: int) -> Word:
    """The (p+1)-th anti-diagonal read with increasing column index."""
    if p < 1 or p > g.depth:
        raise IndexError(p)
    return finite_word(tuple(g.cell(m, p + 1 - m) for m in range(p, 0, -1)))


def diag_v(g: GridPrefix, p: int) -> Word:
    """The reversal of diag_u."""
    if p < 1 or p > g.depth:
        raise IndexError(p)
    return finite_word(tuple(g.cell(m, p + 1 - m) for m in range(1, p + 1)))


def h_prefix(g: GridPrefix) -> Word:
    """Flatten the grid prefix: V-blocks before C, U-blocks before B."""
    out: list[Letter] = []
    for p in range(1, g.depth + 1):
        d = p + 1
        block = diag_v(g, p) if d % 2 == 0 else diag_u(g, p)
        out.extend(block.stem)
        out.append(MARK_C if d % 2 == 0 else MARK_B)
    return finite_word(out, frozenset(out) | {MARK_B, MARK_C})


def h_decode(w: Word):
    """Invert h_prefix; returns a GridPrefix or a DecodeResult("shape...")."""
    if not w.is_finite:
        return DecodeResult(reason="shape: infinite input")
    cells: dict[tuple[int, int], Letter] = {}
    block: list[Letter] = []
    k = 0
    for letter in w.stem:
        if letter in (MARK_B, MARK_C):
            k += 1
            expected = MARK_C if (k + 1) % 2 == 0 else MARK_B
            if letter != expected:
                return DecodeResult(reason=f"shape: separator {k} must be {expected.symbol}")
            if len(block) != k:
                return DecodeResult(reason=f"shape: block {k} has {len(block)} letters, wants {k}")
            d = k + 1
            for idx, cell in enumerate(block):
                m = idx + 1 if d % 2 == 0 else d - 1 - idx
                cells[(m, d - m)] = cell
            block = []
        else:
            block.append(letter)
    if block:
        return DecodeResult(reason="shape: trailing letters after the last separator")
    if k == 0:
        return DecodeResult(reason="shape: empty code")
    return grid_from_cells(k, cells)


def parse_grid(text: str, markers: Iterable[str] = ()) -> GridPrefix:
    """Parse "depth=K" plus a row-major cell list (rows of decreasing length)."""
    lines = [l.strip() for l in text.strip().splitlines() if l.strip()]
    if len(lines) != 2 or not lines[0].startswith("depth=") or not lines[1].startswith("cells="):
        raise WordParseError("grid text wants two lines: depth=K and cells=...")
    depth = int(lines[0][len("depth="):])
    letters = _parse_letters(lines[1][len("cells="):].replace(" ", ""), frozenset(markers))
    expected = depth * (depth + 1) // 2
    if len(letters) != expected:
        raise WordParseError(f"grid of depth {depth} wants {expected} cells, got {len(letters)}")
    cells = {}
    it = iter(letters)
    for m in range(1, depth + 1):
        for n in range(1, depth + 2 - m):
            cells[(m, n)] = next(it)
    return grid_from_cells(depth, cells)


def format_grid(g: GridPrefix) -> str:
    cells = " ".join(l.text() for row in g.rows for l in row)
    return f"depth={g.depth}\ncells={cells}"
