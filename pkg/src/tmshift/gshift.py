"""Generalized shifts on bi-infinite sequences and the machine-to-shift compiler.

A generalized shift is given by two finite-window tables: G rewrites the
symbols in its window, F dictates how far the whole sequence is then
shifted. Compiling a halting-extended Turing machine yields the shift over
the combined alphabet (tape symbols plus state ids) that reproduces machine
steps through the sequence encoding ``... t_-1 . q t_0 t_1 ...``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .tm import Configuration, NotExtended, TuringMachine

Window = tuple[str, ...]


class ShiftError(ValueError):
    pass


class NotInImage(ShiftError):
    """The sequence is not the encoding of any machine configuration."""


@dataclass(frozen=True)
class BiSequence:
    """A finitely supported bi-infinite sequence over an ordered alphabet.

    ``alphabet[0]`` is the blank; stored cells never hold it. Rendered with
    the decimal-point convention, the symbol right of the point sits at
    position 0.
    """

    alphabet: tuple[str, ...]
    support: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        blank = self.alphabet[0]
        if any(v == blank for v in self.support.values()):
            object.__setattr__(
                self, "support", {k: v for k, v in self.support.items() if v != blank}
            )
        for v in self.support.values():
            if v not in self.alphabet:
                raise ShiftError(f"symbol {v!r} not in alphabet")

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    def read(self, n: int) -> str:
        return self.support.get(n, self.blank)

    def segment(self, lo: int, hi: int) -> Window:
        """Symbols at positions lo..hi inclusive."""
        return tuple(self.read(n) for n in range(lo, hi + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSequence):
            return NotImplemented
        return self.alphabet == other.alphabet and self.support == other.support

    def __hash__(self) -> int:
        return hash((self.alphabet, frozenset(self.support.items())))

    def __str__(self) -> str:
        if not self.support:
            return "(.)"
        lo = min(min(self.support), 0)
        hi = max(max(self.support), 0)
        left = " ".join(self.read(n) for n in range(lo, 0))
        right = " ".join(self.read(n) for n in range(0, hi + 1))
        return f"({left} . {right})"


@dataclass(frozen=True)
class GeneralizedShift:
    """Finite-window shift data: alphabet, windows D_F/D_G, tables F and G.

    ``trusted`` skips the table totality audit; it is set only by internal
    compilers whose construction guarantees total, well-formed tables.
    """

    alphabet: tuple[str, ...]
    window_f: tuple[int, int]  # inclusive position range of D_F
    window_g: tuple[int, int]
    table_f: dict[Window, int]
    table_g: dict[Window, Window]
    trusted: InitVar[bool] = False

    def __post_init__(self, trusted: bool):
        if len(set(self.alphabet)) != len(self.alphabet) or len(self.alphabet) < 2:
            raise ShiftError("alphabet must be at least two distinct symbols")
        for lo, hi in (self.window_f, self.window_g):
            if hi < lo:
                raise ShiftError("window bounds must satisfy lo <= hi")
        if trusted:
            return
        r = self.window_f[1] - self.window_f[0] + 1
        l = self.window_g[1] - self.window_g[0] + 1
        n = len(self.alphabet)
        symbols = set(self.alphabet)
        if len(self.table_f) != n**r:
            raise ShiftError(f"table F must have {n**r} entries, has {len(self.table_f)}")
        for w, v in self.table_f.items():
            if len(w) != r or not symbols.issuperset(w):
                raise ShiftError(f"bad F window {w}")
            if not isinstance(v, int):
                raise ShiftError(f"F value for {w} must be an integer")
        if len(self.table_g) != n**l:
            raise ShiftError(f"table G must have {n**l} entries, has {len(self.table_g)}")
        for w, img in self.table_g.items():
            if len(w) != l or not symbols.issuperset(w):
                raise ShiftError(f"bad G window {w}")
            if len(img) != l or not symbols.issuperset(img):
                raise ShiftError(f"G image for {w} must be {l} alphabet symbols")

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    @property
    def max_abs_f(self) -> int:
        return max(abs(v) for v in self.table_f.values())

    def window_union(self) -> tuple[int, int]:
        lo = min(self.window_f[0], self.window_g[0])
        hi = max(self.window_f[1], self.window_g[1])
        return lo, hi

    def sequence(self, support: Mapping[int, str] | None = None) -> BiSequence:
        return BiSequence(self.alphabet, dict(support or {}))


def apply(shift: GeneralizedShift, s: BiSequence) -> BiSequence:
    """One shift step: read F and G on the original sequence, rewrite, shift."""
    if s.alphabet != shift.alphabet:
        raise ShiftError("sequence alphabet does not match the shift")
    m = shift.table_f[s.segment(*shift.window_f)]
    g_lo, g_hi = shift.window_g
    image = shift.table_g[s.segment(g_lo, g_hi)]
    support = dict(s.support)
    for pos, sym in zip(range(g_lo, g_hi + 1), image):
        if sym == shift.blank:
            support.pop(pos, None)
        else:
            support[pos] = sym
    if m:
        support = {n - m: v for n, v in support.items()}
    return BiSequence(shift.alphabet, support)


@dataclass(frozen=True)
class Conjugation:
    """The injective encoding of machine configurations into sequences.

    ``machine`` is halting-extended and ``shift`` is its compiled shift;
    the combined alphabet orders the blank first, then the remaining tape
    symbols, then the states, all in declaration order.
    """

    machine: TuringMachine
    shift: GeneralizedShift

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.shift.alphabet


def combined_alphabet(machine: TuringMachine) -> tuple[str, ...]:
    return machine.alphabet + machine.states


def compile_tm(machine: TuringMachine) -> tuple[GeneralizedShift, Conjugation]:
    """Compile a halting-extended machine to its conjugated generalized shift.

    Windows are positions -1..1. A window (t_-1, q, t_0) with q a state and
    both neighbours tape symbols applies the machine rule for (q, t_0); the
    rewritten window places the new state so that the subsequent F-shift
    leaves it at position 0. All other windows are fixed with F = 0.
    """
    if not machine.is_extended:
        raise NotExtended("compile_tm requires a halting-extended machine")
    alphabet = combined_alphabet(machine)
    windows = list(product(alphabet, repeat=3))
    table_f: dict[Window, int] = dict.fromkeys(windows, 0)
    table_g: dict[Window, Window] = {w: w for w in windows}
    for q in machine.states:
        for t_cur in machine.alphabet:
            q2, written, move = machine.rules[(q, t_cur)]
            for t_prev in machine.alphabet:
                w = (t_prev, q, t_cur)
                table_f[w] = move
                if move == 1:
                    table_g[w] = (t_prev, written, q2)
                elif move == -1:
                    table_g[w] = (q2, t_prev, written)
                else:
                    table_g[w] = (t_prev, q2, written)
    shift = GeneralizedShift(alphabet, (-1, 1), (-1, 1), table_f, table_g, trusted=True)
    return shift, Conjugation(machine, shift)


def encode_config(conj: Conjugation, config: Configuration) -> BiSequence:
    """Configuration to sequence: tape left of the head, state, tape from cell 0."""
    if config.blank != conj.machine.blank:
        raise ShiftError("configuration blank does not match the machine")
    if config.state not in conj.machine.states:
        raise ShiftError(f"unknown state {config.state!r}")
    support: dict[int, str] = {}
    for n, sym in config.tape.items():
        if n < 0:
            support[n] = sym
        else:
            support[n + 1] = sym
    support[0] = config.state
    return BiSequence(conj.alphabet, support)


def decode_config(conj: Conjugation, s: BiSequence) -> Configuration:
    """Inverse of :func:`encode_config` on its image.

    Raises :class:`NotInImage` unless position 0 carries a state id and all
    other positions carry tape symbols.
    """
    if s.alphabet != conj.alphabet:
        raise ShiftError("sequence alphabet does not match the conjugation")
    states = set(conj.machine.states)
    tape_symbols = set(conj.machine.alphabet)
    state = s.read(0)
    if state not in states:
        raise NotInImage(f"position 0 holds {state!r}, not a state id")
    tape: dict[int, str] = {}
    for n, sym in s.support.items():
        if n == 0:
            continue
        if sym not in tape_symbols:
            raise NotInImage(f"position {n} holds the state id {sym!r}")
        tape[n if n < 0 else n - 1] = sym
    return Configuration(state, tape, conj.machine.blank)


def standard_shift(alphabet: Iterable[str], amount: int = 1) -> GeneralizedShift:
    """The plain shift by ``amount`` positions: G is the identity, F constant."""
    alphabet = tuple(alphabet)
    table_f = {(s,): amount for s in alphabet}
    table_g = {(s,): (s,) for s in alphabet}
    return GeneralizedShift(alphabet, (0, 0), (0, 0), table_f, table_g)


def demo_shift(alt: bool = False) -> GeneralizedShift:
    """A small two-symbol shift on window positions -1..0, used as a fixture.

    The default table keys the shift amount on position 0, which makes the
    compiled block map the four-piece picture with two horseshoe-type pieces
    and two pure translations. The ``alt`` variant keys the shift amount on
    position -1 instead; its block map disagrees with that picture.
    """
    a = ("0", "1")
    table_g = {
        ("0", "1"): ("0", "1"),
        ("1", "1"): ("0", "0"),
        ("0", "0"): ("0", "1"),
        ("1", "0"): ("1", "1"),
    }
    if alt:
        table_f = {("0", "1"): -1, ("0", "0"): -1, ("1", "1"): 0, ("1", "0"): 0}
    else:
        table_f = {("0", "1"): -1, ("1", "1"): -1, ("0", "0"): 0, ("1", "0"): 0}
    return GeneralizedShift(a, (-1, 0), (-1, 0), table_f, table_g)


def is_bijective(shift: GeneralizedShift) -> bool:
    """Whether the shift is a bijection of the full sequence space.

    Decided through the compiled block map: true exactly when the images
    of all its components, identity components included, are pairwise
    disjoint on the Cantor set.

    For machine-compiled shifts this is strictly stronger than injectivity
    of the machine's global transition map: a moving rule shifts the state
    symbol across the window boundary, so its image leaves one boundary
    position unconstrained, and a stray sequence carrying a second state
    symbol there is identified with a fixed stray sequence. Machines whose
    rules all keep the tape still (move 0) avoid this, and then the two
    notions coincide; see ``cantor.find_fixed_region_overlap`` for the
    witness when they do not.
    """
    from . import cantor

    return cantor.image_blocks_disjoint(cantor.compile_blockmap(shift))
