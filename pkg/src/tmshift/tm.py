"""Turing machines with a fixed head and a moving, finitely supported tape.

The model: a finite control plus a bi-infinite tape, where one execution
step looks up ``rules[(state, tape[0])] = (state', written, move)``, writes
at cell 0 and then shifts the whole tape, ``new[n] = written_tape[n + move]``.
``move = +1`` is the left shift and ``move = -1`` the right shift; cell 0 is
always the scanned cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

Rule = tuple[str, str, int]  # (next state, written symbol, move)


class MachineError(ValueError):
    """Base class for machine construction and execution errors."""


class HaltingStateStep(MachineError):
    """A step was requested from the halting state of an unextended machine."""


class UnknownState(MachineError):
    pass


class UnknownSymbol(MachineError):
    pass


class NotExtended(MachineError):
    """The operation requires a machine whose halting row has been filled in."""


class SymbolNotInAlphabet(MachineError):
    pass


@dataclass(frozen=True)
class TuringMachine:
    """Finite control: ordered states and alphabet plus a total rule table.

    ``alphabet[0]`` is the blank symbol. ``rules`` must be total on
    (states minus halting) x alphabet; rows for the halting state may only
    be added through :func:`extend_halting`.
    """

    states: tuple[str, ...]
    initial: str
    halting: str
    alphabet: tuple[str, ...]
    rules: dict[tuple[str, str], Rule]

    def __post_init__(self):
        if len(self.alphabet) < 2:
            raise MachineError("alphabet must have at least two symbols")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("duplicate alphabet symbols")
        if len(set(self.states)) != len(self.states):
            raise MachineError("duplicate states")
        if self.initial == self.halting:
            raise MachineError("initial state must differ from halting state")
        for q in (self.initial, self.halting):
            if q not in self.states:
                raise UnknownState(f"undeclared state {q!r}")
        if set(self.states) & set(self.alphabet):
            raise MachineError("state ids and alphabet symbols must be disjoint")
        state_set = set(self.states)
        symbol_set = set(self.alphabet)
        for (q, s), (q2, s2, move) in self.rules.items():
            if q not in state_set or q2 not in state_set:
                raise UnknownState(f"rule ({q!r}, {s!r}) uses an undeclared state")
            if s not in symbol_set or s2 not in symbol_set:
                raise UnknownSymbol(f"rule ({q!r}, {s!r}) uses an undeclared symbol")
            if move not in (-1, 0, 1):
                raise MachineError(f"rule ({q!r}, {s!r}) has move {move!r}")
        for q in self.states:
            if q == self.halting:
                continue
            for s in self.alphabet:
                if (q, s) not in self.rules:
                    raise MachineError(f"rule table not total: missing ({q!r}, {s!r})")

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    @property
    def is_extended(self) -> bool:
        return all((self.halting, s) in self.rules for s in self.alphabet)

    def config(self, tape: Mapping[int, str] | None = None, state: str | None = None) -> "Configuration":
        return Configuration(state or self.initial, dict(tape or {}), self.blank)


@dataclass(frozen=True)
class Configuration:
    """A control state plus a finitely supported tape (blank elsewhere).

    The stored tape is canonical: cells holding the blank are dropped.
    """

    state: str
    tape: dict[int, str] = field(default_factory=dict)
    blank: str = "b"

    def __post_init__(self):
        if any(v == self.blank for v in self.tape.values()):
            object.__setattr__(
                self, "tape", {k: v for k, v in self.tape.items() if v != self.blank}
            )

    def read(self, n: int) -> str:
        return self.tape.get(n, self.blank)

    def window(self, k: int) -> tuple[str, ...]:
        """Symbols at cells -k..k, blanks filled in."""
        return tuple(self.read(n) for n in range(-k, k + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.state == other.state
            and self.blank == other.blank
            and self.tape == other.tape
        )

    def __hash__(self) -> int:
        return hash((self.state, self.blank, frozenset(self.tape.items())))

    def __str__(self) -> str:
        cells = ",".join(f"{n}:{s}" for n, s in sorted(self.tape.items()))
        return f"({self.state}; {cells or '-'})"


@dataclass(frozen=True)
class RunResult:
    halted: bool
    steps: int
    config: Configuration


@dataclass(frozen=True)
class ReversibilityReport:
    """Verdict of the injectivity check, with a concrete witness when false.

    The witness holds two distinct rules whose images collide and a pair of
    distinct configurations with equal successors under :func:`step`.
    """

    reversible: bool
    rule_pair: tuple[tuple[str, str], tuple[str, str]] | None = None
    config_pair: tuple[Configuration, Configuration] | None = None


def step(machine: TuringMachine, config: Configuration) -> Configuration:
    """One execution step: look up the rule, write at cell 0, shift the tape."""
    key = (config.state, config.read(0))
    rule = machine.rules.get(key)
    if rule is None:
        if config.state == machine.halting:
            raise HaltingStateStep(
                "cannot step from the halting state of an unextended machine"
            )
        if config.state not in machine.states:
            raise UnknownState(f"configuration state {config.state!r} not declared")
        raise UnknownSymbol(f"configuration symbol {key[1]!r} not declared")
    new_state, written, move = rule
    tape = dict(config.tape)
    if written == machine.blank:
        tape.pop(0, None)
    else:
        tape[0] = written
    if move:
        tape = {n - move: v for n, v in tape.items()}
    return Configuration(new_state, tape, machine.blank)


def extend_halting(machine: TuringMachine) -> TuringMachine:
    """Make the rule table total by sending (halt, s) to (initial, s, 0).

    Idempotent; all non-halting rows are left untouched.
    """
    if machine.is_extended:
        return machine
    rules = dict(machine.rules)
    for s in machine.alphabet:
        rules[(machine.halting, s)] = (machine.initial, s, 0)
    return TuringMachine(
        machine.states, machine.initial, machine.halting, machine.alphabet, rules
    )


def run(machine: TuringMachine, config: Configuration, max_steps: int) -> RunResult:
    """Iterate ``step`` until the halting state is reached or the budget runs out.

    Halting is detected before any halting-extension row fires, so extended
    and unextended machines report identical halting behaviour. The loop
    tracks the tape shift as an origin offset, which keeps long runs linear
    in the step count; the result is identical to iterating :func:`step`.
    """
    if max_steps < 0:
        raise MachineError("max_steps must be >= 0")
    if config.state not in machine.states:
        raise UnknownState(f"configuration state {config.state!r} not declared")
    declared = set(machine.alphabet)
    for n, sym in config.tape.items():
        if sym not in declared:
            raise UnknownSymbol(f"tape cell {n} holds undeclared symbol {sym!r}")
    state = config.state
    cells = dict(config.tape)
    origin = 0
    blank = machine.blank
    halting = machine.halting
    rules = machine.rules
    steps = 0
    while state != halting and steps < max_steps:
        key = (state, cells.get(origin, blank))
        rule = rules.get(key)
        if rule is None:
            # Reuse step() so error discrimination lives in one place.
            frozen = Configuration(
                state, {n - origin: v for n, v in cells.items()}, blank
            )
            step(machine, frozen)
            raise MachineError("unreachable")  # pragma: no cover
        state, written, move = rule
        if written == blank:
            cells.pop(origin, None)
        else:
            cells[origin] = written
        origin += move
        steps += 1
    final = Configuration(state, {n - origin: v for n, v in cells.items()}, blank)
    return RunResult(state == halting, steps, final)


def output_window(config: Configuration, k: int) -> tuple[str, ...]:
    """The 2k+1 symbols at tape cells -k..k of ``config``."""
    return config.window(k)


def _collision_configs(
    machine: TuringMachine,
    rule_a: tuple[str, str],
    rule_b: tuple[str, str],
) -> tuple[Configuration, Configuration]:
    """Build two distinct configurations with the same successor.

    ``rule_a``/``rule_b`` are distinct rule keys sharing the same target
    state whose images collide (same write and move, or different moves).
    """
    qa, ra = rule_a
    qb, rb = rule_b
    _, wa, ea = machine.rules[rule_a]
    _, wb, eb = machine.rules[rule_b]
    blank = machine.blank
    if ea == eb:
        # Same shift: both write at cell 0, so all-blank context collides.
        return (
            Configuration(qa, {0: ra}, blank),
            Configuration(qb, {0: rb}, blank),
        )
    # Different shifts d = ea - eb apart: plant rule_b's written symbol at
    # cell d of the first tape, and take the second tape to be the first
    # one's image context shifted by d.
    d = ea - eb
    tape_a = {0: ra, d: wb}
    written_a = dict(tape_a)
    written_a[0] = wa
    tape_b = {n - d: v for n, v in written_a.items() if n != d}
    tape_b[0] = rb
    return (
        Configuration(qa, tape_a, blank),
        Configuration(qb, tape_b, blank),
    )


def check_reversible(machine: TuringMachine) -> ReversibilityReport:
    """Decide injectivity of the global one-step map over all tapes.

    The map is injective exactly when every pair of distinct rules sharing
    a target state has equal moves and different written symbols; any
    violation yields a concrete colliding configuration pair.
    """
    if not machine.is_extended:
        raise NotExtended("check_reversible requires a halting-extended machine")
    by_target: dict[str, list[tuple[str, str]]] = {}
    for key, (q2, _, _) in machine.rules.items():
        by_target.setdefault(q2, []).append(key)
    for target in sorted(by_target):
        keys = by_target[target]
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                _, wa, ea = machine.rules[keys[i]]
                _, wb, eb = machine.rules[keys[j]]
                if ea != eb or wa == wb:
                    pair = (keys[i], keys[j])
                    configs = _collision_configs(machine, *pair)
                    return ReversibilityReport(False, pair, configs)
    return ReversibilityReport(True)


def reader_latency(k: int) -> int:
    """Extra steps a reader machine runs past the source machine's halt.

    The reading chain fires one transition per reading state, r0 through
    r_{3k}, so a matching window costs exactly 3k + 1 additional steps.
    """
    return 3 * k + 1


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def make_reader(
    machine: TuringMachine, k: int, target: Iterable[str]
) -> TuringMachine:
    """Build the machine that halts iff ``machine`` halts with the given window.

    The returned machine runs like the original, but transitions into the
    halting state divert to a chain of reading states that walk cells
    0, -1, ..., -k, then -k+1, ..., k of the output tape and compare each
    against ``target`` (length 2k+1, cells -k..k). Any mismatch drops into
    an absorbing non-halting state.
    """
    target = tuple(target)
    if k < 0:
        raise MachineError("k must be >= 0")
    if len(target) != 2 * k + 1:
        raise MachineError(f"target must have length {2 * k + 1}, got {len(target)}")
    for s in target:
        if s not in machine.alphabet:
            raise SymbolNotInAlphabet(f"target symbol {s!r} not in alphabet")

    taken = set(machine.states) | set(machine.alphabet)
    readers = []
    for i in range(3 * k + 1):
        name = _fresh_name(f"r{i}", taken)
        taken.add(name)
        readers.append(name)
    nohalt = _fresh_name("q_nohalt", taken)

    def want(i: int) -> str:
        # Reading state r_i compares cell 0 against target cell -i while
        # walking left, then against target cell i - 2k while walking right.
        if i < k:
            return target[k - i]  # target cell -i
        return target[i - k]  # target cell i - 2k

    rules: dict[tuple[str, str], Rule] = {}
    for (q, s), (q2, w, move) in machine.rules.items():
        if q == machine.halting:
            continue  # drop extension rows; the reader owns the halting state
        if q2 == machine.halting:
            rules[(q, s)] = (readers[0], w, move)
        else:
            rules[(q, s)] = (q2, w, move)
    for i, r in enumerate(readers):
        for s in machine.alphabet:
            if s != want(i):
                rules[(r, s)] = (nohalt, s, 0)
            elif i < k:
                rules[(r, s)] = (readers[i + 1], s, -1)
            elif i < 3 * k:
                rules[(r, s)] = (readers[i + 1], s, +1)
            else:
                rules[(r, s)] = (machine.halting, s, 0)
    for s in machine.alphabet:
        rules[(nohalt, s)] = (nohalt, s, 0)

    states = tuple(q for q in machine.states if q != machine.halting)
    states = states + tuple(readers) + (nohalt, machine.halting)
    return TuringMachine(
        states, machine.initial, machine.halting, machine.alphabet, rules
    )
