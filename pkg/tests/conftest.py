"""Shared fixtures: small reference machines and randomized corpus builders."""

from __future__ import annotations

from random import Random

import pytest

from tmshift import Configuration, TuringMachine


def make_incrementer() -> TuringMachine:
    """Scan right over 1s, append one more 1 at the first blank, halt."""
    return TuringMachine(
        states=("q0", "qh"),
        initial="q0",
        halting="qh",
        alphabet=("b", "1"),
        rules={
            ("q0", "1"): ("q0", "1", 1),
            ("q0", "b"): ("qh", "1", 0),
        },
    )


# Frozen by running the incrementer natively on the tape "11" at cells 0, 1:
# three steps, output "111" on cells -2..0.
INCREMENTER_STEPS = 3
INCREMENTER_OUTPUT = {-2: "1", -1: "1", 0: "1"}


def make_trivial_halter() -> TuringMachine:
    """Halts on the first step whatever the input; reversible once extended."""
    return TuringMachine(
        states=("q0", "qh"),
        initial="q0",
        halting="qh",
        alphabet=("b", "1"),
        rules={
            ("q0", "b"): ("qh", "b", 0),
            ("q0", "1"): ("qh", "1", 0),
        },
    )


def make_loop_machine() -> TuringMachine:
    """No rule targets the halting state, so it runs forever."""
    return TuringMachine(
        states=("q0", "qh"),
        initial="q0",
        halting="qh",
        alphabet=("b", "1"),
        rules={
            ("q0", "b"): ("q0", "b", 0),
            ("q0", "1"): ("q0", "1", 0),
        },
    )


def make_collider() -> TuringMachine:
    """Two rules with identical images, the canonical irreversible machine."""
    return TuringMachine(
        states=("q0", "q1", "qh"),
        initial="q0",
        halting="qh",
        alphabet=("0", "1"),
        rules={
            ("q0", "0"): ("q1", "0", 0),
            ("q0", "1"): ("q1", "0", 0),
            ("q1", "0"): ("q1", "0", 0),
            ("q1", "1"): ("q1", "1", 0),
        },
    )


def random_machine(rng: Random, max_work_states: int = 3, max_symbols: int = 3) -> TuringMachine:
    """A random total machine with 1..max_work_states non-halting states."""
    n_work = rng.randint(1, max_work_states)
    n_sym = rng.randint(2, max_symbols)
    states = tuple(f"q{i}" for i in range(n_work)) + ("qh",)
    alphabet = ("b",) + tuple(f"s{i}" for i in range(1, n_sym))
    rules = {}
    for q in states[:-1]:
        for s in alphabet:
            rules[(q, s)] = (
                rng.choice(states),
                rng.choice(alphabet),
                rng.choice((-1, 0, 1)),
            )
    return TuringMachine(states, "q0", "qh", alphabet, rules)


def random_config(rng: Random, machine: TuringMachine, max_support: int = 4) -> Configuration:
    tape = {}
    for _ in range(rng.randint(0, max_support)):
        tape[rng.randint(-4, 4)] = rng.choice(machine.alphabet)
    return Configuration("q0", tape, machine.blank)


@pytest.fixture
def incrementer() -> TuringMachine:
    return make_incrementer()


@pytest.fixture
def trivial_halter() -> TuringMachine:
    return make_trivial_halter()


@pytest.fixture
def loop_machine() -> TuringMachine:
    return make_loop_machine()


@pytest.fixture
def collider() -> TuringMachine:
    return make_collider()
