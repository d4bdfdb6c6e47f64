from itertools import product
from random import Random

import pytest

from tmshift import (
    Configuration,
    TuringMachine,
    check_reversible,
    extend_halting,
    make_reader,
    output_window,
    reader_latency,
    run,
    step,
)
from tmshift.tm import (
    HaltingStateStep,
    MachineError,
    NotExtended,
    SymbolNotInAlphabet,
    UnknownState,
    UnknownSymbol,
)

from conftest import (
    INCREMENTER_OUTPUT,
    INCREMENTER_STEPS,
    make_incrementer,
    random_config,
    random_machine,
)


def oracle_step(machine: TuringMachine, config: Configuration) -> Configuration:
    """Independent hand simulation: write at cell 0, then u[n] = written[n + move]."""
    q2, written, move = machine.rules[(config.state, config.read(0))]
    cells = dict(config.tape)
    cells[0] = written
    span = range(min(cells, default=0) - 2, max(cells, default=0) + 3)
    shifted = {n: cells.get(n + move, machine.blank) for n in span}
    return Configuration(q2, shifted, machine.blank)


def brute_force_injective(machine: TuringMachine, window: int = 3) -> bool:
    """Enumerate every configuration supported in [-window, window] and
    compare full successor configurations."""
    cells = range(-window, window + 1)
    seen = set()
    for state in machine.states:
        for symbols in product(machine.alphabet, repeat=len(cells)):
            config = Configuration(state, dict(zip(cells, symbols)), machine.blank)
            nxt = step(machine, config)
            key = (nxt.state, frozenset(nxt.tape.items()))
            if key in seen:
                return False
            seen.add(key)
    return True


def test_step_fixed_point():
    m = TuringMachine(
        ("q0", "qh"), "q0", "qh", ("b", "1"),
        {("q0", "1"): ("q0", "1", 0), ("q0", "b"): ("qh", "b", 0)},
    )
    c = m.config({0: "1"})
    assert step(m, c) == c


def test_step_shift_sign_convention():
    # Writing x at cell 0 and left-shifting leaves the symbol at cell -1.
    m = TuringMachine(
        ("q0", "q1", "qh"), "q0", "qh", ("b", "x"),
        {
            ("q0", "b"): ("q1", "x", 1),
            ("q0", "x"): ("q1", "x", 1),
            ("q1", "b"): ("qh", "b", 0),
            ("q1", "x"): ("qh", "x", 0),
        },
    )
    out = step(m, m.config())
    assert out.state == "q1"
    assert out.tape == {-1: "x"}


def test_step_matches_hand_simulation():
    rng = Random(3)
    for _ in range(400):
        m = random_machine(rng)
        c = random_config(rng, m)
        assert step(m, c) == oracle_step(m, c)


def test_step_errors():
    m = make_incrementer()
    with pytest.raises(HaltingStateStep):
        step(m, Configuration("qh", {}, "b"))
    with pytest.raises(UnknownState):
        step(m, Configuration("nope", {}, "b"))


def test_run_validates_whole_tape():
    m = make_incrementer()
    with pytest.raises(UnknownSymbol):
        run(m, Configuration("q0", {5: "z"}, "b"), 10)
    with pytest.raises(UnknownState):
        run(m, Configuration("zz", {}, "b"), 10)


def test_incrementer_run_fixture(incrementer):
    result = run(incrementer, incrementer.config({0: "1", 1: "1"}), 100)
    assert result.halted
    assert result.steps == INCREMENTER_STEPS
    assert result.config.tape == INCREMENTER_OUTPUT
    assert output_window(result.config, 1) == ("1", "1", "b")


def test_run_detects_halt_immediately_and_budget(loop_machine, trivial_halter):
    assert run(trivial_halter, trivial_halter.config(), 10).steps == 1
    res = run(loop_machine, loop_machine.config(), 100)
    assert not res.halted and res.steps == 100
    halted = Configuration("qh", {}, "b")
    assert run(make_incrementer(), halted, 10).steps == 0


def test_run_is_deterministic(incrementer):
    c = incrementer.config({0: "1"})
    assert run(incrementer, c, 50) == run(incrementer, c, 50)


def test_run_equals_iterated_step():
    rng = Random(19)
    for _ in range(100):
        m = extend_halting(random_machine(rng))
        c = random_config(rng, m)
        budget = rng.randint(0, 40)
        fast = run(m, c, budget)
        slow = c
        steps = 0
        while slow.state != m.halting and steps < budget:
            slow = step(m, slow)
            steps += 1
        assert fast.config == slow
        assert fast.steps == steps
        assert fast.halted == (slow.state == m.halting)


def test_support_boundedness():
    rng = Random(5)
    for _ in range(50):
        m = extend_halting(random_machine(rng))
        c = random_config(rng, m)
        bound = max((abs(n) for n in c.tape), default=0)
        for n in range(1, 21):
            c = step(m, c)
            support = max((abs(k) for k in c.tape), default=0)
            assert support <= bound + n


def test_extend_halting_behaviour(incrementer):
    ext = extend_halting(incrementer)
    assert ext.is_extended
    assert extend_halting(ext) == ext
    rng = Random(9)
    for _ in range(50):
        tape = {rng.randint(-3, 3): "1" for _ in range(rng.randint(0, 3))}
        c = Configuration("qh", tape, "b")
        out = step(ext, c)
        assert out == Configuration("q0", tape, "b")


def test_post_halt_orbit_reenters_initial(incrementer):
    ext = extend_halting(incrementer)
    res = run(ext, ext.config({0: "1", 1: "1"}), 100)
    after = step(ext, res.config)
    assert after.state == "q0"
    assert after.tape == res.config.tape


def test_check_reversible_requires_extension(incrementer):
    with pytest.raises(NotExtended):
        check_reversible(incrementer)


def test_collider_not_reversible_with_verified_witness(collider):
    report = check_reversible(extend_halting(collider))
    assert not report.reversible
    a, b = report.config_pair
    assert a != b
    ext = extend_halting(collider)
    assert step(ext, a) == step(ext, b)


def test_witnesses_verify_on_random_machines():
    rng = Random(21)
    found = 0
    for _ in range(200):
        m = extend_halting(random_machine(rng))
        report = check_reversible(m)
        if not report.reversible:
            found += 1
            a, b = report.config_pair
            assert a != b
            assert step(m, a) == step(m, b)
    assert found > 50


def test_single_incoming_rule_per_state_is_reversible(trivial_halter):
    # Each target state receives rules with one move and distinct writes.
    report = check_reversible(extend_halting(trivial_halter))
    assert report.reversible


def test_reversibility_matches_brute_force_small_family():
    # Exhaustive over machines with one working state and two symbols.
    targets = [
        (q, s, m)
        for q in ("q0", "qh")
        for s in ("b", "1")
        for m in (-1, 0, 1)
    ]
    agree = 0
    for r1 in targets:
        for r2 in targets:
            machine = extend_halting(
                TuringMachine(
                    ("q0", "qh"), "q0", "qh", ("b", "1"),
                    {("q0", "b"): r1, ("q0", "1"): r2},
                )
            )
            criterion = check_reversible(machine).reversible
            brute = brute_force_injective(machine)
            assert criterion == brute
            agree += 1
    assert agree == 144


def test_output_window_examples():
    assert output_window(Configuration("q", {}, "b"), 1) == ("b", "b", "b")
    assert output_window(Configuration("q", {0: "x"}, "b"), 0) == ("x",)


def test_make_reader_validation(incrementer):
    with pytest.raises(SymbolNotInAlphabet):
        make_reader(incrementer, 0, ("z",))
    with pytest.raises(MachineError):
        make_reader(incrementer, 1, ("1",))


def test_reader_k0_checks_cell_zero(incrementer):
    c = incrementer.config({0: "1", 1: "1"})
    native = run(incrementer, c, 100)
    good = make_reader(incrementer, 0, ("1",))
    res = run(good, c, 100)
    assert res.halted
    assert res.steps == native.steps + reader_latency(0)
    bad = make_reader(incrementer, 0, ("b",))
    assert not run(bad, c, 10_000).halted


def test_reader_never_halts_when_source_never_halts(loop_machine):
    reader = make_reader(loop_machine, 1, ("b", "b", "b"))
    assert not run(reader, loop_machine.config({0: "1"}), 5000).halted


def test_reader_latency_and_correctness_random_corpus():
    rng = Random(33)
    checked_hits = 0
    for _ in range(150):
        m = random_machine(rng)
        c = random_config(rng, m)
        k = rng.randint(0, 2)
        native = run(m, c, 300)
        if native.halted and rng.random() < 0.7:
            target = output_window(native.config, k)
        else:
            target = tuple(rng.choice(m.alphabet) for _ in range(2 * k + 1))
        reader = make_reader(m, k, target)
        budget = 300 + reader_latency(k)
        reader_run = run(reader, c, budget)
        expect_halt = native.halted and output_window(native.config, k) == target
        assert reader_run.halted == expect_halt
        if expect_halt:
            checked_hits += 1
            assert reader_run.steps == native.steps + reader_latency(k)
    assert checked_hits > 30


def test_make_reader_ignores_extension_rows():
    m = make_incrementer()
    assert make_reader(m, 0, ("1",)) == make_reader(extend_halting(m), 0, ("1",))


def test_make_reader_fresh_names_avoid_collisions():
    m = TuringMachine(
        ("q0", "r0", "qh"), "q0", "qh", ("b", "1"),
        {
            ("q0", "b"): ("qh", "1", 0),
            ("q0", "1"): ("qh", "b", 0),
            ("r0", "b"): ("q0", "b", 0),
            ("r0", "1"): ("q0", "1", 0),
        },
    )
    reader = make_reader(m, 0, ("1",))
    assert "r0_" in reader.states  # the reading state got a fresh name
    assert len(set(reader.states)) == len(reader.states)


def test_reader_preserves_behaviour_before_halt():
    rng = Random(40)
    for _ in range(50):
        m = random_machine(rng)
        c = random_config(rng, m)
        reader = make_reader(m, 1, ("b", "b", "b"))
        native = run(m, c, 100)
        if not native.halted:
            mirrored = run(reader, c, 100)
            assert not mirrored.halted
            assert mirrored.config == native.config


def test_machine_validation_errors():
    with pytest.raises(MachineError):
        TuringMachine(("q0",), "q0", "q0", ("b", "1"), {})
    with pytest.raises(MachineError):
        TuringMachine(("q0", "qh"), "q0", "qh", ("b",), {})
    with pytest.raises(MachineError):  # not total
        TuringMachine(("q0", "qh"), "q0", "qh", ("b", "1"),
                      {("q0", "b"): ("qh", "b", 0)})
    with pytest.raises(MachineError):  # state/symbol collision
        TuringMachine(("q0", "qh", "x"), "q0", "qh", ("b", "x"),
                      {("q0", "b"): ("qh", "b", 0), ("q0", "x"): ("qh", "x", 0)})
