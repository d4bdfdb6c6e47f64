import math
from fractions import Fraction
from random import Random

import mpmath
import pytest

from tmshift import (
    BlockRegion,
    CantorPoint,
    ExperimentSpec,
    apply_blockmap,
    build_experiment,
    run,
    run_orbit,
    trace_orbit,
    verify_equivalence,
    viscous_budget,
)
from tmshift.harness import ExperimentError, NonPositiveParameter
from tmshift.rational import RadixRational
from tmshift.tm import output_window, reader_latency

from conftest import (
    make_incrementer,
    make_loop_machine,
    make_trivial_halter,
    random_config,
    random_machine,
)


def incrementer_spec(mode="direct", k=0, target=("1",), budget=100) -> ExperimentSpec:
    m = make_incrementer()
    return ExperimentSpec(
        machine=m,
        input=m.config({0: "1", 1: "1"}),
        k=k,
        target=target,
        mode=mode,
        budget=budget,
    )


def test_spec_validation():
    m = make_incrementer()
    with pytest.raises(ExperimentError):
        ExperimentSpec(m, m.config(), 0, ("1",), "direct", 0)
    with pytest.raises(ExperimentError):
        ExperimentSpec(m, m.config(), 1, ("1",), "direct", 10)
    with pytest.raises(ExperimentError):
        ExperimentSpec(m, m.config(state="qh"), 0, ("1",), "reader", 10)


def test_build_experiment_point_hand_checked():
    built = build_experiment(incrementer_spec())
    # Alphabet (b, 1, q0, qh), radix 7; input (q0, "11") encodes to
    # y = 4/7 + 2/49 + 2/343 = 212/343 and x = 0.
    assert built.point.x == RadixRational(0, 0, 7)
    assert built.point.y == RadixRational(212, 3, 7)
    assert built.point.y.as_fraction() == Fraction(212, 343)
    assert not built.warnings


def test_point_lies_in_exactly_one_domain_block():
    rng = Random(10)
    for _ in range(20):
        machine = random_machine(rng)
        spec = ExperimentSpec(
            machine, random_config(rng, machine), 0, (machine.blank,), "direct", 10
        )
        built = build_experiment(spec)
        hits = [
            piece
            for piece in built.blockmap.pieces
            if piece.domain.contains(built.point)
        ]
        hits += [
            blk for blk in built.blockmap.identity_blocks if blk.contains(built.point)
        ]
        assert len(hits) == 1


def test_reader_mode_warns_about_bijectivity():
    built = build_experiment(incrementer_spec(mode="reader"))
    assert built.warnings and "bijectivity" in built.warnings[0]


def test_orbit_hit_at_zero_when_point_in_region():
    built = build_experiment(incrementer_spec())
    region = BlockRegion(built.region)
    res = run_orbit(built.blockmap, built.point, built.region, 10)
    assert not region.contains(built.point)
    halted = CantorPoint(
        built.point.x,
        RadixRational(6, 1, 7),  # leading state digit = halting id
    )
    assert run_orbit(built.blockmap, halted, built.region, 10).hit == 0
    assert res.hit == 3


def test_orbit_no_hit_for_loop_machine():
    m = make_loop_machine()
    spec = ExperimentSpec(m, m.config({0: "1"}), 0, ("1",), "direct", 10_000)
    built = build_experiment(spec)
    res = run_orbit(built.blockmap, built.point, built.region, 10_000)
    assert res.hit is None
    assert not run(m, m.config({0: "1"}), 10_000).halted


def test_orbit_hit_equals_native_steps_direct():
    rng = Random(14)
    for _ in range(30):
        machine = random_machine(rng)
        config = random_config(rng, machine)
        native = run(machine, config, 200)
        spec = ExperimentSpec(machine, config, 0, (machine.blank,), "direct", 200)
        built = build_experiment(spec)
        res = run_orbit(built.blockmap, built.point, built.region, 200)
        if native.halted:
            assert res.hit == native.steps
        else:
            assert res.hit is None


def test_budget_monotonicity():
    rng = Random(15)
    for _ in range(20):
        machine = random_machine(rng)
        config = random_config(rng, machine)
        spec = ExperimentSpec(machine, config, 0, (machine.blank,), "direct", 50)
        built = build_experiment(spec)
        small = run_orbit(built.blockmap, built.point, built.region, 50)
        large = run_orbit(built.blockmap, built.point, built.region, 400)
        if small.hit is not None:
            assert large.hit == small.hit


def test_fast_orbit_engine_matches_apply_blockmap():
    rng = Random(16)
    for _ in range(15):
        machine = random_machine(rng)
        config = random_config(rng, machine)
        spec = ExperimentSpec(machine, config, 0, (machine.blank,), "direct", 60)
        built = build_experiment(spec)
        res = trace_orbit(built.blockmap, built.point, 60, built.region)
        assert len(res.trace) == 61
        p = built.point
        for row in res.trace:
            assert (row[1], row[2]) == (p.x.num, p.x.exp)
            assert (row[3], row[4]) == (p.y.num, p.y.exp)
            assert row[5] == built.blockmap.piece_index(p)
            last = p
            p = apply_blockmap(built.blockmap, p)
        assert res.final == last


def test_orbit_engine_general_path_mixed_depths():
    # A shift whose pieces live at different depth pairs exercises the
    # general (non-fused) orbit loop; a custom region at its own depth
    # exercises the multi-group membership test.
    from tmshift import CantorBlock, GeneralizedShift, encode_point
    from tmshift.cantor import compile_blockmap
    from tmshift.gshift import BiSequence

    alphabet = ("0", "1")
    table_f = {("0",): 2, ("1",): 0}
    table_g = {("0",): ("0",), ("1",): ("0",)}
    shift = GeneralizedShift(alphabet, (0, 0), (0, 0), table_f, table_g)
    pm = compile_blockmap(shift)
    depths = {(p.domain.x_depth, p.domain.y_depth) for p in pm.pieces}
    assert len(depths) > 1
    region = (CantorBlock(3, (2,), ()),)  # x starts with digit 2
    rng = Random(77)
    for _ in range(20):
        support = {
            rng.randint(-3, 3): rng.choice(alphabet) for _ in range(rng.randint(0, 4))
        }
        p = encode_point(BiSequence(alphabet, support))
        res = trace_orbit(pm, p, 30, region)
        q = p
        for row in res.trace:
            assert (row[1], row[2], row[3], row[4]) == (
                q.x.num, q.x.exp, q.y.num, q.y.exp
            )
            assert row[6] == int(q.x.prefix(1) == 2)
            q = apply_blockmap(pm, q)


def test_trace_replay_bit_for_bit():
    built = build_experiment(incrementer_spec())
    res = trace_orbit(built.blockmap, built.point, 40, built.region)
    radix = built.blockmap.radix
    points = [
        CantorPoint(RadixRational(r[1], r[2], radix), RadixRational(r[3], r[4], radix))
        for r in res.trace
    ]
    for i in range(len(points) - 1):
        assert apply_blockmap(built.blockmap, points[i]) == points[i + 1]


def test_verify_equivalence_trivial_halter():
    m = make_trivial_halter()
    spec = ExperimentSpec(m, m.config(), 0, ("b",), "direct", 100)
    verdict = verify_equivalence(spec)
    assert verdict.consistent
    assert verdict.hit == 1 and verdict.native.steps == 1


def test_verify_equivalence_direct_wrong_window_consistent():
    # The incrementer halts with 1 at cell 0; asking for blank must still
    # be consistent: both sides agree the window does not match.
    spec = incrementer_spec(target=("b",))
    verdict = verify_equivalence(spec)
    assert verdict.consistent
    assert verdict.hit == 3


def test_verify_equivalence_reader_modes():
    good = verify_equivalence(incrementer_spec(mode="reader", target=("1",)))
    assert good.consistent
    assert good.hit == 3 + reader_latency(0)
    wrong = verify_equivalence(incrementer_spec(mode="reader", target=("b",)))
    assert wrong.consistent
    assert wrong.hit is None


def test_verify_equivalence_randomized_corpus():
    rng = Random(90)
    consistent = 0
    for _ in range(60):
        machine = random_machine(rng)
        config = random_config(rng, machine)
        k = rng.randint(0, 1)
        native = run(machine, config, 500)
        if native.halted and rng.random() < 0.6:
            target = output_window(native.config, k)
        else:
            target = tuple(rng.choice(machine.alphabet) for _ in range(2 * k + 1))
        mode = rng.choice(("direct", "reader"))
        spec = ExperimentSpec(machine, config, k, target, mode, 500)
        verdict = verify_equivalence(spec)
        assert verdict.consistent
        consistent += 1
    assert consistent == 60


def test_viscous_budget_values():
    b = viscous_budget(10.0, 1.0)
    assert b.tau_limit == 10.0
    assert b.complete_steps == 9
    assert viscous_budget(3.0, 3.0).complete_steps == 0
    assert viscous_budget(10.5, 1.0).complete_steps == 10
    assert viscous_budget(0.5, 1.0).complete_steps == 0
    with pytest.raises(NonPositiveParameter):
        viscous_budget(0.0, 1.0)
    with pytest.raises(NonPositiveParameter):
        viscous_budget(1.0, -2.0)


def test_viscous_budget_complete_steps_invariant():
    rng = Random(2)
    for _ in range(200):
        m = rng.uniform(0.1, 30.0)
        nu = rng.uniform(0.1, 5.0)
        b = viscous_budget(m, nu)
        n = b.complete_steps
        assert n < m / nu
        assert n + 1 >= m / nu or b.tau_limit > n + 1 - 1e-12


def test_tau_matches_high_precision_reference():
    b = viscous_budget(10.0, 0.7)
    mpmath.mp.dps = 40
    for i in range(50):
        t = i * 0.37
        reference = (mpmath.mpf(10.0) / mpmath.mpf(0.7)) * (
            1 - mpmath.e ** (-mpmath.mpf(0.7) * t)
        )
        got = b.tau(t)
        assert abs(got - float(reference)) <= 1e-12 * max(1.0, float(reference))
    assert b.tau(0.0) == 0.0


def test_tau_monotone_and_bounded():
    # Strict growth holds until exp(-nu t) drops below float resolution.
    b = viscous_budget(4.0, 2.0)
    samples = [b.tau(t) for t in [i * 0.25 for i in range(56)]]
    assert all(x < b.tau_limit for x in samples)
    assert all(b2 > a for a, b2 in zip(samples, samples[1:]))
    assert math.isclose(b.tau(60.0), b.tau_limit, rel_tol=1e-9)
