"""Command-line front end for the compile/simulate/verify pipeline."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

from . import cantor, formats, gshift, harness, suspension, svgplot, tm
from .rational import RadixRational


@dataclass
class _System:
    """A loaded dynamical system: block map plus optional machine context."""

    shift: gshift.GeneralizedShift
    blockmap: cantor.PiecewiseBlockMap
    conj: gshift.Conjugation | None
    halt_symbol: str | None

    @property
    def region(self):
        if self.halt_symbol is None:
            return ()
        return cantor.halt_blocks(self.shift.alphabet, self.halt_symbol)


def _add_source_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--machine", help="machine description file")
    group.add_argument("--shift", help="shift description file")
    group.add_argument(
        "--example",
        choices=("demo", "demo-alt"),
        help="built-in two-symbol shift (the alt variant keys the shift on position -1)",
    )


def _load_system(args) -> _System:
    if args.machine:
        machine = formats.load_machine(args.machine)
        extended = tm.extend_halting(machine)
        shift, conj = gshift.compile_tm(extended)
        return _System(shift, cantor.compile_blockmap(shift), conj, machine.halting)
    if args.shift:
        doc = formats.load_shift(args.shift)
        return _System(
            doc.shift, cantor.compile_blockmap(doc.shift), None, doc.halt_symbol
        )
    shift = gshift.demo_shift(alt=args.example == "demo-alt")
    return _System(shift, cantor.compile_blockmap(shift), None, None)


def _sequence_from_args(system: _System, args) -> gshift.BiSequence:
    symbols = tuple(args.input or ())
    offset = args.input_offset
    if system.conj is not None:
        tape = {offset + i: s for i, s in enumerate(symbols)}
        config = tm.Configuration(
            args.state or system.conj.machine.initial,
            tape,
            system.conj.machine.blank,
        )
        return gshift.encode_config(system.conj, config)
    support = {offset + i: s for i, s in enumerate(symbols)}
    return gshift.BiSequence(system.shift.alphabet, support)


def _cmd_check_reversible(args) -> int:
    machine = tm.extend_halting(formats.load_machine(args.machine_file))
    report = tm.check_reversible(machine)
    if report.reversible:
        print("reversible=true")
        return 0
    print("reversible=false")
    (qa, sa), (qb, sb) = report.rule_pair
    for tag, (q, s) in (("a", (qa, sa)), ("b", (qb, sb))):
        q2, s2, move = machine.rules[(q, s)]
        print(
            f"witness_rule_{tag}={q} {s} -> {q2} {s2} {formats.MOVE_TO_LETTER[move]}"
        )
    for tag, cfg in zip("ab", report.config_pair):
        cells = ",".join(f"{n}:{s}" for n, s in sorted(cfg.tape.items()))
        print(f"witness_config_{tag}=state={cfg.state} tape={cells or '-'}")
    return 0


def _cmd_make_reader(args) -> int:
    machine = formats.load_machine(args.machine_file)
    reader = tm.make_reader(machine, args.k, tuple(args.target))
    Path(args.output).write_text(formats.machine_to_text(reader))
    print(f"reader={args.output} states={len(reader.states)}")
    return 0


def _cmd_compile(args) -> int:
    machine = formats.load_machine(args.machine_file)
    extended = tm.extend_halting(machine)
    shift, _ = gshift.compile_tm(extended)
    Path(args.output).write_text(
        formats.shift_to_text(shift, halt_symbol=machine.halting)
    )
    pm = cantor.compile_blockmap(shift)
    if args.blockmap:
        Path(args.blockmap).write_text(formats.blockmap_to_text(pm))
    line = (
        f"shift={args.output} alphabet={len(shift.alphabet)} "
        f"pieces={pm.piece_count} components={pm.component_count}"
    )
    if args.check:
        report = cantor.verify_blockmap(pm, shift, seed=args.seed)
        line += (
            f" domains_disjoint={str(report.domains_disjoint).lower()}"
            f" domains_cover={str(report.domains_cover).lower()}"
            f" determinants_one={str(report.determinants_one).lower()}"
            f" bound={report.bound}"
            f" bound_ok={str(report.bound_ok).lower()}"
            f" images_disjoint={str(report.images_disjoint).lower()}"
            f" conjugacy_ok={str(report.conjugacy_ok).lower()}"
        )
    print(line)
    return 0


def _cmd_simulate(args) -> int:
    system = _load_system(args)
    seq = _sequence_from_args(system, args)
    point = cantor.encode_point(seq)
    result = harness.trace_orbit(system.blockmap, point, args.steps, system.region)
    if args.trace:
        rows = result.trace
        Path(args.trace).write_text(formats.trace_text(system.blockmap.radix, rows))
    hit = "NONE" if result.hit is None else str(result.hit)
    final = result.final
    print(
        f"iterations={result.iterations} hit={hit} radix={system.blockmap.radix} "
        f"x_num={final.x.num} x_exp={final.x.exp} "
        f"y_num={final.y.num} y_exp={final.y.exp}"
    )
    return 0


def _verify_one(path: str) -> str:
    doc = formats.load_experiment(path)
    spec = harness.ExperimentSpec(
        machine=doc.machine,
        input=doc.input_config(),
        k=doc.k,
        target=doc.target,
        mode=doc.mode,
        budget=doc.budget,
    )
    verdict = harness.verify_equivalence(spec)
    return formats.verdict_record(formats.machine_hash(doc.machine), verdict)


def _cmd_verify(args) -> int:
    paths = list(args.experiment)
    if args.jobs > 1 and len(paths) > 1:
        with Pool(args.jobs) as pool:
            records = pool.map(_verify_one, paths)
    else:
        records = [_verify_one(p) for p in paths]
    for path, record in zip(paths, records):
        if args.format == "pretty":
            print(f"{path}:")
            for part in record.split():
                print(f"  {part}")
        else:
            print(record)
    return 0


def _cmd_encode_point(args) -> int:
    system = _load_system(args)
    seq = _sequence_from_args(system, args)
    point = cantor.encode_point(seq)
    print(
        f"radix={point.radix} x_num={point.x.num} x_exp={point.x.exp} "
        f"y_num={point.y.num} y_exp={point.y.exp}"
    )
    return 0


def _cmd_budget(args) -> int:
    budget = harness.viscous_budget(args.M, args.nu)
    print(f"tau_limit={budget.tau_limit!r} complete_steps={budget.complete_steps}")
    for t in args.tau or ():
        print(f"tau t={t!r} value={budget.tau(t)!r}")
    return 0


def _cmd_suspension(args) -> int:
    family = suspension.family_from_name(
        args.family,
        amplitude=args.amplitude,
        boundary_margin=args.boundary_margin,
        time_margin=args.time_margin,
    )
    problem = suspension.SuspensionProblem(
        family, C=args.c_constant, tolerance=args.tolerance, grid=args.grid
    )
    report = suspension.compare_return_map(
        problem, samples=args.samples, seed=args.seed
    )
    print(report.to_record())
    return 0


def _cmd_render(args) -> int:
    system = _load_system(args)
    orbit: tuple[cantor.CantorPoint, ...] = ()
    if args.orbit_steps:
        seq = _sequence_from_args(system, args)
        result = harness.trace_orbit(
            system.blockmap, cantor.encode_point(seq), args.orbit_steps, ()
        )
        orbit = tuple(
            cantor.CantorPoint(
                RadixRational(r[1], r[2], system.blockmap.radix),
                RadixRational(r[3], r[4], system.blockmap.radix),
            )
            for r in result.trace
        )
    svg = svgplot.render_blockmap(system.blockmap, orbit, title=args.title)
    Path(args.svg).write_text(svg)
    print(f"svg={args.svg} bytes={len(svg.encode())}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmshift",
        description=(
            "Compile Turing machines to generalized shifts and exact "
            "area-preserving block maps, run orbits, and verify the "
            "halting/orbit equivalence."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-reversible", help="decide injectivity of a machine")
    p.add_argument("machine_file")
    p.set_defaults(func=_cmd_check_reversible)

    p = sub.add_parser("make-reader", help="build the output-window reader machine")
    p.add_argument("machine_file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", nargs="+", required=True, metavar="SYM")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_make_reader)

    p = sub.add_parser("compile", help="compile a machine to a shift file")
    p.add_argument("machine_file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--check", action="store_true", help="audit the block map")
    p.add_argument("--blockmap", help="also dump the exact piece list here")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("simulate", help="iterate the block map and dump a trace")
    _add_source_args(p)
    p.add_argument("--input", nargs="*", metavar="SYM")
    p.add_argument("--input-offset", type=int, default=0)
    p.add_argument("--state", help="override the initial state (machine sources)")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trace", help="write the exact orbit trace CSV here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run halting/orbit equivalence experiments")
    p.add_argument("experiment", nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("record", "pretty"), default="record")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("encode-point", help="encode an input as an exact point")
    _add_source_args(p)
    p.add_argument("--input", nargs="*", metavar="SYM")
    p.add_argument("--input-offset", type=int, default=0)
    p.add_argument("--state")
    p.set_defaults(func=_cmd_encode_point)

    p = sub.add_parser("budget", help="viscous time budget of the decaying flow")
    p.add_argument("--M", type=float, required=True, help="initial amplitude")
    p.add_argument("--nu", type=float, required=True, help="viscosity")
    p.add_argument("--tau", type=float, action="append", metavar="T")
    p.set_defaults(func=_cmd_budget)

    p = sub.add_parser("suspension", help="suspension return-map report")
    p.add_argument("--family", choices=sorted(suspension.FAMILIES), required=True)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--boundary-margin", type=float, default=0.2)
    p.add_argument("--time-margin", type=float, default=0.1)
    p.add_argument("--c-constant", type=float, default=None)
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_suspension)

    p = sub.add_parser("render", help="render a block map (and orbit) as SVG")
    _add_source_args(p)
    p.add_argument("--svg", required=True)
    p.add_argument("--input", nargs="*", metavar="SYM")
    p.add_argument("--input-offset", type=int, default=0)
    p.add_argument("--state")
    p.add_argument("--orbit-steps", type=int, default=0)
    p.add_argument("--title", default="")
    p.set_defaults(func=_cmd_render)

    return parser


_DOMAIN_ERRORS = (
    tm.MachineError,
    gshift.ShiftError,
    cantor.NotCantor,
    harness.ExperimentError,
    harness.NonPositiveParameter,
    suspension.SuspensionError,
    formats.FormatError,
    FileNotFoundError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(formats.error_record(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
