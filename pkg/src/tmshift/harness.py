"""End-to-end halting/orbit equivalence experiments and the viscous step budget.

An experiment fixes a machine, an input tape, a window half-width k and a
target string. The machine is compiled down to a block map, the input to a
point, and the halting cylinders to a region; the orbit enters the region
exactly when the machine halts (direct mode) or halts with the prescribed
output window (reader mode). The native simulator is run alongside as the
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from . import cantor, gshift, tm
from .cantor import CantorBlock, CantorPoint, PiecewiseBlockMap
from .rational import RadixRational


class ExperimentError(ValueError):
    pass


class NonPositiveParameter(ValueError):
    pass


Mode = Literal["direct", "reader"]

# One trace row: (iteration, x_num, x_exp, y_num, y_exp, block_id, in_region).
TraceRow = tuple[int, int, int, int, int, int, int]


@dataclass(frozen=True)
class ExperimentSpec:
    machine: tm.TuringMachine
    input: tm.Configuration
    k: int
    target: tuple[str, ...]
    mode: Mode
    budget: int

    def __post_init__(self):
        if self.budget < 1:
            raise ExperimentError("budget must be >= 1")
        if self.k < 0:
            raise ExperimentError("k must be >= 0")
        if len(self.target) != 2 * self.k + 1:
            raise ExperimentError(
                f"target must have {2 * self.k + 1} symbols, got {len(self.target)}"
            )
        for s in self.target:
            if s not in self.machine.alphabet:
                raise tm.SymbolNotInAlphabet(f"target symbol {s!r} not in alphabet")
        if self.input.blank != self.machine.blank:
            raise ExperimentError("input blank does not match the machine")
        if self.mode not in ("direct", "reader"):
            raise ExperimentError(f"unknown mode {self.mode!r}")
        if self.mode == "reader" and self.input.state == self.machine.halting:
            raise ExperimentError("reader mode requires a non-halting input state")


@dataclass(frozen=True)
class BuiltExperiment:
    """The compiled artifacts of an experiment: point, region and map."""

    spec: ExperimentSpec
    compiled_machine: tm.TuringMachine
    shift: gshift.GeneralizedShift
    conjugation: gshift.Conjugation
    point: CantorPoint
    region: tuple[CantorBlock, ...]
    blockmap: PiecewiseBlockMap
    warnings: tuple[str, ...]


def build_experiment(spec: ExperimentSpec) -> BuiltExperiment:
    """Compile the experiment. Reader mode wraps the machine in its reader first.

    The reader's absorbing non-halting state makes the wrapped machine
    non-injective by construction, so bijectivity claims do not apply in
    reader mode and a warning records that.
    """
    warnings: list[str] = []
    if spec.mode == "reader":
        machine = tm.make_reader(spec.machine, spec.k, spec.target)
        warnings.append(
            "reader mode: the absorbing non-halting state is non-injective, "
            "bijectivity claims are suppressed"
        )
    else:
        machine = spec.machine
    extended = tm.extend_halting(machine)
    shift, conj = gshift.compile_tm(extended)
    config = tm.Configuration(spec.input.state, dict(spec.input.tape), spec.input.blank)
    point = cantor.encode_point(gshift.encode_config(conj, config))
    region = cantor.halt_region(conj)
    blockmap = cantor.compile_blockmap(shift)
    return BuiltExperiment(
        spec, extended, shift, conj, point, region, blockmap, tuple(warnings)
    )


@dataclass(frozen=True)
class OrbitResult:
    hit: int | None
    iterations: int
    final: CantorPoint
    trace: tuple[TraceRow, ...] | None = None


class _FastCoord:
    """One coordinate of an orbit point with an incrementally maintained
    power of the radix, so every step costs work linear in the numerator."""

    __slots__ = ("num", "exp", "pw", "radix")

    def __init__(self, r: RadixRational):
        self.num = r.num
        self.exp = r.exp
        self.radix = r.radix
        self.pw = r.radix**r.exp

    def prefix(self, d: int) -> int:
        if d <= 0:
            return 0
        if self.exp <= d:
            return self.num * self.radix ** (d - self.exp)
        return self.num // (self.pw // self.radix**d)

    def affine(self, s: int, cnum: int, cexp: int) -> None:
        # value := radix**s * value + cnum / radix**cexp, kept canonical
        b = self.radix
        e = self.exp - s
        pw = self.pw
        if s > 0:
            pw //= b**s
        elif s < 0:
            pw *= b ** (-s)
        if e >= cexp:
            num = self.num + cnum * (pw // b**cexp)
        else:
            num = self.num * b ** (cexp - e) + cnum
            pw *= b ** (cexp - e)
            e = cexp
        while e > 0 and num % b == 0:
            num //= b
            e -= 1
            pw //= b
        if num == 0:
            e = 0
            pw = 1
        self.num = num
        self.exp = e
        self.pw = pw

    def rational(self) -> RadixRational:
        return RadixRational(self.num, self.exp, self.radix)


def _region_groups(blocks) -> list[tuple[int, int, set[tuple[int, int]]]]:
    table: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for blk in blocks:
        table.setdefault((blk.x_depth, blk.y_depth), set()).add(
            (blk.x_offset, blk.y_offset)
        )
    return [(dx, dy, offs) for (dx, dy), offs in table.items()]


def _piece_groups(pm: PiecewiseBlockMap):
    groups: dict[tuple[int, int], dict[tuple[int, int], tuple]] = {}
    for idx, piece in enumerate(pm.pieces):
        d = piece.domain
        cx = piece.x_offset_term()
        cy = piece.y_offset_term()
        groups.setdefault((d.x_depth, d.y_depth), {})[
            (d.x_offset, d.y_offset)
        ] = (piece.x_scale_exp, cx.num, cx.exp, piece.y_scale_exp, cy.num, cy.exp, idx)
    return [(dx, dy, table) for (dx, dy), table in groups.items()]


def _orbit(
    pm: PiecewiseBlockMap,
    p: CantorPoint,
    blocks,
    max_iter: int,
    stop_on_hit: bool,
    record: bool,
) -> OrbitResult:
    region = _region_groups(blocks)
    pieces = _piece_groups(pm)
    # Machine-compiled maps keep all domains and all region blocks at one
    # depth pair, so one prefix pair per step serves both lookups.
    fused = (
        len(pieces) == 1
        and len(region) <= 1
        and all(r[:2] == pieces[0][:2] for r in region)
    )
    x = _FastCoord(p.x)
    y = _FastCoord(p.y)
    trace: list[TraceRow] = []
    hit: int | None = None
    i = 0
    if fused:
        dx, dy, table = pieces[0]
        offs = region[0][2] if region else frozenset()
        xprefix, yprefix = x.prefix, y.prefix
        while True:
            key = (xprefix(dx), yprefix(dy))
            in_region = key in offs
            data = table.get(key)
            if record:
                trace.append(
                    (i, x.num, x.exp, y.num, y.exp,
                     data[6] if data else -1, int(in_region))
                )
            if in_region and hit is None:
                hit = i
                if stop_on_hit:
                    break
            if i >= max_iter:
                break
            if data is not None:
                x.affine(data[0], data[1], data[2])
                y.affine(data[3], data[4], data[5])
            i += 1
        return OrbitResult(
            hit, i, CantorPoint(x.rational(), y.rational()),
            tuple(trace) if record else None,
        )
    while True:
        in_region = any(
            (x.prefix(dx), y.prefix(dy)) in offs for dx, dy, offs in region
        )
        data = None
        for dx, dy, table in pieces:
            data = table.get((x.prefix(dx), y.prefix(dy)))
            if data is not None:
                break
        if record:
            trace.append(
                (i, x.num, x.exp, y.num, y.exp, data[6] if data else -1, int(in_region))
            )
        if in_region and hit is None:
            hit = i
            if stop_on_hit:
                break
        if i >= max_iter:
            break
        if data is not None:
            sx, cxn, cxe, sy, cyn, cye, _ = data
            x.affine(sx, cxn, cxe)
            y.affine(sy, cyn, cye)
        i += 1
    return OrbitResult(
        hit,
        i,
        CantorPoint(x.rational(), y.rational()),
        tuple(trace) if record else None,
    )


def run_orbit(
    pm: PiecewiseBlockMap,
    p: CantorPoint,
    blocks,
    budget: int,
    record_trace: bool = False,
) -> OrbitResult:
    """Iterate the block map from ``p``, testing region membership each step.

    Membership is tested before the first application, so a point already
    in the region reports a hit at iteration 0. Stops at the first hit or
    after ``budget`` applications.
    """
    if budget < 1:
        raise ExperimentError("budget must be >= 1")
    return _orbit(pm, p, blocks, budget, stop_on_hit=True, record=record_trace)


def trace_orbit(
    pm: PiecewiseBlockMap, p: CantorPoint, steps: int, blocks=()
) -> OrbitResult:
    """A fixed-length exact orbit trace of ``steps`` applications."""
    if steps < 0:
        raise ExperimentError("steps must be >= 0")
    return _orbit(pm, p, blocks, steps, stop_on_hit=False, record=True)


@dataclass(frozen=True)
class Verdict:
    """Orbit-side and native-side halting claims plus their agreement."""

    mode: Mode
    budget: int
    hit: int | None
    expected_hit: int | None
    native: tm.RunResult
    native_window: tuple[str, ...]
    consistent: bool


def verify_equivalence(spec: ExperimentSpec) -> Verdict:
    """Run the orbit and the native machine and compare their claims.

    Direct mode: the orbit hit certifies halting and the output window is
    read off the decoded hit configuration. Reader mode: the orbit alone
    decides halting-with-window; the orbit budget is extended by the
    reader latency so both sides observe the same native step budget.
    """
    built = build_experiment(spec)
    native = tm.run(spec.machine, spec.input, spec.budget)
    native_window = tm.output_window(native.config, spec.k)
    native_window_ok = native.halted and native_window == spec.target

    if spec.mode == "reader":
        latency = tm.reader_latency(spec.k)
        orbit = run_orbit(
            built.blockmap, built.point, built.region, spec.budget + latency
        )
        expected = native.steps + latency if native_window_ok else None
        consistent = (orbit.hit is not None) == native_window_ok
        if consistent and orbit.hit is not None:
            consistent = orbit.hit == expected
        return Verdict(
            spec.mode, spec.budget, orbit.hit, expected, native, native_window, consistent
        )

    orbit = run_orbit(built.blockmap, built.point, built.region, spec.budget)
    expected = native.steps if native.halted else None
    consistent = (orbit.hit is not None) == native.halted
    orbit_window_ok = False
    if orbit.hit is not None:
        decoded = gshift.decode_config(
            built.conjugation, cantor.decode_point(orbit.final, built.shift.alphabet)
        )
        orbit_window_ok = tm.output_window(decoded, spec.k) == spec.target
        if consistent:
            consistent = orbit.hit == expected and decoded == native.config
    if consistent:
        consistent = orbit_window_ok == native_window_ok
    return Verdict(
        spec.mode, spec.budget, orbit.hit, expected, native, native_window, consistent
    )


@dataclass(frozen=True)
class ViscousBudget:
    """Reparametrized time budget of the decaying flow.

    The particle paths of the decaying solution with amplitude M and
    viscosity nu traverse the underlying stationary orbit for the rescaled
    time tau(t) = (M/nu)(1 - exp(-nu t)), which tends to M/nu but never
    attains it; with a unit return time, only complete_steps = max{n : n <
    M/nu} full map iterations are ever simulated.
    """

    M: float
    nu: float
    tau_limit: float
    complete_steps: int

    def tau(self, t: float) -> float:
        if t < 0:
            raise NonPositiveParameter("time must be >= 0")
        return (self.M / self.nu) * (1.0 - math.exp(-self.nu * t))


def viscous_budget(M: float, nu: float) -> ViscousBudget:
    if M <= 0 or nu <= 0:
        raise NonPositiveParameter("amplitude and viscosity must be positive")
    limit = M / nu
    steps = math.ceil(limit) - 1
    return ViscousBudget(M, nu, limit, steps)
