"""Line-oriented file formats, trace CSV, and machine-readable records.

Machine files declare the alphabet (blank first), the states, the initial
and halting ids, and one rule per line; move letters map L to +1, R to -1
and N to 0. Shift files mirror the layout with window bounds and explicit
F/G entries, omitted entries defaulting to no shift and the identity
rewrite, which makes compiled shifts serialize losslessly and compactly.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .gshift import GeneralizedShift, Window
from .harness import TraceRow, Verdict
from .tm import Configuration, TuringMachine

MOVE_TO_LETTER = {1: "L", -1: "R", 0: "N"}
LETTER_TO_MOVE = {"L": 1, "R": -1, "N": 0}


class FormatError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _keyed(line: str, lineno: int) -> tuple[str, str]:
    if ":" not in line:
        raise FormatError(f"line {lineno}: expected 'key: value', got {line!r}")
    key, value = line.split(":", 1)
    return key.strip(), value.strip()


def parse_machine(text: str) -> TuringMachine:
    alphabet: tuple[str, ...] | None = None
    states: tuple[str, ...] | None = None
    initial: str | None = None
    halt: str | None = None
    rules: dict[tuple[str, str], tuple[str, str, int]] = {}
    for lineno, line in _lines(text):
        key, value = _keyed(line, lineno)
        if key == "alphabet":
            alphabet = tuple(value.split())
        elif key == "states":
            states = tuple(value.split())
        elif key == "initial":
            initial = value
        elif key == "halt":
            halt = value
        elif key == "rule":
            if "->" not in value:
                raise FormatError(f"line {lineno}: rule needs '->'")
            left, right = value.split("->", 1)
            lhs = left.split()
            rhs = right.split()
            if len(lhs) != 2 or len(rhs) != 3:
                raise FormatError(
                    f"line {lineno}: rule must be 'q s -> q2 s2 M', got {value!r}"
                )
            move = LETTER_TO_MOVE.get(rhs[2])
            if move is None:
                raise FormatError(f"line {lineno}: move must be L, R or N")
            if (lhs[0], lhs[1]) in rules:
                raise FormatError(f"line {lineno}: duplicate rule for ({lhs[0]}, {lhs[1]})")
            rules[(lhs[0], lhs[1])] = (rhs[0], rhs[1], move)
        else:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
    for name, value in (("alphabet", alphabet), ("states", states),
                        ("initial", initial), ("halt", halt)):
        if value is None:
            raise FormatError(f"missing '{name}:' declaration")
    for (q, _s) in rules:
        if q == halt:
            raise FormatError(
                "machine files may not declare rules from the halting state"
            )
    return TuringMachine(states, initial, halt, alphabet, rules)


def machine_to_text(machine: TuringMachine) -> str:
    """Canonical text form; halting-extension rows are never written."""
    out = [
        "alphabet: " + " ".join(machine.alphabet),
        "states: " + " ".join(machine.states),
        f"initial: {machine.initial}",
        f"halt: {machine.halting}",
    ]
    for q in machine.states:
        if q == machine.halting:
            continue
        for s in machine.alphabet:
            q2, s2, move = machine.rules[(q, s)]
            out.append(f"rule: {q} {s} -> {q2} {s2} {MOVE_TO_LETTER[move]}")
    return "\n".join(out) + "\n"


def machine_hash(machine: TuringMachine) -> str:
    return hashlib.sha256(machine_to_text(machine).encode()).hexdigest()[:12]


def load_machine(path: str | Path) -> TuringMachine:
    return parse_machine(Path(path).read_text())


@dataclass(frozen=True)
class ShiftDoc:
    """A parsed shift file: the shift plus optional halting metadata."""

    shift: GeneralizedShift
    halt_symbol: str | None = None


def parse_shift(text: str) -> ShiftDoc:
    alphabet: tuple[str, ...] | None = None
    window_f: tuple[int, int] | None = None
    window_g: tuple[int, int] | None = None
    halt_symbol: str | None = None
    f_entries: dict[Window, int] = {}
    g_entries: dict[Window, Window] = {}
    for lineno, line in _lines(text):
        key, value = _keyed(line, lineno)
        if key == "alphabet":
            alphabet = tuple(value.split())
        elif key in ("windowF", "windowG"):
            parts = value.split()
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: window needs two bounds")
            bounds = (int(parts[0]), int(parts[1]))
            if key == "windowF":
                window_f = bounds
            else:
                window_g = bounds
        elif key == "halt-symbol":
            halt_symbol = value
        elif key in ("F", "G"):
            if "->" not in value:
                raise FormatError(f"line {lineno}: table entry needs '->'")
            left, right = value.split("->", 1)
            window = tuple(left.split())
            if key == "F":
                f_entries[window] = int(right.strip())
            else:
                g_entries[window] = tuple(right.split())
        else:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
    if alphabet is None or window_f is None or window_g is None:
        raise FormatError("shift files need alphabet, windowF and windowG")
    r = window_f[1] - window_f[0] + 1
    l = window_g[1] - window_g[0] + 1
    table_f = {w: f_entries.get(w, 0) for w in product(alphabet, repeat=r)}
    table_g = {w: g_entries.get(w, w) for w in product(alphabet, repeat=l)}
    for w in f_entries:
        if len(w) != r or any(s not in alphabet for s in w):
            raise FormatError(f"F entry {w} does not match the F window")
    for w in g_entries:
        if len(w) != l or any(s not in alphabet for s in w):
            raise FormatError(f"G entry {w} does not match the G window")
    shift = GeneralizedShift(alphabet, window_f, window_g, table_f, table_g)
    if halt_symbol is not None and halt_symbol not in alphabet:
        raise FormatError(f"halt symbol {halt_symbol!r} not in alphabet")
    return ShiftDoc(shift, halt_symbol)


def shift_to_text(shift: GeneralizedShift, halt_symbol: str | None = None) -> str:
    out = [
        "alphabet: " + " ".join(shift.alphabet),
        f"windowF: {shift.window_f[0]} {shift.window_f[1]}",
        f"windowG: {shift.window_g[0]} {shift.window_g[1]}",
    ]
    if halt_symbol is not None:
        out.append(f"halt-symbol: {halt_symbol}")
    r = shift.window_f[1] - shift.window_f[0] + 1
    l = shift.window_g[1] - shift.window_g[0] + 1
    for w in product(shift.alphabet, repeat=r):
        v = shift.table_f[w]
        if v != 0:
            out.append("F: " + " ".join(w) + f" -> {v}")
    for w in product(shift.alphabet, repeat=l):
        img = shift.table_g[w]
        if img != w:
            out.append("G: " + " ".join(w) + " -> " + " ".join(img))
    return "\n".join(out) + "\n"


def load_shift(path: str | Path) -> ShiftDoc:
    return parse_shift(Path(path).read_text())


@dataclass(frozen=True)
class ExperimentDoc:
    machine: TuringMachine
    machine_path: Path
    input_symbols: tuple[str, ...]
    input_offset: int
    state: str | None
    k: int
    target: tuple[str, ...]
    mode: str
    budget: int

    def input_config(self) -> Configuration:
        tape = {
            self.input_offset + i: s for i, s in enumerate(self.input_symbols)
        }
        return Configuration(
            self.state or self.machine.initial, tape, self.machine.blank
        )


def parse_experiment(text: str, base_dir: str | Path = ".") -> ExperimentDoc:
    base = Path(base_dir)
    fields: dict[str, str] = {}
    for lineno, line in _lines(text):
        key, value = _keyed(line, lineno)
        if key in fields:
            raise FormatError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value
    for required in ("machine", "k", "target", "mode", "budget"):
        if required not in fields:
            raise FormatError(f"missing '{required}:' declaration")
    machine_path = base / fields["machine"]
    machine = load_machine(machine_path)
    return ExperimentDoc(
        machine=machine,
        machine_path=machine_path,
        input_symbols=tuple(fields.get("input", "").split()),
        input_offset=int(fields.get("input-offset", "0")),
        state=fields.get("state"),
        k=int(fields["k"]),
        target=tuple(fields["target"].split()),
        mode=fields["mode"],
        budget=int(fields["budget"]),
    )


def load_experiment(path: str | Path) -> ExperimentDoc:
    p = Path(path)
    return parse_experiment(p.read_text(), p.parent)


def write_trace(stream: io.TextIOBase, radix: int, rows) -> None:
    stream.write(f"# radix={radix}\n")
    stream.write("iter,x_num,x_exp,y_num,y_exp,block_id,in_halt_region\n")
    for row in rows:
        stream.write(",".join(str(v) for v in row) + "\n")


def trace_text(radix: int, rows) -> str:
    buf = io.StringIO()
    write_trace(buf, radix, rows)
    return buf.getvalue()


def read_trace(text: str) -> tuple[int, list[TraceRow]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# radix="):
        raise FormatError("trace must start with a '# radix=' metadata line")
    radix = int(lines[0].split("=", 1)[1])
    if len(lines) < 2 or lines[1] != "iter,x_num,x_exp,y_num,y_exp,block_id,in_halt_region":
        raise FormatError("bad trace header")
    rows = []
    for line in lines[2:]:
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise FormatError(f"bad trace row {line!r}")
        rows.append(tuple(int(v) for v in parts))
    return radix, rows


def blockmap_to_text(pm) -> str:
    """Line-oriented dump of the pieces with exact rational coefficients."""
    b = pm.radix
    out = [f"# radix={b} pieces={pm.piece_count} identity={len(pm.identity_digits)}"]
    for i, piece in enumerate(pm.pieces):
        d, im = piece.domain, piece.image
        cx, cy = piece.x_offset_term(), piece.y_offset_term()
        out.append(
            f"piece {i} "
            f"domain={d.x_offset}/{b}^{d.x_depth},{d.y_offset}/{b}^{d.y_depth} "
            f"image={im.x_offset}/{b}^{im.x_depth},{im.y_offset}/{b}^{im.y_depth} "
            f"x={b}^{piece.x_scale_exp}*x+{cx.num}/{b}^{cx.exp} "
            f"y={b}^{piece.y_scale_exp}*y+{cy.num}/{b}^{cy.exp}"
        )
    return "\n".join(out) + "\n"


def verdict_record(mhash: str, verdict: Verdict) -> str:
    hit = "NONE" if verdict.hit is None else str(verdict.hit)
    native = str(verdict.native.steps) if verdict.native.halted else "NONE"
    flag = "true" if verdict.consistent else "false"
    return (
        f"machine={mhash} mode={verdict.mode} hit={hit} "
        f"native={native} consistent={flag}"
    )


def error_record(exc: BaseException) -> str:
    message = str(exc).replace('"', "'")
    return f'error type={type(exc).__name__} message="{message}"'
