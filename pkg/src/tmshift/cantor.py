"""Exact encoding of sequences on the square Cantor set and block-map lowering.

A sequence over an n-symbol alphabet becomes a point of the generalized
square Cantor set in radix b = 2n - 1: symbol k contributes the even digit
2k, positions -1, -2, ... feed the x expansion and positions 0, 1, ... feed
the y expansion. A generalized shift then lowers to finitely many affine
pieces on Cantor blocks, each a digit rewrite composed with a digit-stream
shift, with determinant exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from random import Random

from .gshift import BiSequence, Conjugation, GeneralizedShift, ShiftError, apply
from .rational import RadixRational


class NotCantor(ValueError):
    """A coordinate has an odd digit, so the point is off the Cantor set."""


def alphabet_radix(alphabet: tuple[str, ...]) -> int:
    return 2 * len(alphabet) - 1


@dataclass(frozen=True)
class CantorPoint:
    """A point of the unit square with shared-radix exact coordinates."""

    x: RadixRational
    y: RadixRational

    def __post_init__(self):
        if self.x.radix != self.y.radix:
            raise ValueError("coordinates must share one radix")

    @property
    def radix(self) -> int:
        return self.x.radix

    def on_cantor_set(self) -> bool:
        return self.x.all_digits_even() and self.y.all_digits_even()

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class CantorBlock:
    """The closed block fixing the leading x and y digits.

    With xdigits = (d1, ..., di) and offset a = sum d_k b^(i-k), the block is
    [a/b^i, (a+1)/b^i] x [same for ydigits]. It meets the Cantor set exactly
    when every stored digit is even.
    """

    radix: int
    xdigits: tuple[int, ...]
    ydigits: tuple[int, ...]
    x_offset: int = field(init=False, compare=False)
    y_offset: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x_offset", _digits_to_int(self.xdigits, self.radix))
        object.__setattr__(self, "y_offset", _digits_to_int(self.ydigits, self.radix))

    @property
    def x_depth(self) -> int:
        return len(self.xdigits)

    @property
    def y_depth(self) -> int:
        return len(self.ydigits)

    def x_lo(self) -> RadixRational:
        return RadixRational(self.x_offset, self.x_depth, self.radix)

    def y_lo(self) -> RadixRational:
        return RadixRational(self.y_offset, self.y_depth, self.radix)

    def has_cantor_points(self) -> bool:
        return all(d % 2 == 0 for d in self.xdigits + self.ydigits)

    def contains(self, p: CantorPoint) -> bool:
        """Digit-prefix membership; exact, no interval arithmetic."""
        return (
            p.radix == self.radix
            and p.x.prefix(self.x_depth) == self.x_offset
            and p.y.prefix(self.y_depth) == self.y_offset
        )

    def __str__(self) -> str:
        b, i, j = self.radix, self.x_depth, self.y_depth
        return (
            f"[{self.x_offset}/{b}^{i},{self.x_offset + 1}/{b}^{i}]"
            f"x[{self.y_offset}/{b}^{j},{self.y_offset + 1}/{b}^{j}]"
        )


def _digits_to_int(digits: tuple[int, ...], radix: int) -> int:
    n = 0
    for d in digits:
        n = n * radix + d
    return n


@dataclass(frozen=True)
class Piece:
    """One affine component: domain block, image block, stream shift amount.

    The map is x -> b^sx * x + cx, y -> b^sy * y + cy with sx = -shift and
    sy = +shift, so the Jacobian determinant is exactly one. The offsets are
    pinned by sending the domain corner to the image corner.
    """

    domain: CantorBlock
    image: CantorBlock
    shift: int

    def __post_init__(self):
        if self.image.x_depth != self.domain.x_depth + self.shift:
            raise ValueError("image x depth inconsistent with shift amount")
        if self.image.y_depth != self.domain.y_depth - self.shift:
            raise ValueError("image y depth inconsistent with shift amount")

    @property
    def x_scale_exp(self) -> int:
        return -self.shift

    @property
    def y_scale_exp(self) -> int:
        return self.shift

    def x_offset_term(self) -> RadixRational:
        return self.image.x_lo() - self.domain.x_lo().scaled(self.x_scale_exp)

    def y_offset_term(self) -> RadixRational:
        return self.image.y_lo() - self.domain.y_lo().scaled(self.y_scale_exp)

    def apply(self, p: CantorPoint) -> CantorPoint:
        x = p.x.scaled(self.x_scale_exp) + self.x_offset_term()
        y = p.y.scaled(self.y_scale_exp) + self.y_offset_term()
        return CantorPoint(x, y)


@dataclass(frozen=True)
class PiecewiseBlockMap:
    """Finitely many affine pieces on Cantor blocks, identity elsewhere.

    ``pieces`` holds the non-identity components; ``identity_digits`` keeps
    the digit addresses of the enumerated components whose action is
    trivial, so verification can audit the full component list while
    application uses the short one.
    """

    radix: int
    pieces: tuple[Piece, ...]
    identity_digits: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self):
        lookup: dict[tuple[int, int], dict[tuple[int, int], Piece]] = {}
        for piece in self.pieces:
            d = piece.domain
            key = (d.x_depth, d.y_depth)
            lookup.setdefault(key, {})[(d.x_offset, d.y_offset)] = piece
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_identity_blocks", None)

    @property
    def identity_blocks(self) -> tuple[CantorBlock, ...]:
        blocks = self._identity_blocks
        if blocks is None:
            blocks = tuple(
                CantorBlock(self.radix, xd, yd) for xd, yd in self.identity_digits
            )
            object.__setattr__(self, "_identity_blocks", blocks)
        return blocks

    @property
    def piece_count(self) -> int:
        return len(self.pieces)

    @property
    def component_count(self) -> int:
        return len(self.pieces) + len(self.identity_digits)

    def locate(self, p: CantorPoint) -> Piece | None:
        """The unique piece whose domain block contains ``p``, if any."""
        for (dx, dy), table in self._lookup.items():
            piece = table.get((p.x.prefix(dx), p.y.prefix(dy)))
            if piece is not None:
                return piece
        return None

    def piece_index(self, p: CantorPoint) -> int:
        piece = self.locate(p)
        return self.pieces.index(piece) if piece is not None else -1


def encode_point(s: BiSequence) -> CantorPoint:
    """Sequence to Cantor point: negative positions feed x, the rest feed y."""
    b = alphabet_radix(s.alphabet)
    index = {sym: 2 * i for i, sym in enumerate(s.alphabet)}
    if s.support:
        lo = min(s.support)
        hi = max(s.support)
    else:
        lo = hi = 0
    ex = max(0, -lo)
    ey = max(0, hi + 1)
    xnum = 0
    for i in range(1, ex + 1):
        xnum = xnum * b + index[s.read(-i)]
    ynum = 0
    for i in range(1, ey + 1):
        ynum = ynum * b + index[s.read(i - 1)]
    return CantorPoint(RadixRational(xnum, ex, b), RadixRational(ynum, ey, b))


def decode_point(p: CantorPoint, alphabet: tuple[str, ...]) -> BiSequence:
    """Inverse of :func:`encode_point` for finite even expansions."""
    if p.radix != alphabet_radix(alphabet):
        raise ShiftError(
            f"point radix {p.radix} does not match a {len(alphabet)}-symbol alphabet"
        )
    support: dict[int, str] = {}
    for stream, sign_base in ((p.x, -1), (p.y, +1)):
        for i, d in enumerate(stream.digits(), start=1):
            if d % 2:
                raise NotCantor(f"odd digit {d} at depth {i}")
            if d:
                pos = -i if sign_base < 0 else i - 1
                support[pos] = alphabet[d // 2]
    return BiSequence(alphabet, support)


def _piece_span(lo: int, hi: int, m: int) -> tuple[int, int]:
    """Smallest window span making both domain and image prefix cylinders.

    Digits fixed by a block must be contiguous from the decimal point, both
    before and after the m-fold stream shift, which may force extra window
    positions beyond the table hull.
    """
    while True:
        lo2, hi2 = lo, hi
        if hi >= 0:
            lo2 = min(lo2, 0)
        if lo <= -1:
            hi2 = max(hi2, -1)
        if hi - m >= 0:
            lo2 = min(lo2, m)
        if lo - m <= -1:
            hi2 = max(hi2, m - 1)
        if (lo2, hi2) == (lo, hi):
            return lo, hi
        lo, hi = lo2, hi2


@lru_cache(maxsize=None)
def _split_digits(
    window: tuple[int, ...], lo: int, hi: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Digit streams of an index window over positions lo..hi.

    Negative positions, read outward from -1, give the x digits; positions
    from 0 on give the y digits; each symbol index doubles into its digit.
    """
    xdigits = tuple(2 * v for v in window[-lo - 1 :: -1]) if lo <= -1 else ()
    ydigits = tuple(2 * v for v in window[-lo:]) if hi >= 0 else ()
    return xdigits, ydigits


@lru_cache(maxsize=None)
def _cached_block(
    radix: int, xdigits: tuple[int, ...], ydigits: tuple[int, ...]
) -> CantorBlock:
    return CantorBlock(radix, xdigits, ydigits)


def compile_blockmap(shift: GeneralizedShift) -> PiecewiseBlockMap:
    """Lower a generalized shift to its piecewise-affine block map.

    Enumerates the symbol windows over the union of the two table windows
    (extended where the shift amount moves digits across the point), builds
    one block per window, and derives each affine piece so that decoding the
    image point reproduces one application of the shift. Windows fixed by
    the tables become identity components.
    """
    f_lo, f_hi = shift.window_f
    g_lo, g_hi = shift.window_g
    if max(f_lo, g_lo) > min(f_hi, g_hi) + 1:
        raise ShiftError("the union of the F and G windows must be contiguous")
    hull_lo, hull_hi = shift.window_union()
    span = hull_hi - hull_lo + 1
    n = len(shift.alphabet)
    b = alphabet_radix(shift.alphabet)

    sym = {s: i for i, s in enumerate(shift.alphabet)}
    f_sl = slice(f_lo - hull_lo, f_hi - hull_lo + 1)
    g_sl = slice(g_lo - hull_lo, g_hi - hull_lo + 1)
    g_pos = range(g_lo - hull_lo, g_hi - hull_lo + 1)
    table_f = shift.table_f
    table_g = shift.table_g
    spans = {m: _piece_span(hull_lo, hull_hi, m) for m in set(table_f.values())}

    pieces: list[Piece] = []
    identity: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    # The two products enumerate the same windows in the same order, once
    # as symbols for table lookups and once as indices for digit work.
    for base_sym, base in zip(
        product(shift.alphabet, repeat=span), product(range(n), repeat=span)
    ):
        m = table_f[base_sym[f_sl]]
        gw = base_sym[g_sl]
        gi = table_g[gw]
        lo, hi = spans[m]
        if m == 0 and gi == gw and (lo, hi) == (hull_lo, hull_hi):
            identity.append(_split_digits(base, hull_lo, hull_hi))
            continue
        gi_idx = tuple(sym[s] for s in gi)
        left = hull_lo - lo
        right = hi - hull_hi
        for fill in product(range(n), repeat=left + right):
            full = fill[:left] + base + fill[left:]
            rewritten = list(full)
            for pos, v in zip(g_pos, gi_idx):
                rewritten[left + pos] = v
            image = tuple(rewritten)
            if m == 0 and image == full:
                identity.append(_split_digits(full, lo, hi))
                continue
            dom_x, dom_y = _split_digits(full, lo, hi)
            img_x, img_y = _split_digits(image, lo - m, hi - m)
            pieces.append(
                Piece(_cached_block(b, dom_x, dom_y), _cached_block(b, img_x, img_y), m)
            )
    return PiecewiseBlockMap(b, tuple(pieces), tuple(identity))


def apply_blockmap(pm: PiecewiseBlockMap, p: CantorPoint) -> CantorPoint:
    """Apply the block map to a point, exactly; identity outside all domains."""
    if p.radix != pm.radix:
        raise ValueError("point radix does not match the map")
    piece = pm.locate(p)
    return piece.apply(p) if piece is not None else p


@lru_cache(maxsize=None)
def _even_ints(radix: int, depth: int) -> tuple[int, ...]:
    """All integers with ``depth`` even base-radix digits, ascending."""
    values = [0]
    for _ in range(depth):
        values = [v * radix + d for v in values for d in range(0, radix, 2)]
    return tuple(values)


@lru_cache(maxsize=None)
def _cells(
    radix: int, xo: int, xd: int, yo: int, yd: int, px: int, qy: int
) -> tuple[tuple[int, int], ...]:
    xs = [xo * radix ** (px - xd) + e for e in _even_ints(radix, px - xd)]
    ys = [yo * radix ** (qy - yd) + e for e in _even_ints(radix, qy - yd)]
    return tuple((x, y) for x in xs for y in ys)


def _block_cells(block: CantorBlock, px: int, qy: int) -> tuple[tuple[int, int], ...]:
    """Even-digit cells of the block at the common refinement depth (px, qy)."""
    return _cells(
        block.radix,
        block.x_offset,
        block.x_depth,
        block.y_offset,
        block.y_depth,
        px,
        qy,
    )


def image_blocks_disjoint(pm: PiecewiseBlockMap) -> bool:
    """Whether all component images are pairwise disjoint on the Cantor set.

    This audits the full component list, identity components included, so
    the verdict is exactly injectivity of the map on the square Cantor
    set. Identity components map to the cells the pieces do not claim, so
    the pieces must permute precisely the cells their own domains vacate:
    at the common refinement depth the piece-image cells must be
    duplicate-free and coincide with the piece-domain cells.
    """
    if not pm.pieces:
        return True
    px = max(max(p.domain.x_depth, p.image.x_depth) for p in pm.pieces)
    qy = max(max(p.domain.y_depth, p.image.y_depth) for p in pm.pieces)
    domain_cells: set[tuple[int, int]] = set()
    image_cells: set[tuple[int, int]] = set()
    n_image = 0
    for piece in pm.pieces:
        domain_cells.update(_block_cells(piece.domain, px, qy))
        cells = _block_cells(piece.image, px, qy)
        n_image += len(cells)
        image_cells.update(cells)
    if n_image != len(image_cells):
        return False
    return image_cells == domain_cells


def _nested(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    if len(a) > len(b):
        a, b = b, a
    return b[: len(a)] == a


def blocks_share_cantor_points(b1: CantorBlock, b2: CantorBlock) -> bool:
    """Exact digit test: even blocks share Cantor points iff nested per axis.

    Even blocks touching only along an edge share no Cantor point, because
    the shared coordinate ends in an odd digit.
    """
    return _nested(b1.xdigits, b2.xdigits) and _nested(b1.ydigits, b2.ydigits)


def find_image_overlap(
    pm: PiecewiseBlockMap,
) -> tuple[CantorBlock, CantorBlock] | None:
    """An explicit pair of overlapping component images, or None.

    Both non-identity pieces and identity components are considered, so a
    None result certifies injectivity of the map on the Cantor set.
    """
    images = [p.image for p in pm.pieces] + list(pm.identity_blocks)
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if blocks_share_cantor_points(images[i], images[j]):
                return images[i], images[j]
    return None


def find_piece_image_overlap(
    pm: PiecewiseBlockMap,
) -> tuple[CantorBlock, CantorBlock] | None:
    """An overlapping pair among the non-identity piece images only."""
    images = [p.image for p in pm.pieces]
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if blocks_share_cantor_points(images[i], images[j]):
                return images[i], images[j]
    return None


def find_fixed_region_overlap(
    pm: PiecewiseBlockMap,
) -> tuple[CantorBlock, CantorBlock] | None:
    """A piece image overlapping an identity component, if any exists.

    Such an overlap means some moving component lands on points the map
    holds fixed, so the map cannot be injective on the whole Cantor set
    even when the piece images themselves are pairwise disjoint. For
    machine-compiled shifts this happens exactly on sequences carrying
    state symbols in tape positions, which no configuration encodes.
    """
    for piece in pm.pieces:
        for blk in pm.identity_blocks:
            if blocks_share_cantor_points(piece.image, blk):
                return piece.image, blk
    return None


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the structural audit of a compiled block map."""

    domains_disjoint: bool
    domains_cover: bool
    determinants_one: bool
    piece_count: int
    component_count: int
    bound: int
    bound_ok: bool
    images_disjoint: bool
    overlap_witness: tuple[CantorBlock, CantorBlock] | None
    conjugacy_ok: bool
    samples: int

    @property
    def ok(self) -> bool:
        return (
            self.domains_disjoint
            and self.domains_cover
            and self.determinants_one
            and self.bound_ok
            and self.conjugacy_ok
        )


def random_sequence(
    shift: GeneralizedShift, rng: Random, span: int = 4, cells: int = 5
) -> BiSequence:
    support = {}
    for _ in range(rng.randrange(cells + 1)):
        support[rng.randrange(-span, span + 1)] = rng.choice(shift.alphabet)
    return BiSequence(shift.alphabet, support)


def verify_blockmap(
    pm: PiecewiseBlockMap,
    shift: GeneralizedShift,
    samples: int = 50,
    seed: int = 0,
) -> VerificationReport:
    """Audit the compiled map against its source shift.

    Checks domain partitioning of the Cantor set, unit determinants, the
    window-count bound (with and without identity merging), pairwise image
    disjointness over the full component list, and a randomized conjugacy
    spot check of decode-after-map against shift-then-decode.
    """
    components = [p.domain for p in pm.pieces] + list(pm.identity_blocks)
    px = max((c.x_depth for c in components), default=0)
    qy = max((c.y_depth for c in components), default=0)
    seen: set[tuple[int, int]] = set()
    disjoint = True
    for c in components:
        for cell in _block_cells(c, px, qy):
            if cell in seen:
                disjoint = False
            seen.add(cell)
    n = len(shift.alphabet)
    cover = len(seen) == n ** (px + qy)

    determinants_one = all(
        p.x_scale_exp + p.y_scale_exp == 0 for p in pm.pieces
    )

    f_lo, f_hi = shift.window_f
    g_lo, g_hi = shift.window_g
    union = len(
        set(range(f_lo, f_hi + 1)) | set(range(g_lo, g_hi + 1))
    )
    bound = n ** (union + shift.max_abs_f)
    bound_ok = pm.piece_count <= bound and pm.component_count <= bound

    witness = find_image_overlap(pm)
    images_disjoint = witness is None

    rng = Random(seed)
    conjugacy_ok = True
    for _ in range(samples):
        s = random_sequence(shift, rng)
        p = encode_point(s)
        mapped = apply_blockmap(pm, p)
        expected = apply(shift, s)
        if mapped != encode_point(expected):
            conjugacy_ok = False
            break
        if decode_point(mapped, shift.alphabet) != expected:
            conjugacy_ok = False
            break

    return VerificationReport(
        domains_disjoint=disjoint,
        domains_cover=cover,
        determinants_one=determinants_one,
        piece_count=pm.piece_count,
        component_count=pm.component_count,
        bound=bound,
        bound_ok=bound_ok,
        images_disjoint=images_disjoint,
        overlap_witness=witness,
        conjugacy_ok=conjugacy_ok,
        samples=samples,
    )


def halt_blocks(alphabet: tuple[str, ...], symbol: str) -> tuple[CantorBlock, ...]:
    """All blocks whose position-0 symbol is ``symbol``.

    One block per choice of the neighbouring symbols at positions -1 and 1,
    so an alphabet of n symbols yields n * n pairwise disjoint blocks.
    """
    b = alphabet_radix(alphabet)
    digit = 2 * alphabet.index(symbol)
    blocks = []
    for x1 in range(0, 2 * len(alphabet), 2):
        for y2 in range(0, 2 * len(alphabet), 2):
            blocks.append(CantorBlock(b, (x1,), (digit, y2)))
    return tuple(blocks)


def halt_region(conj: Conjugation) -> tuple[CantorBlock, ...]:
    """The blocks whose position-0 symbol is the machine's halting state.

    The orbit of an encoded input enters their union exactly when the
    machine reaches its halting state.
    """
    return halt_blocks(conj.alphabet, conj.machine.halting)


class BlockRegion:
    """A finite union of blocks with fast exact membership tests."""

    def __init__(self, blocks: tuple[CantorBlock, ...]):
        self.blocks = tuple(blocks)
        table: dict[tuple[int, int], set[tuple[int, int]]] = {}
        for blk in blocks:
            table.setdefault((blk.x_depth, blk.y_depth), set()).add(
                (blk.x_offset, blk.y_offset)
            )
        self._table = table

    def contains(self, p: CantorPoint) -> bool:
        for (dx, dy), offsets in self._table.items():
            if (p.x.prefix(dx), p.y.prefix(dy)) in offsets:
                return True
        return False
