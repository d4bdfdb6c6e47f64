"""Exact rationals whose denominators are powers of a fixed odd radix.

Every quantity that touches the unit-square dynamics is represented as
``num / radix**exp`` with arbitrary-precision integers, so orbit iteration,
block location and region membership are decided by integer arithmetic,
never by floating point.
"""

from __future__ import annotations

from fractions import Fraction

# Digits are extracted in chunks of this many base-radix digits so that the
# per-chunk work stays on machine-word integers.
_DIGIT_CHUNK = 16


class RadixRational:
    """A rational ``num / radix**exp`` in canonical form.

    Canonical means ``exp == 0`` or ``num`` is not divisible by the radix,
    so for values in [0, 1) the exponent equals the length of the exact
    base-radix expansion. Instances are treated as immutable values.
    """

    __slots__ = ("num", "exp", "radix")

    def __init__(self, num: int, exp: int = 0, radix: int = 3):
        if radix < 3 or radix % 2 == 0:
            raise ValueError(f"radix must be an odd integer >= 3, got {radix}")
        if exp < 0:
            num *= radix ** (-exp)
            exp = 0
        while exp > 0 and num % radix == 0:
            num //= radix
            exp -= 1
        if num == 0:
            exp = 0
        self.num = num
        self.exp = exp
        self.radix = radix

    @classmethod
    def zero(cls, radix: int) -> "RadixRational":
        return cls(0, 0, radix)

    @classmethod
    def from_digits(cls, digits, radix: int) -> "RadixRational":
        """Value 0.d1 d2 ... dn in base ``radix``."""
        num = 0
        for d in digits:
            if not 0 <= d < radix:
                raise ValueError(f"digit {d} out of range for radix {radix}")
            num = num * radix + d
        return cls(num, len(digits), radix)

    def _check_same(self, other: "RadixRational") -> None:
        if self.radix != other.radix:
            raise ValueError("mixed radices")

    def __add__(self, other: "RadixRational") -> "RadixRational":
        self._check_same(other)
        e = max(self.exp, other.exp)
        b = self.radix
        num = self.num * b ** (e - self.exp) + other.num * b ** (e - other.exp)
        return RadixRational(num, e, b)

    def __sub__(self, other: "RadixRational") -> "RadixRational":
        return self + (-other)

    def __neg__(self) -> "RadixRational":
        return RadixRational(-self.num, self.exp, self.radix)

    def scaled(self, k: int) -> "RadixRational":
        """The value times radix**k, exactly."""
        if k >= 0:
            return RadixRational(self.num * self.radix**k, self.exp, self.radix)
        return RadixRational(self.num, self.exp - k, self.radix)

    def _cmp_key(self, other: "RadixRational") -> tuple[int, int]:
        e = max(self.exp, other.exp)
        b = self.radix
        return (
            self.num * b ** (e - self.exp),
            other.num * b ** (e - other.exp),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadixRational):
            return NotImplemented
        return (
            self.radix == other.radix
            and self.num == other.num
            and self.exp == other.exp
        )

    def __hash__(self) -> int:
        return hash((self.num, self.exp, self.radix))

    def __lt__(self, other: "RadixRational") -> bool:
        self._check_same(other)
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "RadixRational") -> bool:
        self._check_same(other)
        a, b = self._cmp_key(other)
        return a <= b

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def in_unit_interval(self) -> bool:
        return 0 <= self.num <= self.radix**self.exp

    def digits(self) -> tuple[int, ...]:
        """Exact base-radix expansion digits (d1, ..., d_exp) for 0 <= value < 1.

        The tuple has canonical length ``exp``; the all-zero value yields ().
        """
        if self.num < 0:
            raise ValueError("negative value has no unit-interval expansion")
        out: list[int] = []
        n = self.num
        b = self.radix
        chunk_base = b**_DIGIT_CHUNK
        while n:
            n, r = divmod(n, chunk_base)
            for _ in range(_DIGIT_CHUNK):
                out.append(r % b)
                r //= b
        while out and out[-1] == 0:
            out.pop()
        if len(out) > self.exp:
            raise ValueError("value is not below 1")
        out.extend([0] * (self.exp - len(out)))
        out.reverse()
        return tuple(out)

    def prefix(self, depth: int) -> int:
        """floor(value * radix**depth) for values in [0, 1)."""
        if self.num < 0:
            raise ValueError("negative value has no unit-interval prefix")
        if depth <= 0:
            return 0
        if self.exp <= depth:
            return self.num * self.radix ** (depth - self.exp)
        return self.num // self.radix ** (self.exp - depth)

    def digit(self, i: int) -> int:
        """The i-th expansion digit, 1-indexed after the point."""
        return self.prefix(i) % self.radix

    def all_digits_even(self) -> bool:
        n = self.num
        if n < 0:
            return False
        b = self.radix
        chunk_base = b**_DIGIT_CHUNK
        while n:
            n, r = divmod(n, chunk_base)
            for _ in range(_DIGIT_CHUNK):
                if (r % b) & 1:
                    return False
                r //= b
                if not r and not n:
                    break
        return True

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.radix**self.exp)

    def __float__(self) -> float:
        return self.num / self.radix**self.exp

    def __repr__(self) -> str:
        return f"RadixRational({self.num}, {self.exp}, radix={self.radix})"

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{self.radix}^{self.exp}"
