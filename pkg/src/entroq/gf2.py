"""GF(2^m) arithmetic, AGHP small-bias sets and the XOR-universal family.

Field elements are ints whose bit i is the coefficient of x^i.  Bit strings
produced here follow the package-wide convention: the leftmost character
(most significant bit) is the first position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .pauli import popcount

# One fixed irreducible modulus per degree, as bitmasks including x^m.
IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}

MAX_DEGREE = 16


def clmul(x: int, y: int) -> int:
    """Carry-less product of two polynomials over GF(2)."""
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        y >>= 1
    return out


def poly_mod(x: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while x.bit_length() - 1 >= dm:
        x ^= mod << (x.bit_length() - 1 - dm)
    return x


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..m/2."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    for deg in range(1, m // 2 + 1):
        for f in range(1 << deg, 1 << (deg + 1)):
            if poly_mod(poly, f) == 0:
                return False
    return True


@dataclass(frozen=True)
class GFField:
    m: int
    modulus: int = 0

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DEGREE:
            raise ValueError(f"degree {self.m} outside 1..{MAX_DEGREE}")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", IRREDUCIBLE[self.m])
        if self.modulus.bit_length() - 1 != self.m:
            raise ValueError(f"modulus {self.modulus:#x} does not have degree {self.m}")

    @property
    def order(self) -> int:
        return 1 << self.m

    def mul(self, x: int, y: int) -> int:
        return gf_mul(self, x, y)

    def pow(self, x: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = gf_mul(self, out, x)
        return out


def gf_mul(f: GFField, x: int, y: int) -> int:
    if not (0 <= x < f.order and 0 <= y < f.order):
        raise ValueError(f"operands must be < 2^{f.m}")
    return poly_mod(clmul(x, y), f.modulus)


@dataclass
class DeltaBiasedSet:
    """Multiset of n-bit strings (ints, MSB first) with a claimed bias bound."""

    n: int
    strings: list[int]
    delta_bound: float
    provenance: str = "explicit"
    m: int | None = None

    def __len__(self):
        return len(self.strings)

    @property
    def key_bits(self) -> float:
        return math.log2(len(self.strings))

    def to_hex_lines(self) -> str:
        width = max(1, (self.n + 3) // 4)
        return "".join(f"{s:0{width}x}\n" for s in self.strings)

    def save(self, path) -> None:
        Path(path).write_text(self.to_hex_lines(), encoding="utf-8")

    @classmethod
    def from_hex_lines(cls, text: str, n: int, delta_bound: float | None = None) -> "DeltaBiasedSet":
        strings = [int(line, 16) for line in text.split() if line.strip()]
        for s in strings:
            if s >> n:
                raise ValueError(f"string {s:x} longer than {n} bits")
        if delta_bound is None:
            delta_bound = measure_bias(strings, n)
        return cls(n, strings, delta_bound)

    @classmethod
    def load(cls, path, n: int, delta_bound: float | None = None) -> "DeltaBiasedSet":
        return cls.from_hex_lines(Path(path).read_text(encoding="utf-8"), n, delta_bound)


def aghp_degree(n: int, delta: float) -> int:
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    return max(1, math.ceil(math.log2((n - 1) / delta)))


def aghp_set(n: int, m: int) -> DeltaBiasedSet:
    """AGHP powering construction over GF(2^m).

    For each pair (x, y) of field elements the string r_{x,y} has bit i equal
    to <x^i, y> (inner product of coefficient vectors), i = 0..n-1, with bit 0
    leftmost.  The bias is at most (n-1)/2^m.
    """
    if m > MAX_DEGREE:
        raise ValueError("set too large for desk scale")
    f = GFField(m)
    q = f.order
    strings = []
    for x in range(q):
        powers = []
        p = 1
        for _ in range(n):
            powers.append(p)
            p = gf_mul(f, p, x)
        for y in range(q):
            r = 0
            for pw in powers:
                r = (r << 1) | (popcount(pw & y) & 1)
            strings.append(r)
    return DeltaBiasedSet(n, strings, (n - 1) / q, provenance=f"AGHP(m={m})", m=m)


def aghp_construct(n: int, delta: float) -> DeltaBiasedSet:
    """Smallest AGHP set of n-bit strings whose guaranteed bias is <= delta."""
    m = aghp_degree(n, delta)
    if m > MAX_DEGREE:
        raise ValueError(f"set too large for desk scale (m={m})")
    return aghp_set(n, m)


def _parity_table(n: int) -> np.ndarray:
    s = np.arange(1 << n, dtype=np.int64)
    par = np.zeros_like(s)
    x = s.copy()
    while np.any(x):
        par ^= x & 1
        x >>= 1
    return par


def bias_profile(strings: Sequence[int], n: int) -> np.ndarray:
    """Mean of (-1)^{s.s'} over the set, for every s' in {0,1}^n."""
    if n > 16:
        raise ValueError("exhaustive bias measurement limited to n <= 16")
    counts = np.bincount(np.asarray(strings, dtype=np.int64), minlength=1 << n).astype(float)
    # Walsh-Hadamard transform of the empirical distribution
    h = counts.copy()
    step = 1
    while step < h.size:
        h = h.reshape(-1, 2, step)
        a, b = h[:, 0, :].copy(), h[:, 1, :].copy()
        h[:, 0, :], h[:, 1, :] = a + b, a - b
        h = h.reshape(-1)
        step *= 2
    return h / len(strings)


def measure_bias(strings: Sequence[int], n: int) -> float:
    """max over s' != 0 of |mean_s (-1)^{s.s'}|."""
    if n > 16:
        raise ValueError("exhaustive bias measurement limited to n <= 16")
    if n == 0:
        return 0.0
    return float(np.max(np.abs(bias_profile(strings, n)[1:])))


def measure_bias_direct(strings: Sequence[int], n: int) -> float:
    # brute-force character sums; independent of the transform above
    best = 0.0
    for sp in range(1, 1 << n):
        tot = sum(1 - 2 * (popcount(s & sp) & 1) for s in strings)
        best = max(best, abs(tot) / len(strings))
    return best


@dataclass(frozen=True)
class XorUniversalFamily:
    """h_i(k) = i * k in GF(2^width), i ranging over every field element."""

    width: int
    field: GFField = field(default=None)

    def __post_init__(self):
        if self.field is None:
            object.__setattr__(self, "field", GFField(self.width))
        if self.field.m != self.width:
            raise ValueError("field degree must equal the family width")

    @property
    def index_set(self) -> range:
        return range(self.field.order)

    def __len__(self):
        return self.field.order


def xu_eval(fam: XorUniversalFamily, i: int, k: int) -> int:
    return gf_mul(fam.field, i, k)


def xor_universal_counts(fam: XorUniversalFamily, x: int, y: int) -> np.ndarray:
    """Histogram of h_i(x) xor h_i(y) over all indices i."""
    vals = [xu_eval(fam, i, x) ^ xu_eval(fam, i, y) for i in fam.index_set]
    return np.bincount(vals, minlength=1 << fam.width)


def is_strongly_xor_universal(fam: XorUniversalFamily) -> bool:
    q = 1 << fam.width
    for x in range(q):
        for y in range(x + 1, q):
            if not np.all(xor_universal_counts(fam, x, y) * q == len(fam)):
                return False
    return True
