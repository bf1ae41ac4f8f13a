"""Keyed Pauli ciphers and their key-averaged channels.

Three families share one representation:

* the full Pauli one-time pad (all 4^n masks),
* the Ambainis-Smith cipher (masks X^a Z^b with a||b drawn from a small-bias set),
* the XOR-universal cipher, which also publishes a classical index register.

Ciphertexts are :class:`Ciphertext` objects: a list of blocks, one per
value of the classical index register (a single block when there is no
register).  Trace norms of block-diagonal operators are sums of block
norms, which keeps the XOR-universal cipher tractable when the dense
operator would exceed the supported dimension.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .gf2 import DeltaBiasedSet, XorUniversalFamily, aghp_set, xu_eval
from .linalg import DensityOperator, HermitianOperator, StateError
from .pauli import PauliString, pauli_conjugate, to_bits

INDEX_LABEL = "A'"


@dataclass(frozen=True, eq=False)
class Ciphertext:
    """Block-diagonal operator sum_i |i><i| (x) blocks[i].

    Blocks carry their weight (each has trace 1/|I| for a ciphertext).
    """

    blocks: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def index_dim(self) -> int:
        return len(self.blocks)

    @property
    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks))

    def block(self, i: int) -> HermitianOperator:
        return HermitianOperator(self.blocks[i], self.dims, self.labels, check=False)

    def to_density(self) -> DensityOperator:
        """Dense operator; the index register (if any) is the first factor."""
        if self.index_dim == 1:
            return DensityOperator(self.blocks[0], self.dims, self.labels)
        d = self.blocks[0].shape[0]
        m = np.zeros((d * self.index_dim,) * 2, dtype=complex)
        for i, b in enumerate(self.blocks):
            m[i * d:(i + 1) * d, i * d:(i + 1) * d] = b
        return DensityOperator(m, (self.index_dim,) + self.dims, (INDEX_LABEL,) + self.labels)

    def marginal(self, kept: Sequence[str]) -> HermitianOperator:
        """Marginal on subsystems of the message space (register traced out)."""
        total = sum(self.blocks)
        return la.marginal(HermitianOperator(total, self.dims, self.labels, check=False), kept)

    def __sub__(self, other: "Ciphertext") -> "Ciphertext":
        _compatible(self, other)
        return Ciphertext(tuple(a - b for a, b in zip(self.blocks, other.blocks)), self.dims, self.labels)


def _compatible(a: Ciphertext, b: Ciphertext):
    if a.index_dim != b.index_dim or a.dims != b.dims or a.labels != b.labels:
        raise StateError("ciphertexts live on different spaces")


def block_trace_norm(c: Ciphertext) -> float:
    return float(sum(la.trace_norm(b) for b in c.blocks))


def ciphertext_distance(a: Ciphertext, b: Ciphertext) -> float:
    return block_trace_norm(a - b)


def product_with(omega: Ciphertext, rho_e: HermitianOperator) -> Ciphertext:
    """Omega (x) rho_E, block by block."""
    return Ciphertext(
        tuple(np.kron(b, rho_e.matrix) for b in omega.blocks),
        omega.dims + rho_e.dims,
        omega.labels + rho_e.labels,
    )


@dataclass(frozen=True)
class AverageChannelResult:
    rho_out: Ciphertext
    omega: Ciphertext  # channel applied to I/d_A, on A' (x) A only


@dataclass(frozen=True, eq=False)
class KeyedCipher:
    """Uniformly keyed family of Pauli-masking channels on subsystem ``label``.

    ``masks[i][k]`` is the 2n-bit string a||b used for key ``k`` when the
    index register reads ``i``.  Ciphers without a register have a single
    row.
    """

    name: str
    n: int
    masks: tuple[tuple[int, ...], ...]
    key_source: str = "explicit"
    set_provenance: str = "explicit"
    label: str = "A"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        k = {len(row) for row in self.masks}
        if len(k) != 1 or 0 in k:
            raise ValueError("every index row needs the same non-zero number of keys")
        limit = 1 << (2 * self.n)
        if any(not 0 <= s < limit for row in self.masks for s in row):
            raise ValueError(f"masks must be {2 * self.n}-bit strings")

    @property
    def key_count(self) -> int:
        return len(self.masks[0])

    @property
    def key_bits(self) -> float:
        return math.log2(self.key_count)

    @property
    def index_dim(self) -> int:
        return len(self.masks)

    @property
    def length_preserving(self) -> bool:
        return self.index_dim == 1

    def _check(self, rho: HermitianOperator):
        if self.label not in rho.labels:
            raise StateError(f"input has no subsystem {self.label!r}: {rho.labels}")
        if rho.dim_of(self.label) != 2 ** self.n:
            raise StateError(
                f"subsystem {self.label} has dimension {rho.dim_of(self.label)}, cipher expects {2 ** self.n}"
            )

    def _mask(self, s: int) -> PauliString:
        return PauliString.from_concat(s, self.n)

    def encrypt(self, key: int, rho: HermitianOperator) -> Ciphertext:
        self._check(rho)
        w = 1.0 / self.index_dim
        blocks = tuple(w * pauli_conjugate(self._mask(row[key]), rho, self.label).matrix for row in self.masks)
        return Ciphertext(blocks, rho.dims, rho.labels)

    def decrypt(self, key: int, c: Ciphertext | HermitianOperator) -> HermitianOperator:
        """Read the index, undo that Pauli mask, forget the index."""
        if isinstance(c, HermitianOperator):
            c = self._as_ciphertext(c)
        if c.index_dim != self.index_dim:
            raise StateError("ciphertext register does not match this cipher")
        out = np.zeros_like(c.blocks[0])
        for row, b in zip(self.masks, c.blocks):
            blk = HermitianOperator(b, c.dims, c.labels, check=False)
            # Pauli masks are self-inverse under conjugation
            out = out + pauli_conjugate(self._mask(row[key]), blk, self.label).matrix
        return DensityOperator(out, c.dims, c.labels, check=False)

    def _as_ciphertext(self, rho: HermitianOperator) -> Ciphertext:
        if self.length_preserving:
            return Ciphertext((rho.matrix,), rho.dims, rho.labels)
        if rho.labels[0] != INDEX_LABEL or rho.dims[0] != self.index_dim:
            raise StateError(f"expected index register {INDEX_LABEL!r} of dimension {self.index_dim}")
        d = rho.dim // self.index_dim
        blocks = tuple(rho.matrix[i * d:(i + 1) * d, i * d:(i + 1) * d] for i in range(self.index_dim))
        return Ciphertext(blocks, rho.dims[1:], rho.labels[1:])

    def average(self, rho: HermitianOperator) -> Ciphertext:
        """Key-averaged ciphertext (1/|K|) sum_k E_k(rho)."""
        self._check(rho)
        w = 1.0 / (self.index_dim * self.key_count)
        cache: dict[int, np.ndarray] = {}
        blocks = []
        for row in self.masks:
            acc = np.zeros_like(rho.matrix)
            for s in row:
                if s not in cache:
                    cache[s] = pauli_conjugate(self._mask(s), rho, self.label).matrix
                acc = acc + cache[s]
            blocks.append(w * acc)
        return Ciphertext(tuple(blocks), rho.dims, rho.labels)

    def omega(self) -> Ciphertext:
        """The channel applied to I/d_A alone."""
        d = 2 ** self.n
        return self.average(la.maximally_mixed((d,), (self.label,)))

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "n": self.n,
            "key_source": self.key_source,
            "set_provenance": self.set_provenance,
            "key_bits": self.key_bits,
        }
        doc.update(self.meta)
        return json.dumps(doc, sort_keys=True)


def average_channel(c: KeyedCipher, rho: HermitianOperator) -> AverageChannelResult:
    return AverageChannelResult(c.average(rho), c.omega())


def make_pauli_subset(n: int, strings: Sequence[int], name: str = "pauli-subset", **kw) -> KeyedCipher:
    strings = tuple(int(s) for s in strings)
    if not strings:
        raise ValueError("key set is empty")
    return KeyedCipher(name, n, (strings,), **kw)


def make_full_pad(n: int) -> KeyedCipher:
    """Perfect encryption: every one of the 4^n Pauli masks."""
    return make_pauli_subset(n, range(4 ** n), name="pad", key_source="all", set_provenance="all")


def make_ambainis_smith(n: int, s: DeltaBiasedSet) -> KeyedCipher:
    """Mask with X^a Z^b for a uniformly chosen a||b in the small-bias set ``s``."""
    if s.n != 2 * n:
        raise ValueError(f"set strings have length {s.n}, cipher needs {2 * n}")
    meta = {"delta_bound": s.delta_bound}
    if s.m is not None:
        meta["m"] = s.m
    else:
        meta["keys"] = [format(x, "x") for x in s.strings]
    return KeyedCipher(
        "as", n, (tuple(s.strings),), key_source="delta-biased-set", set_provenance=s.provenance, meta=meta
    )


def make_ambainis_smith_aghp(n: int, m: int) -> KeyedCipher:
    return make_ambainis_smith(n, aghp_set(2 * n, m))


def default_key_set(n: int, key_count: int) -> list[int]:
    """First ``key_count`` 2n-bit strings in lexicographic order."""
    if not 1 <= key_count <= 4 ** n:
        raise ValueError(f"key count must be in [1, {4 ** n}]")
    return list(range(key_count))


def make_xor_universal(n: int, fam: XorUniversalFamily | None = None, key_set: Sequence[int] | None = None,
                       key_count: int | None = None) -> KeyedCipher:
    """E_k(rho) = 1/|I| sum_i |i><i| (x) P_{h_i(k)} rho P_{h_i(k)}^dagger."""
    if fam is None:
        fam = XorUniversalFamily(2 * n)
    if fam.width != 2 * n:
        raise ValueError(f"family width {fam.width} != 2n = {2 * n}")
    if key_set is None:
        key_set = default_key_set(n, key_count if key_count is not None else 4 ** n)
        source = "lexicographic"
    else:
        source = "explicit"
    key_set = [int(k) for k in key_set]
    if not key_set:
        raise ValueError("key set is empty")
    if len(set(key_set)) != len(key_set):
        raise ValueError("keys must be distinct (uniform key distribution)")
    masks = tuple(tuple(xu_eval(fam, i, k) for k in key_set) for i in fam.index_set)
    meta = {"key_count": len(key_set), "modulus": fam.field.modulus}
    if source == "explicit":
        meta["keys"] = [to_bits(k, 2 * n) for k in key_set]
    return KeyedCipher("xu", n, masks, key_source=source, set_provenance=f"GF(2^{2 * n})", meta=meta)


def make_identity(n: int) -> KeyedCipher:
    return make_pauli_subset(n, [0], name="identity", key_source="explicit", set_provenance="trivial")


def random_pauli_subset(n: int, key_count: int, seed) -> KeyedCipher:
    """|K| distinct Pauli masks chosen uniformly at random."""
    rng = np.random.default_rng(seed)
    strings = sorted(int(s) for s in rng.choice(4 ** n, size=key_count, replace=False))
    return make_pauli_subset(n, strings, name="random-pauli-subset",
                             meta={"keys": [to_bits(s, 2 * n) for s in strings]})


def cipher_from_json(text: str) -> KeyedCipher:
    """Rebuild a cipher from its JSON description."""
    doc = json.loads(text)
    n = int(doc["n"])
    name = doc["name"]
    if name == "pad":
        return make_full_pad(n)
    if name == "as":
        if "m" in doc:
            return make_ambainis_smith_aghp(n, int(doc["m"]))
        s = DeltaBiasedSet(2 * n, [int(x, 16) for x in doc["keys"]], float(doc["delta_bound"]))
        return make_ambainis_smith(n, s)
    if name == "xu":
        if doc.get("key_source") == "explicit":
            return make_xor_universal(n, key_set=[int(k, 2) for k in doc["keys"]])
        return make_xor_universal(n, key_count=int(doc["key_count"]))
    if name in ("identity", "random-pauli-subset", "pauli-subset"):
        if name == "identity":
            return make_identity(n)
        return make_pauli_subset(n, [int(k, 2) for k in doc["keys"]], name=name,
                                 meta={"keys": doc["keys"]})
    raise ValueError(f"unknown cipher {name!r}")
