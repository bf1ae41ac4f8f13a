"""Pauli strings X^a Z^b, conjugation channels and Pauli-basis expansions.

Bit strings are stored as Python ints together with their length ``n``;
the leftmost (most significant) bit addresses the first tensor factor.
The phase of X^a Z^b is the literal matrix product, with no i^(a.b)
correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .linalg import DensityOperator, HermitianOperator, StateError


def to_int(bits, n: int | None = None) -> int:
    """Convert a bit string ('0110'), bit sequence or int to an int."""
    if isinstance(bits, (int, np.integer)):
        if n is not None and not 0 <= int(bits) < 2 ** n:
            raise ValueError(f"{bits} does not fit in {n} bits")
        return int(bits)
    if isinstance(bits, str):
        seq = [int(c) for c in bits]
    else:
        seq = [int(c) for c in bits]
    if n is not None and len(seq) != n:
        raise ValueError(f"expected {n} bits, got {len(seq)}")
    if any(c not in (0, 1) for c in seq):
        raise ValueError(f"not a bit string: {bits!r}")
    out = 0
    for c in seq:
        out = (out << 1) | c
    return out


def to_bits(x: int, n: int) -> str:
    return format(x, f"0{n}b") if n else ""


def popcount(x: int) -> int:
    return bin(x).count("1")


def symplectic_dot(x, y) -> int:
    """Inner product mod 2 of two equal-length bit strings.

    Ints are accepted as well and are then treated as zero-padded.
    """
    if isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer)):
        return popcount(int(x) & int(y)) & 1
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    return popcount(to_int(x, n) & to_int(y, n)) & 1


@dataclass(frozen=True)
class PauliString:
    """X^a Z^b on ``n`` qubits."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        if self.n < 0 or not (0 <= self.a < 2 ** self.n and 0 <= self.b < 2 ** self.n):
            raise ValueError(f"bit strings do not fit in n={self.n} bits")

    @classmethod
    def from_bits(cls, a, b) -> "PauliString":
        if len(a) != len(b):
            raise ValueError("a and b must have the same length")
        n = len(a)
        return cls(to_int(a, n), to_int(b, n), n)

    @classmethod
    def from_concat(cls, s: int, n: int) -> "PauliString":
        """Split the 2n-bit string a||b."""
        return cls(s >> n, s & ((1 << n) - 1), n)

    @property
    def concat(self) -> int:
        return (self.a << self.n) | self.b

    def __str__(self):
        return f"X^{to_bits(self.a, self.n)} Z^{to_bits(self.b, self.n)}"


def all_pauli_strings(n: int) -> Iterator[PauliString]:
    for s in range(4 ** n):
        yield PauliString.from_concat(s, n)


def _action(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    # X^a Z^b |z> = (-1)^{b.z} |z xor a>
    z = np.arange(2 ** p.n)
    signs = np.array([1 - 2 * (popcount(p.b & int(zz)) & 1) for zz in z], dtype=float)
    return z ^ p.a, signs


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Unitary matrix of X^a Z^b (X part applied after Z)."""
    d = 2 ** p.n
    target, signs = _action(p)
    m = np.zeros((d, d), dtype=complex)
    m[target, np.arange(d)] = signs
    return m


def _pauli_via_kron(p: PauliString) -> np.ndarray:
    # reference construction, used by tests as an oracle
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    out = np.eye(1, dtype=complex)
    for ai, bi in zip(to_bits(p.a, p.n), to_bits(p.b, p.n)):
        out = np.kron(out, np.linalg.matrix_power(x, int(ai)) @ np.linalg.matrix_power(z, int(bi)))
    return out


def conjugate_matrix(p: PauliString, m: np.ndarray, d_rest: int) -> np.ndarray:
    """(X^aZ^b (x) I) m (Z^bX^a (x) I) with the Pauli on the leading 2^n factor."""
    target, signs = _action(p)
    s = np.repeat(signs, d_rest)
    idx = (target[:, None] * d_rest + np.arange(d_rest)[None, :]).reshape(-1)
    out = np.empty_like(m)
    # target map is an involution, so the inverse permutation is itself
    scaled = m * np.outer(s, s)
    out[np.ix_(idx, idx)] = scaled
    return out


def _split(rho: HermitianOperator, label: str, n: int | None = None) -> tuple[int, int, int, int]:
    """Return (position, d_left, d_sub, d_right) for subsystem ``label``."""
    if label not in rho.labels:
        raise StateError(f"unknown subsystem label {label!r}; have {rho.labels}")
    i = rho.labels.index(label)
    d = rho.dims[i]
    if n is not None and d != 2 ** n:
        raise StateError(f"subsystem {label} has dimension {d}, expected {2 ** n}")
    return i, int(np.prod(rho.dims[:i])), d, int(np.prod(rho.dims[i + 1:]))


def pauli_conjugate(p: PauliString, rho: HermitianOperator, label: str = "A") -> HermitianOperator:
    """Apply X^aZ^b ... Z^bX^a to subsystem ``label``."""
    _, left, d, right = _split(rho, label, p.n)
    if left == 1:
        m = conjugate_matrix(p, rho.matrix, right)
    else:
        u = np.kron(np.kron(np.eye(left), pauli_matrix(p)), np.eye(right))
        m = u @ rho.matrix @ u.conj().T
    return type(rho)(m, rho.dims, rho.labels, check=False)


@dataclass
class PauliCoefficients:
    """Blocks M_uv on the complement of A, keyed by (u, v).

    M_uv = tr_A[(Z^v X^u / sqrt(d_A) (x) I) rho].  Blocks with odd u.v are
    anti-Hermitian, so they are kept as raw complex arrays.
    """

    n: int
    rest_dims: tuple[int, ...]
    rest_labels: tuple[str, ...]
    blocks: dict[tuple[int, int], np.ndarray]

    def __getitem__(self, uv: tuple[int, int]) -> np.ndarray:
        return self.blocks[uv]

    def norms(self) -> dict[tuple[int, int], float]:
        return {k: float(np.linalg.norm(v)) for k, v in self.blocks.items()}


def pauli_decompose(rho: HermitianOperator, label: str = "A") -> PauliCoefficients:
    """Expand ``rho`` in the Pauli basis of the (leading) qubit subsystem ``label``."""
    i, left, d, right = _split(rho, label)
    if d & (d - 1) or d < 1:
        raise StateError(f"subsystem {label} has non power-of-two dimension {d}")
    if i != 0:
        raise StateError("the Pauli subsystem must be the first factor")
    n = d.bit_length() - 1
    r = rho.matrix.reshape(d, right, d, right)
    blocks = {}
    for p in all_pauli_strings(n):
        zx = pauli_matrix(p).conj().T  # Z^v X^u = (X^u Z^v)^dagger
        blocks[(p.a, p.b)] = np.einsum("ji,iejf->ef", zx, r) / np.sqrt(d)
    return PauliCoefficients(n, rho.dims[1:], rho.labels[1:], blocks)


def pauli_reconstruct(c: PauliCoefficients, label: str = "A") -> HermitianOperator:
    d = 2 ** c.n
    rest = int(np.prod(c.rest_dims)) if c.rest_dims else 1
    m = np.zeros((d * rest, d * rest), dtype=complex)
    for (u, v), block in c.blocks.items():
        m += np.kron(pauli_matrix(PauliString(u, v, c.n)), block) / np.sqrt(d)
    return HermitianOperator(m, (d,) + tuple(c.rest_dims), (label,) + tuple(c.rest_labels))


def twirl(rho: HermitianOperator, label: str = "A") -> HermitianOperator:
    """Uniform average of conjugation by every Pauli string on ``label``."""
    _, _, d, _ = _split(rho, label)
    n = d.bit_length() - 1
    acc = np.zeros_like(rho.matrix)
    for p in all_pauli_strings(n):
        acc += pauli_conjugate(p, rho, label).matrix
    return type(rho)(acc / 4 ** n, rho.dims, rho.labels, check=False)
