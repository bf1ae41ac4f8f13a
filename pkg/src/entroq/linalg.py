"""Dense operator algebra on labelled multipartite systems.

Every operator carries its subsystem dimensions and labels.  Subsystem
order is fixed by the label list: nothing here reorders silently, and
:func:`permute` is the only way to change the order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TOL_HERM = 1e-10
TOL_PSD = 1e-9
TOL_EQ = 1e-9
TOL_TRACE = 1e-10
MAX_DIM = 512


class StateError(ValueError):
    """Raised when an operator violates its declared invariants."""


def _as_tuple(xs) -> tuple:
    return tuple(xs)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix on a labelled product space."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    labels: tuple[str, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"matrix must be square, got shape {m.shape}")
        if len(self.dims) != len(self.labels):
            raise StateError("dims and labels must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise StateError(f"duplicate labels {self.labels}")
        if int(np.prod(self.dims)) != m.shape[0]:
            raise StateError(f"dims {self.dims} do not match matrix side {m.shape[0]}")
        if m.shape[0] > MAX_DIM:
            raise StateError(f"joint dimension {m.shape[0]} exceeds {MAX_DIM}")
        if self.check:
            self._validate()

    def _validate(self):
        err = np.max(np.abs(self.matrix - self.matrix.conj().T)) if self.dim else 0.0
        if err > TOL_HERM:
            raise StateError(f"operator is not Hermitian (max deviation {err:.3g})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dim_of(self, label: str) -> int:
        return self.dims[self.labels.index(label)]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _same_space(self, other)
        return HermitianOperator(self.matrix + other.matrix, self.dims, self.labels)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _same_space(self, other)
        return HermitianOperator(self.matrix - other.matrix, self.dims, self.labels)

    def __mul__(self, c: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix * float(c), self.dims, self.labels)

    __rmul__ = __mul__


class DensityOperator(HermitianOperator):
    """Positive semidefinite, unit-trace :class:`HermitianOperator`."""

    def _validate(self):
        super()._validate()
        tr = np.trace(self.matrix).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise StateError(f"trace is {tr!r}, expected 1")
        lmin = np.linalg.eigvalsh(_herm(self.matrix))[0]
        if lmin < -TOL_PSD:
            raise StateError(f"minimum eigenvalue {lmin:.3g} is negative")

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _same_space(a: HermitianOperator, b: HermitianOperator):
    if a.dims != b.dims or a.labels != b.labels:
        raise StateError(
            f"operators live on different spaces: {a.labels}{a.dims} vs {b.labels}{b.dims}"
        )


def _same_dims(a: HermitianOperator, b: HermitianOperator):
    if a.dim != b.dim or a.dims != b.dims:
        raise StateError(f"dimension mismatch: {a.dims} vs {b.dims}")


def density(matrix, dims: Sequence[int], labels: Sequence[str]) -> DensityOperator:
    return DensityOperator(matrix, _as_tuple(dims), _as_tuple(labels))


def hermitian(matrix, dims: Sequence[int], labels: Sequence[str]) -> HermitianOperator:
    return HermitianOperator(matrix, _as_tuple(dims), _as_tuple(labels))


def pure(vec, dims: Sequence[int], labels: Sequence[str]) -> DensityOperator:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return density(np.outer(v, v.conj()), dims, labels)


def basis_state(index: int, dims: Sequence[int], labels: Sequence[str]) -> DensityOperator:
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[index] = 1.0
    return pure(v, dims, labels)


def maximally_mixed(dims: Sequence[int], labels: Sequence[str]) -> DensityOperator:
    d = int(np.prod(dims))
    return density(np.eye(d) / d, dims, labels)


def like(op: HermitianOperator, matrix: np.ndarray, *, check: bool = True):
    """Operator of the same kind and space as ``op`` holding ``matrix``."""
    return type(op)(matrix, op.dims, op.labels, check=check)


def tensor_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Kronecker product; dims and labels are concatenated in order."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise StateError(f"labels {sorted(overlap)} appear on both factors")
    cls = DensityOperator if isinstance(a, DensityOperator) and isinstance(b, DensityOperator) else HermitianOperator
    return cls(np.kron(a.matrix, b.matrix), a.dims + b.dims, a.labels + b.labels)


def tensor(*ops: HermitianOperator) -> HermitianOperator:
    out = ops[0]
    for op in ops[1:]:
        out = tensor_product(out, op)
    return out


def _label_indices(op: HermitianOperator, labels: Iterable[str]) -> list[int]:
    idx = []
    for l in labels:
        if l not in op.labels:
            raise StateError(f"unknown subsystem label {l!r}; have {op.labels}")
        idx.append(op.labels.index(l))
    return idx


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], traced: Iterable[int]) -> np.ndarray:
    """Trace out the subsystems at positions ``traced`` of a raw matrix."""
    dims = list(dims)
    traced = sorted(set(traced))
    k = len(dims)
    t = m.reshape(dims + dims)
    # contract traced axes pairwise, highest index first so positions stay valid
    for j, i in enumerate(reversed(traced)):
        kk = k - j
        t = np.trace(t, axis1=i, axis2=i + kk)
    keep = [d for i, d in enumerate(dims) if i not in traced]
    side = int(np.prod(keep)) if keep else 1
    return t.reshape(side, side)


def partial_trace(rho: HermitianOperator, traced_labels: Iterable[str]) -> HermitianOperator:
    """Trace out the named subsystems; the survivors keep their order."""
    traced_labels = list(traced_labels)
    idx = _label_indices(rho, traced_labels)
    m = partial_trace_matrix(rho.matrix, rho.dims, idx)
    keep = [i for i in range(len(rho.dims)) if i not in idx]
    dims = tuple(rho.dims[i] for i in keep)
    labels = tuple(rho.labels[i] for i in keep)
    # a partial trace of a valid state is valid by construction; skip re-checks
    return type(rho)(m, dims, labels, check=False)


def marginal(rho: HermitianOperator, kept_labels: Iterable[str]) -> HermitianOperator:
    kept = set(kept_labels)
    _label_indices(rho, kept)
    return partial_trace(rho, [l for l in rho.labels if l not in kept])


def permute(rho: HermitianOperator, order: Sequence[str]) -> HermitianOperator:
    """Reorder subsystems so that the labels appear as in ``order``."""
    if sorted(order) != sorted(rho.labels):
        raise StateError(f"order {order} is not a permutation of {rho.labels}")
    perm = _label_indices(rho, order)
    k = len(rho.dims)
    t = rho.matrix.reshape(list(rho.dims) * 2)
    t = t.transpose(perm + [p + k for p in perm])
    return type(rho)(t.reshape(rho.dim, rho.dim), tuple(rho.dims[p] for p in perm), tuple(order), check=False)


def relabel(rho: HermitianOperator, mapping: dict[str, str]) -> HermitianOperator:
    labels = tuple(mapping.get(l, l) for l in rho.labels)
    return type(rho)(rho.matrix, rho.dims, labels, check=False)


def embed(local: np.ndarray, op: HermitianOperator, label: str) -> np.ndarray:
    """``local`` acting on subsystem ``label``, identity elsewhere."""
    i = op.labels.index(label)
    left = int(np.prod(op.dims[:i]))
    right = int(np.prod(op.dims[i + 1:]))
    return np.kron(np.kron(np.eye(left), local), np.eye(right))


def trace_norm(s: HermitianOperator | np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    m = s.matrix if isinstance(s, HermitianOperator) else np.asarray(s, dtype=complex)
    if m.size and np.max(np.abs(m - m.conj().T)) > TOL_HERM:
        raise StateError("trace_norm requires a Hermitian operator")
    return float(np.sum(np.abs(np.linalg.eigvalsh(_herm(m)))))


def trace_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    """``||a - b||_1`` (no factor 1/2)."""
    _same_dims(a, b)
    return trace_norm(a.matrix - b.matrix)


def apply_function(m: np.ndarray, fn, *, clamp: bool = True) -> np.ndarray:
    """Apply ``fn`` to the spectrum of a Hermitian matrix.

    With ``clamp`` the eigenvalues in ``[-TOL_PSD, 0)`` are set to zero first,
    so square roots of numerically PSD matrices are well defined.
    """
    w, v = np.linalg.eigh(_herm(np.asarray(m, dtype=complex)))
    if clamp:
        if w.size and w[0] < -TOL_PSD:
            raise StateError(f"matrix has eigenvalue {w[0]:.3g} below -{TOL_PSD}")
        w = np.where(w < 0, 0.0, w)
    return (v * fn(w)) @ v.conj().T


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    return apply_function(m, np.sqrt)


def inv_sqrtm_psd(m: np.ndarray, cutoff: float = TOL_PSD) -> np.ndarray:
    """Inverse square root on the support (eigenvalues above ``cutoff``)."""
    def f(w):
        out = np.zeros_like(w)
        pos = w > cutoff
        out[pos] = 1.0 / np.sqrt(w[pos])
        return out
    return apply_function(m, f)


def _sqrt_support(m: np.ndarray) -> np.ndarray:
    # eigenvalues at roundoff level are zeroed: their square roots (~1e-8)
    # would otherwise bias the fidelity of rank-deficient states
    w, v = np.linalg.eigh(_herm(m))
    floor = w.size * np.finfo(float).eps * max(w[-1], 0.0)
    r = np.where(w > floor, np.sqrt(np.clip(w, 0, None)), 0.0)
    return (v * r) @ v.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1, in [0, 1]."""
    _same_dims(rho, sigma)
    prod = _sqrt_support(rho.matrix) @ _sqrt_support(sigma.matrix)
    f = float(np.sum(np.linalg.svd(prod, compute_uv=False)))
    return min(max(f, 0.0), 1.0)


def operator_geq(a: HermitianOperator, b: HermitianOperator, tol: float = TOL_PSD) -> bool:
    """True iff ``a - b`` is PSD up to ``tol`` on the smallest eigenvalue."""
    _same_dims(a, b)
    return bool(min_eig(a.matrix - b.matrix) >= -tol)


def min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_herm(m))[0])


def max_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_herm(m))[-1])


def max_entangled(n_qubits: int, labels: Sequence[str] = ("A", "E")) -> DensityOperator:
    """Phi+ on n qubits of A and n qubits of E."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be at least 1")
    d = 2 ** n_qubits
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0
    return pure(v, (d, d), labels)


def random_state(dims: Sequence[int], rank: int, seed, labels: Sequence[str] | None = None) -> DensityOperator:
    """Random state of the given rank: trace out a Haar-random purifier.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    d = int(np.prod(dims))
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    if labels is None:
        labels = [f"S{i}" for i in range(len(dims))]
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = _herm(m / np.trace(m).real)
    return density(m, dims, labels)


def random_unitary(d: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2
