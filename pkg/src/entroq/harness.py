"""Measurable forms of the security statements.

Every check compares an exactly computed quantity (a trace distance,
fidelity, success probability or min-entropy) against the bound that the
corresponding security argument predicts for it.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .ciphers import (
    Ciphertext,
    KeyedCipher,
    block_trace_norm,
    ciphertext_distance,
    make_identity,
    product_with,
)
from .gf2 import aghp_degree
from .linalg import DensityOperator, HermitianOperator, StateError
from .minentropy import MinEntropyResult, cond_min_entropy, renner_norm_bound
from .pauli import popcount

PASS_TOL = 1e-8
ENTROPY_TOL = 1e-6


@dataclass
class ExperimentReport:
    scenario: str
    trial: int
    seed: int
    t: float
    epsilon_target: float
    delta_measured: float
    bound_value: float
    passed: bool
    status: str  # "pass" | "fail" | "precondition-violated"
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    CSV_FIELDS = (
        "scenario", "trial", "seed", "t", "epsilon_target",
        "delta_measured", "bound_value", "passed", "status",
    )

    @classmethod
    def judge(cls, scenario, trial, seed, t, eps, delta, bound, runtime=0.0, extra=None) -> "ExperimentReport":
        ok = bool(delta <= bound + PASS_TOL)
        return cls(scenario, trial, seed, t, eps, delta, bound, ok, "pass" if ok else "fail", runtime, extra or {})

    @classmethod
    def violated(cls, scenario, trial, seed, t, eps, extra=None) -> "ExperimentReport":
        return cls(scenario, trial, seed, t, eps, math.nan, math.nan, False, "precondition-violated", 0.0, extra or {})

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- distances


def indist_distance(c: KeyedCipher, rho: HermitianOperator) -> float:
    """||E(rho) - Omega (x) rho_E||_1 with Omega = E(I/d_A).

    Omega is fixed rather than optimised, so this upper-bounds the distance
    to the best product state.
    """
    out = c.average(rho)
    rho_e = la.partial_trace(rho, [c.label])
    ideal = _ideal(c, rho, rho_e)
    return ciphertext_distance(out, ideal)


def _ideal(c: KeyedCipher, rho: HermitianOperator, rho_e: HermitianOperator) -> Ciphertext:
    ideal = product_with(c.omega(), rho_e)
    if rho.labels != ideal.labels:
        blocks = tuple(
            la.permute(HermitianOperator(b, ideal.dims, ideal.labels, check=False), rho.labels).matrix
            for b in ideal.blocks
        )
        ideal = Ciphertext(blocks, rho.dims, rho.labels)
    return ideal


def floor_entropy(value: float, digits: int = 6) -> float:
    return math.floor(value * 10 ** digits) / 10 ** digits


@dataclass(frozen=True)
class BoundChain:
    """Delta <= Renner bound <= delta sqrt(d_A 2^-t) for one cipher run."""

    delta: float
    renner_rhs: float
    bias_bound: float
    t: float

    @property
    def ordered(self) -> bool:
        return self.delta <= self.renner_rhs + PASS_TOL and self.renner_rhs <= self.bias_bound + PASS_TOL


def renner_chain(c: KeyedCipher, rho: DensityOperator, me: MinEntropyResult, bias: float) -> BoundChain:
    """Evaluate the three quantities of the small-bias argument.

    S = E(rho) - I/d (x) rho_E and sigma = I (x) sigma*, where sigma* is the
    min-entropy witness; ``t`` is the certified entropy.
    """
    if not c.length_preserving:
        raise ValueError("the bias chain applies to length-preserving ciphers")
    d_a = 2 ** c.n
    out = c.average(rho).blocks[0]
    rho_e = la.partial_trace(rho, [c.label])
    s = out - _ideal(c, rho, rho_e).blocks[0]
    sig = HermitianOperator(np.kron(np.eye(d_a), me.sigma_star.matrix), (d_a,) + me.sigma_star.dims,
                            (c.label,) + me.sigma_star.labels, check=False)
    sig = la.permute(sig, rho.labels).matrix
    lhs, rhs = renner_norm_bound(s, sig)
    t = me.value
    return BoundChain(lhs, rhs, bias * math.sqrt(d_a * 2.0 ** (-t)), t)


def _measured_t(rho: DensityOperator, label: str, t_claimed: float | None):
    me = cond_min_entropy(rho, (label,), tol=ENTROPY_TOL)
    t_meas = floor_entropy(me.value)
    if t_claimed is None:
        return me, t_meas, True
    return me, t_claimed, me.value >= t_claimed - ENTROPY_TOL


def as_bound_check(c: KeyedCipher, rho: DensityOperator, t_claimed: float | None = None,
                   bias: float | None = None, scenario: str = "as", trial: int = 0, seed: int = 0) -> ExperimentReport:
    """Delta <= bias * sqrt(2^(n - t)) for the small-bias cipher."""
    start = time.perf_counter()
    if bias is None:
        bias = float(c.meta["delta_bound"])
    me, t, ok = _measured_t(rho, c.label, t_claimed)
    if not ok:
        return ExperimentReport.violated(scenario, trial, seed, t, math.nan, {"t_measured": me.value})
    delta = indist_distance(c, rho)
    bound = bias * math.sqrt(2.0 ** (c.n - t))
    return ExperimentReport.judge(scenario, trial, seed, t, math.nan, delta, bound,
                                  time.perf_counter() - start, {"bias": bias, "t_measured": me.value})


def xu_threshold_bits(n: int, t: float, epsilon: float) -> float:
    return n - t + 2 * math.log2(1 / epsilon)


def xu_bound(n: int, t: float, key_count: int) -> float:
    return math.sqrt(2.0 ** (n - t) / key_count)


def xu_bound_check(c: KeyedCipher, rho: DensityOperator, t_claimed: float | None = None,
                   epsilon: float | None = None, scenario: str = "xu", trial: int = 0,
                   seed: int = 0) -> ExperimentReport:
    """Delta <= sqrt(d_A 2^-t / |K|); also Delta <= epsilon once log|K| meets the key-length threshold."""
    start = time.perf_counter()
    me, t, ok = _measured_t(rho, c.label, t_claimed)
    eps = math.nan if epsilon is None else epsilon
    if not ok:
        return ExperimentReport.violated(scenario, trial, seed, t, eps, {"t_measured": me.value})
    delta = indist_distance(c, rho)
    bound = xu_bound(c.n, t, c.key_count)
    extra = {"t_measured": me.value, "key_count": c.key_count}
    if epsilon is not None:
        meets = c.key_bits >= xu_threshold_bits(c.n, t, epsilon) - 1e-12
        extra["meets_threshold"] = meets
        if meets:
            bound = min(bound, epsilon)
    return ExperimentReport.judge(scenario, trial, seed, t, eps, delta, bound, time.perf_counter() - start, extra)


# ---------------------------------------------------------------- adversaries


@dataclass(frozen=True)
class TwoOutcomePOVM:
    e0: np.ndarray  # guess "first state"
    e1: np.ndarray

    def probabilities(self, rho: np.ndarray) -> tuple[float, float]:
        return float(np.real(np.vdot(self.e0, rho))), float(np.real(np.vdot(self.e1, rho)))


def helstrom_adversary(rho: HermitianOperator, sigma: HermitianOperator) -> tuple[TwoOutcomePOVM, float]:
    """Projector onto the positive part of rho - sigma and its success probability.

    The success is evaluated by running the POVM on the equal mixture, not
    from the closed form.
    """
    if rho.dim != sigma.dim:
        raise StateError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    w, v = np.linalg.eigh(la._herm(rho.matrix - sigma.matrix))
    pos = v[:, w > 0]
    e0 = pos @ pos.conj().T
    povm = TwoOutcomePOVM(e0, np.eye(rho.dim) - e0)
    success = 0.5 * povm.probabilities(rho.matrix)[0] + 0.5 * povm.probabilities(sigma.matrix)[1]
    return povm, success


def ciphertext_helstrom_success(c: KeyedCipher, rho: DensityOperator) -> float:
    """Best success distinguishing E(rho) from Omega (x) rho_E, block by block."""
    out = c.average(rho)
    ideal = _ideal(c, rho, la.partial_trace(rho, [c.label]))
    succ = 0.0
    for a, b in zip(out.blocks, ideal.blocks):
        w = np.real(np.trace(a))
        if w <= 0:
            continue
        _, s = helstrom_adversary(HermitianOperator(a / w, out.dims, out.labels, check=False),
                                  HermitianOperator(b / w, out.dims, out.labels, check=False))
        succ += w * s
    return succ


# ---------------------------------------------------------------- Goldreich-Levin


def function_advantage(prior, f_values, real, ideal) -> float:
    """|Pr[A = f(x)] on the real table - the same on the ideal table|.

    ``real[x, g]`` and ``ideal[x, g]`` are the adversary's output
    distributions for input index x.
    """
    prior = np.asarray(prior, dtype=float)
    f_values = np.asarray(f_values, dtype=int)
    idx = np.arange(len(prior))
    p = float(np.sum(prior * np.asarray(real)[idx, f_values]))
    q = float(np.sum(prior * np.asarray(ideal)[idx, f_values]))
    return abs(p - q)


def predicate_advantage(prior, f_values, real, ideal, r: int) -> float:
    """Advantage of the predicate adversary r.A against h_r(x) = r.f(x)."""
    prior = np.asarray(prior, dtype=float)
    real = np.asarray(real, dtype=float)
    ideal = np.asarray(ideal, dtype=float)
    n_out = real.shape[1]
    g_par = np.array([popcount(r & g) & 1 for g in range(n_out)])
    h = np.array([popcount(r & int(fx)) & 1 for fx in f_values])
    hit = (g_par[None, :] == h[:, None]).astype(float)
    p = float(np.sum(prior[:, None] * real * hit))
    q = float(np.sum(prior[:, None] * ideal * hit))
    return abs(p - q)


def gl_reduction(prior, f_values, real, ideal) -> tuple[int, float]:
    """Exhaustive search for the Goldreich-Levin string r with the largest advantage.

    Outputs of the adversary are the integers 0..real.shape[1]-1 and are
    read as bit strings of the same width as f.
    """
    n_out = np.asarray(real).shape[1]
    if n_out > 1 << 12:
        raise ValueError("output space too large for exhaustive search")
    best_r, best = 0, -1.0
    for r in range(n_out):
        a = predicate_advantage(prior, f_values, real, ideal, r)
        if a > best + 1e-15:
            best_r, best = r, a
    return best_r, best


def synthetic_gl_instance(bits: int, n_inputs: int, advantage: float, seed):
    """Adversary tables with a prescribed function advantage.

    The ideal table is a random guesser; the real table mixes it with an
    adversary that always answers f(x), with weight chosen to hit
    ``advantage`` exactly.
    """
    rng = np.random.default_rng(seed)
    n_out = 1 << bits
    prior = rng.dirichlet(np.ones(n_inputs))
    f_values = rng.integers(0, n_out, size=n_inputs)
    ideal = rng.dirichlet(np.ones(n_out), size=n_inputs)
    perfect = np.zeros_like(ideal)
    perfect[np.arange(n_inputs), f_values] = 1.0
    base = function_advantage(prior, f_values, perfect, ideal)
    if advantage > base:
        raise ValueError(f"advantage {advantage} unreachable (max {base:.3f})")
    lam = advantage / base
    real = (1 - lam) * ideal + lam * perfect
    return prior, f_values, real, ideal


# ---------------------------------------------------------------- ensembles


@dataclass
class InterpretationEnsemble:
    probs: np.ndarray
    states: list[DensityOperator]

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1) > 1e-10:
            raise ValueError("ensemble probabilities must be a distribution")
        if len(self.probs) != len(self.states):
            raise ValueError("one probability per component")

    @property
    def mixture(self) -> DensityOperator:
        m = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        s0 = self.states[0]
        return DensityOperator(m, s0.dims, s0.labels)


def random_ensemble(dims, labels, size: int, seed, max_rank: int = 1) -> InterpretationEnsemble:
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(size))
    d = int(np.prod(dims))
    states = [
        la.random_state(dims, int(rng.integers(1, min(max_rank, d) + 1)), rng.integers(2 ** 63), labels)
        for _ in range(size)
    ]
    return InterpretationEnsemble(probs, states)


def tau_tilde(ens: InterpretationEnsemble, h: Callable[[int], int] | Sequence[int],
              label: str = "A") -> tuple[DensityOperator, DensityOperator]:
    """r0 tau0 + r1 rho_A (x) tau1_E  and  r1 tau1 + r0 rho_A (x) tau0_E.

    With one predicate class empty the corresponding terms vanish (so a
    constant predicate returns rho and rho_A (x) rho_E).
    """
    hv = [int(h(i)) if callable(h) else int(h[i]) for i in range(len(ens.probs))]
    rho = ens.mixture
    rest = [l for l in rho.labels if l != label]
    rho_a = la.partial_trace(rho, rest)
    parts = []
    for b in (0, 1):
        m = sum((p * s.matrix for p, s, hb in zip(ens.probs, ens.states, hv) if hb == b),
                np.zeros_like(rho.matrix))
        parts.append(HermitianOperator(m, rho.dims, rho.labels, check=False))
    out = []
    for b in (0, 1):
        own, other = parts[b], parts[1 - b]
        other_e = la.partial_trace(other, [label])
        prod_ = la.permute(la.tensor_product(rho_a, other_e), rho.labels)
        out.append(DensityOperator(own.matrix + prod_.matrix, rho.dims, rho.labels))
    return out[0], out[1]


def rho_hat(rho: DensityOperator, label: str = "A") -> DensityOperator:
    """1/3 rho + 2/3 I/d_A (x) rho_E."""
    rho_e = la.partial_trace(rho, [label])
    d = rho.dim_of(label)
    mixed = la.permute(la.tensor_product(la.maximally_mixed((d,), (label,)), rho_e), rho.labels)
    return DensityOperator(rho.matrix / 3 + 2 * mixed.matrix / 3, rho.dims, rho.labels)


def rho_hat_entropy_floor(h_rho: float, n: int) -> float:
    """-log2(1/3 2^-h + 2/3 2^-n): guaranteed entropy of rho_hat given H(rho) >= h."""
    return -math.log2(2.0 ** (-h_rho) / 3 + 2 * 2.0 ** (-n) / 3)


# ---------------------------------------------------------------- strong security


def strong_security_gap(c: KeyedCipher, ens: InterpretationEnsemble, h: Sequence[int],
                        povm: TwoOutcomePOVM, label: str = "A") -> dict:
    """Compare the strong baseline with the best adversary on E alone.

    The adversary ``povm`` acts on a length-preserving ciphertext (A (x) E);
    outcome b is its guess for h(i).  Returns the success on real
    ciphertexts, on E(rho_A) (x) sigma_i^E, and the optimal success of an
    adversary seeing only sigma_i^E.
    """
    if not c.length_preserving:
        raise ValueError("strong-security check expects a length-preserving cipher")
    rho = ens.mixture
    rest = [l for l in rho.labels if l != label]
    enc_rho_a = c.average(la.partial_trace(rho, rest)).blocks[0]
    real = strong = 0.0
    e_parts = [None, None]
    for p, s, hb in zip(ens.probs, ens.states, h):
        e = povm.e0 if hb == 0 else povm.e1
        real += p * float(np.real(np.vdot(e, c.average(s).blocks[0])))
        s_e = la.partial_trace(s, [label])
        base = la.permute(
            la.tensor_product(HermitianOperator(enc_rho_a, (2 ** c.n,), (label,), check=False), s_e), s.labels
        )
        strong += p * float(np.real(np.vdot(e, base.matrix)))
        e_parts[hb] = p * s_e.matrix if e_parts[hb] is None else e_parts[hb] + p * s_e.matrix
    d_e = la.partial_trace(rho, [label]).dim
    zero = np.zeros((d_e, d_e), dtype=complex)
    e0 = e_parts[0] if e_parts[0] is not None else zero
    e1 = e_parts[1] if e_parts[1] is not None else zero
    best_e_only = 0.5 * (float(np.real(np.trace(e0 + e1))) + la.trace_norm(e0 - e1))
    return {"real": real, "strong_baseline": strong, "best_e_only": best_e_only}


def povm_grid(d: int, steps: int = 4) -> list[TwoOutcomePOVM]:
    """Projective two-outcome measurements onto a grid of pure states (plus trivial ones)."""
    out = [TwoOutcomePOVM(np.eye(d), np.zeros((d, d))), TwoOutcomePOVM(np.zeros((d, d)), np.eye(d))]
    thetas = np.linspace(0, np.pi, steps + 1)
    phis = np.linspace(0, 2 * np.pi, 2 * steps, endpoint=False)
    for i in range(d):
        for j in range(i + 1, d):
            for th, ph in product(thetas, phis):
                v = np.zeros(d, dtype=complex)
                v[i], v[j] = np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)
                e0 = np.outer(v, v.conj())
                out.append(TwoOutcomePOVM(e0, np.eye(d) - e0))
    return out


# ---------------------------------------------------------------- lower bound


@dataclass(frozen=True)
class LowerBoundResult:
    n: int
    key_count: int
    fidelity_sq: float
    bound: float  # |K| 2^-2n
    delta: float
    epsilon_target: float
    indist_fails: bool
    predicted_fail: bool

    @property
    def holds(self) -> bool:
        return self.fidelity_sq <= self.bound + PASS_TOL


def lower_bound_experiment(c: KeyedCipher, epsilon_target: float = 0.5,
                           rho: DensityOperator | None = None) -> LowerBoundResult:
    """Fidelity of E(Phi+) with Omega (x) I/2^n against |K| 2^-2n."""
    phi = la.max_entangled(c.n, (c.label, "E"))
    if rho is not None and (rho.dims != phi.dims or la.trace_distance(rho, phi) > 1e-10):
        raise StateError("the lower-bound witness must be the maximally entangled state")
    out = c.average(phi).to_density()
    ideal_ct = _ideal(c, phi, la.partial_trace(phi, [c.label]))
    ideal = ideal_ct.to_density()
    f = la.fidelity(out, ideal)
    delta = block_trace_norm(c.average(phi) - ideal_ct)
    d2 = 4 ** c.n
    return LowerBoundResult(
        c.n, c.key_count, f * f, c.key_count / d2, delta, epsilon_target,
        indist_fails=delta > epsilon_target,
        predicted_fail=c.key_count < d2 * (1 - epsilon_target),
    )


def identity_lower_bound(n: int) -> LowerBoundResult:
    return lower_bound_experiment(make_identity(n))


# ---------------------------------------------------------------- key lengths


@dataclass(frozen=True)
class KeyLengthRow:
    n: int
    t: float
    epsilon: float
    as_bits: float
    xu_bits: float
    necessary_bits: float
    as_delta: float
    as_m: int | None  # AGHP degree actually used, None if beyond desk scale
    as_actual_bits: float | None  # log2 |S| of the constructed set

    def to_dict(self) -> dict:
        return asdict(self)


def as_key_bits(n: int, t: float, eps: float) -> float:
    return n - t + (2 * math.log2(n) if n > 0 else 0.0) + 2 * math.log2(1 / eps) + 2


def key_length_row(n: int, t: float, eps: float) -> KeyLengthRow:
    delta = min(1.0, eps / 2 ** ((n - t) / 2))
    m = aghp_degree(2 * n, delta)
    m_ok = m if m <= 16 else None
    return KeyLengthRow(
        n, t, eps,
        as_bits=as_key_bits(n, t, eps),
        xu_bits=xu_threshold_bits(n, t, eps),
        necessary_bits=n - t - 1,
        as_delta=delta,
        as_m=m_ok,
        as_actual_bits=float(2 * m) if m_ok is not None else None,
    )


def key_length_table(n: int, t_grid: Sequence[float], eps_grid: Sequence[float]) -> list[KeyLengthRow]:
    return [key_length_row(n, t, e) for t in t_grid for e in eps_grid]
