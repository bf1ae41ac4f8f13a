"""Quantum conditional min-entropy H_min(A|E).

The optimisation  min tr(sigma)  s.t.  I_A (x) sigma >= rho_AE  is handed to
an interior-point SDP solver (Clarabel through cvxpy).  The solver output is
never trusted directly: the primal witness is turned into an exactly
feasible point by rescaling, and the dual matrix into a valid lower bound,
so every result carries a certified bracket.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from . import linalg as la
from .linalg import DensityOperator, HermitianOperator, StateError

log = logging.getLogger(__name__)

ITERATION_CAP = 10_000
TOL_CERT = 1e-8


class SolverError(RuntimeError):
    """The SDP did not reach the requested accuracy.

    ``bounds`` holds the best (lower, upper) bracket on H_min in bits.
    """

    def __init__(self, msg: str, bounds: tuple[float, float]):
        super().__init__(f"{msg} (best bracket {bounds[0]:.9g} <= H <= {bounds[1]:.9g})")
        self.bounds = bounds


@dataclass(frozen=True)
class MinEntropyResult:
    value: float  # certified lower bound on H_min(A|E), in bits
    sigma_star: DensityOperator
    certificate_gap: float  # lambda_min(2^-value I (x) sigma* - rho)
    upper: float  # dual upper bound on H_min(A|E)
    a_labels: tuple[str, ...]

    @property
    def guess_prob(self) -> float:
        return 2.0 ** (-self.value)

    @property
    def bracket(self) -> float:
        return self.upper - self.value


def _split_ae(rho: HermitianOperator, a_labels) -> tuple[HermitianOperator, tuple[str, ...], int, int]:
    if isinstance(a_labels, str):
        a_labels = (a_labels,)
    a_labels = tuple(a_labels)
    for l in a_labels:
        if l not in rho.labels:
            raise StateError(f"unknown subsystem label {l!r}; have {rho.labels}")
    e_labels = tuple(l for l in rho.labels if l not in a_labels)
    r = la.permute(rho, a_labels + e_labels)
    d_a = int(np.prod([r.dims[i] for i in range(len(a_labels))]))
    return r, a_labels, d_a, r.dim // d_a


def _certified_lambda(rho_m: np.ndarray, sigma: np.ndarray, d_a: int) -> float:
    """Smallest lambda with lambda I (x) sigma >= rho, for fixed sigma.

    Outside the support of sigma the constraint can only hold if rho
    vanishes there, otherwise the answer is +inf.
    """
    w, v = np.linalg.eigh(la._herm(sigma))
    keep = w > 1e-13 * max(w[-1], 1e-300)
    if not np.any(keep):
        return math.inf
    vk = v[:, keep]
    proj = np.kron(np.eye(d_a), vk)  # isometry onto A (x) supp(sigma)
    outside = rho_m - proj @ (proj.conj().T @ rho_m @ proj) @ proj.conj().T
    if np.max(np.abs(outside)) > 1e-9:
        return math.inf
    s = np.kron(np.eye(d_a), np.diag(1.0 / np.sqrt(w[keep])))
    core = s @ (proj.conj().T @ rho_m @ proj) @ s
    return max(la.max_eig(core), 1e-300)


def _best_primal(rho_m: np.ndarray, sig: np.ndarray, d_a: int) -> tuple[np.ndarray, float]:
    """Certified primal value lambda * tr(sigma) for a solver-returned sigma.

    Interior-point solutions of rank-deficient optima sit slightly outside
    the PSD cone, which makes the exact rescaling infinite; small multiples
    of the identity are added and the best certified value is kept.
    """
    w, v = np.linalg.eigh(la._herm(sig))
    base = (v * np.clip(w, 0, None)) @ v.conj().T
    scale = max(float(np.real(np.trace(base))), 1e-300)
    best_sig, best = sig, math.inf
    for eta in (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6):
        cand = base + eta * scale * np.eye(base.shape[0])
        val = _certified_lambda(rho_m, cand, d_a) * float(np.real(np.trace(cand)))
        if val < best:
            best_sig, best = cand, val
    return best_sig, best


def _dual_lower(rho_m: np.ndarray, x: np.ndarray, d_a: int, d_e: int) -> float:
    """Value tr(rho X') of a dual-feasible X' (X' >= 0, tr_A X' <= I) built from X."""
    w, v = np.linalg.eigh(la._herm(x))
    x = (v * np.clip(w, 0, None)) @ v.conj().T
    xe = la.partial_trace_matrix(x, [d_a, d_e], [0])
    we, ve = np.linalg.eigh(la._herm(xe))
    if we[-1] <= 0:
        return 0.0
    best = float(np.real(np.vdot(x, rho_m))) / we[-1]
    if we[0] > 1e-12 * we[-1]:
        # congruence by (tr_A X)^-1/2 makes the partial trace exactly I
        t = np.kron(np.eye(d_a), (ve / np.sqrt(we)) @ ve.conj().T)
        xn = t @ x @ t.conj().T
        xn_e = la.partial_trace_matrix(xn, [d_a, d_e], [0])
        scale = max(la.max_eig(xn_e), 1.0)
        best = max(best, float(np.real(np.vdot(xn, rho_m))) / scale)
    return best


def _fallback_sigma(rho_m: np.ndarray, d_a: int, d_e: int) -> np.ndarray:
    return la.partial_trace_matrix(rho_m, [d_a, d_e], [0])


def _solve(rho_m: np.ndarray, d_a: int, d_e: int, solver: str, max_iter: int):
    sigma = cp.Variable((d_e, d_e), hermitian=True)
    cons = [cp.kron(np.eye(d_a), sigma) - rho_m >> 0]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(sigma))), cons)
    opts = {"max_iter": max_iter} if solver == "CLARABEL" else {"max_iters": max_iter}
    with warnings.catch_warnings():
        # accuracy is judged by the certificate below, not by solver status
        warnings.simplefilter("ignore", UserWarning)
        prob.solve(solver=solver, **opts)
    if sigma.value is None:
        return None, None
    return np.asarray(sigma.value), np.asarray(cons[0].dual_value)


def _solve_dual(rho_m: np.ndarray, d_a: int, d_e: int, solver: str, max_iter: int):
    """max tr(rho X) s.t. X >= 0, tr_A X = I, solved as its own problem.

    Used when the multipliers returned with the primal are too inaccurate
    to certify the optimum.
    """
    x = cp.Variable((d_a * d_e, d_a * d_e), hermitian=True)
    cons = [x >> 0, cp.partial_trace(x, [d_a, d_e], axis=0) == np.eye(d_e)]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(rho_m @ x))), cons)
    opts = {"max_iter": max_iter} if solver == "CLARABEL" else {"max_iters": max_iter}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        prob.solve(solver=solver, **opts)
    return None if x.value is None else np.asarray(x.value)


def cond_min_entropy(
    rho: DensityOperator,
    a_labels=("A",),
    tol: float = 1e-6,
    solver: str = "CLARABEL",
    max_iter: int = ITERATION_CAP,
) -> MinEntropyResult:
    """H_min(A|E) where A is ``a_labels`` and E is every other subsystem.

    ``value`` is a certified lower bound on the optimum and ``upper`` a
    certified upper bound; the call fails unless they are within ``tol``.
    """
    if not isinstance(rho, DensityOperator):
        raise StateError("cond_min_entropy requires a DensityOperator")
    r, a_labels, d_a, d_e = _split_ae(rho, a_labels)
    rho_m = la._herm(r.matrix)

    if d_e == 1:
        # no side information: plain min-entropy, sigma is the scalar 1
        lam = la.max_eig(rho_m)
        sigma_star = la.density(np.ones((1, 1)), (1,), ("E",))
        return MinEntropyResult(-math.log2(lam), sigma_star, 0.0, -math.log2(lam), a_labels)

    sig, x = None, None
    try:
        sig, x = _solve(rho_m, d_a, d_e, solver, max_iter)
    except cp.error.SolverError as exc:
        log.debug("solver %s failed: %s", solver, exc)
    if sig is None:
        sig = _fallback_sigma(rho_m, d_a, d_e)

    sig, upper_p = _best_primal(rho_m, sig, d_a)
    tr_sig = float(np.real(np.trace(sig)))
    lower_p = _dual_lower(rho_m, x, d_a, d_e) if x is not None else 0.0
    # Trivial feasible point sigma = rho_E gives another valid upper bound.
    if not math.isfinite(upper_p):
        sig = _fallback_sigma(rho_m, d_a, d_e)
        upper_p = _certified_lambda(rho_m, sig, d_a)
        tr_sig = 1.0
    value = -math.log2(upper_p)
    if lower_p <= 0 or -math.log2(lower_p) - value > tol:
        try:
            x2 = _solve_dual(rho_m, d_a, d_e, solver, max_iter)
        except cp.error.SolverError as exc:
            log.debug("dual solve failed: %s", exc)
            x2 = None
        if x2 is not None:
            lower_p = max(lower_p, _dual_lower(rho_m, x2, d_a, d_e))
    upper_h = -math.log2(lower_p) if lower_p > 0 else math.inf
    if upper_h - value > tol:
        raise SolverError("min-entropy SDP did not converge to tolerance", (value, upper_h))

    sigma_n = la._herm(sig / tr_sig)
    w, v = np.linalg.eigh(sigma_n)
    sigma_n = (v * np.clip(w, 0, None)) @ v.conj().T
    sigma_n /= np.trace(sigma_n).real
    k = len(a_labels)
    sigma_star = la.DensityOperator(sigma_n, r.dims[k:], r.labels[k:], check=False)
    gap = la.min_eig(2.0 ** (-value) * np.kron(np.eye(d_a), sigma_n) - rho_m)
    return MinEntropyResult(value, sigma_star, gap, upper_h, a_labels)


def min_entropy_unconditional(rho: HermitianOperator) -> float:
    """-log2 of the largest eigenvalue."""
    return -math.log2(la.max_eig(rho.matrix))


def helstrom_guess_prob(p0: float, p1: float, rho0: HermitianOperator, rho1: HermitianOperator) -> float:
    """1/2 (1 + ||p0 rho0 - p1 rho1||_1)."""
    if min(p0, p1) < 0 or abs(p0 + p1 - 1) > 1e-10:
        raise ValueError(f"({p0}, {p1}) is not a probability distribution")
    return 0.5 * (1.0 + la.trace_norm(p0 * rho0.matrix - p1 * rho1.matrix))


guess_prob_binary_cq = helstrom_guess_prob


def cq_state(probs, states, labels=("A", "E")) -> DensityOperator:
    """sum_i p_i |i><i| (x) rho_i."""
    k = len(probs)
    d_e = states[0].dim
    m = np.zeros((k * d_e, k * d_e), dtype=complex)
    for i, (p, s) in enumerate(zip(probs, states)):
        m[i * d_e:(i + 1) * d_e, i * d_e:(i + 1) * d_e] = p * s.matrix
    return la.density(m, (k, d_e), labels)


def renner_norm_bound(s: HermitianOperator | np.ndarray, sigma: np.ndarray) -> tuple[float, float]:
    """Both sides of ||S||_1 <= sqrt(tr(sigma) tr(S sigma^-1/2 S sigma^-1/2)).

    ``sigma`` may be singular as long as S lives inside its support, in which
    case inverses are taken on the support.
    """
    s_m = s.matrix if isinstance(s, HermitianOperator) else np.asarray(s, dtype=complex)
    sigma = la._herm(np.asarray(sigma, dtype=complex))
    w, v = np.linalg.eigh(sigma)
    if w[0] < -la.TOL_PSD:
        raise StateError("sigma must be positive semidefinite")
    keep = w > 1e-12 * max(w[-1], 1e-300)
    p = v[:, keep] @ v[:, keep].conj().T
    if np.max(np.abs(s_m - p @ s_m @ p), initial=0.0) > 1e-9:
        raise StateError("S is not supported within the support of sigma")
    inv_half = (v[:, keep] / np.sqrt(w[keep])) @ v[:, keep].conj().T
    t = s_m @ inv_half
    inner = float(np.real(np.trace(t @ t)))
    lhs = la.trace_norm(s_m)
    rhs = math.sqrt(max(float(np.real(np.trace(sigma))) * inner, 0.0))
    return lhs, rhs


@dataclass(frozen=True)
class ClassicalKeyCheck:
    h_e_given_ak: float
    h_e_given_a: float
    key_count: int

    @property
    def slack(self) -> float:
        return self.h_e_given_ak - self.h_e_given_a + math.log2(self.key_count)


def is_classical_on(rho: HermitianOperator, label: str, tol: float = 1e-10) -> bool:
    """Block-diagonal in the computational basis of subsystem ``label``."""
    order = (label,) + tuple(l for l in rho.labels if l != label)
    r = la.permute(rho, order)
    k = r.dims[0]
    rest = r.dim // k
    t = r.matrix.reshape(k, rest, k, rest).copy()
    for i in range(k):
        t[i, :, i, :] = 0
    return float(np.sum(np.abs(t))) <= tol


def cond_min_entropy_classical_key(
    omega: DensityOperator, e_label: str = "E", a_label: str = "A", k_label: str = "K", tol: float = 1e-6
) -> ClassicalKeyCheck:
    """Compare H(E|AK) with H(E|A) - log|K| for a state classical on K."""
    if not is_classical_on(omega, k_label):
        raise StateError(f"subsystem {k_label} is not classical")
    h_ak = cond_min_entropy(omega, (e_label,), tol=tol).value
    h_a = cond_min_entropy(la.partial_trace(omega, [k_label]), (e_label,), tol=tol).value
    return ClassicalKeyCheck(h_ak, h_a, omega.dim_of(k_label))
