import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entroq import linalg as la
from entroq.minentropy import (cond_min_entropy, cond_min_entropy_classical_key, cq_state, helstrom_guess_prob,
                               is_classical_on, min_entropy_unconditional, renner_norm_bound)

seeds = st.integers(0, 2**32 - 1)


def test_product_state_equals_marginal_min_entropy():
    ra = la.random_state((2,), 2, 1, ("A",))
    re = la.random_state((3,), 2, 2, ("E",))
    res = cond_min_entropy(la.tensor_product(ra, re))
    assert res.value == pytest.approx(-math.log2(np.linalg.eigvalsh(ra.matrix)[-1]), abs=1e-6)
    assert res.certificate_gap >= -1e-8
    assert res.sigma_star.matrix.trace().real == pytest.approx(1)


@pytest.mark.parametrize("n", [1, 2])
def test_maximally_entangled(n):
    res = cond_min_entropy(la.max_entangled(n))
    assert res.value == pytest.approx(-n, abs=1e-6)
    assert res.bracket <= 1e-6


def test_uniform_a_gives_plus_n():
    rho = la.tensor_product(la.maximally_mixed((4,), "A"), la.random_state((2,), 2, 3, ("E",)))
    assert cond_min_entropy(rho).value == pytest.approx(2, abs=1e-6)


def test_trivial_e_is_unconditional():
    rho = la.random_state((4, 1), 3, 5, ("A", "E"))
    assert cond_min_entropy(rho).value == pytest.approx(min_entropy_unconditional(rho))


def test_unconditional_examples():
    assert min_entropy_unconditional(la.maximally_mixed((8,), "A")) == pytest.approx(3)
    assert min_entropy_unconditional(la.basis_state(0, (4,), ("A",))) == pytest.approx(0, abs=1e-12)
    rho = la.random_state((4,), 4, 9, ("A",))
    w = np.linalg.eig(rho.matrix)[0].real  # general eigen-solver as the oracle
    assert min_entropy_unconditional(rho) == pytest.approx(-math.log2(w.max()))


def test_helstrom_examples():
    z0 = la.basis_state(0, (2,), ("E",))
    z1 = la.basis_state(1, (2,), ("E",))
    plus = la.pure(np.array([1, 1]) / np.sqrt(2), (2,), ("E",))
    assert helstrom_guess_prob(0.5, 0.5, z0, z1) == pytest.approx(1)
    assert helstrom_guess_prob(0.3, 0.7, plus, plus) == pytest.approx(0.7)
    p = helstrom_guess_prob(0.5, 0.5, z0, plus)
    assert p == pytest.approx(0.5 + math.sqrt(2) / 4)
    assert p == pytest.approx(0.853553, abs=1e-6)
    h = cond_min_entropy(cq_state([0.5, 0.5], [z0, plus])).value
    assert h == pytest.approx(-math.log2(p), abs=1e-6)
    with pytest.raises(ValueError):
        helstrom_guess_prob(0.5, 0.6, z0, z1)


def test_non_state_rejected():
    with pytest.raises(la.StateError):
        cond_min_entropy(la.hermitian(np.eye(4), (2, 2), ("A", "E")))


def test_a_labels_select_subsystem():
    ra = la.random_state((2,), 2, 1, ("A",))
    re = la.random_state((2,), 1, 2, ("E",))
    rho = la.tensor_product(re, ra)  # A is the second factor
    assert cond_min_entropy(rho, ("A",)).value == pytest.approx(min_entropy_unconditional(ra), abs=1e-6)


def test_renner_examples():
    lhs, rhs = renner_norm_bound(np.zeros((2, 2)), np.eye(2))
    assert (lhs, rhs) == (0, 0)
    s = la.random_hermitian(4, 3)
    lhs, rhs = renner_norm_bound(s, np.eye(4))
    assert rhs == pytest.approx(math.sqrt(4 * np.trace(s @ s).real))
    assert lhs <= rhs + 1e-9
    with pytest.raises(la.StateError):
        renner_norm_bound(s, np.diag([1, 0, 0, 0]))


def test_classical_key_examples():
    rho_ea = la.random_state((2, 2), 2, 4, ("E", "A"))
    single = la.tensor_product(rho_ea, la.maximally_mixed((1,), "K"))
    assert cond_min_entropy_classical_key(single).slack == pytest.approx(0, abs=1e-6)
    indep = la.tensor_product(rho_ea, la.maximally_mixed((2,), "K"))
    assert cond_min_entropy_classical_key(indep).slack == pytest.approx(1, abs=1e-5)
    assert is_classical_on(indep, "K")
    entangled_k = la.tensor_product(la.max_entangled(1, ("A", "K")), la.maximally_mixed((2,), "E"))
    assert not is_classical_on(entangled_k, "K")
    with pytest.raises(la.StateError):
        cond_min_entropy_classical_key(entangled_k)


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from([0.25, 0.5, 0.75]))
def test_mixing_with_uniform_never_lowers_entropy(seed, alpha):
    rho = la.random_state((2, 2), 2, seed, ("A", "E"))
    rho_e = la.partial_trace(rho, ["A"]).matrix
    mixed = la.density(alpha * rho.matrix + (1 - alpha) * np.kron(np.eye(2) / 2, rho_e), rho.dims, rho.labels)
    assert cond_min_entropy(mixed).value >= cond_min_entropy(rho).value - 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds, seeds)
def test_invariant_under_local_unitary_on_e(s1, s2):
    rho = la.random_state((2, 3), 3, s1, ("A", "E"))
    u = np.kron(np.eye(2), la.random_unitary(3, s2))
    rotated = la.density(u @ rho.matrix @ u.conj().T, rho.dims, rho.labels)
    assert cond_min_entropy(rotated).value == pytest.approx(cond_min_entropy(rho).value, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(1, 4))
def test_value_range_and_certificate(seed, rank):
    rho = la.random_state((2, 2), rank, seed, ("A", "E"))
    res = cond_min_entropy(rho)
    assert -1 - 1e-6 <= res.value <= 1 + 1e-6
    assert res.certificate_gap >= -1e-8
    assert la.operator_geq(la.hermitian(2 ** -res.value * np.kron(np.eye(2), res.sigma_star.matrix), rho.dims,
                                        rho.labels), rho, 1e-8)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0.05, 0.95), st.integers(2, 4))
def test_rank_deficient_witness_is_certified(seed, p0, d_e):
    # two pure states in a larger E force a singular optimal sigma
    r0 = la.random_state((d_e,), 1, seed, ("E",))
    r1 = la.random_state((d_e,), 1, seed + 1, ("E",))
    res = cond_min_entropy(cq_state([p0, 1 - p0], [r0, r1]))
    assert res.value == pytest.approx(-math.log2(helstrom_guess_prob(p0, 1 - p0, r0, r1)), abs=1e-6)
    assert res.certificate_gap >= -1e-8


def test_inaccurate_multipliers_fall_back_to_dual_solve():
    rho = la.random_state((2, 3), 3, 284, ("A", "E"))
    u = np.kron(np.eye(2), la.random_unitary(3, 1653137))
    rotated = la.density(u @ rho.matrix @ u.conj().T, rho.dims, rho.labels)
    res = cond_min_entropy(rotated)
    assert res.bracket <= 1e-6
    assert res.value == pytest.approx(cond_min_entropy(rho).value, abs=1e-6)
