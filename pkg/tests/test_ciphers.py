import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entroq import linalg as la
from entroq.ciphers import (INDEX_LABEL, average_channel, cipher_from_json, make_ambainis_smith,
                            make_ambainis_smith_aghp, make_full_pad, make_identity, make_pauli_subset,
                            make_xor_universal, random_pauli_subset)
from entroq.gf2 import DeltaBiasedSet, aghp_set
from entroq.harness import indist_distance
from entroq.pauli import PauliString, pauli_conjugate, pauli_matrix

seeds = st.integers(0, 2**32 - 1)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def state(n, d_e, seed, rank=None):
    d = 2 ** n * d_e
    return la.random_state((2 ** n, d_e), rank or d, seed, ("A", "E"))


@pytest.mark.parametrize("n", [1, 2])
def test_full_pad_is_perfect(n):
    c = make_full_pad(n)
    assert c.key_bits == 2 * n
    rho = state(n, 2, 7)
    out = c.average(rho).blocks[0]
    expected = np.kron(np.eye(2 ** n) / 2 ** n, la.partial_trace(rho, ["A"]).matrix)
    assert la.trace_norm(out - expected) <= 1e-10


@pytest.mark.parametrize("factory", [lambda: make_full_pad(2), lambda: make_ambainis_smith_aghp(2, 2),
                                     lambda: make_xor_universal(2, key_count=5)])
def test_decrypt_inverts_every_key(factory):
    c = factory()
    rho = state(2, 2, 3)
    for k in range(c.key_count):
        back = c.decrypt(k, c.encrypt(k, rho))
        assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-10


def test_decrypt_accepts_dense_ciphertext():
    c = make_xor_universal(1, key_count=3)
    rho = state(1, 2, 4)
    dense = c.encrypt(2, rho).to_density()
    assert dense.labels[0] == INDEX_LABEL and dense.dims[0] == 4
    np.testing.assert_allclose(c.decrypt(2, dense).matrix, rho.matrix, atol=1e-12)


@pytest.mark.parametrize("factory", [lambda: make_ambainis_smith_aghp(1, 2), lambda: make_xor_universal(1, key_count=2)])
def test_encryption_leaves_e_alone(factory):
    c = factory()
    rho = state(1, 3, 8)
    rho_e = la.partial_trace(rho, ["A"]).matrix
    for k in range(c.key_count):
        np.testing.assert_allclose(c.encrypt(k, rho).marginal(["E"]).matrix, rho_e, atol=1e-12)


def test_as_full_set_equals_pad():
    s = DeltaBiasedSet(4, list(range(16)), 0.0)
    rho = state(2, 2, 1)
    a = make_ambainis_smith(2, s).average(rho).blocks[0]
    b = make_full_pad(2).average(rho).blocks[0]
    np.testing.assert_allclose(a, b, atol=1e-14)
    assert make_ambainis_smith(2, s).length_preserving


def test_as_length_mismatch():
    with pytest.raises(ValueError):
        make_ambainis_smith(2, aghp_set(3, 2))


def test_identity_cipher_is_no_encryption():
    z = la.tensor_product(la.basis_state(0, (2,), ("A",)), la.maximally_mixed((2,), "E"))
    assert indist_distance(make_identity(1), z) == pytest.approx(1)


def test_xu_zero_key_has_no_mask():
    c = make_xor_universal(1, key_count=1)
    rho = state(1, 2, 5)
    out = c.average(rho)
    assert out.index_dim == 4 and not c.length_preserving
    for b in out.blocks:
        np.testing.assert_allclose(b, rho.matrix / 4, atol=1e-15)


GF4_MUL = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]  # x^2 = x + 1


def test_xu_average_matches_literal_double_sum():
    phi = la.max_entangled(1)
    c = make_xor_universal(1, key_count=4)
    out = c.average(phi)
    for i in range(4):
        acc = np.zeros((4, 4), dtype=complex)
        for k in range(4):
            s = GF4_MUL[i][k]
            p = np.linalg.matrix_power(X, s >> 1) @ np.linalg.matrix_power(Z, s & 1)
            u = np.kron(p, np.eye(2))
            acc += u @ phi.matrix @ u.conj().T
        np.testing.assert_allclose(out.blocks[i], acc / 16, atol=1e-12)


def test_single_key_average_is_encryption():
    c = make_pauli_subset(1, [3])
    rho = state(1, 2, 2)
    np.testing.assert_allclose(c.average(rho).blocks[0], c.encrypt(0, rho).blocks[0])


def test_average_channel_result():
    c = make_ambainis_smith_aghp(1, 2)
    res = average_channel(c, state(1, 2, 0))
    assert res.rho_out.trace == pytest.approx(1)
    assert res.omega.dims == (2,) and res.omega.trace == pytest.approx(1)


def test_profile_mismatch():
    with pytest.raises(la.StateError):
        make_full_pad(2).average(state(1, 2, 0))
    with pytest.raises(ValueError):
        make_xor_universal(1, key_set=[])
    with pytest.raises(ValueError):
        make_xor_universal(1, key_set=[1, 1])


@pytest.mark.parametrize("factory", [lambda: make_full_pad(1), lambda: make_ambainis_smith_aghp(1, 2),
                                     lambda: make_xor_universal(1, key_count=2), lambda: make_xor_universal(1),
                                     lambda: make_identity(1), lambda: random_pauli_subset(1, 3, 4)])
def test_json_round_trip(factory):
    c = factory()
    back = cipher_from_json(c.to_json())
    assert back.masks == c.masks
    assert json.loads(c.to_json())["key_bits"] == c.key_bits


@pytest.mark.parametrize("factory", [lambda n: make_ambainis_smith_aghp(n, 2), lambda n: make_xor_universal(n, key_count=3),
                                     lambda n: random_pauli_subset(n, 3, n)])
@pytest.mark.parametrize("n", [1, 2])
def test_average_channel_is_cptp(factory, n):
    c = factory(n)
    d = 2 ** n
    choi_in = la.max_entangled(n, ("A", "R"))
    choi = c.average(choi_in).to_density() if c.index_dim > 1 else c.average(choi_in).blocks[0]
    m = choi.matrix if hasattr(choi, "matrix") else choi
    assert la.min_eig(m) >= -1e-12
    # trace preserving: the reference marginal stays I/d
    labels = ("A", "R") if c.index_dim == 1 else (INDEX_LABEL, "A", "R")
    dims = (d, d) if c.index_dim == 1 else (c.index_dim, d, d)
    r = la.partial_trace(la.hermitian(m, dims, labels), [l for l in labels if l != "R"])
    np.testing.assert_allclose(r.matrix, np.eye(d) / d, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 15), st.sampled_from(["as", "xu"]))
def test_average_commutes_with_operations_on_e(seed, e_pauli, kind):
    c = make_ambainis_smith_aghp(1, 2) if kind == "as" else make_xor_universal(1, key_count=2)
    rho = la.random_state((2, 4), 4, seed, ("A", "E"))
    p = PauliString.from_concat(e_pauli, 2)
    before = c.average(pauli_conjugate(p, rho, "E"))
    after = c.average(rho)
    u = np.kron(np.eye(2), pauli_matrix(p))
    for b1, b2 in zip(before.blocks, after.blocks):
        np.testing.assert_allclose(b1, u @ b2 @ u.conj().T, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds, st.data())
def test_enlarging_by_translates_never_increases_delta(seed, data):
    # S -> S u (S xor v) composes the old channel with a unital one, so the
    # distance to the ideal state can only shrink until the full group is reached
    n = data.draw(st.integers(1, 2))
    rho = la.random_state((2 ** n, 2), data.draw(st.integers(1, 2 ** n * 2)), seed, ("A", "E"))
    keys = data.draw(st.lists(st.integers(0, 4 ** n - 1), min_size=1, max_size=3))
    deltas = [indist_distance(make_pauli_subset(n, keys), rho)]
    for v in range(1, 4 ** n):
        keys = keys + [k ^ v for k in keys]
        if len(keys) > 4 ** n * 4:
            break
        deltas.append(indist_distance(make_pauli_subset(n, keys), rho))
    assert all(b <= a + 1e-10 for a, b in zip(deltas, deltas[1:]))


def test_arbitrary_enlargement_can_increase_delta():
    # documented counterexample: nested sets need not give monotone distance
    rho = la.tensor_product(la.basis_state(0, (2,), ("A",)), la.maximally_mixed((1,), "E"))
    d = [indist_distance(make_pauli_subset(1, s), rho) for s in ([0], [0, 2], [0, 2, 1])]
    assert d == pytest.approx([1.0, 0.0, 1 / 3])
