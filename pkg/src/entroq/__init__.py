"""Exact simulation of entropically secure quantum encryption at desk scale."""

from .ciphers import (
    KeyedCipher,
    average_channel,
    make_ambainis_smith,
    make_ambainis_smith_aghp,
    make_full_pad,
    make_xor_universal,
)
from .gf2 import DeltaBiasedSet, GFField, XorUniversalFamily, aghp_construct, gf_mul, measure_bias, xu_eval
from .harness import indist_distance
from .linalg import DensityOperator, HermitianOperator, fidelity, partial_trace, tensor_product, trace_norm
from .minentropy import MinEntropyResult, cond_min_entropy
from .pauli import PauliString, pauli_conjugate, pauli_decompose, pauli_reconstruct, symplectic_dot

__version__ = "0.1.0"
