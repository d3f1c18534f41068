import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobskew import arith
from mobskew.errors import InvariantError


def test_sieve_small_values():
    t = arith.mobius_sieve(30)
    assert list(t.values[:11]) == [0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert t.mertens(10) == -1


def test_segmented_matches_single_segment():
    a = arith.mobius_sieve(10**5, segment=1 << 10)
    b = arith.mobius_sieve(10**5)
    assert np.array_equal(a.values, b.values)


@settings(max_examples=200)
@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_multiplicative_on_coprime_pairs(m, n):
    if math.gcd(m, n) != 1:
        return
    assert arith.mobius_from_factorization(m * n) == arith.mobius_from_factorization(m) * arith.mobius_from_factorization(n)


def test_mobs_roundtrip(tmp_path):
    t = arith.mobius_sieve(1000)
    t.save(tmp_path / "mu.mobs")
    back = arith.MobiusTable.load(tmp_path / "mu.mobs")
    assert np.array_equal(back.values, t.values)
    assert t.to_bytes()[:4] == b"MOBS"


def test_mu_zero_convention():
    assert arith.mobius_sieve(5)[0] == 0


def test_character_group_mod5_values_at_generator():
    G = arith.character_group(5)
    assert len(G) == 4
    vals = sorted((complex(c(2)) for c in G), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    roots = sorted((1j**k for k in range(4)), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    assert np.allclose(vals, roots)


def test_chi4_and_conductors():
    chi = arith.find_character(4, at3=-1)
    assert chi.conductor == 4 and chi.primitive
    G8 = arith.character_group(8)
    assert sorted(c.conductor for c in G8) == [1, 4, 8, 8]
    assert len(arith.character_group(12).primitive()) == 1
    assert len(arith.character_group(6).primitive()) == 0


@pytest.mark.parametrize("Q", [1, 2, 9, 16, 45, 60])
def test_orthogonality(Q):
    M = arith.character_group(Q).matrix()
    units = np.gcd(np.arange(Q), Q) == 1
    gram = M[:, units] @ M[:, units].conj().T
    assert np.allclose(gram, arith.euler_phi(Q) * np.eye(len(M)), atol=1e-12)


def test_induce_keeps_conductor():
    chi = arith.find_character(4, at3=-1)
    big = arith.induce(chi, 12)
    assert big.modulus == 12 and arith.conductor(big) == 4


def test_character_csv_roundtrip():
    chi = arith.find_character(5, at2=1j)
    back = arith.DirichletCharacter.from_csv(chi.to_csv())
    assert np.array_equal(back.values, chi.values)
    assert back.conductor == 5


def test_corrupted_character_rejected():
    chi = arith.find_character(5, at2=1j)
    v = chi.values.copy()
    v[3] = 1
    with pytest.raises(InvariantError):
        arith.DirichletCharacter(5, v, 5, True, 0).validate()


def test_pretentious_distance_small_case(mu):
    d = arith.pretentious_distance(arith.mobius_function(mu), arith.constant_function(1), 10)
    assert abs(d - math.sqrt(494 / 210)) < 1e-14


def test_pretentious_distance_is_symmetric_and_zero_on_self(mu):
    nu = arith.mobius_function(mu)
    chi = arith.character_function(arith.find_character(4, at3=-1))
    assert arith.pretentious_distance(nu, nu, 1000) < 1e-7
    a = arith.pretentious_distance(nu, chi, 1000)
    b = arith.pretentious_distance(chi, nu, 1000)
    assert abs(a - b) < 1e-14


def test_m_of_archimedean_character_vanishes():
    nu = arith.archimedean(0.5)
    assert arith.m_nonpretentious(nu, 100, arith.PretentiousConfig(100)) < 1e-12
