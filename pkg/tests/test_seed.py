import random
from fractions import Fraction

import pytest
import sympy as sp

from gcsdiag import (
    ClusterState,
    FixedData,
    c_vectors,
    epsilon,
    g_vectors,
    langlands_dual,
    laurent_check,
    laurent_dict,
    left_companion,
    make_initial_seed,
    mutate_cluster,
    mutate_seed,
    mutate_word,
    parse_seed_file,
    principal_data,
    right_companion,
    serialize_seed_file,
)

import os

SEED_DIR = os.path.join(os.path.dirname(__file__), "..", "seeds")


# ---------------------------------------------------------------------------
# fixed data


def test_fixed_data_validates_skew_symmetrizability():
    with pytest.raises(ValueError):
        FixedData(2, (0, 1), (1, 1), (1, 1), [[0, 1], [1, 0]])
    FixedData(2, (0, 1), (3, 1), (1, 1), [[0, 1], [-3, 0]])


def test_fixed_data_allows_rational_and_scaled_d():
    FixedData(2, (0, 1), (Fraction(1, 3), 1), (1, 1), [[0, 3], [-1, 0]])
    FixedData(2, (0, 1), (2, 2), (1, 1), [[0, 2], [-2, 0]])


# ---------------------------------------------------------------------------
# epsilon


def test_epsilon_initial(g31):
    fixed, seed = g31
    assert epsilon(fixed, seed) == ((0, 1), (-1, 0))


def test_epsilon_after_mu2(g31):
    fixed, seed = g31
    assert epsilon(fixed, mutate_seed(fixed, seed, 1)) == ((0, -1), (1, 0))


def test_epsilon_rank_one():
    fixed = FixedData(1, (0,), (1,), (2,), [[0]])
    seed = make_initial_seed(fixed)
    assert epsilon(fixed, seed) == ((0,),)


# ---------------------------------------------------------------------------
# seed mutation


def test_mu2_example(g31):
    fixed, seed = g31
    s2 = mutate_seed(fixed, seed, 1)
    assert s2.e_vectors == ((1, 1), (0, -1))
    assert s2.a_tuples[0] == seed.a_tuples[0]  # reciprocity: tuple unchanged
    assert s2.a_tuples[1] == seed.a_tuples[1]


def test_mutation_involution_on_epsilon(g31):
    fixed, seed = g31
    for k in fixed.unfrozen:
        assert epsilon(fixed, mutate_word(fixed, seed, (k, k))) == epsilon(fixed, seed)


def test_f1_under_mu1(g31):
    fixed, seed = g31
    assert mutate_seed(fixed, seed, 0).f_vectors[0] == (-1, 0)


def test_frozen_mutation_rejected(g31):
    fixed, seed = g31
    frozen = FixedData(fixed.n, (0,), fixed.d, fixed.r, fixed.B)
    with pytest.raises(ValueError):
        mutate_seed(frozen, make_initial_seed(frozen), 1)


def test_skew_symmetrizability_preserved(g31, kronecker):
    rng = random.Random(7)
    for fixed, seed in (g31, kronecker):
        for _ in range(10):
            word = [rng.choice(fixed.unfrozen) for _ in range(6)]
            eps = epsilon(fixed, mutate_word(fixed, seed, word))
            for i in range(fixed.n):
                for j in range(fixed.n):
                    assert Fraction(eps[i][j]) / fixed.d[j] == -Fraction(eps[j][i]) / fixed.d[i]


# ---------------------------------------------------------------------------
# cluster-variable recursion


def test_exchange_relation_mu1(g31):
    fixed, seed = g31
    st = mutate_cluster(ClusterState(fixed, seed), 0)
    x1, x2 = sp.symbols("x1 x2")
    a = sp.Symbol("a")
    expected = (1 + a * x2 + a * x2**2 + x2**3) / x1
    assert sp.simplify(st.exprs[0] - expected) == 0


def test_exchange_relation_mu2(g31):
    fixed, seed = g31
    st = mutate_cluster(ClusterState(fixed, seed), 1)
    x1, x2 = sp.symbols("x1 x2")
    assert sp.simplify(st.exprs[1] - (x1 + 1) / x2) == 0


def test_exchange_involution(g31):
    fixed, seed = g31
    st = mutate_cluster(mutate_cluster(ClusterState(fixed, seed), 0), 0)
    assert st.exprs == list(st.xs)


def test_laurent_check_positive_negative():
    x1, x2 = sp.symbols("x1 x2")
    assert laurent_check((x1 + 1) / x2, (x1, x2))
    assert not laurent_check((x1 + 1) / (x2 + 1), (x1, x2))


def test_laurent_dict_roundtrip(g31):
    fixed, seed = g31
    st = mutate_cluster(ClusterState(fixed, seed), 1)
    d = laurent_dict(st.exprs[1], st.xs)
    assert set(d) == {(0, -1), (1, -1)}
    assert all(p.is_one() for p in d.values())


# ---------------------------------------------------------------------------
# principal coefficients


def test_principal_data_example(g31):
    fixed, seed = g31
    f2, s2 = principal_data(fixed, seed)
    assert f2.r == (3, 1, 3, 1)
    assert f2.d == (1, 1, 1, 1)
    eps = epsilon(f2, s2)
    assert [row[2:] for row in eps[:2]] == [(1, 0), (0, 1)]
    assert [row[:2] for row in eps[2:]] == [(-1, 0), (0, -1)]
    assert [row[2:] for row in eps[2:]] == [(0, 0), (0, 0)]


def test_principal_data_rank_one():
    fixed = FixedData(1, (0,), (1,), (1,), [[0]])
    f2, s2 = principal_data(fixed, make_initial_seed(fixed))
    assert epsilon(f2, s2) == ((0, 1), (-1, 0))


# ---------------------------------------------------------------------------
# companions and duals


def test_left_companion_example(g31):
    fixed, seed = g31
    f2, _ = left_companion(fixed, seed)
    assert f2.B == ((0, 1), (-3, 0))
    assert f2.d == (3, 1)
    assert f2.r == (1, 1)


def test_right_companion_example(g31):
    fixed, seed = g31
    f2, _ = right_companion(fixed, seed)
    assert f2.B == ((0, 3), (-1, 0))
    assert f2.d == (Fraction(1, 3), 1)


def test_companions_trivial_for_ordinary(a2):
    fixed, seed = a2
    for fn in (left_companion, right_companion):
        f2, _ = fn(fixed, seed)
        assert f2.B == fixed.B and f2.d == fixed.d


def test_langlands_dual_examples(g31, a2):
    fixed, seed = g31
    f2, _ = langlands_dual(fixed, seed)
    assert f2.r == (1, 3)
    assert f2.B == ((0, 1), (-1, 0))
    fixed, seed = a2
    f2, _ = langlands_dual(fixed, seed)
    assert f2.d == fixed.d and f2.B == ((0, 1), (-1, 0))


def test_langlands_epsilon_transpose():
    rng = random.Random(3)
    for _ in range(5):
        b = rng.choice([1, 2, 3])
        d = rng.choice([(1, 1), (2, 1), (3, 1)])
        B = [[0, b], [-b * d[0], 0]]
        fixed = FixedData(2, (0, 1), d, (1, 1), B)
        f2, s2 = langlands_dual(fixed, make_initial_seed(fixed))
        eps = epsilon(fixed, make_initial_seed(fixed))
        eps2 = epsilon(f2, s2)
        assert eps2 == tuple(tuple(-eps[j][i] for j in range(2)) for i in range(2))


# ---------------------------------------------------------------------------
# c/g vectors


def test_cg_initial_identity(g31):
    fixed, seed = g31
    assert c_vectors(seed) == ((1, 0), (0, 1))
    assert g_vectors(seed) == ((1, 0), (0, 1))


def test_c_matrix_after_mu2(g31):
    fixed, seed = g31
    assert c_vectors(mutate_seed(fixed, seed, 1)) == ((1, 1), (0, -1))


def test_tropical_duality_ordinary(a2):
    fixed, seed = a2
    rng = random.Random(11)
    for _ in range(10):
        word = [rng.choice(fixed.unfrozen) for _ in range(rng.randint(0, 6))]
        sd = mutate_word(fixed, seed, word)
        C, G = c_vectors(sd), g_vectors(sd)
        prod = [[sum(C[i][k] * G[j][k] for k in range(2)) for j in range(2)]
                for i in range(2)]
        assert prod == [[1, 0], [0, 1]]


def test_companion_cg_relations(g31):
    # lg_{s,j} = ((r_i / r_j) g_{ji})_i and Rc_{s,j} = ((r_j / r_i) c_{ji})_i
    fixed, seed = g31
    lf, ls = left_companion(fixed, seed)
    rf, rs = right_companion(fixed, seed)
    rng = random.Random(5)
    for _ in range(10):
        word = [rng.choice(fixed.unfrozen) for _ in range(rng.randint(0, 6))]
        sd = mutate_word(fixed, seed, word)
        lsd = mutate_word(lf, ls, word)
        rsd = mutate_word(rf, rs, word)
        for j in range(2):
            assert lsd.f_vectors[j] == tuple(
                Fraction(fixed.r[i], fixed.r[j]) * sd.f_vectors[j][i] for i in range(2))
            assert rsd.e_vectors[j] == tuple(
                Fraction(fixed.r[j], fixed.r[i]) * sd.e_vectors[j][i] for i in range(2))


# ---------------------------------------------------------------------------
# seed files


def test_seed_file_round_trip_byte_stable():
    for name in ("g31.seed", "a2.seed", "kronecker22.seed"):
        with open(os.path.join(SEED_DIR, name), "r", encoding="utf-8") as fh:
            text = fh.read()
        fixed, seed = parse_seed_file(text)
        assert serialize_seed_file(fixed, seed) == text


def test_seed_file_rejects_bad_tuple():
    bad = "rank 2\nunfrozen 1 2\nd 1 1\nr 3 1\nB 0 1 -1 0\na.1 1 a 1\na.2 1 1\n"
    with pytest.raises(ValueError):
        parse_seed_file(bad)
