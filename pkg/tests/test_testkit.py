import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpinv.ep import characterization_battery, is_weighted_ep
from wpinv.exceptions import DimensionMismatch, NoSolution
from wpinv.geninv import group_inverse
from wpinv.linalg import rank
from wpinv.testkit import (
    GenSpec,
    block_instance,
    ep_corpus_instance,
    hermitian_instance,
    instance_seed,
    log_spectrum,
    make_rng,
    oracle_penrose_solve_2x2,
    penrose_instance,
    random_fixed_rank,
    random_hpd,
    random_index_one,
    random_unitary,
    random_weighted_ep,
)

from conftest import seeds


class TestGenSpec:
    def test_rank_bounds(self):
        with pytest.raises(ValueError):
            GenSpec(3, 4)

    def test_cond_bound(self):
        with pytest.raises(ValueError):
            GenSpec(3, 3, 0.5)


class TestPrimitives:
    def test_unitary(self):
        U = random_unitary(5, make_rng(0))
        np.testing.assert_allclose(U.conj().T @ U, np.eye(5), atol=1e-13)

    def test_log_spectrum_ends(self):
        s = log_spectrum(6, 100.0, make_rng(1))
        assert s[0] == pytest.approx(1.0) and s[-1] == pytest.approx(0.01)
        assert np.all(np.diff(s) <= 0)

    def test_instance_seed_distinct(self):
        assert len({instance_seed(7, i) for i in range(100)}) == 100


class TestHPD:
    def test_unit_condition(self):
        assert np.array_equal(random_hpd(GenSpec(3, 3, 1.0, 5)).W, np.eye(3))

    def test_deterministic(self):
        a, b = random_hpd(GenSpec(4, 4, 50.0, 3)), random_hpd(GenSpec(4, 4, 50.0, 3))
        assert np.array_equal(a.W, b.W)

    def test_two_by_two_spectrum(self):
        lam = np.linalg.eigvalsh(random_hpd(GenSpec(2, 2, 4.0, 9)).W)
        np.testing.assert_allclose(lam, [1.0, 4.0], rtol=1e-12)


class TestFixedRank:
    def test_zero(self):
        assert not random_fixed_rank(GenSpec(3, 0, seed=1)).any()

    def test_full_rank_invertible(self):
        A = random_fixed_rank(GenSpec(4, 4, 100.0, 2))
        assert abs(np.linalg.det(A)) > 0 and rank(A) == 4

    def test_deterministic(self):
        spec = GenSpec(5, 3, 10.0, 8)
        assert np.array_equal(random_fixed_rank(spec), random_fixed_rank(spec))

    @given(seeds, st.integers(1, 6), st.integers(0, 6))
    def test_rank(self, seed, n, r):
        assert rank(random_fixed_rank(GenSpec(n, min(r, n), 1e3, seed))) == min(r, n)


class TestIndexOne:
    def test_full(self):
        assert rank(random_index_one(GenSpec(3, 3, seed=1))) == 3

    def test_zero(self):
        assert np.allclose(random_index_one(GenSpec(3, 0, seed=1)), 0)

    @given(seeds, st.integers(1, 6), st.integers(0, 6))
    def test_group_inverse_exists(self, seed, n, r):
        assert group_inverse(random_index_one(GenSpec(n, min(r, n), 10.0, seed))).exists


class TestWeightedEP:
    def test_invertible_case(self):
        A, E, F = random_weighted_ep(3, 3, 4)
        assert rank(A) == 3 and is_weighted_ep(A, E, F)

    @given(seeds, st.integers(2, 5), st.integers(1, 5))
    def test_generated_are_ep_with_all_true_battery(self, seed, n, r):
        A, E, F = random_weighted_ep(n, min(r, n), seed)
        assert is_weighted_ep(A, E, F)
        assert characterization_battery(A, E, F).consensus == "all-true"

    def test_generic_triples_are_singular(self):
        for seed in range(20):
            A, _, _ = ep_corpus_instance(4, seed, constructed=False)
            assert 1 <= rank(A) <= 3


class TestOracle:
    def test_rejects_other_sizes(self):
        with pytest.raises(DimensionMismatch):
            oracle_penrose_solve_2x2(np.eye(3))

    def test_ambiguous_rank(self):
        with pytest.raises(NoSolution):
            oracle_penrose_solve_2x2(np.diag([1.0, 1e-11]))

    def test_example(self):
        B = oracle_penrose_solve_2x2([[1.0, 0.0], [0.0, 0.0]], [[2.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(B, [[1.0, 0.5], [0.0, 0.0]], atol=1e-15)


class TestCorpusRecipes:
    @pytest.mark.parametrize(
        "make",
        [
            lambda s: penrose_instance(4, s),
            lambda s: block_instance(5, s),
            lambda s: hermitian_instance(3, s, True),
            lambda s: ep_corpus_instance(4, s, True),
        ],
    )
    def test_deterministic(self, make):
        a, b = make(11), make(11)
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            x = getattr(x, "W", x)
            y = getattr(y, "W", y)
            assert np.array_equal(x, y)

    def test_penrose_covers_ranks(self):
        ranks = {rank(penrose_instance(3, s)[0], 1e-8) for s in range(60)}
        assert ranks == {0, 1, 2, 3}

    def test_hermitian_instance(self):
        H = hermitian_instance(4, 0, True)
        np.testing.assert_array_equal(H, H.conj().T)
