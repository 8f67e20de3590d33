from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoprove.eqsys import AngleEqSystem, Factored, RatioEqSystem, SparseRow
from geoprove.errors import InconsistencyDetected

import oracles

F = Fraction


positive_fractions = st.builds(
    Fraction, st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))


class TestFactored:
    @given(positive_fractions)
    def test_fraction_roundtrip(self, q):
        assert Factored.from_fraction(q).to_fraction() == q

    @given(positive_fractions, positive_fractions, st.integers(-5, 5))
    def test_mul_pow_matches_fraction_arithmetic(self, a, b, k):
        got = Factored.from_fraction(a).mul_pow(Factored.from_fraction(b), k)
        assert got.to_fraction() == a * b ** k

    def test_is_one(self):
        assert Factored.from_fraction(F(1)).is_one()
        assert not Factored.from_fraction(F(2, 3)).is_one()
        assert Factored.from_fraction(F(6, 3)).mul_pow(
            Factored.from_fraction(F(2)), -1).is_one()


class TestSparseRow:
    def test_zero_dropping(self):
        row = SparseRow([(1, F(1)), (2, F(-1))])
        row.iadd_scaled(1, [(2, F(1))])
        assert 2 not in row
        assert row[2] == 0

    def test_scaled(self):
        row = SparseRow([(1, F(1, 2))])
        assert row.scaled(4)[1] == 2


class TestAngleSystem:
    def test_postulated_row_queries_true(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x"), (1, "y")], F(1, 2))
        assert sys.query([(1, "x"), (1, "y")], F(1, 2))

    def test_fresh_vars_not_equal(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x")], F(1, 4))
        assert not sys.proves_equal("x", "y")

    def test_elimination_example(self):
        # x + y = 1/2 and y = 1/4 entail x = 1/4
        sys = AngleEqSystem()
        sys.insert([(1, "x"), (1, "y")], F(1, 2))
        sys.insert([(1, "y")], F(1, 4))
        assert sys.query([(1, "x")], F(1, 4))
        oracle = oracles.AngleOracle([
            ([(F(1), "x"), (F(1), "y")], F(1, 2)), ([(F(1), "y")], F(1, 4))])
        assert oracle.query([(F(1), "x")], F(1, 4))

    def test_trivial_row_dropped(self):
        sys = AngleEqSystem()
        assert sys.insert([], F(0)) is False
        assert sys.insert([(1, "x"), (-1, "x")], F(1)) is False
        assert not sys.rows()

    def test_modulus_shift_is_redundant(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x")], F(1, 4))
        assert sys.insert([(1, "x")], F(5, 4)) is False

    def test_contradiction_raises_and_preserves_state(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x")], F(1, 4))
        before = sys.rows()
        with pytest.raises(InconsistencyDetected):
            sys.insert([(1, "x")], F(1, 2))
        assert sys.rows() == before

    def test_substitute_merges_coefficients(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x"), (1, "y")], F(1, 2))
        sys.substitute("y", "x")
        assert sys.query([(2, "x")], F(1, 2))

    def test_query_constant_mod_one(self):
        sys = AngleEqSystem()
        sys.insert([(1, "x"), (-1, "y")], F(0))
        assert sys.query([(1, "x"), (-1, "y")], F(3))
        assert not sys.query([(1, "x"), (-1, "y")], F(1, 3))


class TestRatioSystem:
    def test_self_ratio(self):
        sys = RatioEqSystem()
        assert sys.query([(1, "d"), (-1, "d")], F(1))

    def test_elimination_example(self):
        # a*b = 2 and b = 2 entail a = 1
        sys = RatioEqSystem()
        sys.insert([(1, "a"), (1, "b")], F(2))
        sys.insert([(1, "b")], F(2))
        assert sys.query([(1, "a")], F(1))
        oracle = oracles.RatioOracle([
            ([(F(1), "a"), (F(1), "b")], F(2)), ([(F(1), "b")], F(2))])
        assert oracle.query([(F(1), "a")], F(1))

    def test_square_root_extraction(self):
        # v^2 = 4 with positive v entails v = 2
        sys = RatioEqSystem()
        sys.insert([(2, "v")], F(4))
        assert sys.query([(1, "v")], F(2))
        assert not sys.query([(1, "v")], F(4))

    def test_irrational_constant_stays_unsplit(self):
        # v^2 = 2 pins no rational value of v
        sys = RatioEqSystem()
        sys.insert([(2, "v")], F(2))
        for c in (F(1), F(2), F(1, 2), F(3, 2)):
            assert not sys.query([(1, "v")], c)

    def test_rational_exponent_queries(self):
        sys = RatioEqSystem()
        sys.insert([(1, "v")], F(4))
        assert sys.query([(F(1, 2), "v")], F(2))
        assert not sys.query([(F(1, 2), "v")], F(4))

    def test_contradiction(self):
        sys = RatioEqSystem()
        sys.insert([(2, "v")], F(2))
        with pytest.raises(InconsistencyDetected):
            sys.insert([(1, "v")], F(3))

    def test_positive_constants_only(self):
        sys = RatioEqSystem()
        with pytest.raises(ValueError):
            sys.insert([(1, "v")], F(-2))
        assert not sys.query([(1, "v")], F(0))

    def test_substitute(self):
        sys = RatioEqSystem()
        sys.insert([(1, "x"), (-1, "y")], F(3))
        sys.substitute("y", "z")
        assert sys.query([(1, "x"), (-1, "z")], F(3))


def _feed_system(system_cls, rows):
    """Insert rows one by one into the system and the oracle, asserting
    that both classify every row the same way (added / redundant /
    contradiction).  Returns (system, oracle)."""
    oracle = (oracles.AngleOracle() if system_cls is AngleEqSystem
              else oracles.RatioOracle())
    sys_ = system_cls()
    for combo, const in rows:
        try:
            got = sys_.insert(combo, const)
        except InconsistencyDetected:
            got = "inconsistent"
        try:
            want = oracle.insert(combo, const)
        except oracles.OracleInconsistent:
            want = "inconsistent"
        assert got == want, (combo, const)
    return sys_, oracle


@pytest.mark.parametrize("seed", range(40))
def test_random_angle_systems_match_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    n_vars, rows = oracles.random_angle_system(rng)
    sys_, oracle = _feed_system(AngleEqSystem, rows)
    for combo, const in oracles.random_angle_queries(rng, oracle.basis,
                                                     n_vars):
        assert sys_.query(combo, const) == oracle.query(combo, const), \
            (oracle.basis, combo, const)


@pytest.mark.parametrize("seed", range(40))
def test_random_ratio_systems_match_oracle(seed):
    rng = np.random.default_rng(2000 + seed)
    n_vars, rows = oracles.random_ratio_system(rng)
    sys_, oracle = _feed_system(RatioEqSystem, rows)
    for combo, const in oracles.random_ratio_queries(rng, oracle.basis,
                                                     n_vars):
        assert sys_.query(combo, const) == oracle.query(combo, const), \
            (oracle.basis, combo, const)
