import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from trustquant import fair_trade as ft
from trustquant.errors import DegeneracyError, DomainError, ValidationError
from trustquant.fair_trade import ExchangeMatrix, TradeBalance

REFERENCE = ft.build_matrix(0.85, 0.14, 2)

ps = st.floats(1e-6, 1.0)
qs = st.floats(1e-6, 1.0, exclude_max=True)
Ks = st.floats(1e-6, 5.0)


def residual(m: ExchangeMatrix, pair: ft.EigenPair) -> float:
    v = pair.eigenvector
    av = m @ v
    return max(abs(av[0] - pair.eigenvalue * v[0]), abs(av[1] - pair.eigenvalue * v[1]))


class TestBuildMatrix:
    def test_reference_values(self):
        (a, b), (c, d) = REFERENCE.entries
        assert a == pytest.approx(0.15, abs=1e-15)
        assert (b, c, d) == (0.14, 1.7, -0.14)

    def test_nothing_sent(self):
        assert ft.build_matrix(0, 0, 3.0).entries == ((1.0, 0.0), (0.0, 0.0))

    def test_full_transfer(self):
        assert ft.build_matrix(1, 0.5, 1).entries == ((0.0, 0.5), (1.0, -0.5))

    def test_validation(self):
        with pytest.raises(ValidationError, match="q"):
            ft.build_matrix(0.5, 1.2, 1)
        with pytest.raises(ValidationError, match="p"):
            ft.build_matrix(-0.5, 0.2, 1)


class TestStep:
    def test_first_column(self):
        a, n = ft.step_exchange(REFERENCE, (1, 0))
        assert a == pytest.approx(0.15, abs=1e-15) and n == 1.7

    def test_direct_arithmetic(self):
        assert ft.step_exchange(REFERENCE, (100, 100)) == pytest.approx((29, 156), abs=1e-12)

    def test_origin_fixed(self):
        assert ft.step_exchange(REFERENCE, (0, 0)) == (0, 0)

    @given(ps, qs, Ks, st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_matches_matrix_product(self, p, q, K, A, N):
        m = ft.build_matrix(p, q, K)
        got = ft.step_exchange(m, (A, N))
        want = np.array(m.entries) @ np.array([A, N])
        scale = max(1.0, abs(A), abs(N)) * max(1.0, K)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12 * scale)


class TestIndependence:
    def test_reference(self):
        assert ft.rows_linearly_independent(REFERENCE)

    def test_proportional_rows(self):
        assert not ft.rows_linearly_independent(ExchangeMatrix.from_rows([[1, 1], [2, 2]]))

    def test_identity(self):
        assert ft.rows_linearly_independent(ExchangeMatrix.from_rows([[1, 0], [0, 1]]))


class TestEigen:
    def test_reference_values(self):
        first, second = ft.eigen_decompose(REFERENCE)
        assert first.eigenvalue == pytest.approx(0.513945, abs=1e-6)
        assert second.eigenvalue == pytest.approx(-0.503945, abs=1e-6)
        assert first.eigenvector == pytest.approx((0.384674, 1.0), abs=1e-6)
        assert second.eigenvector == pytest.approx((-0.214085, 1.0), abs=1e-6)

    def test_diagonal(self):
        first, second = ft.eigen_decompose(ExchangeMatrix.from_rows([[2, 0], [0, -1]]))
        assert (first.eigenvalue, second.eigenvalue) == (2.0, -1.0)
        assert first.eigenvector == (1.0, 0.0)
        assert second.eigenvector == (0.0, 1.0)

    def test_identity_degenerate(self):
        with pytest.raises(DegeneracyError):
            ft.eigen_decompose(ExchangeMatrix.from_rows([[1, 0], [0, 1]]))

    def test_complex(self):
        with pytest.raises(DomainError, match="discriminant"):
            ft.eigen_decompose(ExchangeMatrix.from_rows([[0, -1], [1, 0]]))

    def test_dependent_rows(self):
        with pytest.raises(DomainError, match="dependent"):
            ft.eigen_decompose(ExchangeMatrix.from_rows([[1, 1], [2, 2]]))

    def test_against_numpy(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            p, q, K = rng.uniform(1e-3, 1), rng.uniform(1e-3, 0.999), rng.uniform(1e-3, 5)
            m = ft.build_matrix(p, q, K)
            first, second = ft.eigen_decompose(m)
            w, vecs = np.linalg.eig(np.array(m.entries))
            order = np.argsort(w)[::-1]
            assert np.allclose([first.eigenvalue, second.eigenvalue], w[order], atol=1e-12)
            for pair, col in zip((first, second), order):
                ref = vecs[:, col] / vecs[1, col]
                assert np.allclose(pair.eigenvector, ref, rtol=1e-9, atol=1e-9)

    @given(ps, qs, Ks)
    def test_properties(self, p, q, K):
        m = ft.build_matrix(p, q, K)
        first, second = ft.eigen_decompose(m)
        assert first.eigenvalue > 0 > second.eigenvalue
        for pair in (first, second):
            assert residual(m, pair) <= 1e-9 * max(1.0, *map(abs, pair.eigenvector))
        assert math.isclose(first.eigenvalue + second.eigenvalue, (1 - p) - q, abs_tol=1e-12)
        assert math.isclose(first.eigenvalue * second.eigenvalue, m.det, abs_tol=1e-12)


class TestLine:
    def test_reference_slope(self):
        line = ft.fair_trade_line(REFERENCE)
        assert line.intercept == 0
        # exact slope; 2.599604 is the reciprocal of the 6-digit rounded component
        assert line.slope == pytest.approx(2.5996070514565, abs=1e-12)
        assert 1 / round(line.source.eigenvector[0], 6) == pytest.approx(2.599604, abs=1e-6)

    def test_unit_slope(self):
        # dominant eigenvector (1, 1): [[2, 1], [1, 2]] has eigenvalues 3 and 1
        line = ft.fair_trade_line(ExchangeMatrix.from_rows([[2, 1], [1, 2]]))
        assert line.source.eigenvalue == pytest.approx(3.0)
        assert line.slope == pytest.approx(1.0, abs=1e-15)

    def test_no_positive_eigenvalue(self):
        with pytest.raises(DomainError, match="no positive dominant eigenvalue"):
            ft.fair_trade_line(ExchangeMatrix.from_rows([[-1, 0], [0, -2]]))

    def test_vertical(self):
        # dominant eigenvector (0, 1)
        with pytest.raises(DomainError, match="vertical"):
            ft.fair_trade_line(ExchangeMatrix.from_rows([[-1, 0], [0, 2]]))


class TestClassify:
    line = ft.FairTradeLine(slope=2.599604, source=ft.EigenPair(0.5, (1 / 2.599604, 1.0)))

    def test_on_line(self):
        assert ft.classify_point(self.line, (1, 2.599604), 1e-6) is TradeBalance.Fair

    def test_above(self):
        assert ft.classify_point(self.line, (1, 3), 1e-6) is TradeBalance.TrustorFavoring

    def test_below(self):
        assert ft.classify_point(self.line, (1, 2), 1e-6) is TradeBalance.TrusteeFavoring

    def test_negative_tolerance(self):
        with pytest.raises(ValueError):
            ft.classify_point(self.line, (1, 2), -1)

    # power-of-two scale factors keep c*point exact, so any flip would be real
    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.integers(-20, 20))
    def test_ray_invariance_without_band(self, n, a, k):
        c = 2.0 ** k
        assert ft.classify_point(self.line, (c * n, c * a), 0.0) is ft.classify_point(self.line, (n, a), 0.0)

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.integers(-20, 20))
    def test_ray_invariance_with_band(self, n, a, k):
        c = 2.0 ** k
        # the band has an absolute floor of 1; invariance holds once both points clear it
        assume(min(max(abs(a), abs(self.line.slope * n)), max(abs(c * a), abs(self.line.slope * c * n))) >= 1)
        assert ft.classify_point(self.line, (c * n, c * a)) is ft.classify_point(self.line, (n, a))


class TestPowerIteration:
    def test_converges_with_enough_steps(self):
        # the dominant direction is reached at rate |lambda_small / lambda_big| per step
        rng = np.random.default_rng(11)
        for _ in range(300):
            p, q, K = rng.uniform(1e-3, 1), rng.uniform(1e-3, 0.999), rng.uniform(1e-3, 5)
            m = ft.build_matrix(p, q, K)
            first, second = ft.eigen_decompose(m)
            big, small = sorted((first, second), key=lambda e: abs(e.eigenvalue), reverse=True)
            ratio = abs(small.eigenvalue) / abs(big.eigenvalue)
            if ratio > 0.999:
                continue
            steps = max(200, int(math.ceil(math.log(1e-9) / math.log(ratio))) + 50)
            v = ft.power_iterate(m, tuple(rng.uniform(0.1, 1, 2)), steps)
            assert ft.direction_error(v, big.eigenvector) <= 1e-6

    def test_reference_matrix_slow(self):
        # |lambda2/lambda1| = 0.98 here, so 200 steps leave a visible error
        v = ft.power_iterate(REFERENCE, (1.0, 1.0), 200)
        first, _ = ft.eigen_decompose(REFERENCE)
        assert ft.direction_error(v, first.eigenvector) > 1e-6

    def test_direction_error_sign_insensitive(self):
        assert ft.direction_error((1, 2), (-2, -4)) == 0
