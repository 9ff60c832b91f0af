import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agingforecast.errors import FitError
from agingforecast.models import (
    krr_fit,
    krr_predict,
    lrr_fit,
    lrr_predict,
    rbf_kernel,
    rbf_kernel_matrix,
)


class TestLrrFit:
    def test_identity_recovered_at_zero_lambda(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((50, 4))
        model = lrr_fit(x, x, lam=0.0)
        np.testing.assert_allclose(model.weights[:, :-1], np.eye(4), atol=1e-10)
        np.testing.assert_allclose(model.weights[:, -1], 0.0, atol=1e-10)

    def test_scalar_closed_form(self):
        # w = sum(xy) / (sum(x^2) + lam) = 28/15 for x=(1,2,3), y=2x, lam=1
        x = np.array([[1.0], [2.0], [3.0]])
        y = np.array([2.0, 4.0, 6.0])
        model = lrr_fit(x, y, lam=1.0, include_bias=False)
        assert model.weights[0, 0] == pytest.approx(28.0 / 15.0, rel=1e-12)
        assert model.weights[0, -1] == 0.0

    @given(st.integers(0, 1000))
    @settings(max_examples=20)
    def test_normal_equation_residual(self, seed):
        rng = np.random.default_rng(seed)
        n, d, m = 40, 6, 2
        x = rng.standard_normal((n, d))
        y = rng.standard_normal((n, m))
        lam = 10.0 ** rng.uniform(-3, 1)
        model = lrr_fit(x, y, lam)
        xb = np.column_stack([x, np.ones(n)])
        penalty = np.diag([lam] * d + [0.0])
        lhs = (xb.T @ xb + penalty) @ model.weights.T
        rhs = xb.T @ y
        resid = np.abs(lhs - rhs).max() / np.abs(rhs).max()
        assert resid < 1e-8

    @given(st.integers(0, 1000))
    @settings(max_examples=20)
    def test_objective_gradient_vanishes(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((30, 5))
        y = rng.standard_normal((30, 2))
        lam = 0.5
        model = lrr_fit(x, y, lam, include_bias=False)
        w = model.weights[:, :-1].T  # (d, m)
        grad = 2.0 * (x.T @ x @ w - x.T @ y + lam * w)
        assert np.abs(grad).max() < 1e-8

    def test_lambda_monotone_weight_norm(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((60, 5))
        y = rng.standard_normal((60, 2))
        norms = [
            np.linalg.norm(lrr_fit(x, y, lam).weights[:, :-1])
            for lam in (0.0, 0.01, 0.1, 1.0, 10.0, 100.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_singular_at_zero_lambda_raises(self):
        x = np.zeros((10, 3))
        y = np.zeros((10, 1))
        with pytest.raises(FitError, match="lam"):
            lrr_fit(x, y, lam=0.0)


class TestLrrPredict:
    def test_zero_weights_zero_output(self):
        from agingforecast.models import LrrModel

        model = LrrModel(weights=np.zeros((2, 4)), lam=0.0)
        out = lrr_predict(model, np.random.default_rng(0).standard_normal((5, 3)))
        assert np.all(out == 0.0)

    def test_identity_fit_returns_training_targets(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((20, 3))
        model = lrr_fit(x, x, lam=0.0)
        np.testing.assert_allclose(lrr_predict(model, x), x, atol=1e-10)

    def test_matches_rowwise_dot_product_oracle(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((15, 4))
        y = rng.standard_normal((15, 2))
        model = lrr_fit(x, y, lam=0.3)
        pred = lrr_predict(model, x)
        for i in range(15):
            for j in range(2):
                want = sum(
                    model.weights[j, c] * x[i, c] for c in range(4)
                ) + model.weights[j, -1]
                assert pred[i, j] == pytest.approx(want, rel=1e-12)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(3)
        model = lrr_fit(rng.standard_normal((10, 3)), rng.standard_normal(10), 1.0)
        with pytest.raises(ValueError):
            lrr_predict(model, rng.standard_normal((4, 5)))


class TestRbfKernel:
    def test_self_similarity_is_one(self):
        x = np.array([1.0, -2.0, 0.5])
        assert rbf_kernel(x, x, sigma=3.0) == 1.0

    def test_unit_exponent_at_sigma_sqrt2(self):
        x = np.zeros(2)
        other = np.array([2.0, 0.0])  # distance 2 = sigma * sqrt(2)
        assert rbf_kernel(x, other, sigma=np.sqrt(2.0)) == pytest.approx(
            np.exp(-1.0), rel=1e-12
        )

    def test_gram_matrix_symmetric_psd(self):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((20, 5))
        gram = rbf_kernel_matrix(pts, pts, sigma=1.5)
        np.testing.assert_allclose(gram, gram.T, atol=1e-12)
        eigs = np.linalg.eigvalsh(gram)
        assert eigs.min() >= -1e-10

    def test_matrix_matches_scalar_kernel(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((6, 3))
        b = rng.standard_normal((4, 3))
        gram = rbf_kernel_matrix(a, b, sigma=0.8)
        for i in range(6):
            for j in range(4):
                assert gram[i, j] == pytest.approx(
                    rbf_kernel(a[i], b[j], 0.8), rel=1e-12
                )


class TestKrr:
    def test_interpolation_limit(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((50, 3))
        y = rng.standard_normal((50, 2))
        model = krr_fit(x, y, lam=1e-12, sigma=1.0)
        pred = krr_predict(model, x)
        np.testing.assert_allclose(pred, y, atol=1e-6)

    def test_two_point_hand_solution(self):
        # K = [[1, e^-1/2], [e^-1/2, 1]], lam = 0.1, y = (1, 2)
        x = np.array([[0.0], [1.0]])
        y = np.array([1.0, 2.0])
        model = krr_fit(x, y, lam=0.1, sigma=1.0)
        k01 = np.exp(-0.5)
        want = np.linalg.solve(
            np.array([[1.1, k01], [k01, 1.1]]), np.array([1.0, 2.0])
        )
        np.testing.assert_allclose(model.alphas[:, 0], want, rtol=1e-12)

    def test_subsample_retains_exact_count_deterministically(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((1000, 2))
        y = rng.standard_normal(1000)
        a = krr_fit(x, y, lam=0.1, sigma=1.0, subsample_fraction=0.1, seed=3)
        b = krr_fit(x, y, lam=0.1, sigma=1.0, subsample_fraction=0.1, seed=3)
        assert a.support_inputs.shape[0] == 100
        np.testing.assert_array_equal(a.support_inputs, b.support_inputs)

    def test_query_at_support_point_recovers_target(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((30, 3))
        y = rng.standard_normal((30, 1))
        model = krr_fit(x, y, lam=1e-12, sigma=1.0)
        pred = krr_predict(model, x[:1])
        assert pred[0, 0] == pytest.approx(y[0, 0], abs=1e-6)

    def test_zero_alphas_zero_output(self):
        from agingforecast.models import KrrModel

        model = KrrModel(
            alphas=np.zeros((5, 2)),
            support_inputs=np.random.default_rng(0).standard_normal((5, 3)),
            sigma=1.0, lam=0.1, subsample_fraction=1.0,
        )
        out = krr_predict(model, np.zeros((4, 3)))
        assert np.all(out == 0.0)

    def test_matches_double_loop_kernel_sum_oracle(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((12, 3))
        y = rng.standard_normal((12, 2))
        model = krr_fit(x, y, lam=0.5, sigma=1.3)
        queries = rng.standard_normal((5, 3))
        pred = krr_predict(model, queries)
        for i in range(5):
            for j in range(2):
                want = sum(
                    model.alphas[s, j] * rbf_kernel(queries[i], x[s], 1.3)
                    for s in range(12)
                )
                assert pred[i, j] == pytest.approx(want, rel=1e-10)
