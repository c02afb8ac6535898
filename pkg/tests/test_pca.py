import numpy as np
import pytest

from persona_miner.pca import PcaModel, pca_fit, pca_inverse, pca_transform


def random_matrix(seed, n=30, d=6):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, d)) @ rng.normal(size=(d, d)) + rng.normal(size=d)


def test_identical_rows_give_zero_variance():
    X = np.tile([1.0, 2.0, 3.0], (5, 1))
    model = pca_fit(X, 2)
    assert np.allclose(model.explained_variance, 0.0)
    assert np.allclose(pca_transform(model, X), 0.0)


def test_line_fixture_first_component_direction():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    model = pca_fit(X, 1)
    expected = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert np.allclose(model.components[0], expected, atol=1e-12)
    assert model.components[0][0] > 0  # sign convention


def test_explained_variance_sums_to_total_variance():
    X = random_matrix(1)
    model = pca_fit(X, X.shape[1])
    total = X.var(axis=0, ddof=1).sum()
    assert model.explained_variance.sum() == pytest.approx(total, abs=1e-8)


def test_components_are_orthonormal():
    model = pca_fit(random_matrix(2), 4)
    gram = model.components @ model.components.T
    assert np.allclose(gram, np.eye(4), atol=1e-8)


def test_explained_variance_sorted_non_increasing():
    model = pca_fit(random_matrix(3), 6)
    ev = model.explained_variance
    assert np.all(ev[:-1] >= ev[1:] - 1e-15)
    assert np.all(ev >= 0)


def test_transform_of_mean_row_is_origin():
    X = random_matrix(4)
    model = pca_fit(X, 3)
    assert np.allclose(pca_transform(model, X.mean(axis=0)[None, :]), 0.0, atol=1e-9)


def test_full_rank_round_trip():
    X = random_matrix(5)
    model = pca_fit(X, X.shape[1])
    back = pca_inverse(model, pca_transform(model, X))
    assert np.allclose(back, X, atol=1e-6)


def test_transformed_column_variance_matches_eigenvalue():
    X = random_matrix(6)
    model = pca_fit(X, 4)
    Y = pca_transform(model, X)
    for j in range(4):
        ev = model.explained_variance[j]
        assert Y[:, j].var(ddof=1) == pytest.approx(ev, rel=1e-6, abs=1e-12)


def test_reconstruction_error_equals_trailing_eigenvalues():
    X = random_matrix(7, n=40, d=8)
    full = pca_fit(X, 8)
    n = X.shape[0]
    for k in (2, 5):
        model = pca_fit(X, k)
        back = pca_inverse(model, pca_transform(model, X))
        err = ((X - back) ** 2).sum()
        expected = full.explained_variance[k:].sum() * (n - 1)
        assert err == pytest.approx(expected, rel=1e-6)


def test_inverse_is_affine():
    X = random_matrix(8)
    model = pca_fit(X, 3)
    rng = np.random.default_rng(0)
    y1, y2 = rng.normal(size=(2, 5, 3))
    alpha = 0.3
    lhs = pca_inverse(model, alpha * y1 + (1 - alpha) * y2)
    rhs = alpha * pca_inverse(model, y1) + (1 - alpha) * pca_inverse(model, y2)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_fit_is_deterministic():
    X = random_matrix(9)
    a, b = pca_fit(X, 3), pca_fit(X, 3)
    assert np.array_equal(a.mean, b.mean)
    assert np.array_equal(a.components, b.components)
    assert np.array_equal(a.explained_variance, b.explained_variance)


def test_parameter_errors():
    X = random_matrix(10, n=5, d=3)
    with pytest.raises(ValueError, match="k must be"):
        pca_fit(X, 0)
    with pytest.raises(ValueError, match="k must be"):
        pca_fit(X, 4)  # k > min(n-1, d)
    with pytest.raises(ValueError, match="at least 2"):
        pca_fit(X[:1], 1)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        pca_fit(bad, 2)


def test_json_round_trip():
    model = pca_fit(random_matrix(11), 3)
    back = PcaModel.from_json_dict(model.to_json_dict())
    assert np.array_equal(back.mean, model.mean)
    assert np.array_equal(back.components, model.components)
    assert np.array_equal(back.explained_variance, model.explained_variance)
    assert back.n_components == model.n_components
