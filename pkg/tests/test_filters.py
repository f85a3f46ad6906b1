import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import chebyshev as npcheb

from specgraph import bfs_distance, build_graph, eigendecompose, exact_filter, laplacian
from specgraph.errors import NonpositiveLambdaMax, NonSymmetricKind, ShapeMismatch
from specgraph.filters import (
    CayleyFilter,
    ChebyshevFilter,
    ExactFilter,
    FirstOrderGCN,
    apply_filter,
    cayley_apply,
    cayley_transform,
    chebyshev_apply,
    chebyshev_locality_matrix,
    estimate_lambda_max,
    first_order_filter,
    gcn_propagate,
    renormalized_adjacency,
    spec_from_json,
    spec_to_json,
    spectral_cnn_layer,
)
from specgraph.graph import diameter

from _graphs import complete_graph, path_graph, random_connected_graph, random_graph


def _no_isolated(rng, n, weighted=False):
    return random_connected_graph(rng, n, weighted=weighted)


class TestSpectralCNN:
    def test_identity(self, example_graph, rng):
        b = eigendecompose(laplacian(example_graph, "sym"))
        f = rng.standard_normal((5, 1))
        out = spectral_cnn_layer(b, [[ExactFilter(np.ones(5))]], f)
        np.testing.assert_allclose(out, f, atol=1e-13)

    def test_zero_gains(self, example_graph, rng):
        b = eigendecompose(laplacian(example_graph, "sym"))
        out = spectral_cnn_layer(b, [[np.zeros(5)]], rng.standard_normal(5), sigma=lambda x: x + 3.0)
        assert np.array_equal(out, np.full((5, 1), 3.0))

    def test_two_inputs_on_path(self, rng):
        b = eigendecompose(laplacian(path_graph(6), "sym"))
        F = rng.standard_normal((6, 2))
        thetas = rng.standard_normal((2, 6))
        out = spectral_cnn_layer(b, [[thetas[0]], [thetas[1]]], F)
        U = b.U
        expected = sum(U @ np.diag(thetas[i]) @ U.T @ F[:, i] for i in range(2))
        np.testing.assert_allclose(out[:, 0], expected, atol=1e-12)

    def test_shape_errors(self, example_graph):
        b = eigendecompose(laplacian(example_graph, "sym"))
        with pytest.raises(ShapeMismatch):
            spectral_cnn_layer(b, [[np.ones(4)]], np.ones(5))
        with pytest.raises(ShapeMismatch):
            spectral_cnn_layer(b, [[np.ones(5)]], np.ones((5, 2)))

    def test_parameter_count_is_linear(self):
        assert ExactFilter(np.zeros(37)).parameter_count == 37


class TestChebyshev:
    def test_constant_term(self, example_graph, rng):
        f = rng.standard_normal(5)
        out = chebyshev_apply(laplacian(example_graph, "sym"), ChebyshevFilter([2.5]), f)
        np.testing.assert_allclose(out, 2.5 * f)

    def test_first_order_term(self, example_graph, rng):
        L = laplacian(example_graph, "sym")
        f = rng.standard_normal(5)
        out = chebyshev_apply(L, ChebyshevFilter([0.0, 1.0], lambda_max=1.7), f)
        np.testing.assert_allclose(out, (2 / 1.7 * L.toarray() - np.eye(5)) @ f, atol=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_exact_filter(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 10, weighted=True)
        L = laplacian(g, "sym")
        b = eigendecompose(L)
        theta = rng.standard_normal(4)
        lmax = max(b.lambda_max, 1e-3)
        f = rng.standard_normal(10)
        # numpy's Chebyshev evaluator is the independent oracle for the response
        oracle = exact_filter(b, lambda lam: npcheb.chebval(2 * lam / lmax - 1, theta), f).values
        got = chebyshev_apply(L, ChebyshevFilter(theta, lmax), f)
        assert np.linalg.norm(got - oracle) <= 1e-8 * np.linalg.norm(f)

    def test_response_agrees_with_numpy(self, rng):
        spec = ChebyshevFilter(rng.standard_normal(7), lambda_max=1.6)
        lam = np.linspace(0, 1.6, 33)
        np.testing.assert_allclose(spec.response(lam), npcheb.chebval(2 * lam / 1.6 - 1, spec.theta), atol=1e-12)

    def test_errors(self, example_graph):
        with pytest.raises(NonpositiveLambdaMax):
            ChebyshevFilter([1.0], lambda_max=0.0)
        with pytest.raises(NonSymmetricKind):
            chebyshev_apply(laplacian(example_graph, "rw"), ChebyshevFilter([1.0]), np.ones(5))

    def test_locality_zero_order(self, example_graph):
        m = chebyshev_locality_matrix(laplacian(example_graph, "sym"), 0)
        assert np.array_equal(m, np.eye(5))

    def test_locality_example(self, example_graph):
        m = chebyshev_locality_matrix(laplacian(example_graph, "sym"), 1)
        assert bfs_distance(example_graph, 0, 2) == 2
        assert m[0, 2] == 0.0

    def test_full_support_at_diameter(self, rng):
        g = random_connected_graph(rng, 9, weighted=True)
        K = int(diameter(g))
        theta = rng.uniform(0.5, 1.5, K + 1)
        m = chebyshev_locality_matrix(laplacian(g, "sym"), K, theta=theta)
        assert np.all(np.abs(m) > 1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), K=st.integers(0, 6))
    def test_k_locality(self, seed, K):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, int(rng.integers(2, 14)), weighted=True)
        L = laplacian(g, "sym")
        m = chebyshev_locality_matrix(L, K, theta=rng.standard_normal(K + 1), lambda_max=1.9)
        for i in range(g.n):
            for j in range(g.n):
                d = bfs_distance(g, i, j)
                if d is None or d > K:
                    assert abs(m[i, j]) <= 1e-12

    def test_locality_matrix_is_filter_matrix(self, example_graph, rng):
        L = laplacian(example_graph, "sym")
        theta = rng.standard_normal(4)
        m = chebyshev_locality_matrix(L, 3, theta=theta, lambda_max=1.8)
        f = rng.standard_normal(5)
        np.testing.assert_allclose(m @ f, chebyshev_apply(L, ChebyshevFilter(theta, 1.8), f), atol=1e-12)


def _cayley_oracle(c0, c, h, lam):
    ct = (h * lam - 1j) / (h * lam + 1j)
    return c0 + 2 * sum(cj * ct ** (j + 1) for j, cj in enumerate(c)).real


class TestCayley:
    def test_no_coefficients(self, example_graph, rng):
        f = rng.standard_normal(5)
        np.testing.assert_allclose(cayley_apply(laplacian(example_graph, "sym"), CayleyFilter(0.7, []), f), 0.7 * f)

    def test_k2_dense_oracle(self):
        L = laplacian(complete_graph(2), "sym")
        f = np.array([0.3, -1.1])
        c0, c1 = 0.4, 1.25
        # eigenpairs of [[1,-1],[-1,1]]: 0 on (1,1)/sqrt2, 2 on (1,-1)/sqrt2
        u0 = np.array([1, 1]) / np.sqrt(2)
        u1 = np.array([1, -1]) / np.sqrt(2)
        g0 = c0 + 2 * (c1 * (-1j) / 1j).real
        g2 = c0 + 2 * (c1 * (2 - 1j) / (2 + 1j)).real
        expected = g0 * (u0 @ f) * u0 + g2 * (u1 @ f) * u1
        np.testing.assert_allclose(cayley_apply(L, CayleyFilter(c0, [c1]), f), expected, atol=1e-14)

    @pytest.mark.parametrize("seed", range(8))
    def test_unit_modulus_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 10, weighted=True)
        C = cayley_transform(laplacian(g, "sym"), h=float(rng.uniform(0.1, 5)))
        np.testing.assert_allclose(np.abs(np.linalg.eigvals(C)), 1.0, atol=1e-10)
        np.testing.assert_allclose(C.conj().T @ C, np.eye(10), atol=1e-10)

    @pytest.mark.parametrize("kind", ["sym", "combinatorial"])
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_exact_filter(self, kind, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 13))
        g = random_graph(rng, n, weighted=True)
        L = laplacian(g, kind)
        r = int(rng.integers(0, 5))
        c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        c0, h = float(rng.standard_normal()), float(rng.uniform(0.2, 3))
        f = rng.standard_normal(n)
        oracle = exact_filter(eigendecompose(L), lambda lam: _cayley_oracle(c0, c, h, lam), f).values
        np.testing.assert_allclose(cayley_apply(L, CayleyFilter(c0, c, h), f), oracle, atol=1e-8)

    def test_conjugate_even_form_is_real(self, rng):
        g = random_graph(rng, 8, weighted=True)
        L = laplacian(g, "sym")
        C = cayley_transform(L, 1.3)
        Cinv = np.linalg.inv(C)
        c0 = 0.2
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        full = c0 * np.eye(8) + sum(
            cj * np.linalg.matrix_power(C, j + 1) + np.conj(cj) * np.linalg.matrix_power(Cinv, j + 1)
            for j, cj in enumerate(c)
        )
        f = rng.standard_normal(8)
        y = full @ f
        assert np.max(np.abs(y.imag)) <= 1e-10 * np.linalg.norm(f)
        np.testing.assert_allclose(y.real, cayley_apply(L, CayleyFilter(c0, c, 1.3), f), atol=1e-10)

    def test_parameter_count(self):
        assert CayleyFilter(0.0, [1, 2, 3]).parameter_count == 8


class TestRenormalizedAdjacency:
    def test_single_node(self):
        assert np.array_equal(renormalized_adjacency(build_graph(1, [])), [[1.0]])

    def test_k2(self):
        np.testing.assert_allclose(renormalized_adjacency(complete_graph(2)), [[0.5, 0.5], [0.5, 0.5]], atol=1e-16)

    def test_stochastic_similarity(self, example_graph):
        A = renormalized_adjacency(example_graph)
        dt = example_graph.dense_adjacency().sum(axis=1) + 1
        P = np.diag(dt**-0.5) @ A @ np.diag(dt**0.5)
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_spectral_radius(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, int(rng.integers(1, 30)), weighted=True)
        A = renormalized_adjacency(g)
        assert np.array_equal(A, A.T)
        assert np.max(np.abs(np.linalg.eigvalsh(A))) <= 1 + 1e-10


class TestGCNPropagate:
    def test_identity(self, rng):
        F = rng.standard_normal((4, 3))
        np.testing.assert_array_equal(gcn_propagate(np.eye(4), F, np.eye(3)), F)

    def test_zero_features(self, example_graph, rng):
        out = gcn_propagate(renormalized_adjacency(example_graph), np.zeros((5, 3)), rng.standard_normal((3, 2)))
        assert np.array_equal(out, np.zeros((5, 2)))

    @pytest.mark.parametrize("C,H", [(3, 2), (2, 3)])
    def test_dense_oracle(self, rng, C, H):
        A = renormalized_adjacency(random_graph(rng, 5))
        F = rng.standard_normal((5, C))
        W = rng.standard_normal((C, H))
        np.testing.assert_allclose(gcn_propagate(A, F, W), (A @ F) @ W, atol=1e-12)

    def test_shape_error(self):
        with pytest.raises(ShapeMismatch):
            gcn_propagate(np.eye(3), np.ones((3, 2)), np.ones((3, 2)))


class TestFirstOrder:
    @pytest.mark.parametrize("seed", range(6))
    def test_gcn_is_two_term_chebyshev(self, seed):
        rng = np.random.default_rng(seed)
        g = _no_isolated(rng, 11, weighted=True)
        theta = float(rng.standard_normal())
        f = rng.standard_normal(11)
        cheb = chebyshev_apply(laplacian(g, "sym"), ChebyshevFilter([theta, -theta], 2.0), f)
        np.testing.assert_allclose(first_order_filter(g, theta, f, renormalize=False), cheb, atol=1e-10)

    def test_renormalized_default(self, example_graph, rng):
        f = rng.standard_normal(5)
        np.testing.assert_allclose(first_order_filter(example_graph, 2.0, f), 2.0 * renormalized_adjacency(example_graph) @ f)

    def test_single_parameter(self):
        assert FirstOrderGCN(0.3).parameter_count == 1


class TestLambdaMax:
    def test_k2(self):
        assert abs(estimate_lambda_max(laplacian(complete_graph(2))) - 2.0) <= 1e-6

    def test_example(self, example_graph):
        L = laplacian(example_graph)
        assert abs(estimate_lambda_max(L) - eigendecompose(L).lambda_max) <= 1e-6

    @pytest.mark.parametrize("seed", range(10))
    def test_sym_bounds(self, seed):
        rng = np.random.default_rng(seed)
        L = laplacian(random_graph(rng, int(rng.integers(2, 40)), weighted=True), "sym")
        est = estimate_lambda_max(L)
        true = eigendecompose(L).lambda_max
        assert est <= 2 + 1e-6
        assert est >= (1 - 1e-6) * true

    def test_empty_graph(self):
        assert estimate_lambda_max(laplacian(build_graph(3, []))) == 0.0

    def test_rejects_random_walk(self, example_graph):
        with pytest.raises(NonSymmetricKind):
            estimate_lambda_max(laplacian(example_graph, "rw"))


class TestDispatchAndSerialization:
    @pytest.mark.parametrize(
        "spec",
        [
            ExactFilter([0.1, 0.2, 0.3, 0.4, 0.5]),
            ChebyshevFilter([1.0, -0.5, 0.25], lambda_max=1.9),
            CayleyFilter(0.3, [1 + 2j, -0.5j], h=0.7, laplacian="combinatorial"),
            FirstOrderGCN(0.8),
        ],
    )
    def test_direct_vs_exact_and_json(self, spec, example_graph, rng):
        f = rng.standard_normal(5)
        direct = apply_filter(spec, example_graph, f)
        np.testing.assert_allclose(direct, apply_filter(spec, example_graph, f, method="exact"), atol=1e-8)
        back = spec_from_json(spec_to_json(spec))
        assert spec_to_json(back) == spec_to_json(spec)
        np.testing.assert_array_equal(apply_filter(back, example_graph, f), direct)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            spec_from_json('{"kind": "wavelet"}')

    def test_exact_length_checked(self, example_graph):
        with pytest.raises(ShapeMismatch):
            apply_filter(ExactFilter([1.0, 2.0]), example_graph, np.ones(5))
