from unittest import mock

import numpy as np
import pytest

from hypothesis import given, seed, settings
from hypothesis import strategies as st

from sbm_gft.config import Config
from sbm_gft.errors import ValidationError
from sbm_gft.sbm_model import (
    SampledGraph,
    SBMSpec,
    block_edge_density,
    block_labels,
    block_sizes,
    compress_vector,
    isometry,
    lift_matrix,
    lift_vector,
    model_matrix,
    model_operator,
    sample_graph,
    validate_measure,
    validate_probability_matrix,
    validate_seed,
    weight_matrix,
    weighted_probability_matrix,
)


def random_spec(rng: np.random.Generator, max_blocks: int = 4, max_size: int = 40) -> SBMSpec:
    n = int(rng.integers(1, max_blocks + 1))
    k = rng.integers(1, max_size // n + 1, size=n)
    A = rng.uniform(0., 1., (n, n))
    return SBMSpec.from_block_sizes((A + A.T) / 2, k)


def test_block_sizes():
    assert block_sizes([1 / 3, 1 / 6, 1 / 6, 1 / 6, 1 / 6], 6000) == (2000, 1000, 1000, 1000, 1000)
    assert block_sizes([1 / 3, 1 / 3, 1 / 3], 10) == (4, 3, 3)
    assert block_sizes([0.5, 0.25, 0.25], 7) == (3, 2, 2)
    # Equal remainders go to the first blocks.
    assert block_sizes((0.4, 0.35, 0.25), 10) == (4, 4, 2)
    with pytest.raises(ValidationError):
        block_sizes([0.99, 0.01], 10)
    with pytest.raises(ValidationError):
        block_sizes([0.5, 0.5], 1)


def test_validate_measure():
    assert validate_measure([0.25, 0.75]).tolist() == [0.25, 0.75]
    for bad in ([], [0.5, 0.6], [1.5, -0.5], [[0.5, 0.5]], [1., 0.]):
        with pytest.raises(ValidationError):
            validate_measure(bad)


def test_validate_probability_matrix():
    with pytest.raises(ValidationError):
        validate_probability_matrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(ValidationError):
        validate_probability_matrix([[1.5]])
    with pytest.raises(ValidationError):
        validate_probability_matrix([[0.5, 0.1]])
    A = validate_probability_matrix([[0.5, 0.1], [0.1, 0.5]])
    assert not A.flags.writeable


def test_spec_dict():
    spec = SBMSpec.from_dict({"A": [[0.5, 0.1], [0.1, 0.4]], "mu": [0.5, 0.5], "N": 10})
    assert spec.k == (5, 5)
    assert spec.n == 2
    assert SBMSpec.from_dict(spec.to_dict()).digest() == spec.digest()
    assert spec.with_size(20).k == (10, 10)
    with pytest.raises(ValidationError):
        SBMSpec.from_dict({"A": [[0.5]], "mu": [1.0]})
    with pytest.raises(ValidationError):
        SBMSpec([[0.5, 0.1], [0.1, 0.4]], [1.0], 10)


def test_realized_measure():
    spec = SBMSpec([[0.5, 0.1, 0.2], [0.1, 0.4, 0.3], [0.2, 0.3, 0.6]], [1 / 3, 1 / 3, 1 / 3], 10)
    np.testing.assert_allclose(spec.realized_measure, [0.4, 0.3, 0.3])
    spec = SBMSpec.from_block_sizes([[0.5, 0.1], [0.1, 0.4]], [3, 7])
    assert spec.N == 10
    np.testing.assert_allclose(spec.mu, [0.3, 0.7])


def test_weighted_probability_matrix_is_symmetric():
    rng = np.random.default_rng(0)
    A = rng.uniform(0., 1., (6, 6))
    A_mu = weighted_probability_matrix((A + A.T) / 2, rng.dirichlet(np.ones(6)))
    np.testing.assert_array_equal(A_mu, A_mu.T)


@seed(11)
@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_model_identities(draw):
    spec = random_spec(np.random.default_rng(draw))
    k, N = spec.k, spec.N
    mu = spec.realized_measure
    D, V = lift_matrix(k), isometry(k)
    W = model_matrix(spec)

    np.testing.assert_allclose(W, D @ spec.A @ D.T, atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(spec.n), atol=1e-12)
    np.testing.assert_allclose(D.T @ D, N * weight_matrix(mu), atol=1e-10)
    np.testing.assert_allclose(V, D @ np.diag(1 / np.sqrt(mu)) / np.sqrt(N), atol=1e-12)
    np.testing.assert_allclose(W, N * V @ weighted_probability_matrix(spec.A, mu) @ V.T, atol=1e-10)
    np.testing.assert_allclose(V.T @ W @ V / N, weighted_probability_matrix(spec.A, mu), atol=1e-12)
    assert np.linalg.norm(D, 2) == pytest.approx(np.sqrt(N * mu.max()))


@seed(12)
@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_model_operator_matches_model_matrix(draw):
    rng = np.random.default_rng(draw)
    spec = random_spec(rng)
    y = rng.standard_normal((spec.N, 3))
    np.testing.assert_allclose(model_operator(spec).matmat(y), model_matrix(spec) @ y, atol=1e-10)
    np.testing.assert_allclose(model_operator(spec).matvec(y[:, 0]), model_matrix(spec) @ y[:, 0], atol=1e-10)


def test_lift_and_compress():
    k = (2, 3, 1)
    x = np.array([1., -2., 3.])
    np.testing.assert_array_equal(lift_vector(k, x), [1., 1., -2., -2., -2., 3.])
    np.testing.assert_allclose(compress_vector(k, lift_vector(k, x, isometric=True)), x)
    np.testing.assert_allclose(lift_vector(k, x, isometric=True), isometry(k) @ x)
    np.testing.assert_array_equal(block_labels(k), [0, 0, 1, 1, 1, 2])
    with pytest.raises(ValidationError):
        lift_vector(k, np.ones(2))
    with pytest.raises(ValidationError):
        compress_vector(k, np.ones(5))


def test_model_matrix_size_cap():
    spec = SBMSpec([[0.5]], [1.], 50)
    with pytest.raises(ValidationError):
        model_matrix(spec, max_size=10)
    assert model_operator(spec).shape == (50, 50)


def test_validate_seed():
    assert validate_seed(3) == 3
    assert validate_seed(np.uint64(2 ** 63)) == 2 ** 63
    for bad in (-1, 2 ** 64, 1.5, True, "1"):
        with pytest.raises(ValidationError):
            validate_seed(bad)


def test_sampled_graph_is_simple():
    spec = SBMSpec([[0.6, 0.1], [0.1, 0.3]], [0.5, 0.5], 80)
    graph = sample_graph(spec, 5)
    adjacency = graph.adjacency.toarray()
    np.testing.assert_array_equal(adjacency, adjacency.T)
    np.testing.assert_array_equal(np.diag(adjacency), 0.)
    assert set(np.unique(adjacency)) <= {0., 1.}
    edges = graph.edges()
    assert np.all(edges[:, 0] < edges[:, 1])
    assert edges.shape[0] == int(adjacency.sum()) // 2


def test_sampling_is_reproducible_whatever_the_split():
    spec = SBMSpec([[0.6, 0.1], [0.1, 0.3]], [0.25, 0.75], 120)
    reference = sample_graph(spec, 42).edges()
    with mock.patch.object(Config, "sampling_chunks", 1), mock.patch.object(Config, "workers", 1):
        np.testing.assert_array_equal(sample_graph(spec, 42).edges(), reference)
    with mock.patch.object(Config, "sampling_chunks", 13):
        np.testing.assert_array_equal(sample_graph(spec, 42).edges(), reference)
    assert not np.array_equal(sample_graph(spec, 43).edges(), reference)


def test_block_edge_density():
    A = [[0.7, 0.2], [0.2, 0.4]]
    spec = SBMSpec(A, [0.5, 0.5], 800)
    graph = sample_graph(spec, 1)
    np.testing.assert_array_equal(np.bincount(graph.block_assignment), spec.k)
    for i in range(2):
        for j in range(2):
            assert block_edge_density(graph, i, j) == pytest.approx(A[i][j], abs=0.02)


def test_graph_write_and_read(tmp_path):
    spec = SBMSpec([[0.6, 0.1], [0.1, 0.3]], [0.5, 0.5], 40)
    graph = sample_graph(spec, 9)
    edge_path, header_path = str(tmp_path / "graph.csv"), str(tmp_path / "graph.json")
    graph.write(edge_path, header_path, manifest="sbm-gft test config=abc")

    loaded = SampledGraph.read(edge_path, header_path)
    assert loaded.N == 40
    assert loaded.k == (20, 20)
    assert loaded.seed == 9
    assert (loaded.adjacency != graph.adjacency).nnz == 0


def test_graph_read_rejects_bad_edges(tmp_path):
    header_path = tmp_path / "graph.json"
    header_path.write_text('{"N": 3, "k": [1, 2], "seed": 0}')
    edge_path = tmp_path / "graph.csv"
    edge_path.write_text("u,v\n2,1\n")
    with pytest.raises(ValidationError):
        SampledGraph.read(str(edge_path), str(header_path))
