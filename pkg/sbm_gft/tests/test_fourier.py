import numpy as np
import pytest

from hypothesis import given, seed, settings
from hypothesis import strategies as st

from sbm_gft.config import Config
from sbm_gft.errors import ValidationError
from sbm_gft.utils import read_csv_rows, read_json_file
from sbm_gft.spectral import projection_distance
from sbm_gft.group_harmonics import (
    AbelianGroup,
    ConnectionFunction,
    cayley_eigengroups,
    cayley_eigenvalues,
    cayley_matrix,
    character_matrix,
    enumerate_elements,
)
from sbm_gft.sbm_model import (
    SBMSpec,
    compress_vector,
    isometry,
    model_matrix,
    model_operator,
    sample_graph,
    weighted_probability_matrix,
)
from sbm_gft.fourier import (
    basis_agreement,
    cayley_uniform_basis,
    general_cayley_basis,
    graph_fourier_transform,
    inverse_transform,
    mtilde_system,
    one_large_block_eigenvectors,
    one_large_block_spec,
    sbm_fourier_basis,
    sbm_fourier_transform,
    step_embed,
    step_inner_product,
    transferred_character_basis,
    write_basis,
)

GROUPS = [(2,), (3,), (5,), (2, 3), (2, 2), (7,), (3, 4), (2, 2, 3)]


def random_spec(rng: np.random.Generator, max_blocks: int = 4, max_size: int = 40) -> SBMSpec:
    n = int(rng.integers(1, max_blocks + 1))
    k = rng.integers(1, max_size // n + 1, size=n)
    A = rng.uniform(0., 1., (n, n))
    return SBMSpec.from_block_sizes((A + A.T) / 2, k)


def random_connection(group: AbelianGroup, rng: np.random.Generator) -> ConnectionFunction:
    values = rng.uniform(0., 1., group.n)
    inverse_positions = [group.index_of(group.inverse(g)) for g in enumerate_elements(group)]
    return ConnectionFunction(group, (values + values[inverse_positions]) / 2)


def z5_spec(N: int = 6000) -> SBMSpec:
    group = AbelianGroup.cyclic(5)
    return SBMSpec(cayley_matrix(group, ConnectionFunction(group, Config.z5_connection)), Config.z5_measure, N)


def test_z5_model_eigenvalues():
    basis = sbm_fourier_basis(z5_spec())
    assert basis.rank == 5
    values = basis.w_eigenvalues[basis.by_magnitude()]
    np.testing.assert_allclose(values, [2622.1, -1290.3, -970.82, 468.1, 370.8], atol=0.1)
    # The repeated Cayley eigenvalues survive the large block: 1000 * 1.2 cos(4π/5) and 1000 * 1.2 cos(2π/5).
    assert values[2] == pytest.approx(1000 * 1.2 * np.cos(4 * np.pi / 5), abs=1e-6)
    assert values[4] == pytest.approx(1000 * 1.2 * np.cos(2 * np.pi / 5), abs=1e-6)
    assert basis.is_simple


@seed(21)
@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_reduction_matches_dense_model(draw):
    spec = random_spec(np.random.default_rng(draw))
    N = spec.N
    basis = sbm_fourier_basis(spec)
    W = model_matrix(spec)
    dense_values, dense_vectors = np.linalg.eigh(W)

    # Nonzero spectrum of W is N times the one of A_mu, multiplicities included.
    order = np.argsort(-np.abs(dense_values), kind="stable")
    nonzero = np.sort(dense_values[order[:basis.rank]])[::-1]
    np.testing.assert_allclose(nonzero, basis.w_eigenvalues, atol=1e-8 * N)
    np.testing.assert_allclose(dense_values[order[basis.rank:]], 0., atol=1e-8 * N)

    # Lifted eigenvectors of A_mu are eigenvectors of W.
    np.testing.assert_allclose(W @ basis.lifted, basis.lifted * basis.w_eigenvalues, atol=1e-8 * N)
    np.testing.assert_allclose(basis.lifted.T @ basis.lifted, np.eye(basis.rank), atol=1e-10)

    # Compressed eigenvectors of W are eigenvectors of A_mu.
    A_mu = weighted_probability_matrix(spec.A, spec.realized_measure)
    top = dense_vectors[:, order[:basis.rank]]
    compressed = compress_vector(spec.k, top)
    np.testing.assert_allclose(A_mu @ compressed, compressed * (dense_values[order[:basis.rank]] / N), atol=1e-8)



@seed(28)
@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_singular_model_rank(draw):
    rng = np.random.default_rng(draw)
    n = int(rng.integers(2, 7))
    r = int(rng.integers(1, n))
    B = rng.uniform(0., 1., (n, r))
    A = B @ B.T
    A = (A + A.T) / 2
    spec = SBMSpec.from_block_sizes(A / A.max(), rng.integers(1, 30, size=n))
    basis = sbm_fourier_basis(spec)
    assert basis.rank == r
    assert sum(len(group.positions) for group in basis.groups) == r


def test_constant_connection_is_one_group():
    group = AbelianGroup.cyclic(5)
    spec = SBMSpec(cayley_matrix(group, ConnectionFunction(group, [0.3] * 5)), Config.z5_measure, 600)
    basis = sbm_fourier_basis(spec)
    assert basis.rank == 1
    assert len(basis.groups) == 1
    np.testing.assert_allclose(basis.w_eigenvalues, [0.3 * 600])
    np.testing.assert_allclose(basis.lifted[:, 0], 1. / np.sqrt(600))

@seed(22)
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_transform_algebra(draw):
    rng = np.random.default_rng(draw)
    spec = random_spec(rng)
    basis = sbm_fourier_basis(spec)
    W = model_matrix(spec)
    for _ in range(4):
        x = rng.standard_normal(spec.N)
        result = sbm_fourier_transform(basis, x)
        np.testing.assert_allclose(inverse_transform(result), x, atol=1e-10)
        energy = np.sum(result.norms() ** 2) + result.zero_norm ** 2
        assert energy == pytest.approx(np.dot(x, x), abs=1e-10)
        np.testing.assert_allclose(W @ result.zero_component, 0., atol=1e-8 * spec.N)
        for g, value in enumerate(result.eigenvalues):
            np.testing.assert_allclose(W @ result.projections[g], spec.N * value * result.projections[g],
                                       atol=1e-8 * spec.N)


def test_transform_of_complex_and_zero_signals():
    spec = SBMSpec([[0.6, 0.1], [0.1, 0.3]], [0.5, 0.5], 10)
    basis = sbm_fourier_basis(spec)
    zero = sbm_fourier_transform(basis, np.zeros(10))
    assert zero.norms().max() == 0.
    assert zero.zero_norm == 0.

    x = np.arange(10) + 1j * np.ones(10)
    result = sbm_fourier_transform(basis, x)
    np.testing.assert_allclose(inverse_transform(result), x, atol=1e-12)
    assert result.coefficients is not None
    for g, group in enumerate(basis.groups):
        j = group.positions[0]
        np.testing.assert_allclose(result.projections[g], result.coefficients[j] * basis.lifted[:, j], atol=1e-12)

    np.testing.assert_allclose(result.projection(result.eigenvalues[0]), result.projections[0])
    np.testing.assert_allclose(result.projection(0.), result.zero_component)
    with pytest.raises(ValidationError):
        result.projection(123.)
    with pytest.raises(ValidationError):
        sbm_fourier_transform(basis, np.ones(9))


def test_repeated_eigenvalues_have_no_coefficients():
    group = AbelianGroup.cyclic(5)
    basis = cayley_uniform_basis(group, ConnectionFunction(group, Config.z5_connection), 50)
    assert not basis.is_simple
    result = sbm_fourier_transform(basis, np.random.default_rng(0).standard_normal(50))
    assert result.coefficients is None
    assert [g.multiplicity for g in basis.groups] == [1, 2, 2]


def test_graph_fourier_transform():
    S = np.diag([3., -1., 2., 0.])
    x = np.array([1., 2., 3., 4.])
    result = graph_fourier_transform(S, x)
    assert result.signed_indices == (1, 2, -1, 0)
    np.testing.assert_allclose(np.abs(result.coefficients), [1., 3., 2., 4.])
    np.testing.assert_allclose(result.projection(), x)

    partial = graph_fourier_transform(S, x, indices=[-1])
    np.testing.assert_allclose(partial.eigenvalues, [-1.])
    with pytest.raises(ValidationError):
        graph_fourier_transform(S, np.ones(3))


def test_graph_fourier_transform_of_a_sample():
    spec = z5_spec(300)
    graph = sample_graph(spec, 3)
    x = np.random.default_rng(0).standard_normal(300)
    result = graph_fourier_transform(graph, x, count=6)
    assert len(result.signed_indices) == 6
    np.testing.assert_allclose(result.coefficients, result.vectors.T @ x)
    assert np.abs(result.eigenvalues[0]) == pytest.approx(np.abs(result.eigenvalues).max())


def test_step_embedding():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    f, g = step_embed(x), step_embed(y)
    assert f.norm() == pytest.approx(np.linalg.norm(x))
    assert step_inner_product(f, g) == pytest.approx(np.dot(x, y))
    assert float(f.evaluate(0.)) == pytest.approx(2 * x[0])
    assert float(f.evaluate(1.)) == pytest.approx(2 * x[3])

    # Refining a signal does not change its step function.
    refined = step_embed(np.repeat(x, 3) / np.sqrt(3))
    z = step_embed(rng.standard_normal(6))
    assert step_inner_product(refined, z) == pytest.approx(step_inner_product(f, z))
    assert refined.norm() == pytest.approx(f.norm())

    with pytest.raises(ValidationError):
        step_embed(x, 5)
    with pytest.raises(ValidationError):
        f.evaluate(1.5)


@seed(23)
@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_characters_give_the_uniform_basis(orders, draw):
    group = AbelianGroup(orders)
    f = random_connection(group, np.random.default_rng(draw))
    N = 6 * group.n
    W = model_operator(SBMSpec(cayley_matrix(group, f), np.full(group.n, 1 / group.n), N))
    numeric = sbm_fourier_basis(SBMSpec(cayley_matrix(group, f), np.full(group.n, 1 / group.n), N))

    for real in (True, False):
        basis = cayley_uniform_basis(group, f, N, real=real)
        residuals = np.linalg.norm(W.matmat(basis.lifted) - basis.lifted * basis.w_eigenvalues, axis=0)
        assert residuals.max() <= 1e-8 * N
        assert len(basis.groups) == len(numeric.groups)
        for group_a, group_b in zip(basis.groups, numeric.groups):
            assert group_a.value == pytest.approx(group_b.value, abs=1e-10)
            assert projection_distance(group_a.basis, group_b.basis).frobenius <= 1e-8

    values = np.sort(cayley_eigenvalues(group, f))[::-1]
    basis = cayley_uniform_basis(group, f, N)
    np.testing.assert_allclose(basis.w_eigenvalues, (N / group.n) * values[np.abs(values) > basis.tolerances.zero_tol],
                               atol=1e-9 * N)


def test_uniform_basis_needs_a_multiple_of_the_order():
    group = AbelianGroup.cyclic(5)
    with pytest.raises(ValidationError):
        cayley_uniform_basis(group, ConnectionFunction.constant(group, 0.5), 12)


@seed(24)
@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_mtilde_system(orders, draw):
    rng = np.random.default_rng(draw)
    group = AbelianGroup(orders)
    f = random_connection(group, rng)
    mu = rng.dirichlet(np.ones(group.n)) * 0.5 + 0.5 / group.n
    system = mtilde_system(group, mu, f)

    U = character_matrix(group)
    np.testing.assert_allclose(system.mtilde, U.conj().T @ np.diag(system.mu) @ U, atol=1e-12)
    differences = group.difference_indices()
    np.testing.assert_allclose(system.mtilde, system.mtilde[0][differences], atol=1e-12)
    np.testing.assert_allclose(system.weighted_fourier_product(), system.product, atol=1e-12)

    result = general_cayley_basis(group, f, mu, 50 * group.n)
    assert result.residuals.max(initial=0.) <= 1e-8
    np.testing.assert_allclose(result.system.mu, result.basis.spec.realized_measure)


def test_mtilde_product_needs_a_connection():
    group = AbelianGroup.cyclic(3)
    system = mtilde_system(group, [0.5, 0.25, 0.25])
    with pytest.raises(ValidationError):
        system.product
    with pytest.raises(ValidationError):
        mtilde_system(group, [0.5, 0.5])


@pytest.mark.parametrize("step", [1, 5, 20])
def test_z5_one_large_block(step):
    group = AbelianGroup.cyclic(5)
    f = ConnectionFunction(group, Config.z5_connection)
    tau = (60 - step) / 300
    repeated = [g for g in cayley_eigengroups(group, f) if g.multiplicity == 2]
    assert len(repeated) == 2
    for eigengroup in repeated:
        result = one_large_block_eigenvectors(group, f, tau, 3000, eigengroup)
        assert result.eigenvalue == pytest.approx(3000 * tau * eigengroup.value)
        assert result.vectors.shape == (3000, 1)
        assert result.residuals.max() <= 1e-8 * 3000
        assert not np.iscomplexobj(result.vectors)
        # Vanishes on the identity's block.
        np.testing.assert_allclose(result.vectors[:result.spec.k[0]], 0., atol=1e-12)


def test_one_large_block_orthogonality():
    group = AbelianGroup((2, 2))
    f = ConnectionFunction(group, [0.9, 0.3, 0.3, 0.3])
    (eigengroup,) = [g for g in cayley_eigengroups(group, f) if g.multiplicity == 3]
    result = one_large_block_eigenvectors(group, f, 0.1, 400, eigengroup)
    assert result.vectors.shape == (400, 2)
    gram = result.vectors.conj().T @ result.vectors
    np.testing.assert_allclose(gram, np.eye(2), atol=1e-10)
    assert result.residuals.max() <= 1e-8 * 400


def test_one_large_block_validation():
    group = AbelianGroup.cyclic(5)
    f = ConnectionFunction(group, Config.z5_connection)
    with pytest.raises(ValidationError):
        one_large_block_spec(group, f, 0.2, 3000)
    with pytest.raises(ValidationError):
        one_large_block_spec(group, f, 0.1234567, 3000)
    (trivial,) = [g for g in cayley_eigengroups(group, f) if g.multiplicity == 1]
    with pytest.raises(ValidationError):
        one_large_block_eigenvectors(group, f, 0.1, 3000, trivial)


def test_transferred_basis_is_exact_for_equal_blocks():
    group = AbelianGroup.cyclic(5)
    f = ConnectionFunction(group, Config.z5_connection)
    transferred = transferred_character_basis(group, f, np.full(5, 0.2), 500)
    np.testing.assert_allclose(transferred.vectors.T @ transferred.vectors, np.eye(5), atol=1e-12)
    agreement = basis_agreement(transferred.vectors, sbm_fourier_basis(transferred.spec))
    np.testing.assert_allclose(agreement.values, 1., atol=1e-10)


def test_transferred_basis_under_unequal_blocks():
    group = AbelianGroup.cyclic(5)
    f = ConnectionFunction(group, Config.z5_connection)
    transferred = transferred_character_basis(group, f, [0.4, 0.15, 0.15, 0.15, 0.15], 600)
    agreement = basis_agreement(transferred.vectors, sbm_fourier_basis(transferred.spec))
    assert np.all(agreement.values > 0.) and np.all(agreement.values <= 1.)
    # The sine vectors vanish on the large block and stay eigenvectors.
    assert agreement.values[2] == pytest.approx(1., abs=1e-8)
    assert agreement.values[4] == pytest.approx(1., abs=1e-8)
    assert agreement.values.min() < 1. - 1e-6


def test_basis_agreement_with_itself():
    spec = SBMSpec([[0.6, 0.1, 0.2], [0.1, 0.3, 0.4], [0.2, 0.4, 0.5]], [0.5, 0.3, 0.2], 30)
    basis = sbm_fourier_basis(spec)
    agreement = basis_agreement(basis.lifted[:, ::-1], basis)
    np.testing.assert_allclose(agreement.values, 1., atol=1e-12)
    assert list(agreement.matches) == list(range(basis.rank))[::-1]
    ordered = basis_agreement(basis.lifted[:, basis.by_magnitude()], basis)
    np.testing.assert_allclose(ordered.paired, 1., atol=1e-12)
    assert np.isnan(basis_agreement(np.eye(basis.N)[:, :basis.rank + 1], basis).paired[-1])
    with pytest.raises(ValidationError):
        basis_agreement(np.ones((5, 1)), basis)


def test_write_basis(tmp_path):
    spec = SBMSpec([[0.6, 0.1], [0.1, 0.3]], [0.5, 0.5], 6)
    basis = sbm_fourier_basis(spec)
    csv_path, json_path = str(tmp_path / "basis.csv"), str(tmp_path / "basis.json")
    write_basis(basis, csv_path, json_path, manifest="sbm-gft test config=abc")

    rows = read_csv_rows(csv_path)
    assert rows[0] == ["eigen_index", "W_eigenvalue", "v0", "v1", "v2", "v3", "v4", "v5"]
    assert len(rows) == 1 + basis.rank
    assert rows[1][0] == "1"

    metadata = read_json_file(json_path)
    assert metadata["spec_hash"] == spec.digest()
    assert metadata["k"] == [3, 3]
    assert metadata["rank"] == basis.rank
    assert set(metadata["tolerances"]) == {"zero_tol", "group_tol", "residual_tol"}


def test_basis_isometry():
    spec = z5_spec(600)
    basis = sbm_fourier_basis(spec)
    np.testing.assert_allclose(basis.lifted, isometry(spec.k) @ basis.U0, atol=1e-12)
