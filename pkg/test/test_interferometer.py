from src.coherelab.errors import InvalidInput
from src.coherelab.interferometer import (
    PatternGrid,
    PhaseGrid,
    best_assignment,
    directional_derivative,
    finite_difference_derivative,
    mix_patterns,
    optimal_effect,
    sample_pattern,
    theorem_one_measurement,
    v_guess_on_pattern,
    v_guess_on_settings,
    v_max_on_grid,
)
from src.coherelab.states import (
    DensityMatrix,
    DiagonalHamiltonian,
    PhaseVector,
    Povm,
    apply_phases,
    apply_sio,
    random_density,
    random_sio,
)
import numpy as np
import pytest


S = 1 / np.sqrt(2)


@pytest.fixture
def m1():
    return Povm.from_basis([[S, S, 0], [S, -S, 0], [0, 0, 1]])


@pytest.fixture
def qutrit():
    return DensityMatrix.qutrit_example()


def random_effect(d, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    _, vecs = np.linalg.eigh(A + A.conj().T)
    return (vecs * rng.uniform(0, 1, d)) @ vecs.conj().T


def test_uniform_grid_gauge_and_size():
    grid = PhaseGrid.uniform(3, 4)
    assert len(grid) == 16
    assert np.all(grid.points[:, -1] == 0)
    assert len(PhaseGrid.uniform(2)) == 33


def test_sample_pattern_rows(qutrit, m1):
    alphas = np.linspace(0, 2 * np.pi, 33)
    pattern = sample_pattern(qutrit, m1, PhaseGrid.sweep(3, alphas))
    expected = np.column_stack([
        2 / 3 * np.cos(alphas / 2) ** 2,
        2 / 3 * np.sin(alphas / 2) ** 2,
        np.full(alphas.size, 1 / 3),
    ])
    assert np.allclose(pattern.table, expected, atol=1e-10)
    assert np.allclose(pattern.table.sum(axis=1), 1.0, atol=1e-9)


def test_diagonal_state_gives_constant_pattern():
    rho = DensityMatrix.diagonal([0.5, 0.3, 0.2])
    pattern = sample_pattern(rho, Povm.fourier(3), PhaseGrid.uniform(3, 5))
    assert np.allclose(pattern.table, pattern.table[0], atol=1e-12)
    assert v_max_on_grid(pattern) <= 1e-10


def test_v_max_on_grid(qutrit, m1):
    pattern = sample_pattern(qutrit, m1, PhaseGrid.sweep(3, np.linspace(0, 2 * np.pi, 33)))
    assert v_max_on_grid(pattern) == pytest.approx(2 / 3, abs=1e-10)

    grid = PhaseGrid(np.array([[0.0, 0.0], [1.0, 0.0]]))
    extreme = PatternGrid(grid, (0, 1), np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert v_max_on_grid(extreme) == pytest.approx(1.0)


def test_v_max_invariances():
    rho = random_density(3, 2, 8)
    povm = Povm.fourier(3)
    coarse = PhaseGrid.uniform(3, 4)
    fine = PhaseGrid.uniform(3, 8)
    base = v_max_on_grid(sample_pattern(rho, povm, coarse))

    shifted = v_max_on_grid(sample_pattern(rho, povm, coarse.translated(0.37 * np.ones(3))))
    assert shifted == pytest.approx(base, abs=1e-12)

    assert v_max_on_grid(sample_pattern(rho, povm, fine)) >= base - 1e-12


def test_v_max_permutation_invariance():
    rho = random_density(3, 3, 2)
    perm = [1, 2, 0]
    P = np.eye(3)[:, perm]
    povm = Povm.fourier(3)
    grid = PhaseGrid.uniform(3, 5)
    moved = DensityMatrix(P @ rho.matrix @ P.T)
    moved_povm = Povm(povm.outcomes, tuple(P @ m @ P.T for m in povm.elements))
    a = v_max_on_grid(sample_pattern(rho, povm, grid))
    b = v_max_on_grid(sample_pattern(moved, moved_povm, grid.permuted(perm)))
    assert a == pytest.approx(b, abs=1e-10)


def test_v_guess_perfect_discrimination_of_plus_state():
    """
    |+> under the two equidistributed qubit settings gives orthogonal
    states, which the Helstrom detector tells apart perfectly.
    """
    rho = DensityMatrix.qubit_plus()
    grid = PhaseGrid.guessing(2)
    states = [apply_phases(rho, a) for a in grid.phase_vectors()]
    povm = Povm.two_outcome(optimal_effect(states[0].matrix - states[1].matrix))
    bias = v_guess_on_settings(rho, povm, PhaseVector.zeros(2), [0, 1], {0: 1, 1: 2})
    assert bias == pytest.approx(0.5, abs=1e-12)


def test_v_guess_diagonal_state_is_zero():
    rho = DensityMatrix.diagonal([0.2, 0.5, 0.3])
    pattern = sample_pattern(rho, Povm.fourier(3), PhaseGrid.guessing(3))
    assert v_guess_on_pattern(pattern, best_assignment(pattern)) == pytest.approx(0.0, abs=1e-12)


def test_v_guess_rejects_overlapping_sets(qutrit, m1):
    with pytest.raises(InvalidInput):
        v_guess_on_settings(qutrit, m1, PhaseVector.zeros(3), [0, 1, 2], [[0], [0, 1], [2]])


def test_regularity_of_functionals(qutrit, m1):
    pattern = sample_pattern(qutrit, m1, PhaseGrid.uniform(3, 6))
    assert v_max_on_grid(pattern) > 0.01
    guess = sample_pattern(qutrit, m1, PhaseGrid.guessing(3))
    assert v_guess_on_pattern(guess, best_assignment(guess)) > 0.01


def test_directional_derivative_qubit_example():
    rho = DensityMatrix(np.array([[0.5, 0.25], [0.25, 0.5]]))
    h = DiagonalHamiltonian(np.array([1.0, -1.0]) / np.sqrt(2))
    m0 = np.full((2, 2), 0.5)
    alpha = PhaseVector.zeros(2)
    analytic = directional_derivative(rho, m0, alpha, h)
    numeric = finite_difference_derivative(rho, m0, alpha, h)
    assert analytic == pytest.approx(numeric, abs=1e-8)


def test_directional_derivative_matches_finite_differences():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        d = 2 + seed % 3
        rho = random_density(d, 1 + seed % d, seed)
        m0 = random_effect(d, 100 + seed)
        h = DiagonalHamiltonian(rng.standard_normal(d))
        alpha = PhaseVector(rng.uniform(0, 2 * np.pi, d))
        analytic = directional_derivative(rho, m0, alpha, h)
        numeric = finite_difference_derivative(rho, m0, alpha, h)
        assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_directional_derivative_vanishing_cases():
    m0 = random_effect(3, 1)
    alpha = PhaseVector([0.1, 0.2, 0.3])
    diag = DensityMatrix.diagonal([0.2, 0.3, 0.5])
    h = DiagonalHamiltonian([1.0, -0.5, 0.2])
    assert directional_derivative(diag, m0, alpha, h) == pytest.approx(0.0, abs=1e-14)

    rho = random_density(3, 3, 5)
    flat = DiagonalHamiltonian(np.full(3, 0.7))
    assert directional_derivative(rho, m0, alpha, flat) == pytest.approx(0.0, abs=1e-14)

    with pytest.raises(InvalidInput):
        directional_derivative(rho, 2 * np.eye(3), alpha, h)


def test_mix_patterns():
    grid = PhaseGrid.uniform(2, 4)
    a = PatternGrid(grid, ("a0", "a1"), np.tile([0.3, 0.7], (4, 1)))
    b = PatternGrid(grid, ("b0",), np.ones((4, 1)))

    single = mix_patterns([a], [1.0])
    assert np.array_equal(single.table, a.table)

    mixed = mix_patterns([a, b], [0.25, 0.75])
    assert mixed.outcomes == ("a0", "a1", "b0")
    assert np.allclose(mixed.table, mixed.table[0])

    with pytest.raises(InvalidInput):
        mix_patterns([a, a], [0.5, 0.5])


def test_coarse_grained_detector_gives_disjoint_mixture():
    """
    The detector {K_l^dagger M^l_w K_l} responds to rho like the
    disjoint-outcome mixture of the branch responses on permuted phases,
    and the guessing bias is affine over that mixture.
    """
    rho = random_density(3, 3, 21)
    channel = random_sio(3, 3, 22)
    branches = apply_sio(rho, channel)
    assert len(branches) == 3
    povms = [Povm.fourier(3), Povm.computational(3), Povm.fourier(3)]
    grid = PhaseGrid.guessing(3, alpha0=PhaseVector([0.3, 0.1, 0.0]))

    big = sample_pattern(rho, theorem_one_measurement(channel, povms), grid)

    parts, weights, expected = [], [], 0.0
    for lam, ((q, out), (perm, _), povm) in enumerate(zip(branches, channel.kraus, povms)):
        table = sample_pattern(out, povm, grid.permuted(perm)).table
        part = PatternGrid(grid, tuple((lam, w) for w in povm.outcomes), table)
        parts.append(part)
        weights.append(q)
        expected += q * v_guess_on_pattern(part, best_assignment(part))

    mixture = mix_patterns(parts, weights)
    assert np.allclose(big.table, mixture.table, atol=1e-10)

    union = {}
    for part in parts:
        union.update(best_assignment(part))
    assert v_guess_on_pattern(mixture, union) == pytest.approx(expected, abs=1e-10)
