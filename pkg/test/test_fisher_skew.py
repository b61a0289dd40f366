from itertools import product

from src.coherelab.errors import Unsupported
from src.coherelab.measures import (
    c_chernoff_2,
    c_chernoff_inf,
    c_fisher_2,
    c_fisher_inf,
    c_l1,
    chernoff_pair_search,
    fisher_info,
    fisher_quadratic_form,
    skew_quadratic_form,
    wigner_yanase,
)
from src.coherelab.states import DensityMatrix, DiagonalHamiltonian, random_density
from hypothesis import given, settings, strategies as st
import numpy as np
import pytest


def variance(psi, h):
    probs = np.abs(psi) ** 2
    return float(probs @ h ** 2 - (probs @ h) ** 2)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.lists(st.floats(min_value=-3, max_value=3), min_size=3, max_size=3),
)
def test_quadratic_forms_reproduce_functionals(seed, h):
    rho = random_density(3, 1 + seed % 3, seed)
    h = np.asarray(h)
    ham = DiagonalHamiltonian(h)
    assert fisher_info(rho, ham) == pytest.approx(h @ fisher_quadratic_form(rho) @ h, abs=1e-9)
    assert wigner_yanase(rho, ham) == pytest.approx(h @ skew_quadratic_form(rho) @ h, abs=1e-9)


def test_pure_state_normalization():
    """
    On a pure state the Fisher functional is twice the variance of H and
    the skew information equals the variance.
    """
    psi = np.array([0.6, 0.48j, 0.64])
    rho = DensityMatrix.from_vector(psi)
    h = np.array([1.0, -0.5, 0.25])
    ham = DiagonalHamiltonian(h)
    assert fisher_info(rho, ham) == pytest.approx(2 * variance(psi, h), abs=1e-9)
    assert wigner_yanase(rho, ham) == pytest.approx(variance(psi, h), abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_skew_information_brackets_fisher(seed):
    rho = random_density(4, 2 + seed % 3, seed)
    ham = DiagonalHamiltonian(np.random.default_rng(seed).standard_normal(4))
    skew, fisher = wigner_yanase(rho, ham), fisher_info(rho, ham)
    assert skew <= fisher / 2 + 1e-9
    assert fisher / 2 <= 2 * skew + 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_qubit_identities(seed):
    rho = random_density(2, 1 + seed % 2, 60 + seed)
    l1 = c_l1(rho)
    assert c_fisher_2(rho).value == pytest.approx(l1 ** 2, abs=1e-9)
    assert c_fisher_inf(rho).value == pytest.approx(2 * l1 ** 2, abs=1e-9)
    assert c_chernoff_inf(rho).value == pytest.approx(2 * c_chernoff_2(rho).value, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_fisher_inf_matches_ternary_enumeration(seed):
    """
    Allowing h_j = 0 (partial partitions) never beats the full sign
    patterns.
    """
    rho = random_density(3, 1 + seed % 3, 80 + seed)
    brute = max(
        fisher_info(rho, DiagonalHamiltonian(np.array(h)))
        for h in product((1.0, -1.0, 0.0), repeat=3)
    )
    assert c_fisher_inf(rho).value == pytest.approx(brute, abs=1e-10)


def test_fisher_2_is_sphere_maximum():
    rho = random_density(3, 2, 5)
    result = c_fisher_2(rho)
    h = result.witness["h"]
    assert np.linalg.norm(h) == pytest.approx(1.0)
    assert fisher_info(rho, DiagonalHamiltonian(h)) == pytest.approx(result.value, abs=1e-10)

    rng = np.random.default_rng(0)
    for _ in range(2000):
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert fisher_info(rho, DiagonalHamiltonian(v)) <= result.value + 1e-10


def test_chernoff_inf_is_partition_overlap():
    rho = random_density(4, 3, 9)
    result = c_chernoff_inf(rho)
    vals, vecs = np.linalg.eigh(rho.matrix)
    sqrt_rho = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    plus = np.zeros(4)
    plus[result.witness["s_plus"]] = 1.0
    overlap = np.trace(sqrt_rho @ np.diag(plus) @ sqrt_rho @ np.diag(1.0 - plus)).real
    assert result.value == pytest.approx(4 * overlap, abs=1e-10)


@pytest.mark.parametrize("d", [3, 4])
def test_pair_search_is_a_lower_bound(d):
    for seed in range(3):
        rho = random_density(d, 2, 100 + seed)
        result = c_chernoff_2(rho)
        assert result.diagnostics["pair_value"] <= result.value + 1e-10
        assert result.diagnostics["pair_gap"] >= -1e-10
        assert c_chernoff_inf(rho).value / d <= result.value + 1e-10
        assert result.value <= c_chernoff_inf(rho).value + 1e-10


def test_pair_search_is_exact_for_qubits():
    rho = random_density(2, 2, 3)
    value, (j, k, t) = chernoff_pair_search(rho)
    assert value == pytest.approx(c_chernoff_2(rho).value, abs=1e-9)
    assert {j, k} == {0, 1}
    assert t == pytest.approx(0.5, abs=1e-6)


def test_diagonal_states_and_limits():
    diag = DensityMatrix.diagonal([0.25, 0.25, 0.5])
    for fn in (c_fisher_2, c_fisher_inf, c_chernoff_2, c_chernoff_inf):
        assert fn(diag).value == 0.0
    big = DensityMatrix.maximally_coherent(21)
    with pytest.raises(Unsupported):
        c_fisher_inf(big)
    with pytest.raises(Unsupported):
        c_chernoff_inf(big)
