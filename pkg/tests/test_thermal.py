import math

import numpy as np
import pytest

from horizonbound.channel import apply_povm, diagonal_kraus
from horizonbound.errors import TruncationError
from horizonbound.info import von_neumann
from horizonbound.linalg import partial_trace
from horizonbound.thermal import (
    ThermalSpec,
    gibbs_weights,
    hh_state,
    mode_hamiltonian,
    reduce_to_A,
    reduce_to_A_by_trace,
    thermal_entropy,
)

LOG2 = math.log(2.0)


def spec(ratio, n, omega=1.0, mode="relaxed"):
    return ThermalSpec(omega=omega, t_bh=omega / ratio, n_trunc=n, tail_mode=mode)


def test_gibbs_two_levels():
    c, z = gibbs_weights(spec(LOG2, 2))
    np.testing.assert_allclose(c, [2 / 3, 1 / 3], atol=1e-15)
    assert abs(z - 1.5) < 1e-15


def test_gibbs_frozen_ground_state():
    c, _ = gibbs_weights(spec(60.0, 5, mode="faithful"))
    assert abs(c[0] - 1) < 1e-15 and np.all(c[1:] < 1e-25)


def test_gibbs_geometric_partition_sum():
    _, z = gibbs_weights(spec(1.0, 30, mode="faithful"))
    assert abs(z - (1 - math.exp(-30)) / (1 - math.exp(-1))) < 1e-14


def test_spec_validation():
    with pytest.raises(ValueError):
        ThermalSpec(-1.0, 1.0, 3)
    with pytest.raises(ValueError):
        ThermalSpec(1.0, 1.0, 1)
    with pytest.raises(TruncationError):
        ThermalSpec(1.0, 1.0, 4)  # tail e^-4/(1-e^-1) too large for faithful
    with pytest.raises(TruncationError):
        ThermalSpec(1e-13, 1.0, 4, tail_mode="relaxed")
    relaxed = ThermalSpec(1.0, 1.0, 4, tail_mode="relaxed")
    assert abs(relaxed.tail_weight - math.exp(-4) / (1 - math.exp(-1))) < 1e-15


def test_hh_state_amplitudes():
    st = hh_state(spec(LOG2, 2))
    np.testing.assert_allclose(st.amplitudes, [math.sqrt(2 / 3), 0, 0, math.sqrt(1 / 3)], atol=1e-15)
    assert abs(np.linalg.norm(st.amplitudes) - 1) < 1e-12
    cold = hh_state(spec(60.0, 3, mode="faithful"))
    np.testing.assert_allclose(cold.amplitudes, np.eye(9)[0], atol=1e-13)


@pytest.mark.parametrize("ratio,n", [(0.3, 6), (1.0, 4), (LOG2, 2), (2.5, 8)])
def test_schmidt_coefficients(ratio, n):
    st = hh_state(spec(ratio, n))
    sv = np.linalg.svd(st.amplitudes.reshape(n, n), compute_uv=False)
    np.testing.assert_allclose(np.sort(sv), np.sort(np.sqrt(st.weights)), atol=1e-12)


@pytest.mark.parametrize("ratio,n", [(0.3, 6), (1.0, 4), (LOG2, 2), (2.5, 8)])
def test_reduction_matches_partial_trace(ratio, n):
    st = hh_state(spec(ratio, n))
    np.testing.assert_allclose(reduce_to_A(st), reduce_to_A_by_trace(st), atol=1e-12)
    np.testing.assert_allclose(reduce_to_A(st), np.diag(gibbs_weights(st.spec)[0]), atol=1e-12)
    rho_b = partial_trace(st.projector(), [n, n], keep=[0])
    assert abs(von_neumann(rho_b) - von_neumann(reduce_to_A(st))) < 1e-10
    assert von_neumann(st.projector()) <= 1e-9


def test_reduced_state_examples():
    np.testing.assert_allclose(reduce_to_A(hh_state(spec(LOG2, 2))), np.diag([2 / 3, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(reduce_to_A(hh_state(spec(60.0, 3, mode="faithful"))), np.diag([1, 0, 0]),
                               atol=1e-15)


@pytest.mark.parametrize("ratio,n", [(0.3, 6), (1.0, 30), (LOG2, 2), (2.5, 8)])
def test_entropy_matches_closed_form(ratio, n):
    s = spec(ratio, n)
    assert abs(von_neumann(reduce_to_A(hh_state(s))) - thermal_entropy(s)) < 1e-12


def test_entropy_increases_with_temperature():
    temps = np.linspace(0.2, 5.0, 20)
    ent = [von_neumann(reduce_to_A(hh_state(ThermalSpec(1.0, t, 6, "relaxed")))) for t in temps]
    assert np.all(np.diff(ent) > 0)


def test_mode_hamiltonian_and_energy():
    np.testing.assert_array_equal(mode_hamiltonian(ThermalSpec(1.0, 1.0 / 60, 3)), np.diag([0, 1, 2]))
    omega = 0.7
    s = ThermalSpec(omega, omega / LOG2, 2, "relaxed")
    h = mode_hamiltonian(s)
    assert abs(np.trace(h @ reduce_to_A(hh_state(s))).real - omega / 3) < 1e-15


def test_energy_conserved_by_diagonal_kraus():
    s = spec(0.8, 5, omega=1.3)
    rho = reduce_to_A(hh_state(s))
    h = mode_hamiltonian(s)
    k = diagonal_kraus(5, 3, np.random.default_rng(0))
    out = apply_povm(rho, k)
    e_after = sum(p * np.trace(h @ r).real for p, r in zip(out.probs, out.states))
    assert abs(e_after - np.trace(h @ rho).real) < 1e-12
