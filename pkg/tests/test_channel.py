import math

import numpy as np
import pytest

from horizonbound.channel import (
    DropPlan,
    apply_povm,
    diagonal_kraus,
    dilate,
    drop_state,
    joint_post_state,
    matter_entropy_closed_form,
    random_kraus,
    validate_kraus,
)
from horizonbound.errors import CompletenessError, DimensionError
from horizonbound.info import von_neumann
from horizonbound.linalg import haar_unitary, partial_trace, unitarity_residual, validate_density
from horizonbound.thermal import ThermalSpec, hh_state, reduce_to_A

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def thermal(ratio, n):
    return hh_state(ThermalSpec(1.0, 1.0 / ratio, n, "relaxed"))


def rand_density(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def full_matrix_entropy(m):
    """Oracle: spectrum of the whole joint matrix, no block structure used."""
    w = np.linalg.eigvalsh(m)
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log(w)))


def test_validate_kraus():
    validate_kraus([np.eye(3)])
    validate_kraus([P0, P1])
    with pytest.raises(CompletenessError) as err:
        validate_kraus([np.eye(2), np.eye(2)])
    assert abs(err.value.residual - 1.0) < 1e-15
    with pytest.raises(DimensionError):
        validate_kraus([np.eye(2), np.eye(3)])


def test_apply_povm_identity_channel():
    rho = rand_density(np.random.default_rng(0), 3)
    out = apply_povm(rho, validate_kraus([np.eye(3)]))
    np.testing.assert_allclose(out.probs, [1.0])
    np.testing.assert_allclose(out.states[0], rho, atol=1e-15)


def test_apply_povm_projective_on_thermal_qubit():
    out = apply_povm(np.diag([2 / 3, 1 / 3]), validate_kraus([P0, P1]))
    np.testing.assert_allclose(out.probs, [2 / 3, 1 / 3], atol=1e-15)
    np.testing.assert_allclose(out.states[0], P0, atol=1e-15)
    np.testing.assert_allclose(out.states[1], P1, atol=1e-15)


def test_apply_povm_random_consistency():
    rng = np.random.default_rng(1)
    for _ in range(20):
        rho = rand_density(rng, 3)
        k = random_kraus(3, 2, rng)
        out = apply_povm(rho, k)
        assert abs(out.probs.sum() - 1) < 1e-10 and np.all(out.probs >= 0)
        for a, op in enumerate(k.operators):
            np.testing.assert_allclose(out.probs[a] * out.states[a], op @ rho @ op.conj().T, atol=1e-12)
        validate_density(sum(p * s for p, s in zip(out.probs, out.states)))


def test_apply_povm_null_branch():
    out = apply_povm(np.diag([1.0, 0.0]), validate_kraus([P0, P1]))
    assert out.null.tolist() == [False, True]
    np.testing.assert_array_equal(out.states[1], np.zeros((2, 2)))


def test_apply_povm_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_povm(np.eye(3) / 3, validate_kraus([P0, P1]))


def test_random_kraus_properties():
    for d, k in [(1, 1), (2, 1), (3, 2), (6, 4), (8, 6)]:
        ks = random_kraus(d, k, np.random.default_rng(d * 10 + k))
        assert ks.completeness_residual() <= 1e-12
        assert ks.n_outcomes == k and ks.dim == d
    single = random_kraus(4, 1, np.random.default_rng(3))
    assert unitarity_residual(single.operators[0]) <= 1e-12
    a = random_kraus(3, 3, np.random.default_rng(11))
    b = random_kraus(3, 3, np.random.default_rng(11))
    for x, y in zip(a.operators, b.operators):
        assert x.tobytes() == y.tobytes()


def test_dilate_single_unitary():
    u = haar_unitary(3, np.random.default_rng(4))
    dil = dilate(validate_kraus([u]))
    np.testing.assert_allclose(dil.unitary, u, atol=1e-15)


def test_dilate_projective_qubit_is_controlled_copy():
    dil = dilate(validate_kraus([P0, P1]))
    u = dil.unitary
    # |i>|Phi_0> -> |i>|Phi_i>
    for i in range(2):
        ket = np.zeros(4)
        ket[2 * i] = 1
        expect = np.zeros(4)
        expect[2 * i + i] = 1
        np.testing.assert_allclose(u @ ket, expect, atol=1e-15)
    np.testing.assert_allclose(dil.block(0), P0, atol=1e-15)
    np.testing.assert_allclose(dil.block(1), P1, atol=1e-15)
    assert unitarity_residual(u) <= 1e-12


def test_dilate_random_extraction_and_unitarity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        k = random_kraus(4, 3, rng)
        dil = dilate(k)
        assert dil.extraction_error(k) <= 1e-12
        assert unitarity_residual(dil.unitary) <= 1e-12


def test_dilate_is_deterministic_and_acts_as_channel():
    rng = np.random.default_rng(6)
    k = random_kraus(3, 2, rng)
    u1, u2 = dilate(k).unitary, dilate(k).unitary
    assert u1.tobytes() == u2.tobytes()
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    out = u1 @ np.kron(v, [1, 0])
    expected = sum(np.kron(op @ v, np.eye(2)[a]) for a, op in enumerate(k.operators))
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_joint_post_state_identity_channel():
    st = thermal(0.9, 3)
    _, reduced = joint_post_state(st, validate_kraus([np.eye(3)]))
    np.testing.assert_allclose(reduced, reduce_to_A(st), atol=1e-12)


def test_joint_post_state_projective_blocks():
    st = thermal(math.log(2), 2)
    _, reduced = joint_post_state(st, validate_kraus([P0, P1]))
    expect = np.kron(2 / 3 * P0, P0) + np.kron(1 / 3 * P1, P1)
    np.testing.assert_allclose(reduced, expect, atol=1e-12)


def test_joint_post_state_matches_channel():
    rng = np.random.default_rng(7)
    for n, kk in [(2, 2), (3, 3), (4, 2), (5, 4)]:
        st = thermal(rng.uniform(0.3, 3), n)
        k = random_kraus(n, kk, rng)
        full, reduced = joint_post_state(st, k)
        validate_density(full)
        validate_density(reduced)
        rho_a = reduce_to_A(st)
        np.testing.assert_allclose(partial_trace(reduced, [n, kk], keep=[0]), k.apply(rho_a), atol=1e-12)
        np.testing.assert_allclose(partial_trace(reduced, [n, kk], keep=[0]), apply_povm(rho_a, k).average,
                                   atol=1e-12)
        # detector-diagonal
        blocks = reduced.reshape(n, kk, n, kk)
        for a in range(kk):
            for b in range(kk):
                if a != b:
                    assert np.max(np.abs(blocks[:, a, :, b])) == 0.0


def test_drop_empty_reduces_to_joint_post_state():
    rng = np.random.default_rng(8)
    st = thermal(1.1, 4)
    k = random_kraus(4, 3, rng)
    out = drop_state(st, k, DropPlan())
    _, reduced = joint_post_state(st, k)
    assert out.p_drop == 0 and out.detector_state is None
    np.testing.assert_allclose(out.joint, reduced, atol=1e-12)


def test_drop_all_is_product():
    rng = np.random.default_rng(9)
    st = thermal(0.7, 3)
    k = random_kraus(3, 3, rng)
    out = drop_state(st, k, DropPlan(frozenset({0, 1, 2})))
    rho_avg = apply_povm(reduce_to_A(st), k).average
    rho_d = np.diag(out.probs).astype(complex)
    np.testing.assert_allclose(out.detector_state, rho_d, atol=1e-12)
    np.testing.assert_allclose(out.joint, np.kron(rho_avg, rho_d), atol=1e-12)
    assert abs(out.p_drop - 1) < 1e-12


def test_drop_invariants_and_washout():
    rng = np.random.default_rng(10)
    for _ in range(25):
        n, kk = int(rng.integers(2, 6)), int(rng.integers(1, 5))
        st = thermal(rng.uniform(0.3, 3), n)
        k = random_kraus(n, kk, rng)
        ds = frozenset(int(a) for a in np.flatnonzero(rng.random(kk) < 0.5))
        plain = drop_state(st, k, DropPlan(ds))
        inside = {a: haar_unitary(n, rng) for a in ds}
        twisted = drop_state(st, k, DropPlan(ds, inside))
        assert np.max(np.abs(plain.joint - twisted.joint)) <= 1e-12
        assert abs(np.trace(plain.joint).real - 1) <= 1e-10
        assert abs(plain.p_drop - sum(plain.probs[a] for a in ds)) <= 1e-12
        for a, ph in plain.normalized_probs.items():
            assert abs(ph - plain.probs[a] / plain.p_drop) <= 1e-15
        validate_density(plain.joint)


def test_drop_plan_errors():
    st = thermal(1.0, 2)
    k = validate_kraus([P0, P1])
    with pytest.raises(ValueError):
        drop_state(st, k, DropPlan(frozenset({2})))
    with pytest.raises(DimensionError):
        drop_state(st, k, DropPlan(frozenset({0}), {0: np.eye(3)}))
    with pytest.raises(ValueError):
        drop_state(st, k, DropPlan(frozenset({0}), {0: 2 * np.eye(2)}))
    with pytest.raises(ValueError, match="inside horizon"):
        drop_state(st, k, DropPlan(frozenset({0}), detector_radius=1.5), mass=1.0)
    with pytest.raises(DimensionError):
        drop_state(thermal(1.0, 3), k, DropPlan())


def test_matter_entropy_no_drop_form():
    rng = np.random.default_rng(11)
    st = thermal(0.8, 4)
    k = random_kraus(4, 3, rng)
    out = drop_state(st, k, DropPlan())
    expected = sum(p * von_neumann(s) - p * math.log(p) for p, s in zip(out.probs, out.states))
    assert abs(matter_entropy_closed_form(out) - expected) < 1e-12


def test_matter_entropy_single_outcome_drop():
    st = thermal(0.6, 4)
    out = drop_state(st, validate_kraus([np.eye(4)]), DropPlan(frozenset({0})))
    assert abs(matter_entropy_closed_form(out) - von_neumann(reduce_to_A(st))) < 1e-12


def test_matter_entropy_matches_full_spectrum():
    rng = np.random.default_rng(12)
    for _ in range(60):
        n, kk = int(rng.integers(2, 7)), int(rng.integers(1, 5))
        st = thermal(rng.uniform(0.3, 3), n)
        k = random_kraus(n, kk, rng)
        ds = frozenset(int(a) for a in np.flatnonzero(rng.random(kk) < 0.5))
        out = drop_state(st, k, DropPlan(ds))
        assert abs(matter_entropy_closed_form(out) - full_matrix_entropy(out.joint)) < 1e-9


def test_matter_entropy_with_null_branches():
    st = thermal(1.0, 3)
    k = diagonal_kraus(3, 3, np.random.default_rng(0), projective=True)
    zero = validate_kraus(list(k.operators) + [np.zeros((3, 3))])
    out = drop_state(st, zero, DropPlan(frozenset({0, 3})))
    assert out.null[3]
    assert abs(matter_entropy_closed_form(out) - full_matrix_entropy(out.joint)) < 1e-9


def test_diagonal_kraus():
    rng = np.random.default_rng(13)
    k = diagonal_kraus(5, 3, rng)
    assert k.completeness_residual() < 1e-12
    proj = diagonal_kraus(5, 3, rng, projective=True)
    for op in proj.operators:
        mag = np.abs(np.diag(op))
        assert set(np.round(mag, 12)) <= {0.0, 1.0} and mag.sum() > 0.5
    with pytest.raises(ValueError):
        diagonal_kraus(2, 3, rng, projective=True)
