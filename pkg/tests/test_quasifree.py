import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from dho_dilation import quasifree as qf
from dho_dilation.errors import InvalidArgument, ResourceLimit


def random_hermitian(rng, d, scale=1.0):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (A + A.conj().T)


def random_density(rng, d):
    W = unitary_group.rvs(d, random_state=rng)
    return (W * rng.uniform(0, 1, size=d)) @ W.conj().T


def cvec(rng, d):
    return rng.normal(size=d) + 1j * rng.normal(size=d)


def test_infinite_temperature_limit():
    assert np.allclose(qf.kms_R(np.zeros((2, 2)), 1.0).R, 0.5 * np.eye(2), atol=1e-15)


def test_two_level_thermal_density():
    R = qf.kms_R(np.diag([1.0, -1.0]), math.log(2)).R
    assert np.allclose(R, np.diag([2 / 3, 1 / 3]), atol=1e-15)


def test_low_temperature_is_a_projection():
    R = qf.kms_R(np.diag([1.0, -1.0]), 50.0).R
    assert R[1, 1] < 1e-20
    assert np.allclose(R, np.diag([1.0, 0.0]), atol=1e-15)


def test_kms_R_matches_matrix_functions(rng):
    H = random_hermitian(rng, 4)
    beta = 0.8
    E = scipy.linalg.expm(-beta * H)
    oracle = np.linalg.inv(np.eye(4) + E)
    assert np.abs(qf.kms_R(H, beta).R - oracle).max() < 1e-13


@pytest.mark.parametrize("beta", [0.0, -1.0])
def test_kms_R_rejects_nonpositive_beta(beta):
    with pytest.raises(InvalidArgument):
        qf.kms_R(np.eye(2), beta)


def test_kms_R_rejects_non_hermitian():
    with pytest.raises(InvalidArgument):
        qf.kms_R(np.array([[0, 1], [0, 0]]), 1.0)


@pytest.mark.parametrize("R", [np.diag([1.2, 0.5]), np.diag([-0.1, 0.5]), np.ones((2, 3))])
def test_quasifree_state_validation(R):
    with pytest.raises(InvalidArgument):
        qf.quasifree_state(R)


def test_dilation_of_pure_states():
    V = qf.dilate_state(qf.quasifree_state(np.zeros((2, 2)))).V
    assert np.array_equal(V, np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]))
    V = qf.dilate_state(qf.quasifree_state(np.eye(2))).V
    assert np.array_equal(V, np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]]))


def test_dilation_blocks_and_unitarity(rng):
    st_ = qf.quasifree_state(random_density(rng, 3))
    sd = qf.dilate_state(st_)
    assert np.abs(sd.V.conj().T @ sd.V - np.eye(6)).max() < 1e-12
    assert np.abs(sd.V - sd.V.conj().T).max() < 1e-12
    top = sd.V[:3, :3]
    assert np.abs(top @ top - st_.R).max() < 1e-12
    assert np.abs(sd.a_V + sd.b_V - sd.V).max() < 1e-15
    assert np.abs(sd.a_V @ sd.Jt - sd.Jt @ sd.a_V).max() < 1e-15
    assert np.abs(sd.b_V @ sd.Jt + sd.Jt @ sd.b_V).max() < 1e-15


def test_dilation_reproduces_two_point_function(rng):
    st_ = qf.quasifree_state(random_density(rng, 2))
    sd = qf.dilate_state(st_)
    m, n = cvec(rng, 2), cvec(rng, 2)
    # <V^* j m, P V^* j n> with P the projection on the second summand
    vm = sd.V.conj().T @ np.r_[m, 0, 0]
    vn = sd.V.conj().T @ np.r_[n, 0, 0]
    assert abs(np.vdot(vm[:2], vn[:2]) - qf.two_point_direct(st_, m, n)) < 1e-12


def test_half_filled_two_point():
    st_ = qf.quasifree_state(0.5 * np.eye(1))
    assert qf.two_point_direct(st_, [1.0], [1.0]) == 0.5
    assert abs(qf.two_point_via_fock(st_, [1.0], [1.0]) - 0.5) < 1e-12


def test_two_point_examples(rng):
    st_ = qf.quasifree_state(np.diag([0.2, 0.7]))
    assert qf.two_point_direct(st_, [1, 0], [1, 0]) == pytest.approx(0.2)
    assert qf.two_point_direct(st_, [1, 0], [0, 1]) == 0
    assert qf.pair_expectation(st_, cvec(rng, 2), cvec(rng, 2)) == 0


def test_two_point_vector_length_checked():
    with pytest.raises(InvalidArgument):
        qf.two_point_direct(qf.quasifree_state(np.eye(2)), [1.0], [1.0, 0.0])


def test_fock_route_limited():
    with pytest.raises(ResourceLimit):
        qf.two_point_via_fock(qf.quasifree_state(0.5 * np.eye(7)), np.ones(7), np.ones(7))


def test_fock_route_matches_direct(rng):
    for _ in range(20):
        st_ = qf.quasifree_state(random_density(rng, 2))
        m, n = cvec(rng, 2), cvec(rng, 2)
        assert abs(qf.two_point_via_fock(st_, m, n) - qf.two_point_direct(st_, m, n)) < 1e-10


def test_fock_route_three_modes(rng):
    st_ = qf.kms_R(random_hermitian(rng, 3), 1.3)
    m, n = cvec(rng, 3), cvec(rng, 3)
    assert abs(qf.two_point_via_fock(st_, m, n) - qf.two_point_direct(st_, m, n)) < 1e-10


def test_realified_dilation_is_orthogonal(rng):
    sd = qf.dilate_state(qf.quasifree_state(random_density(rng, 2)))
    sp = qf.doubled_one_particle_space(2)
    pair = qf.realified_pair(sd, sp)
    U = pair.a + pair.b
    assert np.abs(U.T @ U - np.eye(8)).max() < 1e-12


def test_kms_trivial_hamiltonian():
    assert qf.kms_two_point_check(np.zeros((1, 1)), 1.0, [1.0], [1.0]) < 1e-15


def test_kms_diagonal_example():
    H = np.diag([1.0, -1.0])
    assert qf.kms_two_point_check(H, math.log(2), [1, 0], [1, 0]) < 1e-14
    assert qf.kms_two_point_check(H, math.log(2), [1, 1j], [0.5, -2]) < 1e-14


def test_kms_rejects_wrong_state():
    H = np.diag([1.0, -1.0])
    residual = qf.kms_two_point_check(H, 1.0, [1, 0], [1, 0], R=0.5 * np.eye(2))
    assert residual > 0.1


def test_reversed_convention_pairs_with_flipped_hamiltonian(rng):
    H = random_hermitian(rng, 3)
    m, n = cvec(rng, 3), cvec(rng, 3)
    beta = 0.9
    R_flip = qf.kms_R(-H, beta).R
    assert qf.kms_two_point_check(H, beta, m, n, R=R_flip, convention="reversed") < 1e-12
    assert qf.kms_two_point_check(H, beta, m, n, convention="reversed") > 1e-3


def test_kms_unknown_convention():
    with pytest.raises(InvalidArgument):
        qf.kms_two_point_check(np.eye(1), 1.0, [1.0], [1.0], convention="schrodinger")


def test_evolved_pairing_real_time(rng):
    H = random_hermitian(rng, 3)
    m, x = cvec(rng, 3), cvec(rng, 3)
    t = 0.7
    direct = np.vdot(scipy.linalg.expm(1j * H * t) @ m, x)
    assert abs(qf.evolved_pairing(H, m, x, t) - direct) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 5.0), st.integers(1, 4))
def test_kms_property(seed, beta, d):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, d)
    m, n = cvec(rng, d), cvec(rng, d)
    scale = max(1.0, np.linalg.norm(m) * np.linalg.norm(n))
    assert qf.kms_two_point_check(H, beta, m, n) < 1e-11 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 20.0))
def test_thermal_density_properties(seed, beta):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, 3)
    R = qf.kms_R(H, beta).R
    w = np.linalg.eigvalsh(R)
    assert w.min() >= -1e-12 and w.max() <= 1 + 1e-12
    assert np.abs(R @ H - H @ R).max() < 1e-10
    # occupation is monotone increasing in the energy for this sign convention
    h, W = np.linalg.eigh(H)
    occ = np.real(np.einsum("ij,jk,ki->i", W.conj().T, R, W))
    assert np.all(np.diff(occ) >= -1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_top_left_block_recovers_root(seed):
    rng = np.random.default_rng(seed)
    R = random_density(rng, 3)
    top = qf.dilate_state(qf.quasifree_state(R)).V[:3, :3]
    assert np.abs(top - scipy.linalg.sqrtm(R)).max() < 1e-8
