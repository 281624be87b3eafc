import math

import numpy as np
import pytest

import certiq


def test_qcnn_shape():
    q = certiq.build_qcnn(4)
    assert q.param_count == 49
    assert q.readout_qubits == [1, 3]
    assert q.class_count == 4


def test_zero_theta_reads_basis_state():
    q = certiq.build_qcnn(4)
    state = np.zeros(16, dtype=complex)
    state[0b1100] = 1.0
    probs = certiq.classifier_eval(q, state, [0.0] * q.param_count)
    assert probs == pytest.approx([0, 0, 1, 0], abs=1e-12)


def test_ground_state_matches_numpy():
    n, j1, j2 = 4, 0.7, -1.3
    energy, psi, residual = certiq.ground_state(n, j1, j2)
    X = np.array([[0, 1], [1, 0]], dtype=float)
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)

    def op(factors):
        m = np.array([[1.0]])
        for q in range(n):
            m = np.kron(m, factors.get(q, I))
        return m

    H = sum(
        op({j: Z})
        + j1 * op({j: X, (j + 1) % n: X})
        - j2 * op({(j - 1) % n: X, j: Z, (j + 1) % n: X})
        for j in range(n)
    )
    assert energy == pytest.approx(np.linalg.eigvalsh(H)[0], abs=1e-9)
    assert np.linalg.norm(H @ psi - energy * psi) < 1e-8
    assert residual < 1e-8


def test_stats_helpers():
    assert certiq.clopper_pearson_lower(100, 100, 0.01) == pytest.approx(0.01 ** 0.01, abs=1e-9)
    assert certiq.certified_radius(0.5, 0.5) == 0.0
    assert certiq.certified_volume([1.0, 1.0, 1.0], 1.0) == pytest.approx(4 * math.pi / 3)
    assert sum(certiq.rank_utilities(10)) == pytest.approx(0.0, abs=1e-12)


def test_short_train_and_certify_are_deterministic():
    q = certiq.build_qcnn(4)
    train, test = certiq.gen_split(4, seed=3, n_train=10, n_test=4)
    assert len(train) == 10 and len(test) == 4
    assert {row["label"] for row in train} <= {0, 1, 2, 3}
    theta, sigma = certiq.train(q, train, seed=1, iterations=5)
    again = certiq.train(q, train, seed=1, iterations=5)
    assert again == (theta, sigma)
    assert min(sigma) > 0
    r = certiq.certify(q, theta, sigma, test[0]["state"], seed=2, n0=20, n=100)
    assert r.abstained == (r.predicted_class == -1)
    assert len(r.semi_axes) == q.param_count


def test_phase_label_rejects_outside_domain():
    assert certiq.phase_label(0.0, 0.0) == 0
    with pytest.raises(IndexError):
        certiq.phase_label(10.0, 0.0)
