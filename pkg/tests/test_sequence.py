import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIGNATURES, maxdiff
from jpotapov import (
    Classification,
    DimensionMismatch,
    NotContractive,
    NotPotapov,
    PotapovSeq,
    SignatureMatrix,
    ball_parameters,
    ball_parameters_block,
    block_toeplitz,
    classify,
    classify_block,
    defect_matrices,
    extend_central,
    extend_with_parameter,
    pg_transform_seq,
    random_contraction,
    random_degenerate_seq,
    random_strict_seq,
    schur_parameter,
)


def scalar(J, *a):
    return PotapovSeq(np.array([[J]], float), [np.array([[x]], complex) for x in a])


def strict_corpus(count, n_max=4, seed0=0):
    names = sorted(SIGNATURES)
    for i in range(count):
        J = SIGNATURES[names[i % len(names)]]
        yield random_strict_seq(len(J), J, i % (n_max + 1), seed0 + i)


def test_block_toeplitz_layout(rng):
    assert np.array_equal(block_toeplitz(scalar(1, 0.3)), [[0.3]])
    assert np.array_equal(block_toeplitz(scalar(1, 0, 1)), [[0, 0], [1, 0]])
    seq = random_strict_seq(2, np.diag([1.0, -1.0]), 3, seed=4)
    S = block_toeplitz(seq)
    assert np.array_equal(S[2:4, 0:2], seq[1])
    assert np.array_equal(S[6:8, 2:4], seq[2])
    assert np.array_equal(S[0:2, 2:8], np.zeros((2, 6)))


def test_defect_matrices_examples():
    assert defect_matrices(scalar(1, 0)) == ([[1]], [[1]])
    P, Q = defect_matrices(scalar(-1, 2))
    assert P[0, 0] == Q[0, 0] == 3


def test_defects_of_strict_sequences_are_positive():
    for seq in strict_corpus(30):
        for D in defect_matrices(seq):
            assert maxdiff(D, D.conj().T) == 0
            assert np.linalg.eigvalsh(D)[0] > 0


@pytest.mark.parametrize("J, a0, M, L", [(1, 0.5, 0, 0.75), (1, 1, 0, 0), (-1, 2, 0, 3)])
def test_ball_parameters_scalar(J, a0, M, L):
    b = ball_parameters(scalar(J, a0))
    assert b.M[0, 0] == pytest.approx(M, abs=1e-15)
    assert b.L[0, 0] == pytest.approx(L, abs=1e-14)
    assert b.R[0, 0] == pytest.approx(L, abs=1e-14)


def test_identity_has_zero_radii(J):
    b = ball_parameters(PotapovSeq(J, [np.eye(len(J))]))
    assert maxdiff(b.L, 0) == maxdiff(b.R, 0) == 0


def test_recursion_agrees_with_block_formulas():
    # the block pseudoinverse formulas are the independent oracle
    for seq in strict_corpus(36):
        b, o = seq.ball, ball_parameters_block(seq)
        assert maxdiff(b.M, o.M) <= 1e-10
        assert maxdiff(b.L, o.L) <= 1e-10
        assert maxdiff(b.R, o.R) <= 1e-10
    for i in range(20):
        seq = random_degenerate_seq(2, np.diag([1.0, -1.0]), 2, seed=i, kind=("boundary", "defect")[i % 2])
        b, o = seq.ball, ball_parameters_block(seq)
        assert maxdiff(b.L, o.L) <= 1e-10 and maxdiff(b.M, o.M) <= 1e-10


def test_classify_examples(J):
    assert classify(scalar(1, 0, 0.5)) is Classification.STRICT
    assert classify(PotapovSeq(J, [np.eye(len(J))])) is Classification.DEGENERATE
    assert classify(scalar(1, 2)) is Classification.INVALID


def test_classification_agrees_with_block_test():
    for seq in strict_corpus(30):
        assert classify(seq) is classify_block(seq) is Classification.STRICT
    for i in range(20):
        seq = random_degenerate_seq(2, np.eye(2), 3, seed=i, kind=("boundary", "defect")[i % 2])
        assert classify(seq) is classify_block(seq) is Classification.DEGENERATE


def test_extend_central_examples(J):
    assert [a[0, 0] for a in extend_central(scalar(1, 0), 3).coeffs] == [0, 0, 0, 0]
    m = len(J)
    ext = extend_central(PotapovSeq(J, [np.eye(m)]), 2)
    assert maxdiff(list(ext.coeffs), [np.eye(m), np.zeros((m, m)), np.zeros((m, m))]) == 0
    assert [a[0, 0] for a in extend_central(scalar(-1, 2), 1).coeffs] == [2, 0]


def test_extend_with_parameter_examples():
    seq = scalar(1, 0.5)
    assert extend_with_parameter(seq, np.zeros((1, 1))).allclose(extend_central(seq, 1), atol=0)
    boundary = extend_with_parameter(scalar(1, 0), [[1.0]])
    assert boundary[1][0, 0] == 1 and boundary.classification is Classification.DEGENERATE
    ext = extend_with_parameter(seq, [[0.5]])
    assert ext[1][0, 0] == pytest.approx(3 / 8, abs=1e-15)
    assert ext.is_strict


def test_extend_with_parameter_rejects_expansive():
    with pytest.raises(NotContractive):
        extend_with_parameter(scalar(1, 0.5), [[1.01]])
    with pytest.raises(DimensionMismatch):
        extend_with_parameter(scalar(1, 0.5), np.eye(2))
    with pytest.raises(NotPotapov):
        extend_with_parameter(scalar(1, 2), [[0.0]])


@pytest.mark.parametrize("norm", [0.5, 0.9, 0.999, 1.0, 1.001, 1.1, 1.5])
def test_extension_is_valid_iff_parameter_contractive(norm, rng):
    seq = random_strict_seq(2, np.diag([1.0, -1.0]), 2, seed=9)
    K = random_contraction(rng, 2, norm)
    A = seq.ball.point(K)
    ext = seq.append(A)
    assert ext.is_potapov == (norm <= 1)
    assert ext.is_strict == (norm < 1)


def test_schur_parameters_are_recovered(rng):
    for name in ("I2", "j11", "-I2"):
        seq = PotapovSeq(SIGNATURES[name], [random_strict_seq(2, SIGNATURES[name], 0, seed=3)[0]])
        Ks = []
        for _ in range(4):
            K = random_contraction(rng, 2, rng.uniform(0, 0.9))
            Ks.append(K)
            seq = extend_with_parameter(seq, K)
        for k, K in enumerate(Ks, start=1):
            assert maxdiff(schur_parameter(seq, k), K) <= 1e-9
            assert maxdiff(seq.schur_parameters[k - 1], K) <= 1e-9


def test_prefixes_are_potapov():
    for i in range(10):
        seq = random_degenerate_seq(2, np.diag([1.0, -1.0]), 4, seed=i)
        for k in range(seq.n + 1):
            assert seq.prefix(k).is_potapov
            assert maxdiff(seq.prefix(k).ball.L, seq.prefix_ball(k).L) <= 1e-12


def test_det_L_equals_det_R():
    for seq in strict_corpus(40):
        dl, dr = np.linalg.det(seq.ball.L), np.linalg.det(seq.ball.R)
        assert abs(dl - dr) <= 1e-8 * abs(dl)


def test_pg_examples():
    seq = random_strict_seq(2, np.eye(2), 3, seed=1)
    assert pg_transform_seq(seq).allclose(seq, atol=0)
    b = pg_transform_seq(scalar(-1, 2))
    assert b[0][0, 0] == pytest.approx(0.5, abs=1e-15)
    assert b.J.is_identity()


def test_pg_is_an_involution_onto_schur_sequences():
    for seq in strict_corpus(100):
        schur = pg_transform_seq(seq)
        assert schur.J.is_identity() and schur.is_strict
        back = pg_transform_seq(schur, seq.J)
        assert maxdiff(list(back.coeffs), list(seq.coeffs)) <= 1e-10


def test_random_generators():
    a = random_strict_seq(2, np.diag([1.0, -1.0]), 3, seed=5)
    b = random_strict_seq(2, np.diag([1.0, -1.0]), 3, seed=5)
    assert a.allclose(b, atol=0)
    central = random_strict_seq(2, np.diag([1.0, -1.0]), 3, seed=5, margin=0)
    assert central.allclose(extend_central(central.prefix(0), 3), atol=1e-12)
    for s in range(100):
        assert random_strict_seq(1 + s % 3, None, s % 5, seed=s).is_strict
    for kind in ("boundary", "defect"):
        assert random_degenerate_seq(2, -np.eye(2), 2, seed=1, kind=kind).classification is Classification.DEGENERATE


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(SIGNATURES)), st.integers(0, 5), st.integers(0, 2**31 - 1))
def test_json_round_trip(name, n, seed):
    seq = random_strict_seq(len(SIGNATURES[name]), SIGNATURES[name], n, seed)
    back = PotapovSeq.from_json(seq.to_json())
    assert back.allclose(seq, atol=0) and back.J == seq.J


def test_bad_input_is_rejected():
    with pytest.raises(DimensionMismatch):
        PotapovSeq(np.eye(2), [np.eye(3)])
    with pytest.raises(ValueError):
        PotapovSeq.from_json({"m": 2, "J": {"diag": [1]}, "A": [[[[0, 0]]]]})
    assert SignatureMatrix([1]).is_identity()
