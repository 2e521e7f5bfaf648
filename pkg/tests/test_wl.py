import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hcmslp.constellation import SymbolClass, build_hcm, build_qam
from hcmslp.errors import SingularMatrixError
from hcmslp.wl import build_permutation, from_wl_vec, pinv_and_projector, wl_mat, wl_system, wl_vec

from conftest import cgauss

HCM16 = build_hcm(16)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_examples():
    assert np.array_equal(wl_vec(1j), [0.0, 1.0])
    assert np.array_equal(wl_mat([[1j]]), [[0.0, -1.0], [1.0, 0.0]])


@given(arrays(float, (3, 4), elements=finite), arrays(float, (3, 4), elements=finite),
       arrays(float, 4, elements=finite), arrays(float, 4, elements=finite))
def test_wl_matches_complex_product(ar, ai, br, bi):
    A, b = ar + 1j * ai, br + 1j * bi
    scale = 1 + np.abs(A).sum() * np.abs(b).max()
    assert np.max(np.abs(wl_mat(A) @ wl_vec(b) - wl_vec(A @ b))) < 1e-12 * scale


def test_from_wl_inverse(rng):
    a = cgauss(rng, 7)
    assert np.array_equal(from_wl_vec(wl_vec(a)), a)


def test_permutation_all_qam():
    s = HCM16.indices(SymbolClass.A1_QAM)[:3]
    pf, pv, rb2, sf = build_permutation(HCM16, s)
    assert pv.size == 0 and rb2.size == 0
    assert sorted(pf.tolist()) == list(range(6))
    assert np.array_equal(sf, wl_vec(HCM16.values[s]))


def test_permutation_two_users():
    s = [HCM16.indices(SymbolClass.A2_ASK_CENTRAL)[0], HCM16.indices(SymbolClass.A3_ASK_SIDE)[0]]
    pf, pv, rb2, sf = build_permutation(HCM16, s)
    assert pf.tolist() == [0, 1]
    assert pv.tolist() == [2, 3]
    assert rb2.tolist() == [2]
    assert np.array_equal(sf, HCM16.values[s].real)


def test_permutation_single_a2_fixed_value():
    idx = next(i for i in HCM16.indices(SymbolClass.A2_ASK_CENTRAL) if HCM16.values[i].real == 3)
    assert build_permutation(HCM16, [idx])[3].tolist() == [3.0]


@given(st.lists(st.integers(0, 63), min_size=1, max_size=12))
def test_permutation_partitions_rows(s):
    c = build_hcm(64)
    s = np.array(s)
    pf, pv, rb2, sf = build_permutation(c, s)
    K = s.size
    assert sorted(np.concatenate([pf, pv]).tolist()) == list(range(2 * K))
    n_var = np.count_nonzero(c.class_codes[s] != 1)
    assert pf.size == 2 * K - n_var
    assert set(rb2.tolist()) <= set(pv.tolist())
    assert rb2.size == np.count_nonzero(c.class_codes[s] == 2)
    assert sf.size == pf.size


def test_wl_system_properties(rng):
    s = rng.integers(0, 16, 4)
    H = cgauss(rng, 4, 8)
    ws = wl_system(H, HCM16, s)
    assert ws.H_T_wl.shape == (8, 16)
    assert np.array_equal(ws.H_fixed, wl_mat(H)[ws.perm_fixed])
    assert ws.H_b2.shape == (ws.n_b2, 16)


def test_pinv_axis_aligned():
    pinv, P = pinv_and_projector([[1.0, 0.0]])
    assert np.allclose(pinv, [[1.0], [0.0]])
    assert np.allclose(P, np.diag([0.0, 1.0]))


def test_pinv_square_and_empty(rng):
    _, P = pinv_and_projector(rng.standard_normal((4, 4)))
    assert np.max(np.abs(P)) < 1e-10
    pinv, P = pinv_and_projector(np.zeros((0, 3)))
    assert pinv.shape == (3, 0) and np.array_equal(P, np.eye(3))


def test_pinv_random_identities(rng):
    for _ in range(20):
        H = rng.standard_normal((3, 8))
        pinv, P = pinv_and_projector(H)
        assert np.linalg.norm(P @ P - P) < 1e-10
        assert np.linalg.norm(H @ P) < 1e-10
        assert np.linalg.norm(P - P.T) == 0
        assert np.allclose(H @ pinv, np.eye(3), atol=1e-10)


def test_pinv_rank_deficient():
    with pytest.raises(SingularMatrixError):
        pinv_and_projector([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
    with pytest.raises(SingularMatrixError):
        pinv_and_projector(np.ones((3, 2)))


def test_qam_has_no_variable_rows():
    c = build_qam(16)
    pf, pv, _, _ = build_permutation(c, np.arange(16))
    assert pv.size == 0 and pf.size == 32
