import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hcmslp.constellation import (
    Region,
    SymbolClass,
    build_hcm,
    build_qam,
    classify,
    detect,
    region_distances,
    to_csv,
)
from hcmslp.errors import ConfigurationError

HCM16, HCM64 = build_hcm(16), build_hcm(64)
QAM16, QAM64 = build_qam(16), build_qam(64)


def index_of(c, value):
    return int(np.flatnonzero(np.isclose(c.values, value))[0])


@pytest.mark.parametrize("c,n1,n2,n3,thr", [(HCM16, 8, 4, 4, 3.0), (HCM64, 48, 8, 8, 7.0)])
def test_hcm_class_counts(c, n1, n2, n3, thr):
    counts = [len(c.indices(k)) for k in SymbolClass]
    assert counts == [n1, n2, n3]
    assert c.order == n1 + n2 + n3
    assert len(c.indices(SymbolClass.A1_QAM)) == c.qam_rows * c.qam_cols
    assert c.ci_threshold == thr == c.qam_rows + 1


@pytest.mark.parametrize("c", [HCM16, HCM64])
def test_hcm_point_invariants(c):
    a1 = c.values[c.indices(SymbolClass.A1_QAM)]
    ask = c.values[c.class_codes != 1]
    assert np.all(a1.imag != 0)
    assert np.all(ask.imag == 0)
    assert len(set(c.values.tolist())) == c.order
    qam_cols = set(a1.real.tolist())
    for i in np.flatnonzero(c.class_codes != 1):
        expected = SymbolClass.A2_ASK_CENTRAL if c.values[i].real in qam_cols else SymbolClass.A3_ASK_SIDE
        assert c.points[i].symbol_class is expected


def test_hcm16_geometry():
    a1 = set(HCM16.values[HCM16.indices(SymbolClass.A1_QAM)].tolist())
    assert a1 == {complex(r, i) for r in (-3, -1, 1, 3) for i in (-1, 1)}
    a2 = sorted(HCM16.values[HCM16.indices(SymbolClass.A2_ASK_CENTRAL)].real)
    a3 = sorted(HCM16.values[HCM16.indices(SymbolClass.A3_ASK_SIDE)].real)
    assert a2 == [-3, -1, 1, 3]
    assert a3 == [-7, -5, 5, 7]


def _fixed_entries_brute(c):
    """Every WL fixed entry of every symbol, by way of classify()."""
    entries = []
    for i in range(c.order):
        _, dec = classify(c, i)
        if dec.region is Region.B1:
            entries += [dec.fixed.real, dec.fixed.imag]
        else:
            entries.append(dec.fixed)
    return np.array(entries)


@pytest.mark.parametrize("c", [HCM16, HCM64, QAM16])
def test_avg_fixed_power_exhaustive(c):
    assert c.avg_fixed_power == np.mean(_fixed_entries_brute(c) ** 2)


def test_avg_fixed_power_hcm16_value():
    # QAM SC: sum re^2 = 40, sum im^2 = 8 over 16 entries; ASK: sum re^2 = 168 over 8
    assert HCM16.avg_fixed_power == 216 / 24


def test_qam_positions():
    for c, n_int, n_edge, n_corner in [(QAM16, 4, 8, 4), (QAM64, 36, 24, 4)]:
        labels = [c.position(i) for i in range(c.order)]
        assert (labels.count("interior"), labels.count("edge"), labels.count("corner")) == (
            n_int, n_edge, n_corner)
    assert set(QAM16.values.tolist()) == {complex(a, b) for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)}


@pytest.mark.parametrize("order", [4, 32, 256])
def test_unsupported_orders(order):
    with pytest.raises(ConfigurationError):
        build_qam(order)
    with pytest.raises(ConfigurationError):
        build_hcm(order)


def test_classify_examples():
    cls, dec = classify(HCM16, index_of(HCM16, 1 + 1j))
    assert cls is SymbolClass.A1_QAM and dec.fixed == 1 + 1j and dec.region is Region.B1
    cls, dec = classify(HCM16, index_of(HCM16, 3))
    assert cls is SymbolClass.A2_ASK_CENTRAL and dec.fixed == 3 and dec.region is Region.B2
    assert dec.threshold == 3
    cls, dec = classify(HCM16, index_of(HCM16, 7))
    assert cls is SymbolClass.A3_ASK_SIDE and dec.fixed == 7 and dec.region is Region.B3
    with pytest.raises(IndexError):
        classify(HCM16, 16)


def test_detect_examples():
    y = 1.1 + 0.9j
    d = region_distances(HCM16, y)
    assert detect(HCM16, y) == index_of(HCM16, 1 + 1j)
    assert d[index_of(HCM16, 1 + 1j)] == pytest.approx(np.hypot(0.1, 0.1))
    assert d[index_of(HCM16, 1)] == pytest.approx(np.hypot(0.1, 2.1))
    assert detect(HCM16, 3 + 5j) == index_of(HCM16, 3)
    assert region_distances(HCM16, 3 + 5j)[index_of(HCM16, 3 + 1j)] == pytest.approx(4.0)
    inner = [index_of(HCM16, v) for v in (-1 + 1j, -1 - 1j, 1 + 1j, 1 - 1j)]
    assert detect(HCM16, 0) == min(inner)
    assert region_distances(HCM16, 0)[index_of(HCM16, 1)] == pytest.approx(np.sqrt(10))


def _sampled_regions(c, step=0.01, zmax=25.0):
    """Dense point samples of each received region (lines truncated to |z| <= zmax)."""
    z = np.arange(0, int(round(zmax / step)) + 1) * step
    thr = c.ci_threshold
    samples = []
    for p in c.points:
        if p.symbol_class is SymbolClass.A1_QAM:
            samples.append(np.array([p.value]))
            continue
        zz = z[z >= thr - 1e-12] if p.symbol_class is SymbolClass.A2_ASK_CENTRAL else z
        zz = np.concatenate([-zz[::-1], zz])
        samples.append(p.value.real + 1j * zz)
    return samples


@pytest.mark.parametrize("c", [HCM16, HCM64])
def test_detect_matches_sampled_oracle(c):
    rng = np.random.default_rng(7)
    span = c.values.real.max() + 2
    y = rng.uniform(-span, span, 10_000) + 1j * rng.uniform(-span, span, 10_000)
    step = 0.01
    samples = _sampled_regions(c, step)
    oracle_d = np.stack([np.min(np.abs(y[:, None] - s[None, :]), axis=1) for s in samples], axis=1)
    ours = detect(c, y)
    srt = np.sort(oracle_d, axis=1)
    # sampling overestimates line distances by at most step / 2
    clear = srt[:, 1] - srt[:, 0] > step
    assert clear.mean() > 0.99
    assert np.array_equal(ours[clear], np.argmin(oracle_d, axis=1)[clear])


@pytest.mark.parametrize("c", [HCM16, HCM64])
def test_region_min_distance(c):
    """Distinct received regions stay at least 2 apart (sampled with integer-aligned grid)."""
    samples = _sampled_regions(c, step=0.05, zmax=12.0)
    best = np.inf
    for i, j in itertools.combinations(range(c.order), 2):
        d = np.min(np.abs(samples[i][:, None] - samples[j][None, :]))
        best = min(best, d)
    assert best == pytest.approx(2.0, abs=1e-9)


@given(st.data())
def test_a2_half_line_always_detected(data):
    c = data.draw(st.sampled_from([HCM16, HCM64]))
    i = data.draw(st.sampled_from(c.indices(SymbolClass.A2_ASK_CENTRAL).tolist()))
    z = data.draw(st.floats(c.ci_threshold, 1e6))
    sign = data.draw(st.sampled_from([-1, 1]))
    assert detect(c, c.values[i].real + 1j * sign * z) == i


@given(st.data())
def test_qam_points_robust_to_small_perturbation(data):
    c = data.draw(st.sampled_from([HCM16, HCM64, QAM16, QAM64]))
    i = data.draw(st.sampled_from(c.indices(SymbolClass.A1_QAM).tolist()))
    r = data.draw(st.floats(0, 0.999))
    phi = data.draw(st.floats(0, 2 * np.pi))
    assert detect(c, c.values[i]) == i
    assert detect(c, c.values[i] + r * np.exp(1j * phi)) == i


def test_detect_vectorized_shape():
    y = np.zeros((3, 5), dtype=complex)
    assert detect(HCM16, y).shape == (3, 5)


def test_csv_export(tmp_path):
    path = tmp_path / "c.csv"
    to_csv(HCM16, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,re,im,class"
    assert len(lines) == 17
    idx, re, im, cls = lines[1 + index_of(HCM16, 7)].split(",")
    assert (float(re), float(im), cls) == (7.0, 0.0, "A3")
