import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import correlate2d

from sadse.designspace import TraversalOrder, single_point
from sadse.netmodel import Activation, LayerSpec, NetworkModel
from sadse.sim import activation, maxpool, reference_layer, simulate_layer

ORDERS = list(TraversalOrder)


def scipy_conv(lay, ifm, filters):
    x = np.pad(ifm, ((0, 0), (lay.pad, lay.pad), (lay.pad, lay.pad)))
    return np.stack([
        sum(correlate2d(x[ch], filters[f, ch], mode="valid") for ch in range(lay.ch))
        for f in range(lay.n_f)
    ])


@st.composite
def instances(draw, max_dim=12, max_ch=6, max_nf=6):
    r_f = draw(st.sampled_from([1, 2, 3]))
    pad = draw(st.integers(0, 1))
    r = draw(st.integers(max(1, r_f - 2 * pad), max_dim))
    c = draw(st.integers(max(1, r_f - 2 * pad), max_dim))
    lay = LayerSpec(1, draw(st.integers(1, max_nf)), r_f, r_f, r, c, draw(st.integers(1, max_ch)),
                    s=draw(st.integers(1, 3)), pad=pad)
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    ifm = rng.integers(-9, 10, size=(lay.ch, lay.r, lay.c))
    w = rng.integers(-9, 10, size=(lay.n_f, lay.ch, r_f, r_f))
    return lay, ifm, w


@settings(max_examples=60, deadline=None)
@given(instances())
def test_reference_matches_scipy(inst):
    lay, ifm, w = inst
    conv = scipy_conv(lay, ifm, w)
    expected = np.stack([maxpool(p, lay.s) for p in conv])
    np.testing.assert_array_equal(reference_layer(lay, ifm, w), expected)


@settings(max_examples=80, deadline=None)
@given(instances(), st.integers(1, 6), st.integers(1, 5), st.integers(1, 5))
def test_simulator_equals_reference(inst, r_t, c_sa, ch_sa):
    lay, ifm, w = inst
    net = NetworkModel((lay,))
    ref = reference_layer(lay, ifm, w)
    macs = lay.n_f * lay.ch * lay.r_f * lay.c_f * lay.d_h * lay.d_v
    for trav in ORDERS:
        res = simulate_layer(lay, single_point(net, r_t, c_sa, ch_sa, trav), ifm, w)
        np.testing.assert_array_equal(res.ofm, ref)
        assert res.counts["macs_executed"] == macs
        assert min(res.counts.values()) >= 0


@settings(max_examples=30, deadline=None)
@given(instances(), st.integers(1, 6), st.integers(-5, 5))
def test_linearity_pre_activation(inst, r_t, k):
    lay, ifm, w = inst
    lay = LayerSpec(1, lay.n_f, lay.r_f, lay.c_f, lay.r, lay.c, lay.ch, 1, lay.pad)
    dp = single_point(NetworkModel((lay,)), r_t, 2, 2)
    base = simulate_layer(lay, dp, ifm, w, apply_activation=False).ofm
    scaled = simulate_layer(lay, dp, k * ifm, w, apply_activation=False).ofm
    np.testing.assert_array_equal(scaled, k * base)


def test_real_valued_data_within_tolerance():
    rng = np.random.default_rng(3)
    lay = LayerSpec(1, 4, 3, 3, 10, 9, 5, s=2, pad=1, activation=Activation("elu", 0.7))
    ifm = rng.normal(size=(5, 10, 9))
    w = rng.normal(size=(4, 5, 3, 3))
    ref = reference_layer(lay, ifm, w)
    for trav in ORDERS:
        res = simulate_layer(lay, single_point(NetworkModel((lay,)), 3, 2, 2, trav), ifm, w)
        np.testing.assert_allclose(res.ofm, ref, rtol=1e-6, atol=1e-12)


def test_trace_lines():
    lay = LayerSpec(1, 4, 3, 3, 6, 6, 2)
    dp = single_point(NetworkModel((lay,)), 3, 2, 2)
    res = simulate_layer(lay, dp, np.ones((2, 6, 6), int), np.ones((4, 2, 3, 3), int), trace=True)
    lines = res.trace_lines()
    assert lines[0] == "ifm_fetch,1,0,-,0,36"
    assert lines[1] == "weight_fetch,1,0,0,0,36"
    kinds = [ln.split(",")[0] for ln in lines]
    assert kinds.count("ifm_fetch") == 2 and kinds.count("ofm_write") == 4
    words = {k: sum(int(ln.split(",")[5]) for ln in lines if ln.startswith(k)) for k in set(kinds)}
    assert words["ifm_fetch"] == res.counts["ifm_words_fetched"]
    assert words["weight_fetch"] == res.counts["weight_words_fetched"]


def test_corrupted_weights_differ():
    lay = LayerSpec(1, 2, 3, 3, 6, 6, 2)
    rng = np.random.default_rng(5)
    ifm = rng.integers(-5, 6, size=(2, 6, 6))
    w = rng.integers(-5, 6, size=(2, 2, 3, 3))
    dp = single_point(NetworkModel((lay,)), 3, 2, 2)
    bad = simulate_layer(lay, dp, ifm, w, _corrupt_weights=True).ofm
    assert not np.array_equal(bad, reference_layer(lay, ifm, w))


@pytest.mark.parametrize("ifm_shape, w_shape", [((2, 6, 5), (2, 2, 3, 3)), ((2, 6, 6), (2, 1, 3, 3))])
def test_shape_mismatch(ifm_shape, w_shape):
    lay = LayerSpec(1, 2, 3, 3, 6, 6, 2)
    dp = single_point(NetworkModel((lay,)), 3, 2, 2)
    with pytest.raises(ValueError, match="shape"):
        simulate_layer(lay, dp, np.zeros(ifm_shape), np.zeros(w_shape))
    with pytest.raises(ValueError, match="shape"):
        reference_layer(lay, np.zeros(ifm_shape), np.zeros(w_shape))


def test_bad_tile_schedule():
    lay = LayerSpec(1, 2, 3, 3, 6, 6, 2)
    net = NetworkModel((lay,))
    dp = single_point(net, [0], 2, 2)
    with pytest.raises(ValueError, match="cannot cover"):
        simulate_layer(lay, dp, np.zeros((2, 6, 6)), np.zeros((2, 2, 3, 3)))
    dp = single_point(net, 3, 2, 0)
    with pytest.raises(ValueError, match="channel grouping"):
        simulate_layer(lay, dp, np.zeros((2, 6, 6)), np.zeros((2, 2, 3, 3)))


@given(st.floats(-50, 50, allow_nan=False), st.floats(0.01, 2))
def test_activation_closed_forms(x, a):
    assert activation(x, "relu") == max(0.0, x)
    assert activation(x, "leaky-relu", a) == (x if x >= 0 else a * x)
    assert math.isclose(activation(x, "elu", a), x if x >= 0 else a * (math.exp(x) - 1), abs_tol=1e-12)
    arr = np.array([x, -x])
    np.testing.assert_allclose(activation(arr, Activation("elu", a)),
                               [activation(x, "elu", a), activation(-x, "elu", a)], atol=1e-12)


@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 4), st.integers(0, 1000))
def test_maxpool_windows(rows, cols, s, seed):
    plane = np.random.default_rng(seed).integers(-100, 100, size=(rows, cols))
    out = maxpool(plane, s)
    assert out.shape == (-(-rows // s), -(-cols // s))
    assert out.max() == plane.max()
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            assert out[i, j] == plane[i * s:i * s + s, j * s:j * s + s].max()
