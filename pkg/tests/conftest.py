import warnings

import pytest
from hypothesis import strategies as st

import sadse
from sadse.netmodel import ChainWarning, LayerSpec, NetworkModel
from sadse.resources import HardwareBudget


@pytest.fixture(scope="session")
def tiny_literal():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ChainWarning)
        return sadse.load_sample_network("tiny-yolo-literal")


@pytest.fixture(scope="session")
def tiny():
    return sadse.load_sample_network("tiny-yolo")


@pytest.fixture(scope="session")
def artix7():
    return sadse.load_sample_budget("artix7")


@pytest.fixture
def roomy():
    return HardwareBudget(10 ** 9, 10 ** 12, 16, 1)


@st.composite
def layers(draw, index=1, max_dim=32, max_ch=16, max_nf=16):
    r_f = draw(st.integers(1, 5))
    c_f = draw(st.integers(1, 5))
    pad = draw(st.integers(0, 2))
    r = draw(st.integers(max(1, r_f - 2 * pad), max_dim))
    c = draw(st.integers(max(1, c_f - 2 * pad), max_dim))
    return LayerSpec(
        index=index,
        n_f=draw(st.integers(1, max_nf)),
        r_f=r_f, c_f=c_f, r=r, c=c,
        ch=draw(st.integers(1, max_ch)),
        s=draw(st.integers(1, 3)),
        pad=pad,
        kind=draw(st.sampled_from(["convolutional", "fully-connected"])),
    )


@st.composite
def networks(draw, max_layers=4, **kw):
    n = draw(st.integers(1, max_layers))
    return NetworkModel(tuple(draw(layers(index=i, **kw)) for i in range(1, n + 1)), "rand")
