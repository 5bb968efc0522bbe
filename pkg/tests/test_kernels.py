import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kernseg.kernels import (KernelError, KernelSpec, cross_gram, cubature_l2_norm, kernel_value,
                             pairwise_l2_inner, self_inner)

import oracles

FAMILIES = ["gaussian", "uniform-product", "epanechnikov-product"]


def test_gaussian_density_at_origin():
    assert kernel_value(KernelSpec("gaussian", 1.0, 1), 0.0) == pytest.approx(oracles.GAUSS_DENSITY_AT_0, rel=1e-14)


def test_uniform_outside_support():
    assert kernel_value(KernelSpec("uniform-product", 2.0, 1), [3.0]) == 0.0


def test_gaussian_2d_is_product_of_1d():
    spec2 = KernelSpec("gaussian", 0.5, 2)
    spec1 = KernelSpec("gaussian", 0.5, 1)
    val = kernel_value(spec2, [0.0, 0.0])
    assert val == pytest.approx(oracles.GAUSS_2D_H05_AT_0, rel=1e-14)
    assert val == pytest.approx(kernel_value(spec1, 0.0) ** 2, rel=1e-14)


@pytest.mark.parametrize("family", FAMILIES)
def test_product_form_factorises(family):
    rng = np.random.default_rng(1)
    spec3 = KernelSpec(family, 0.7, 3)
    spec1 = KernelSpec(family, 0.7, 1)
    for x in rng.uniform(-1, 1, (20, 3)):
        expect = np.prod([kernel_value(spec1, [c]) for c in x])
        assert kernel_value(spec3, x) == pytest.approx(expect, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("p", [1, 2])
def test_kernel_integrates_to_one(family, p):
    # the L2 norm of a mixture with one bump is not what we want here, so
    # integrate the kernel itself with the same cubature machinery
    from scipy.integrate import cubature
    spec = KernelSpec(family, 0.8, p)
    pad = 8 * spec.h if family == "gaussian" else spec.h
    res = cubature(lambda x: kernel_value(spec, x), [-pad] * p, [pad] * p, rtol=1e-8)
    assert res.estimate == pytest.approx(1.0, abs=1e-4)


def test_dimension_mismatch():
    with pytest.raises(KernelError):
        kernel_value(KernelSpec("gaussian", 1.0, 2), [0.0, 0.0, 0.0])
    with pytest.raises(KernelError):
        pairwise_l2_inner(KernelSpec("gaussian", 1.0, 2), [0.0], [0.0, 1.0])


@pytest.mark.parametrize("bad", [dict(family="cauchy"), dict(h=0.0), dict(h=-1.0), dict(p=0),
                                 dict(h=float("inf"))])
def test_invalid_spec(bad):
    args = dict(family="gaussian", h=1.0, p=1) | bad
    with pytest.raises(KernelError):
        KernelSpec(**args)


def test_gaussian_self_convolution():
    assert pairwise_l2_inner(KernelSpec("gaussian", 1.0, 1), [0.3], [0.3]) == pytest.approx(
        oracles.GAUSS_SELF_CONV, rel=1e-14)


def test_gaussian_2d_at_distance_two():
    spec = KernelSpec("gaussian", 1.0, 2)
    val = pairwise_l2_inner(spec, [0.0, 0.0], [2.0 / math.sqrt(2), 2.0 / math.sqrt(2)])
    assert val == pytest.approx(oracles.GAUSS_2D_CONV_DIST2, rel=1e-12)
    assert val == pytest.approx(oracles.inner_quad("gaussian", 1.0, [0, 0], [math.sqrt(2)] * 2), rel=1e-9)


@pytest.mark.parametrize("family,d,expect", [("uniform-product", 0.5, oracles.UNIFORM_CONV_D05),
                                             ("epanechnikov-product", 0.5, oracles.EPAN_CONV_D05),
                                             ("epanechnikov-product", 1.3, oracles.EPAN_CONV_D13)])
def test_compact_convolutions(family, d, expect):
    assert pairwise_l2_inner(KernelSpec(family, 1.0, 1), [0.0], [d]) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_far_apart_bumps_vanish(family):
    spec = KernelSpec(family, 0.3, 2)
    assert pairwise_l2_inner(spec, [0.0, 0.0], [1e6 * 0.3, 0.0]) <= 1e-12


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("p", [1, 2, 3])
def test_inner_matches_quadrature(family, p):
    rng = np.random.default_rng(100 + p)
    h = 0.9
    spec = KernelSpec(family, h, p)
    scale = pairwise_l2_inner(spec, np.zeros(p), np.zeros(p))
    for _ in range(15):
        a = rng.uniform(-2, 2, p)
        direction = rng.normal(size=p)
        b = a + direction / np.linalg.norm(direction) * rng.uniform(0, 6 * h) / math.sqrt(p)
        got = pairwise_l2_inner(spec, a, b)
        assert abs(got - oracles.inner_quad(family, h, a, b)) <= 1e-6 * scale


@pytest.mark.parametrize("family", FAMILIES)
def test_self_inner_is_diagonal(family):
    spec = KernelSpec(family, 0.6, 3)
    assert self_inner(spec) == pytest.approx(pairwise_l2_inner(spec, [1, 2, 3], [1, 2, 3]), rel=1e-14)


vec = st.lists(st.floats(-50, 50, allow_nan=False), min_size=3, max_size=3)


@given(a=vec, b=vec, h=st.floats(0.05, 10), family=st.sampled_from(FAMILIES))
def test_symmetry_bit_exact(a, b, h, family):
    spec = KernelSpec(family, h, 3)
    assert pairwise_l2_inner(spec, a, b) == pairwise_l2_inner(spec, b, a)


@given(a=vec, b=vec, h=st.floats(0.1, 5), c=st.floats(0.2, 5), family=st.sampled_from(FAMILIES))
def test_bandwidth_scaling(a, b, h, c, family):
    # <K_ch(. - ca), K_ch(. - cb)> = c^-p <K_h(. - a), K_h(. - b)>
    spec = KernelSpec(family, h, 3)
    base = pairwise_l2_inner(spec, a, b)
    scaled = pairwise_l2_inner(spec.with_bandwidth(c * h), np.multiply(a, c), np.multiply(b, c))
    assert scaled == pytest.approx(base / c ** 3, rel=1e-9, abs=1e-300)


@given(a=vec, b=vec, family=st.sampled_from(FAMILIES))
def test_cauchy_schwarz(a, b, family):
    spec = KernelSpec(family, 1.0, 3)
    assert pairwise_l2_inner(spec, a, b) <= self_inner(spec) * (1 + 1e-12)


def test_cross_gram_symmetric_matrix():
    X = np.random.default_rng(3).normal(size=(25, 2))
    for family in FAMILIES:
        G = cross_gram(KernelSpec(family, 0.8, 2), X, X)
        assert np.array_equal(G, G.T)


def test_cubature_cancellation_to_zero():
    spec = KernelSpec("gaussian", 1.0, 1)
    res = cubature_l2_norm(spec, [[0.5], [0.5]], [1.0, -1.0])
    assert res.value == pytest.approx(0.0, abs=1e-10)


def test_cubature_single_bump():
    res = cubature_l2_norm(KernelSpec("gaussian", 1.0, 1), [[0.0]], [1.0])
    assert res.converged
    assert res.value == pytest.approx(oracles.GAUSS_SINGLE_NORM, rel=1e-7)


def test_cubature_two_bumps():
    res = cubature_l2_norm(KernelSpec("gaussian", 1.0, 1), [[0.0], [2.0]], [1.0, -1.0])
    assert res.value == pytest.approx(oracles.GAUSS_TWO_BUMP_NORM, rel=1e-7)


def test_cubature_budget_flag():
    rng = np.random.default_rng(0)
    spec = KernelSpec("gaussian", 0.2, 3)
    res = cubature_l2_norm(spec, rng.normal(size=(6, 3)), rng.normal(size=6), tol=1e-14, budget=2000)
    assert not res.converged
    assert res.value > 0 and res.evaluations <= 2000 + 100


def test_cubature_bad_arguments():
    spec = KernelSpec("gaussian", 1.0, 1)
    with pytest.raises(KernelError):
        cubature_l2_norm(spec, [[0.0]], [1.0, 2.0])
    with pytest.raises(KernelError):
        cubature_l2_norm(spec, [[0.0]], [1.0], tol=0.0)
