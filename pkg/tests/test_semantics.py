import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgmfunctor.errors import ShapeMismatchError, StochasticityError
from pgmfunctor.semantics import (
    DEGENERATE,
    Distribution,
    FiniteSet,
    StochasticKernel,
    Tensor,
    identity_tensor,
    kernel_compose,
    kernel_tensor,
    marginalize,
    normalize_tensor,
    permute_codomain,
    proportional_eq,
    structural_tensor,
    swap_tensor,
)

X = FiniteSet.range("X", 2)
Y = FiniteSet.range("Y", 3)
W = FiniteSet.range("W", 2)


def random_kernel(rng, cod, dom):
    shape = tuple(len(s) for s in cod + dom)
    arr = rng.random(shape) + 0.01
    arr = arr / arr.sum(axis=tuple(range(len(cod))), keepdims=True)
    return StochasticKernel(tuple(cod), tuple(dom), arr)


def test_layout_codomain_first():
    t = Tensor((Y,), (X,), np.arange(6).reshape(3, 2))
    assert t("2", "1") == 5.0
    assert t.matrix().shape == (3, 2)


def test_flat_entries_reshape():
    t = Tensor((X, W), (), [1, 2, 3, 4])
    assert t.shape == (2, 2)
    with pytest.raises(ShapeMismatchError):
        Tensor((X,), (Y,), np.ones((2, 2)))


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        Tensor((X,), (), [-1.0, 2.0])


def test_stochastic_check():
    with pytest.raises(StochasticityError):
        StochasticKernel((X,), (), [0.5, 0.6])
    StochasticKernel((X,), (), [0.5, 0.5 + 5e-10])


def test_distribution_requires_empty_domain():
    with pytest.raises(ShapeMismatchError):
        Distribution((X,), (Y,), np.full((2, 3), 0.5))


def test_compose_chapman_kolmogorov():
    f = StochasticKernel((Y,), (X,), np.array([[0.2, 0.5], [0.3, 0.5], [0.5, 0.0]]))
    g = StochasticKernel((W,), (Y,), np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]]))
    h = kernel_compose(f, g)
    assert isinstance(h, StochasticKernel)
    assert np.allclose(h.entries, g.entries @ f.entries)
    with pytest.raises(ShapeMismatchError):
        kernel_compose(g, f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_compose_associative_and_unital(seed):
    rng = np.random.default_rng(seed)
    f = random_kernel(rng, (Y,), (X,))
    g = random_kernel(rng, (W, X), (Y,))
    h = random_kernel(rng, (Y,), (W, X))
    left = kernel_compose(kernel_compose(f, g), h)
    right = kernel_compose(f, kernel_compose(g, h))
    assert left.allclose(right, 1e-12)
    assert kernel_compose(identity_tensor((X,)), f).allclose(f)
    assert kernel_compose(f, identity_tensor((Y,))).allclose(f)


def test_kernel_tensor_product():
    rng = np.random.default_rng(1)
    f = random_kernel(rng, (Y,), (X,))
    h = random_kernel(rng, (W,), ())
    t = kernel_tensor(f, h)
    assert t.codomain == (Y, W) and t.domain == (X,)
    assert np.isclose(t("1", "0", "1"), f("1", "1") * h("0"))
    assert isinstance(t, StochasticKernel)


def test_swap_is_involution():
    s1 = swap_tensor(X, Y)
    s2 = swap_tensor(Y, X)
    assert kernel_compose(s1, s2).allclose(identity_tensor((X, Y)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_copy_delete_counit(n):
    x = FiniteSet.range("X", n)
    copy = structural_tensor("copy", x)
    delete = structural_tensor("delete", x)
    ident = identity_tensor((x,))
    left = kernel_compose(copy, kernel_tensor(delete, ident))
    right = kernel_compose(copy, kernel_tensor(ident, delete))
    # both are X -> I x X = X
    assert np.array_equal(left.entries.reshape(n, n), ident.entries)
    assert np.array_equal(right.entries.reshape(n, n), ident.entries)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_special_frobenius(n):
    x = FiniteSet.range("X", n)
    copy = structural_tensor("copy", x)
    compare = structural_tensor("compare", x)
    assert np.array_equal(kernel_compose(copy, compare).entries, identity_tensor((x,)).entries)


def test_normalize_and_degenerate():
    t = Tensor((X, W), (), [1.0, 3.0, 0.0, 4.0])
    z, d = normalize_tensor(t)
    assert z == 8.0 and np.isclose(d("0", "1"), 3 / 8)
    z, d = normalize_tensor(Tensor((X,), (), [0.0, 0.0]))
    assert z == 0.0 and d is DEGENERATE and not d


def test_proportional_eq():
    a = Tensor((X, W), (), [1.0, 2.0, 3.0, 4.0])
    b = Tensor((X, W), (), [2.5, 5.0, 7.5, 10.0])
    c = Tensor((X, W), (), [2.5, 5.0, 7.5, 10.1])
    assert proportional_eq(a, b)
    assert not proportional_eq(a, c)
    zero = Tensor((X, W), (), np.zeros(4))
    assert proportional_eq(zero, zero)
    assert not proportional_eq(zero, a)
    assert not proportional_eq(a, zero)


def test_marginalize_and_permute():
    d = Distribution.of((X, Y), np.arange(6).reshape(2, 3) / 15)
    m = marginalize(d, ["Y"])
    assert np.allclose(m.entries, [3 / 15, 5 / 15, 7 / 15])
    p = permute_codomain(d, ["Y", "X"])
    assert p("2", "1") == d("1", "2")
