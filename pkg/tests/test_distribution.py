import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from causalinfo import corpus
from causalinfo.distribution import (
    MAX_ENTRIES,
    JointTable,
    Kernel,
    condition,
    conditional_divergence,
    conditional_mutual_information,
    kernel_of,
    kl_divergence,
    marginal,
    mutual_information,
    product_table,
)
from causalinfo.errors import ModelTooLarge, ScopeMismatch, UndefinedConditional, ZeroProbabilityEvidence
from causalinfo.model import functional_joint, joint_from_cpts

from oracles import binary_entropy, cmi_by_entropies, kl_bits, sum_to


def table(variables, cards, probs):
    return JointTable(variables, cards, np.asarray(probs, dtype=float))


def random_table(rng, cards, variables=None):
    p = rng.dirichlet(np.ones(int(np.prod(cards))))
    return JointTable(variables or range(len(cards)), cards, p)


PX = table([0], [2], [0.3, 0.7])
PY = table([1], [3], [0.2, 0.5, 0.3])
PXY = product_table(PX, PY)


def bsc_joint(eps=0.1):
    return table([0, 1], [2, 2], [[0.5 * (1 - eps), 0.5 * eps], [0.5 * eps, 0.5 * (1 - eps)]])


def copy_joint():
    return table([0, 1], [2, 2], [[0.5, 0.0], [0.0, 0.5]])


@st.composite
def tables(draw, max_vars=4, max_card=3):
    k = draw(st.integers(1, max_vars))
    cards = draw(st.lists(st.integers(1, max_card), min_size=k, max_size=k))
    raw = draw(arrays(float, int(np.prod(cards)), elements=st.floats(0.0, 1.0)))
    if raw.sum() <= 0:
        raw = np.ones_like(raw)
    return JointTable(range(k), cards, raw / raw.sum())


def test_table_invariants():
    with pytest.raises(ValueError):
        table([0], [2], [0.5, 0.6])
    with pytest.raises(ValueError):
        table([0], [2], [-0.1, 1.1])
    with pytest.raises(ScopeMismatch):
        table([0, 0], [2, 2], np.full(4, 0.25))
    with pytest.raises(ModelTooLarge):
        JointTable([0, 1], [MAX_ENTRIES, 2], np.zeros(1), check=False)


def test_marginal_of_product():
    np.testing.assert_allclose(marginal(PXY, {0}).probs, PX.probs, atol=1e-15)
    with pytest.raises(ScopeMismatch):
        marginal(PX, {3})


def test_marginal_matches_summation_oracle(rng):
    t = random_table(rng, [2, 3, 2])
    cells = {x: float(t.probs[x]) for x in np.ndindex(*t.cards)}
    expected = sum_to(cells, [0, 1, 2], {0, 2})
    got = marginal(t, {0, 2})
    assert got.variables == (0, 2)
    for key, p in expected.items():
        assert got.probs[key] == pytest.approx(p, abs=1e-15)


def test_marginal_of_communication_system():
    fm = corpus.communication_system(noisy=True)
    joint = functional_joint(fm)
    pw_wt = marginal(joint, {0, 3})
    # P(w, w~) = P_W(w) sum_y P(y | e(w)) [d(y) = w~]
    prior = fm.noise[0]
    channel_noise = fm.noise[2]
    enc, dec = [0, 1, 3, 2], [0, 1, 3, 2]
    for w in range(4):
        for wt in range(4):
            expected = prior[w] * sum(
                channel_noise[u] for u in range(4) if dec[(enc[w] + u) % 4] == wt
            )
            assert pw_wt.probs[w, wt] == pytest.approx(expected, abs=1e-15)


def test_condition_examples():
    np.testing.assert_allclose(condition(PXY, {1: 2}).probs, PX.probs, atol=1e-15)
    with pytest.raises(ZeroProbabilityEvidence):
        condition(copy_joint(), {0: 1, 1: 0})
    with pytest.raises(ScopeMismatch):
        condition(PXY, {1: 3})


def test_condition_chain_bayes_oracle(rng):
    model = corpus.chain_model(rng, cards=(2, 3, 2))
    joint = joint_from_cpts(model)
    px = model.cpts[0].rows
    py_x = model.cpts[1].rows
    pz_y = model.cpts[2].rows
    for y in range(3):
        post = condition(joint, {1: y})
        py = sum(px[x] * py_x[x, y] for x in range(2))
        for x in range(2):
            for z in range(2):
                expected = px[x] * py_x[x, y] / py * pz_y[y, z]
                assert post.probs[x, z] == pytest.approx(expected, abs=1e-14)


def test_kernel_examples():
    two_bits = product_table(table([0], [2], [0.5, 0.5]), table([1], [2], [0.5, 0.5]))
    k = kernel_of(two_bits, {1}, {0})
    np.testing.assert_allclose(k.rows, np.full((2, 2), 0.5))

    k = kernel_of(bsc_joint(0.1), {1}, {0})
    np.testing.assert_allclose(k.rows, [[0.9, 0.1], [0.1, 0.9]], atol=1e-15)

    k = kernel_of(copy_joint(), {1}, {0})
    np.testing.assert_array_equal(k.rows, np.eye(2))


def test_kernel_undefined_rows():
    t = table([0, 1], [3, 2], [[0.5, 0.0], [0.0, 0.5], [0.0, 0.0]])
    k = kernel_of(t, {1}, {0})
    assert list(k.defined) == [True, True, False]
    with pytest.raises(UndefinedConditional):
        k.row((2,))


def test_kl_examples():
    P = table([0], [2], [0.3, 0.7])
    assert kl_divergence(P, P) == 0.0
    assert kl_divergence(table([0], [2], [1, 0]), table([0], [2], [0.5, 0.5])) == pytest.approx(1.0, abs=1e-15)
    assert kl_divergence(table([0], [2], [0.5, 0.5]), table([0], [2], [1, 0])) == math.inf
    with pytest.raises(ScopeMismatch):
        kl_divergence(PX, PY)


def _kernel(rows):
    rows = np.asarray(rows, dtype=float)
    return Kernel((0,), (rows.shape[0],), (1,), (rows.shape[1],), rows, np.ones(rows.shape[0], dtype=bool))


def test_conditional_divergence_examples(rng):
    P = _kernel([[0.2, 0.8], [0.6, 0.4]])
    Q = _kernel([[0.5, 0.5], [0.1, 0.9]])
    assert conditional_divergence(P, P, table([0], [2], [0.4, 0.6])) == 0.0
    degenerate = conditional_divergence(P, Q, table([0], [2], [0.0, 1.0]))
    assert degenerate == pytest.approx(kl_bits([0.6, 0.4], [0.1, 0.9]), abs=1e-15)

    P = _kernel(rng.dirichlet(np.ones(2), size=2))
    Q = _kernel(rng.dirichlet(np.ones(2), size=2))
    expected = 0.5 * kl_bits(P.rows[0], Q.rows[0]) + 0.5 * kl_bits(P.rows[1], Q.rows[1])
    got = conditional_divergence(P, Q, table([0], [2], [0.5, 0.5]))
    assert got == pytest.approx(expected, abs=1e-14)


def test_conditional_divergence_skips_zero_weight_rows():
    P = _kernel([[0.5, 0.5], [1.0, 0.0]])
    Q = Kernel((0,), (2,), (1,), (2,), np.array([[0.5, 0.5], [np.nan, np.nan]]), np.array([True, False]))
    assert conditional_divergence(P, Q, table([0], [2], [1.0, 0.0])) == 0.0
    assert conditional_divergence(P, Q, table([0], [2], [0.5, 0.5])) == math.inf


def test_mutual_information_examples():
    assert mutual_information(PXY, {0}, {1}) == 0.0
    assert mutual_information(copy_joint(), {0}, {1}) == pytest.approx(1.0, abs=1e-15)
    expected = 1.0 - binary_entropy(0.1)
    assert mutual_information(bsc_joint(0.1), {0}, {1}) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.5310044064, abs=1e-10)


def test_cmi_examples(rng):
    t = random_table(rng, [2, 3, 2])
    assert conditional_mutual_information(t, {0}, {2}, ()) == mutual_information(t, {0}, {2})

    chain = joint_from_cpts(corpus.chain_model(rng, cards=(3, 2, 3)))
    assert conditional_mutual_information(chain, {0}, {2}, {1}) <= 1e-12

    collider = joint_from_cpts(corpus.collider_model(rng))  # X=0, Z=1, Y=2
    assert mutual_information(collider, {0}, {1}) <= 1e-12
    assert conditional_mutual_information(collider, {0}, {1}, {2}) > 1e-6


def test_cmi_matches_entropy_oracle(rng):
    t = random_table(rng, [2, 3, 2, 2])
    cells = {x: float(t.probs[x]) for x in np.ndindex(*t.cards)}
    for A, B, Z in [({0}, {1}, set()), ({0}, {2}, {1}), ({0, 3}, {2}, {1}), ({1}, {2, 3}, {0})]:
        got = conditional_mutual_information(t, A, B, Z)
        assert got == pytest.approx(cmi_by_entropies(cells, [0, 1, 2, 3], A, B, Z), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(tables(), st.data())
def test_table_properties(t, data):
    k = len(t.variables)
    T = data.draw(st.sets(st.sampled_from(t.variables), max_size=k))
    T2 = data.draw(st.sets(st.sampled_from(sorted(T)), max_size=len(T))) if T else set()
    m = marginal(t, T)
    assert abs(m.probs.sum() - 1.0) <= 1e-12
    np.testing.assert_allclose(marginal(m, T2).probs, marginal(t, T2).probs, atol=1e-14)


@settings(max_examples=150, deadline=None)
@given(tables(max_vars=3), st.data())
def test_information_properties(t, data):
    vs = list(t.variables)
    labels = data.draw(st.lists(st.sampled_from("ABC"), min_size=len(vs), max_size=len(vs)))
    A = {v for v, c in zip(vs, labels) if c == "A"}
    B = {v for v, c in zip(vs, labels) if c == "B"}
    C = {v for v, c in zip(vs, labels) if c == "C"}
    i_ab = mutual_information(t, A, B)
    assert i_ab >= 0
    assert i_ab == pytest.approx(mutual_information(t, B, A), abs=1e-12)
    lhs = mutual_information(t, A, B | C)
    rhs = mutual_information(t, A, C) + conditional_mutual_information(t, A, B, C)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(arrays(float, 4, elements=st.floats(0.01, 1.0)), arrays(float, 4, elements=st.floats(0.01, 1.0)))
def test_kl_nonnegative_and_zero_only_on_equal(p, q):
    P = table([0], [4], p / p.sum())
    Q = table([0], [4], q / q.sum())
    d = kl_divergence(P, Q)
    assert d >= 0
    assert d == pytest.approx(kl_bits(P.probs, Q.probs), abs=1e-12)
    if d == 0:
        np.testing.assert_allclose(P.probs, Q.probs, atol=1e-12)
