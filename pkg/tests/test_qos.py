import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beehive.exceptions import AttributeSetMismatch, EmptyServiceList, InvalidParams, MissingAttribute
from beehive.network import ServiceDescriptor
from beehive.qos import (
    InvalidWeights,
    QosSelector,
    check_weights,
    nearest_qos_service,
    normalize_attributes,
    qos_score,
)
from oracles import brute_nearest


def svc(sid, **qos):
    return ServiceDescriptor(sid, sid, "", qos)


def test_single_service_normalizes_to_one():
    out = normalize_attributes([svc("a", rt=300.0, av=0.9)], {"rt": "lower", "av": "higher"})
    assert out == [{"rt": 1.0, "av": 1.0}]


def test_lower_is_better_endpoints():
    out = normalize_attributes([svc("a", rt=100.0), svc("b", rt=200.0)], {"rt": "lower"})
    assert [o["rt"] for o in out] == [1.0, 0.0]


def test_higher_is_better_interior():
    out = normalize_attributes([svc(k, av=v) for k, v in zip("abc", (0.90, 0.95, 0.99))], {"av": "higher"})
    got = [o["av"] for o in out]
    assert got[0] == 0.0 and got[2] == 1.0
    # (0.95 - 0.90) / (0.99 - 0.90) = 5/9
    assert got[1] == pytest.approx(5 / 9, abs=1e-12)


def test_score_examples():
    assert qos_score({"a": 0.7}, {"a": 1.0}) == pytest.approx(0.7)
    assert qos_score({"a": 1.0, "b": 0.0}, {"a": 0.5, "b": 0.5}) == 0.5
    assert qos_score({"a": 1.0, "b": 1.0, "c": 1.0}, {"a": 0.2, "b": 0.3, "c": 0.5}) == 1.0
    with pytest.raises(AttributeSetMismatch):
        qos_score({"a": 1.0}, {"b": 1.0})


def test_nearest_examples():
    # one attribute with weight 1: the normalized value is the score
    services = [svc("lo", q=0.0), svc("a", q=70.0), svc("b", q=85.0), svc("c", q=95.0), svc("hi", q=100.0)]
    got = nearest_qos_service(services, {"q": "higher"}, {"q": 1.0}, 0.8)
    assert got.id == "b"
    assert nearest_qos_service(services, {"q": "higher"}, {"q": 1.0}, 1.0).id == "hi"


def test_nearest_ties():
    # scores 0.0, 0.5, 1.0; level 0.75 ties between 0.5 and 1.0 -> higher score
    services = [svc("x", q=0.0), svc("y", q=1.0), svc("z", q=2.0)]
    assert nearest_qos_service(services, {"q": "higher"}, {"q": 1.0}, 0.75).id == "z"
    # identical scores -> smallest id
    twins = [svc("m", q=1.0), svc("k", q=1.0)]
    assert nearest_qos_service(twins, {"q": "higher"}, {"q": 1.0}, 0.2).id == "k"


def test_errors():
    d = {"q": "higher"}
    with pytest.raises(EmptyServiceList):
        nearest_qos_service([], d, {"q": 1.0}, 0.5)
    with pytest.raises(MissingAttribute):
        normalize_attributes([svc("a")], d)
    with pytest.raises(InvalidParams):
        nearest_qos_service([svc("a", q=1.0)], d, {"q": 1.0}, 1.5)
    with pytest.raises(InvalidWeights):
        check_weights({"a": 0.6, "b": 0.6})
    with pytest.raises(InvalidWeights):
        check_weights({"a": -0.1, "b": 1.1})
    with pytest.raises(AttributeSetMismatch):
        check_weights({"a": 1.0}, ["a", "b"])
    check_weights({"a": 0.1, "b": 0.2, "c": 0.7})


def test_matches_oracle_on_twenty_services():
    rng = np.random.default_rng(20)
    attrs = {"av": "higher", "tp": "higher", "rt": "lower", "cost": "lower"}
    for _ in range(20):
        rows = rng.uniform(0, 100, size=(20, 4)).round(1)
        services = [svc(f"s{i:02d}", **dict(zip(attrs, r))) for i, r in enumerate(rows)]
        w = rng.dirichlet(np.ones(4))
        weights = dict(zip(attrs, w))
        got = nearest_qos_service(services, attrs, weights, 0.6)
        best, _ = brute_nearest([s.id for s in services], rows.tolist(),
                                [d == "higher" for d in attrs.values()], list(w), 0.6)
        assert got.id == services[best].id


def test_selector_estimator():
    attrs = {"av": "higher", "rt": "lower"}
    services = [svc("a", av=0.9, rt=100.0), svc("b", av=0.99, rt=300.0), svc("c", av=0.95, rt=200.0)]
    sel = QosSelector(weights={"av": 0.5, "rt": 0.5}, requested_level=0.5).fit(services, attrs)
    scores = sel.transform(services)
    assert np.allclose(scores, [0.5, 0.5, (5 / 9 + 0.5) / 2])
    # a and b both score exactly 0.5; equal scores go to the smaller id
    assert sel.predict(services).id == "a"
    assert sel.get_params() == {"weights": {"av": 0.5, "rt": 0.5}, "requested_level": 0.5}


values = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def instances(draw):
    k = draw(st.integers(1, 5))
    n = draw(st.integers(1, 12))
    higher = draw(st.lists(st.booleans(), min_size=k, max_size=k))
    rows = draw(st.lists(st.lists(values, min_size=k, max_size=k), min_size=n, max_size=n))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    weights = [r / sum(raw) for r in raw]
    weights[-1] = max(0.0, 1.0 - sum(weights[:-1]))
    level = draw(st.floats(0.0, 1.0))
    return higher, rows, weights, level


def _build(higher, rows, weights):
    names = [f"a{j}" for j in range(len(higher))]
    services = [svc(f"s{i:02d}", **dict(zip(names, r))) for i, r in enumerate(rows)]
    directions = {n: "higher" if h else "lower" for n, h in zip(names, higher)}
    return names, services, directions, dict(zip(names, weights))


@settings(max_examples=200, deadline=None)
@given(instances())
def test_selection_oracle_and_bounds(inst):
    higher, rows, weights, level = inst
    names, services, directions, w = _build(higher, rows, weights)
    got = nearest_qos_service(services, directions, w, level)
    best, scores = brute_nearest([s.id for s in services], rows, higher, weights, level)
    assert got.id == services[best].id
    for n in normalize_attributes(services, directions):
        assert all(0.0 <= v <= 1.0 for v in n.values())
        assert 0.0 <= qos_score(n, w) <= 1.0


@settings(max_examples=100, deadline=None)
@given(instances(), st.randoms(use_true_random=False))
def test_attribute_order_invariance(inst, rnd):
    higher, rows, weights, level = inst
    names, services, directions, w = _build(higher, rows, weights)
    order = list(names)
    rnd.shuffle(order)
    shuffled_dirs = {n: directions[n] for n in order}
    shuffled_w = {n: w[n] for n in order}
    a = [qos_score(n, w) for n in normalize_attributes(services, directions)]
    b = [qos_score(n, shuffled_w) for n in normalize_attributes(services, shuffled_dirs)]
    assert a == b


@settings(max_examples=100, deadline=None)
@given(instances(), st.integers(0, 4), st.sampled_from([0.5, 2.0, 4.0, 10.0]), st.sampled_from([-8.0, 0.0, 3.0, 64.0]))
def test_affine_rescaling_keeps_selection(inst, col, scale, shift):
    higher, rows, weights, level = inst
    col %= len(higher)
    # integer-valued data keeps the rescaled min-max fractions exact
    rows = [[float(round(v)) % 97 for v in r] for r in rows]
    names, services, directions, w = _build(higher, rows, weights)
    rescaled = [[v * scale + shift if j == col else v for j, v in enumerate(r)] for r in rows]
    _, services2, _, _ = _build(higher, rescaled, weights)
    a = nearest_qos_service(services, directions, w, level).id
    b = nearest_qos_service(services2, directions, w, level).id
    assert a == b
