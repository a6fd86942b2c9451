import math
from fractions import Fraction
import pytest
from hypothesis import given, settings, strategies as st
from causal_infotheory.dist import (
    FiniteRange,
    Pmf,
    condition,
    conditionally_independent,
    expectation,
    format_fraction,
    format_pmf,
    is_independent,
    marginalize,
    product,
)
from causal_infotheory.errors import (
    BadScope,
    NotNormalized,
    RangeMismatch,
    ScopeOverlap,
    ZeroProbabilityEvent,
)

BIT = FiniteRange.of_size(2)
TRIT = FiniteRange.of_size(3)
HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)

# X uniform, Y = X + fair coin
JOINT = Pmf([("X", BIT), ("Y", TRIT)], [QUARTER, QUARTER, 0, 0, QUARTER, QUARTER])

# Y and Z both copy X
COPIES = Pmf(
    [("X", BIT), ("Y", BIT), ("Z", BIT)], [HALF, 0, 0, 0, 0, 0, 0, HALF]
)


def test_range_lookup():
    """Labels map to indices and back; DSL values map to indices."""
    rng = FiniteRange.from_labels(["lo", "hi"])
    assert rng.index("hi") == 1
    assert rng.label(0) == "lo"
    assert TRIT.value(2) == 2
    assert TRIT.index_of_value(2) == 2
    assert TRIT.index_of_value(5) == -1
    assert str(rng) == "{lo, hi}"
    with pytest.raises(RangeMismatch):
        rng.index("mid")
    with pytest.raises(BadScope):
        FiniteRange.from_labels(["a", "a"])
    with pytest.raises(BadScope):
        FiniteRange(())


def test_pmf_rejects_bad_masses():
    """Construction enforces exact normalization and non-negativity."""
    with pytest.raises(NotNormalized, match="sums to 5/6"):
        Pmf([("X", BIT)], [HALF, Fraction(1, 3)])
    with pytest.raises(NotNormalized):
        Pmf([("X", BIT)], [Fraction(3, 2), -HALF])
    with pytest.raises(BadScope):
        Pmf([("X", BIT)], [1])
    with pytest.raises(BadScope):
        Pmf([("X", BIT), ("X", BIT)], [QUARTER] * 4)


def test_from_weights_is_exact():
    p = Pmf.from_weights("X", TRIT, [1, 2, 3])
    assert p.masses() == [Fraction(1, 6), Fraction(1, 3), HALF]
    with pytest.raises(NotNormalized):
        Pmf.from_weights("X", TRIT, [0, 0, 0])


def test_marginalize():
    """Summing out X leaves the triangular law of Y."""
    assert marginalize(JOINT, ["Y"]).masses() == [QUARTER, HALF, QUARTER]
    assert marginalize(JOINT, ["Y", "X"]) is JOINT
    assert marginalize(COPIES, ["Z", "X"]).variables == ("X", "Z")
    with pytest.raises(BadScope):
        marginalize(JOINT, [])


def test_condition():
    """Conditioning renormalizes exactly and refuses null events."""
    assert condition(JOINT, {"Y": 1}).masses() == [HALF, HALF]
    assert condition(JOINT, {"Y": 0}).masses() == [1, 0]
    null = Pmf([("X", BIT), ("Y", TRIT)], [HALF, 0, 0, 0, HALF, 0])
    with pytest.raises(ZeroProbabilityEvent):
        condition(null, {"Y": 2})
    with pytest.raises(BadScope):
        condition(JOINT, {"X": 0, "Y": 0})


def test_product_and_independence():
    coin = Pmf.uniform("A", BIT)
    die = Pmf.uniform("B", TRIT)
    both = product(coin, die)
    assert both.prob({"A": 1, "B": 2}) == Fraction(1, 6)
    assert is_independent(both, [["A"], ["B"]])
    assert not is_independent(JOINT, [["X"], ["Y"]])
    with pytest.raises(ScopeOverlap):
        product(coin, coin)


def test_conditional_independence():
    """Two copies of X are dependent, but independent given X."""
    assert not is_independent(COPIES, [["Y"], ["Z"]])
    assert conditionally_independent(COPIES, [["Y"], ["Z"]], ["X"])
    with pytest.raises(BadScope):
        conditionally_independent(COPIES, [["X"], ["Z"]], ["X"])


def test_expectation_skips_null_cells():
    """Zero-mass cells are never evaluated."""

    def f(idx):
        assert JOINT.table[idx] != 0
        return float(idx[1])

    assert expectation(JOINT, f) == 1.0


def test_reorder_rename_digest():
    flipped = JOINT.reorder(["Y", "X"])
    assert flipped.prob({"X": 1, "Y": 2}) == QUARTER
    assert flipped.reorder(["X", "Y"]) == JOINT
    assert JOINT.rename({"X": "W"}).variables == ("W", "Y")
    copy = Pmf(JOINT.scope, JOINT.masses())
    assert copy.digest() == JOINT.digest()
    assert flipped.digest() != JOINT.digest()


def test_formatting():
    assert format_fraction(Fraction(2, 4)) == "1/2"
    assert format_fraction(Fraction(3)) == "3"
    assert format_pmf(Pmf.uniform("X", BIT)) == "{0: 1/2, 1: 1/2}"
    records = marginalize(JOINT, ["Y"]).to_records()
    assert records[1] == {"Y": "1", "p": "1/2"}
    with pytest.raises(BadScope):
        format_pmf(JOINT)


@settings(deadline=None, max_examples=50)
@given(st.lists(st.integers(0, 6), min_size=6, max_size=6).filter(lambda w: sum(w) > 0))
def test_marginals_and_slices_stay_normalized(weights):
    """Every marginal and every non-null slice of a joint sums to one."""
    total = sum(weights)
    p = Pmf([("X", BIT), ("Y", TRIT)], [Fraction(w, total) for w in weights])
    for var in ("X", "Y"):
        assert marginalize(p, [var]).total() == 1
    for y, mass in enumerate(marginalize(p, ["Y"]).masses()):
        if mass != 0:
            assert condition(p, {"Y": y}).is_normalized()


def test_expectation_values():
    """A point mass returns f bit-exactly; the identity under Bern(1/3) is 1/3."""
    at_two = Pmf.point("X", TRIT, 2)
    assert expectation(at_two, lambda idx: math.pi * idx[0]) == math.pi * 2
    bern = Pmf([("X", BIT)], [Fraction(2, 3), Fraction(1, 3)])
    assert expectation(bern, lambda idx: float(idx[0])) == 1 / 3


@settings(deadline=None, max_examples=60)
@given(
    st.lists(st.integers(0, 4), min_size=2, max_size=2).filter(lambda w: sum(w) > 0),
    st.lists(st.integers(0, 4), min_size=3, max_size=3).filter(lambda w: sum(w) > 0),
)
def test_product_marginals_recover_factors(left, right):
    a = Pmf.from_weights("A", BIT, left)
    b = Pmf.from_weights("B", TRIT, right)
    both = product(a, b)
    assert marginalize(both, ["A"]) == a
    assert marginalize(both, ["B"]) == b


@settings(deadline=None, max_examples=60)
@given(st.lists(st.integers(0, 5), min_size=6, max_size=6).filter(lambda w: sum(w) > 0))
def test_condition_times_marginal_is_joint(weights):
    """p(x, y) = p(x) p(y | x) on every supported x."""
    total = sum(weights)
    p = Pmf([("X", BIT), ("Y", TRIT)], [Fraction(w, total) for w in weights])
    px = marginalize(p, ["X"])
    for x in range(len(BIT)):
        mass = px.prob({"X": x})
        if mass == 0:
            continue
        given_x = condition(p, {"X": x})
        for y in range(len(TRIT)):
            assert mass * given_x.prob({"Y": y}) == p.prob({"X": x, "Y": y})
