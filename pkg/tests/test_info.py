import math
from fractions import Fraction
import pytest
from hypothesis import given, settings, strategies as st
from causal_infotheory.dist import FiniteRange, Pmf, is_independent, product
from causal_infotheory.dsl import parse_scm
from causal_infotheory.errors import BadScope, UnknownVariable
from causal_infotheory.metrics import (
    cond_entropy,
    cond_mutual_information,
    entropy,
    joint_entropy,
    log2_fraction,
    mutual_information,
)
from causal_infotheory.scm import entailed

BIT = FiniteRange.of_size(2)
TRIT = FiniteRange.of_size(3)

with open("tests/fixtures/paper_ex1.scm", encoding="utf-8") as f:
    EX1_JOINT = entailed(parse_scm(f.read()), ["X", "Y"])


def test_entropy_values():
    """Known entropies in bits; a point mass has +0.0 entropy."""
    assert entropy(Pmf.uniform("X", BIT)) == 1.0
    assert entropy(Pmf.uniform("X", FiniteRange.of_size(4))) == 2.0
    zero = entropy(Pmf.point("X", TRIT, 1))
    assert zero == 0.0 and math.copysign(1.0, zero) == 1.0
    assert joint_entropy(EX1_JOINT, ["Y"]) == pytest.approx(1.5, abs=1e-12)
    assert entropy(EX1_JOINT) == pytest.approx(2.0, abs=1e-12)


def test_log2_fraction_is_exact_for_powers():
    assert log2_fraction(Fraction(1, 8)) == -3.0
    assert log2_fraction(Fraction(1, 3)) == pytest.approx(-math.log2(3))


def test_conditional_entropy_and_information():
    """Y = X + coin: H(Y|X) = 1, I(X;Y) = 1/2."""
    assert cond_entropy(EX1_JOINT, ["X"]) == pytest.approx(1.0, abs=1e-12)
    assert cond_entropy(EX1_JOINT, []) == entropy(EX1_JOINT)
    assert mutual_information(EX1_JOINT, ["X"], ["Y"]) == pytest.approx(0.5, abs=1e-12)
    assert mutual_information(EX1_JOINT, ["Y"], ["X"]) == pytest.approx(0.5, abs=1e-12)


def test_conditional_mutual_information():
    """Two copies of X share one bit, none given X."""
    half = Fraction(1, 2)
    copies = Pmf([("X", BIT), ("Y", BIT), ("Z", BIT)], [half, 0, 0, 0, 0, 0, 0, half])
    assert cond_mutual_information(copies, ["Y"], ["Z"], []) == pytest.approx(1.0)
    assert cond_mutual_information(copies, ["Y"], ["Z"], ["X"]) == pytest.approx(0.0, abs=1e-12)


def test_argument_checks():
    with pytest.raises(BadScope):
        mutual_information(EX1_JOINT, ["X"], ["X"])
    with pytest.raises(BadScope):
        mutual_information(EX1_JOINT, [], ["Y"])
    with pytest.raises(BadScope):
        cond_entropy(EX1_JOINT, ["X", "Y"])
    with pytest.raises(UnknownVariable):
        cond_entropy(EX1_JOINT, ["W"])


@settings(deadline=None, max_examples=60)
@given(st.lists(st.integers(0, 5), min_size=6, max_size=6).filter(lambda w: sum(w) > 0))
def test_information_inequalities(weights):
    """0 <= I(X;Y) <= min(H(X), H(Y)) and H(Y|X) <= H(Y)."""
    total = sum(weights)
    p = Pmf([("X", BIT), ("Y", TRIT)], [Fraction(w, total) for w in weights])
    mi = mutual_information(p, ["X"], ["Y"])
    hx, hy = joint_entropy(p, ["X"]), joint_entropy(p, ["Y"])
    assert mi >= -1e-12
    assert mi <= min(hx, hy) + 1e-12
    assert cond_entropy(p, ["X"]) <= hy + 1e-12
    assert entropy(p) == pytest.approx(hx + cond_entropy(p, ["X"]), abs=1e-9)


def brute_force_cmi(p: Pmf) -> float:
    """I(A;B|C) as the plain triple sum over a joint with scope (A, B, C)."""
    joint = {idx: float(m) for idx, m in p.items()}
    na, nb, nc = p.shape
    total = 0.0
    for a in range(na):
        for b in range(nb):
            for c in range(nc):
                pabc = joint[(a, b, c)]
                if pabc == 0:
                    continue
                pc = sum(joint[(i, j, c)] for i in range(na) for j in range(nb))
                pac = sum(joint[(a, j, c)] for j in range(nb))
                pbc = sum(joint[(i, b, c)] for i in range(na))
                total += pabc * math.log2(pabc * pc / (pac * pbc))
    return total


@settings(deadline=None, max_examples=60)
@given(st.lists(st.integers(0, 4), min_size=12, max_size=12).filter(lambda w: sum(w) > 0))
def test_cond_mutual_information_matches_triple_sum(weights):
    total = sum(weights)
    p = Pmf([("A", BIT), ("B", TRIT), ("C", BIT)], [Fraction(w, total) for w in weights])
    assert cond_mutual_information(p, ["A"], ["B"], ["C"]) == pytest.approx(
        brute_force_cmi(p), abs=1e-9
    )


@settings(deadline=None, max_examples=60)
@given(st.lists(st.integers(0, 3), min_size=12, max_size=12).filter(lambda w: sum(w) > 0))
def test_joint_entropy_independence_bound(weights):
    """H(Y1, Y2, Y3) <= sum H(Yi), with equality iff the Yi are independent."""
    total = sum(weights)
    p = Pmf([("A", BIT), ("B", TRIT), ("C", BIT)], [Fraction(w, total) for w in weights])
    parts = [joint_entropy(p, [v]) for v in p.variables]
    assert entropy(p) <= sum(parts) + 1e-9
    if is_independent(p, [["A"], ["B"], ["C"]]):
        assert sum(parts) == pytest.approx(entropy(p), abs=1e-9)
    else:
        assert sum(parts) - entropy(p) > 1e-12


def test_independent_factors_meet_the_bound():
    skewed = Pmf([("B", TRIT)], [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
    p = product(Pmf.uniform("A", BIT), skewed)
    assert entropy(p) == pytest.approx(joint_entropy(p, ["A"]) + joint_entropy(p, ["B"]), abs=1e-12)


def test_markov_chain_forgets_the_past():
    """X -> Y -> Z: I(X;Z|Y) = 0 while I(X;Z) > 0."""
    text = (
        "scm markov {\n"
        "  noise N_X ~ {0: 1/3, 1: 2/3}\n"
        "  noise N_Y ~ {0: 3/4, 1: 1/4}\n"
        "  noise N_Z ~ {0: 2/5, 1: 3/5}\n"
        "  var X : {0, 1} = N_X\n"
        "  var Y : {0, 1} = if N_Y = 0 then X else 1 - X\n"
        "  var Z : {0, 1, 2} = Y + N_Z\n"
        "}\n"
    )
    joint = entailed(parse_scm(text), ["X", "Y", "Z"])
    assert cond_mutual_information(joint, ["X"], ["Z"], ["Y"]) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(joint, ["X"], ["Z"]) > 1e-6
