import math
from fractions import Fraction
from typing import Iterable, List
import numpy as np
from ..dist import Pmf, condition, expectation, marginalize
from ..errors import BadScope, InconsistentResult, UnknownVariable
from ..report import TOL


def log2_fraction(q: Fraction) -> float:
    """log2 of a positive rational without converting it to a float first."""
    return math.log2(q.numerator) - math.log2(q.denominator)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits, 0 log 0 = 0."""
    masses = [m for m in p.masses() if m != 0]
    probs = np.array([float(m) for m in masses])
    logs = np.array([log2_fraction(m) for m in masses])
    return -math.fsum(probs * logs) + 0.0


def _sets(p: Pmf, *groups: Iterable[str]) -> List[List[str]]:
    groups = [list(g) for g in groups]
    flat = [v for g in groups for v in g]
    if len(flat) != len(set(flat)):
        raise BadScope("argument sets must be disjoint")
    unknown = [v for v in flat if v not in p.variables]
    if unknown:
        raise UnknownVariable(f"{', '.join(unknown)} not in scope {list(p.variables)}")
    return groups


def joint_entropy(p: Pmf, variables: Iterable[str]) -> float:
    return entropy(marginalize(p, variables))


def cond_entropy(p: Pmf, given: Iterable[str]) -> float:
    """H(rest | given) = E_{z~p_Z}[H(rest | Z=z)], zero-mass z skipped."""
    given = list(given)
    (given,) = _sets(p, given)
    if len(given) == 0:
        return entropy(p)
    if len(given) >= len(p.variables):
        raise BadScope("conditioning set must be a proper subset of the scope")
    p_given = marginalize(p, given)

    def slice_entropy(idx):
        return entropy(condition(p, dict(zip(p_given.variables, idx))))

    return expectation(p_given, slice_entropy)


def _kl_form(p: Pmf, left: List[str], right: List[str]) -> float:
    joint = marginalize(p, left + right)
    p_left = marginalize(joint, left)
    p_right = marginalize(joint, right)
    left_pos = [joint.axis(v) for v in p_left.variables]
    right_pos = [joint.axis(v) for v in p_right.variables]
    terms = []
    for idx, m in joint.items():
        if m == 0:
            continue
        marginal = p_left.table[tuple(idx[i] for i in left_pos)] * p_right.table[
            tuple(idx[i] for i in right_pos)
        ]
        terms.append(float(m) * log2_fraction(m / marginal))
    return math.fsum(terms)


def mutual_information(p: Pmf, left: Iterable[str], right: Iterable[str]) -> float:
    """I(left; right) in bits.

    Computed as the sum over p(x,y) log p(x,y)/(p(x)p(y)) and as
    H(right) - H(right | left); the second form is returned.

    Raises:
        InconsistentResult: The two forms disagree by more than 1e-9 bits.
    """
    left, right = _sets(p, left, right)
    if len(left) == 0 or len(right) == 0:
        raise BadScope("mutual information needs two non-empty sets")
    joint = marginalize(p, left + right)
    value = joint_entropy(joint, right) - cond_entropy(joint, left)
    kl = _kl_form(p, left, right)
    if abs(value - kl) > TOL:
        raise InconsistentResult(
            f"I({','.join(left)};{','.join(right)}): {value!r} vs {kl!r}"
        )
    return value


def cond_mutual_information(
    p: Pmf, left: Iterable[str], right: Iterable[str], given: Iterable[str]
) -> float:
    """I(left; right | given) = H(right | given) - H(right | left, given).

    Cross-checked against H(left | given) - H(left | right, given).
    """
    left, right, given = _sets(p, left, right, given)
    if len(given) == 0:
        return mutual_information(p, left, right)
    if len(left) == 0 or len(right) == 0:
        raise BadScope("conditional mutual information needs two non-empty sets")
    joint = marginalize(p, left + right + given)
    right_given = marginalize(joint, right + given)
    left_given = marginalize(joint, left + given)
    value = cond_entropy(right_given, given) - cond_entropy(joint, left + given)
    mirror = cond_entropy(left_given, given) - cond_entropy(joint, right + given)
    if abs(value - mirror) > TOL:
        raise InconsistentResult(
            f"I({','.join(left)};{','.join(right)}|{','.join(given)}): "
            f"{value!r} vs {mirror!r}"
        )
    return value
