import itertools
from fractions import Fraction
from typing import Iterable, List
import numpy as np
from ..dist import Pmf, marginalize
from ..errors import BadQuery, BadScope
from .model import Scm


def _query_variables(model: Scm, variables: Iterable[str]) -> List[str]:
    variables = list(variables)
    if len(variables) == 0:
        raise BadScope("query needs at least one variable")
    model.require_endogenous(variables)
    model.require_valid()
    model.check_size()
    return model.in_declaration_order(variables)


def _zeros(shape) -> np.ndarray:
    table = np.empty(shape, dtype=object)
    table.fill(Fraction(0))
    return table


def conditional_table(model: Scm, var: str) -> np.ndarray:
    """P(var | parents) as an object array over (parent ranges..., var range)."""
    a = model.assignments[var]
    mechanism = model.mechanism(var)
    noise = model.noise_dist[a.noise].table
    cpd = _zeros(mechanism.shape[:-1] + (len(model.range_of(var)),))
    # each (parents, noise) cell sends its noise mass to the value it produces
    for idx in np.ndindex(*mechanism.shape):
        cpd[idx[:-1] + (mechanism[idx],)] += noise[idx[-1]]
    return cpd


def entailed(model: Scm, variables: Iterable[str]) -> Pmf:
    """Exact joint of `variables` by a topological forward pass.

    The joint over the processed variables is extended one variable at a
    time with its assignment-induced conditional table, then marginalized.

    Args:
        model (Scm): Valid model.
        variables (Iterable[str]): Non-empty set of endogenous ids.

    Returns:
        Pmf: Joint over `variables` in declaration order.
    """
    variables = _query_variables(model, variables)
    joint = np.array(Fraction(1), dtype=object)
    order: List[str] = []
    for var in model.topological_order:
        parents = model.assignments[var].parents
        cpd = conditional_table(model, var)
        # parent axes into the order the joint holds them, var axis last
        positions = [order.index(p) for p in parents]
        perm = list(np.argsort(positions)) + [len(parents)]
        cpd = np.transpose(cpd, perm)
        # size-1 axes for processed non-parents so the product broadcasts
        shape = [
            len(model.range_of(done)) if done in parents else 1 for done in order
        ]
        cpd = cpd.reshape(shape + [cpd.shape[-1]])
        # joint(order) * P(var | parents), a new trailing axis for var
        joint = joint[..., None] * cpd
        order.append(var)
    # topological axes back to declaration order
    declared = list(model.endogenous_ids)
    joint = np.transpose(joint, [order.index(var) for var in declared])
    full = Pmf([(var, model.range_of(var)) for var in declared], joint, check=False)
    return marginalize(full, variables)


def entailed_oracle(model: Scm, variables: Iterable[str]) -> Pmf:
    """Same contract as `entailed`, by enumerating the joint noise space.

    Every noise configuration is pushed through the assignment bodies in
    topological order and its rational mass accumulated.
    """
    variables = _query_variables(model, variables)
    ranges = model.ranges
    noise_ids = model.noise_ids
    table = _zeros(tuple(len(ranges[var]) for var in variables))
    for config in itertools.product(*(range(len(ranges[n])) for n in noise_ids)):
        mass = Fraction(1)
        for n, value in zip(noise_ids, config):
            mass *= model.noise_dist[n].table[value]
        if mass == 0:
            continue
        env = dict(zip(noise_ids, config))
        for var in model.topological_order:
            a = model.assignments[var]
            env[var] = a.body.evaluate(env, ranges, ranges[var])
        table[tuple(env[var] for var in variables)] += mass
    return Pmf([(var, ranges[var]) for var in variables], table, check=False)


def has_total_causal_effect(model: Scm, cause: str, effect: str) -> bool:
    """True iff some atomic intervention on `cause` moves the marginal of `effect`."""
    from .interventions import Atomic, post_dist

    if cause == effect:
        raise BadQuery("cause and effect must differ")
    model.require_endogenous([cause, effect])
    observed = entailed(model, [effect])
    for x in range(len(model.range_of(cause))):
        if post_dist(model, Atomic(cause, x), [effect]) != observed:
            return True
    return False
