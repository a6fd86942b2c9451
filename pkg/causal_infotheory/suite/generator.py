from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Sequence
import numpy as np
from ..dist import FiniteRange, Pmf
from ..scm import (
    DEFAULT_MAX_CELLS,
    NOISE,
    Assignment,
    LookupTable,
    Protocol,
    Scm,
    Variable,
)
from ..utils import load_config


def _rational(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass
class GenConfig:
    """Random model generator settings.

    Masses are integer weights in [0, pmf_grain] normalized exactly; the
    edge probability is rational and drawn with integer arithmetic only.
    """

    seed: int = 0
    max_endogenous: int = 4
    max_range: int = 3
    max_noise_range: int = 3
    edge_probability: Fraction = Fraction(1, 2)
    pmf_grain: int = 6
    max_joint_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self):
        self.edge_probability = _rational(self.edge_probability)
        self.check()

    def check(self) -> None:
        assert 0 <= self.seed < 2 ** 64, "seed must be a 64-bit unsigned integer"
        assert self.max_endogenous >= 1, "max_endogenous must be at least 1"
        assert self.max_range >= 1, "max_range must be at least 1"
        assert self.max_noise_range >= 1, "max_noise_range must be at least 1"
        assert 0 <= self.edge_probability <= 1, "edge_probability must lie in [0, 1]"
        assert self.pmf_grain >= 1, "pmf_grain must be positive"
        assert self.max_joint_cells >= 1, "max_joint_cells must be positive"

    @classmethod
    def from_config(cls, config_fname: str, **overrides) -> "GenConfig":
        """Build from a YAML/JSON file; non-None overrides win."""
        config = dict(load_config(config_fname) or {})
        known = {k: v for k, v in config.items() if k in cls.__dataclass_fields__}
        known.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**known)

    def to_dict(self) -> dict:
        record = asdict(self)
        record["edge_probability"] = str(self.edge_probability)
        return record

    def rng(self, trial: int) -> np.random.Generator:
        """PCG64 stream of one trial, independent of every other trial."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, trial])))


def draw(rng: np.random.Generator, low: int, high: int) -> int:
    """Uniform integer in [low, high]."""
    return int(rng.integers(low, high + 1))


def shuffled(rng: np.random.Generator, items: Sequence) -> List:
    items = list(items)
    for i in range(len(items) - 1, 0, -1):
        j = draw(rng, 0, i)
        items[i], items[j] = items[j], items[i]
    return items


def random_weights(rng: np.random.Generator, size: int, grain: int) -> List[int]:
    """Integer weights in [0, grain]; an all-zero draw is redrawn."""
    while True:
        weights = [int(w) for w in rng.integers(0, grain + 1, size=size)]
        if sum(weights) > 0:
            return weights


def _bernoulli(rng: np.random.Generator, p: Fraction) -> bool:
    return int(rng.integers(0, p.denominator)) < p.numerator


def gen_scm(
    cfg: GenConfig,
    rng: Optional[np.random.Generator] = None,
    chain: bool = False,
    name: str = "generated",
) -> Scm:
    """Random valid model, a deterministic function of the rng stream.

    Edges only go from lower to higher declaration index, so the graph is
    acyclic by construction. With `chain` the model is X -> Y -> Z with
    ranges of at least two values.
    """
    rng = rng if rng is not None else cfg.rng(0)
    if chain:
        ids = ["X", "Y", "Z"]
        low, high = 2, max(2, cfg.max_range)
    else:
        ids = [f"V{i + 1}" for i in range(draw(rng, 1, cfg.max_endogenous))]
        low, high = 1, cfg.max_range
    ranges = {var: FiniteRange.of_size(draw(rng, low, high)) for var in ids}

    parents = {var: [] for var in ids}
    if chain:
        parents["Y"], parents["Z"] = ["X"], ["Y"]
    else:
        for j, child in enumerate(ids):
            for parent in ids[:j]:
                if _bernoulli(rng, cfg.edge_probability):
                    parents[child].append(parent)

    noise, noise_dist, assignments = [], {}, []
    for var in ids:
        noise_id = f"N_{var}"
        noise_range = FiniteRange.of_size(draw(rng, 1, cfg.max_noise_range))
        weights = random_weights(rng, len(noise_range), cfg.pmf_grain)
        noise.append(Variable(noise_id, noise_range, NOISE))
        noise_dist[noise_id] = Pmf.from_weights(noise_id, noise_range, weights)
        inputs = parents[var] + [noise_id]
        shape = tuple(len(ranges[p]) for p in parents[var]) + (len(noise_range),)
        values = rng.integers(0, len(ranges[var]), size=shape)
        rows = {idx: int(values[idx]) for idx in np.ndindex(*shape)}
        assignments.append(Assignment(var, tuple(parents[var]), noise_id, LookupTable(inputs, rows)))

    return Scm(
        name,
        [Variable(var, ranges[var]) for var in ids],
        noise,
        assignments,
        noise_dist,
        max_cells=cfg.max_joint_cells,
    )


def gen_protocol(
    model: Scm, target: str, cfg: GenConfig, rng: np.random.Generator
) -> Protocol:
    """Random protocol for `target`; zero-mass values are allowed."""
    weights = random_weights(rng, len(model.range_of(target)), cfg.pmf_grain)
    return Protocol(target, Pmf.from_weights(f"{target}_aux", model.range_of(target), weights))
