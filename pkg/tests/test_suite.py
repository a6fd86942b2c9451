import os
from fractions import Fraction
import numpy as np
import pytest
from causal_infotheory.dsl import parse_pmf_literal, parse_scm, serialize_scm
from causal_infotheory.report import DPI, NEGATIVE_GAIN, Witness
from causal_infotheory.scm import Protocol, entailed, structurally_equal
from causal_infotheory.suite import (
    GenConfig,
    HuntLog,
    Sketch,
    check_all,
    check_trials,
    gen_protocol,
    gen_scm,
    hunt,
    load_hunt_log,
    random_weights,
    shrink,
)

SWEEP = range(500)


def load(name: str):
    with open(f"tests/fixtures/{name}.scm", encoding="utf-8") as f:
        return parse_scm(f.read())


EX1 = load("paper_ex1")
GATE = load("gate")
CHAIN = load("dpi_chain")
AGENT = load("contrast_agent")

BERN_THIRD = Protocol.over(EX1, "X", [Fraction(2, 3), Fraction(1, 3)])
GATE_COIN = Protocol.over(GATE, "X", [Fraction(1, 2), Fraction(1, 2)])
CHAIN_POINT = Protocol.point(CHAIN, "X", 0)


def props(reports):
    return [r.prop for r in reports]


def random_case(seed: int):
    cfg = GenConfig(seed=seed)
    rng = cfg.rng(0)
    model = gen_scm(cfg, rng)
    x = model.endogenous_ids[int(rng.integers(0, len(model.endogenous_ids)))]
    return model, gen_protocol(model, x, cfg, rng)


def test_gen_config_from_files():
    """YAML and commented JSON configs; explicit overrides win."""
    cfg = GenConfig.from_config("tests/fixtures/gen_config.yaml")
    assert cfg.seed == 7 and cfg.edge_probability == Fraction(1, 2)
    assert cfg.max_joint_cells == 10 ** 6
    cfg = GenConfig.from_config("tests/fixtures/gen_config.json", seed=11, pmf_grain=None)
    assert cfg.seed == 11
    assert cfg.pmf_grain == 4
    assert cfg.edge_probability == Fraction(1, 4)
    assert cfg.to_dict()["edge_probability"] == "1/4"
    with pytest.raises(AssertionError):
        GenConfig(max_range=0)


def test_generator_is_deterministic():
    cfg = GenConfig(seed=3)
    assert structurally_equal(gen_scm(cfg, cfg.rng(5)), gen_scm(cfg, cfg.rng(5)))
    assert serialize_scm(gen_scm(cfg, cfg.rng(5))) == serialize_scm(gen_scm(cfg, cfg.rng(5)))


def test_generated_models_are_valid():
    cfg = GenConfig(seed=1)
    for trial in range(1, 101):
        model = gen_scm(cfg, cfg.rng(trial))
        assert model.report().ok, serialize_scm(model)
        assert 1 <= len(model.endogenous_ids) <= cfg.max_endogenous


def test_generator_shapes():
    """A single-variable model, and the constrained chain."""
    single = gen_scm(GenConfig(max_endogenous=1))
    assert single.endogenous_ids == ("V1",)
    assert single.assignments["V1"].parents == ()
    assert single.assignments["V1"].noise == "N_V1"
    chain = gen_scm(GenConfig(seed=2), chain=True)
    assert chain.endogenous_ids == ("X", "Y", "Z")
    assert chain.assignments["Y"].parents == ("X",)
    assert chain.assignments["Z"].parents == ("Y",)
    assert all(len(chain.range_of(v)) >= 2 for v in chain.endogenous_ids)


def test_random_weights_never_vanish():
    rng = GenConfig(seed=4).rng(0)
    for _ in range(200):
        weights = random_weights(rng, 2, 1)
        assert sum(weights) > 0 and all(0 <= w <= 1 for w in weights)


def test_check_all_on_example():
    """Example model: twelve passing records, H_c = 1 bit."""
    reports = check_all(EX1, BERN_THIRD, seed=0)
    assert all(r.passed for r in reports)
    assert len(reports) == 12
    assert props(reports).count("Lemma-B1") == 2
    (plug_in,) = [r for r in reports if r.prop == "Prop-3.2"]
    assert plug_in.lhs == pytest.approx(1.0, abs=1e-12)
    assert plug_in.rhs == pytest.approx(1.0, abs=1e-12)


def test_check_all_records_existence_claims():
    """Gate: causal entropy above entropy and a negative gain, as info records."""
    reports = check_all(GATE, GATE_COIN)
    assert all(r.passed for r in reports)
    (above,) = [r for r in reports if r.prop == "Prop-3.5"]
    assert above.status == "info"
    assert above.rhs == pytest.approx(0.5, abs=1e-12)
    assert above.lhs == pytest.approx(0.286397, abs=1e-6)
    (negative,) = [r for r in reports if r.prop == "Cor-4.1"]
    assert negative.lhs == pytest.approx(-0.213603, abs=1e-6)


def test_check_all_records_dpi_violation():
    reports = check_all(CHAIN, CHAIN_POINT, seed=3)
    assert all(r.passed for r in reports)
    (dpi,) = [r for r in reports if r.prop == "DPI-Violation"]
    assert dpi.lhs == pytest.approx(0.5, abs=1e-9)
    assert dpi.rhs == pytest.approx(1.0, abs=1e-9)
    assert dpi.witness["target"] == ["Y"] and dpi.witness["downstream"] == ["Z"]


def test_check_all_conditional_queries():
    """Three variables leave room for a conditioning variable."""
    uniform = Protocol.over(AGENT, "X", [Fraction(1, 2), Fraction(1, 2)])
    for seed in range(4):
        reports = check_all(AGENT, uniform, seed=seed)
        assert all(r.passed for r in reports), [r.to_dict() for r in reports if not r.passed]
        assert "Prop-CondHc" in props(reports)
        assert "Prop-4.5" in props(reports)
        # X moves Z but never Y
        (plug_in,) = [r for r in reports if r.prop == "Prop-3.2"]
        assert ("NoEffect-Ic" in props(reports)) == (plug_in.witness["target"] == ["Y"])


def test_check_all_sweep():
    """No universal proposition fails on generator output."""
    for seed in SWEEP:
        model, protocol = random_case(seed)
        reports = check_all(model, protocol, seed=seed)
        failed = [r.to_dict() for r in reports if not r.passed]
        assert not failed, (seed, serialize_scm(model), failed)
        assert reports[0].prop == "Inference-Oracle"


def test_check_trials_merge_in_seed_order():
    text = serialize_scm(EX1)
    serial = check_trials(text, "X", "{0: 2/3, 1: 1/3}", seed=5, trials=3)
    seeds = [r.witness["seed"] for r in serial]
    assert seeds == sorted(seeds) and set(seeds) == {5, 6, 7}
    parallel = check_trials(text, "X", "{0: 2/3, 1: 1/3}", seed=5, trials=3, jobs=2)
    assert [r.to_dict() for r in parallel] == [r.to_dict() for r in serial]


def test_sketch_preserves_model():
    """The tabular copy a shrinker edits entails the same law."""
    model, protocol = Sketch.of(CHAIN, CHAIN_POINT, "copy").to_model(10 ** 6)
    assert entailed(model, model.endogenous_ids) == entailed(CHAIN, CHAIN.endogenous_ids)
    assert protocol.dist.masses() == CHAIN_POINT.dist.masses()


def test_hunt_negative_gain_from_gate():
    """Seeded with the gate, the first trial yields a replayable witness."""
    result = hunt(NEGATIVE_GAIN, GenConfig(seed=9), budget=5, candidates=[(GATE, GATE_COIN)])
    assert result.trials_run == 1
    (witness,) = result.witnesses
    assert witness.trial == 0 and witness.target == ("Y",)
    assert witness.relation == "Ic(Y) < 0"
    lhs, rhs = witness.replay()
    assert lhs == pytest.approx(witness.lhs, abs=1e-12)
    assert rhs == 0.0
    assert witness.holds()
    assert result.outcomes[0].margin == pytest.approx(0.213603, abs=1e-6)


def test_hunt_dpi_from_chain():
    result = hunt(DPI, GenConfig(seed=9), budget=1, candidates=[(CHAIN, CHAIN_POINT)])
    (witness,) = result.witnesses
    assert witness.target == ("Y",) and witness.downstream == ("Z",)
    assert witness.relation == "Ic(Y) < Ic(Z)"
    assert witness.holds()
    model = parse_scm(witness.scm_text)
    assert model.endogenous_ids == ("X", "Y", "Z")


def test_hunt_is_schedule_independent():
    """Identical seed, config and budget give identical outcomes for any jobs."""
    cfg = GenConfig(seed=5)
    serial = hunt(NEGATIVE_GAIN, cfg, budget=20, limit=20)
    parallel = hunt(NEGATIVE_GAIN, cfg, budget=20, limit=20, jobs=2)
    assert [(o.trial, o.found) for o in serial.outcomes] == [
        (o.trial, o.found) for o in parallel.outcomes
    ]
    assert [w.scm_text for w in serial.witnesses] == [w.scm_text for w in parallel.witnesses]
    for witness in serial.witnesses:
        assert witness.holds()


def test_hunt_with_empty_budget():
    result = hunt(DPI, GenConfig(), budget=0)
    assert result.trials_run == 0 and result.witnesses == []
    with pytest.raises(AssertionError):
        hunt("bigger-is-better", GenConfig(), budget=1)


def test_witness_files_and_run_log(tmp_path):
    """Witness files and the hdf5 run log reload intact."""
    cfg = GenConfig(seed=9)
    result = hunt(NEGATIVE_GAIN, cfg, budget=3, candidates=[(GATE, GATE_COIN)])
    (witness,) = result.witnesses
    paths = witness.save(str(tmp_path), "negative_gain_s9_t0")
    assert [os.path.basename(p) for p in paths] == [
        "negative_gain_s9_t0.scm",
        "negative_gain_s9_t0.json",
    ]
    reloaded = Witness.from_files(paths[1])
    assert reloaded.scm_text == witness.scm_text
    assert reloaded.protocol == witness.protocol
    assert reloaded.target == witness.target
    assert reloaded.holds()

    log_path = HuntLog(str(tmp_path), NEGATIVE_GAIN).save(result, paths)
    assert log_path.endswith(os.path.join("logs", "log_negative-gain.hdf5"))
    log = load_hunt_log(str(tmp_path))
    assert log.meta.kind == NEGATIVE_GAIN
    assert log.meta.seed == 9 and log.meta.budget == 3
    assert list(log.meta.witness_paths) == paths
    assert list(log.trials.trial) == [0]
    assert bool(log.trials.found[0])
    assert load_hunt_log(log_path).meta.kind == NEGATIVE_GAIN


def test_empty_run_log(tmp_path):
    result = hunt(DPI, GenConfig(seed=2), budget=0)
    HuntLog(str(tmp_path), DPI).save(result, [])
    log = load_hunt_log(str(tmp_path))
    assert len(log.trials.trial) == 0
    assert list(log.meta.witness_paths) == []


def replay_checks(witness: Witness, seeds=range(32)):
    """check_all on the witness model for several query seeds."""
    model = parse_scm(witness.scm_text)
    x = witness.intervened
    protocol = Protocol(x, parse_pmf_literal(witness.protocol, model.range_of(x), f"{x}_aux"))
    return [r for seed in seeds for r in check_all(model, protocol, seed=seed)]


def negative_records(reports, witness: Witness):
    return [r for r in reports if r.prop == "Cor-4.1" and r.witness["target"] == list(witness.target)]


def dpi_records(reports, witness: Witness):
    return [
        r
        for r in reports
        if r.prop == "DPI-Violation"
        and r.witness["target"] == list(witness.target)
        and r.witness["downstream"] == list(witness.downstream)
    ]


def test_witnesses_replay_through_check_all():
    """Shrunk witnesses pass every universal check and show up as info records."""
    gate = hunt(NEGATIVE_GAIN, GenConfig(seed=9), budget=1, candidates=[(GATE, GATE_COIN)])
    (witness,) = gate.witnesses
    reports = replay_checks(witness)
    assert all(r.passed for r in reports)
    assert negative_records(reports, witness)

    chain = hunt(DPI, GenConfig(seed=9), budget=1, candidates=[(CHAIN, CHAIN_POINT)])
    (witness,) = chain.witnesses
    reports = replay_checks(witness, seeds=[0])
    assert all(r.passed for r in reports)
    (record,) = dpi_records(reports, witness)
    assert record.lhs == pytest.approx(witness.lhs, abs=1e-9)
    assert record.rhs == pytest.approx(witness.rhs, abs=1e-9)


def test_generated_hunts_find_both_kinds():
    """Without seeded candidates the generator alone yields both kinds of witness."""
    cfg = GenConfig(seed=7)
    (negative,) = hunt(NEGATIVE_GAIN, cfg, budget=10000).witnesses
    assert negative.holds()
    reports = replay_checks(negative)
    assert all(r.passed for r in reports)
    assert negative_records(reports, negative)

    (dpi,) = hunt(DPI, cfg, budget=10000).witnesses
    assert dpi.holds()
    reports = replay_checks(dpi, seeds=[0])
    assert all(r.passed for r in reports)
    assert dpi_records(reports, dpi)


def test_dpi_witness_keeps_chain_ranges():
    """Shrinking never collapses a chain variable to a single value."""
    (witness,) = hunt(DPI, GenConfig(seed=7), budget=10000).witnesses
    model = parse_scm(witness.scm_text)
    for var in (witness.intervened, *witness.target, *witness.downstream):
        assert len(model.range_of(var)) >= 2, witness.scm_text
    assert witness.rhs - witness.lhs > 1e-9


def test_shrink_drops_zero_weight_noise_labels():
    """A dead noise label ahead of live ones is removed, and no zero weight survives."""
    sketch = Sketch.of(GATE, GATE_COIN, "padded_gate")
    sketch.noise_labels["Y"].insert(0, "spare")
    sketch.weights["Y"].insert(0, Fraction(0))
    sketch.tables["Y"] = np.insert(sketch.tables["Y"], 0, 0, axis=-1)
    model, protocol = sketch.to_model(10 ** 6)
    assert entailed(model, model.endogenous_ids) == entailed(GATE, GATE.endogenous_ids)

    small, lhs, rhs = shrink(NEGATIVE_GAIN, sketch, ("Y",), (), 10 ** 6)
    assert "spare" not in small.noise_labels["Y"]
    assert all(w > 0 for weights in small.weights.values() for w in weights)
    assert lhs < rhs - 1e-9
