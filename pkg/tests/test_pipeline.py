import pytest

from kvwb.builtins import builtin_names, get_builtin
from kvwb.pipeline import STAGE_ORDER, run_pipeline
from kvwb.serialize import dumps_canonical, model_from_json, model_to_json

GOOD = ["classical:2", "classical:3", "classical:4", "classical:5",
        "qubit:real", "qubit:complex", "qutrit:complex"]


def run(name, **kw):
    return run_pipeline(get_builtin(name), **kw)


@pytest.mark.parametrize("name", GOOD)
def test_regular_models_pass_every_stage(name):
    rep = run(name)
    assert rep.failures == []
    assert rep.ok
    assert [s.name for s in rep.stages] == STAGE_ORDER


def test_squit_fails_exactly_where_it_should():
    rep = run("squit")
    assert rep.failures == ["sharpness", "self-duality"]
    assert not rep.ok
    # the square is the classic weakly-but-not-strongly self-dual example
    assert rep.stage("weak-self-duality").status == "pass"
    assert rep.stage("jordan-recovery").status != "pass"


def test_squit_klein_cascade():
    rep = run("squit:klein")
    assert rep.failures == ["sharpness", "irreducibility", "spin-form"]
    # without a distinguished form the form-dependent stages cannot run;
    # the conjugate search needs only the group, so it still does
    for later in ("unitarity", "self-duality", "weak-self-duality",
                  "jordan-recovery", "identification"):
        assert rep.stage(later).status == "not-applicable"
    assert rep.stage("conjugate").status == "pass"


def test_expectations_flip_the_verdict():
    rep = run("squit", expect=("not-sharp", "not-self-dual"))
    assert rep.ok
    rep2 = run("squit", expect=("not-sharp",))
    assert not rep2.ok
    rep3 = run("classical:3", expect=("not-sharp",))
    assert not rep3.ok


def test_unknown_expectation_token_rejected():
    with pytest.raises(ValueError):
        run("squit", expect=("not-a-real-token",))


def test_identification_contents():
    rep = run("classical:3")
    names = rep.stage("identification").data["candidates"]
    assert names == ["RealSym(1) + RealSym(1) + RealSym(1)"]
    repq = run("qubit:complex")
    assert "ComplexHerm(2)~SpinFactor(3)" in repq.stage(
        "identification").data["candidates"]


def test_report_json_is_deterministic():
    a = dumps_canonical(run("classical:3").to_json())
    b = dumps_canonical(run("classical:3").to_json())
    assert a == b


def test_report_json_survives_model_round_trip():
    m = get_builtin("squit")
    m2 = model_from_json(model_to_json(m))
    a = dumps_canonical(run_pipeline(m).to_json())
    b = dumps_canonical(run_pipeline(m2).to_json())
    assert a == b


def test_markdown_contains_the_stage_table():
    md = run("squit").to_markdown()
    for name in STAGE_ORDER:
        assert name in md
    assert "fail" in md and "pass" in md


def test_quantum_report_embeds_model_spec():
    blob = run("qubit:complex").to_json()
    assert blob["model_spec"]["states"]["kind"] == "quantum"
    assert blob["model"]["name"] == "qubit:complex"
    assert blob["model"]["backend"] == "quantum"
