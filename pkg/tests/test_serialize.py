import json

import numpy as np
import pytest

from cpmaps import channels, scenarios, serialize
from cpmaps.linalg import expm_hermitian
from cpmaps.states import ValidationError, marginal

from randspecs import random_spec, random_unitary


def test_fmt_float():
    assert serialize.fmt_float(-0.0) == "0.0000000000000000e+00"
    assert serialize.fmt_float(0.1) == "1.0000000000000001e-01"
    with pytest.raises(ValueError):
        serialize.fmt_float(float("nan"))


def test_dumps_is_valid_json_and_deterministic():
    obj = {"b": [1, 2.5, True, None], "a": {"x": "s", "y": [[1.0, 0.0]]}, "empty": []}
    text = serialize.dumps(obj)
    assert text == serialize.dumps(obj)
    assert json.loads(text) == {"b": [1, 2.5, True, None], "a": {"x": "s", "y": [[1.0, 0.0]]}, "empty": []}
    with pytest.raises(TypeError):
        serialize.dumps({1, 2})


def test_matrix_round_trip(rng):
    m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    back = serialize.decode_matrix(json.loads(serialize.dumps(serialize.encode_matrix(m))))
    np.testing.assert_array_equal(back, m)
    with pytest.raises(ValidationError):
        serialize.decode_matrix({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValidationError):
        serialize.decode_matrix({"rows": 2})


def test_kraus_round_trip(rng):
    spec = random_spec(rng, class_two=True)
    ks = channels.build_phiII_kraus(spec, random_unitary(rng, spec.n * spec.dim_e), 0.25)
    back = serialize.decode_kraus(json.loads(serialize.dumps(serialize.encode_kraus(ks))))
    assert back.label == "phiII" and back.time_tag == 0.25
    np.testing.assert_array_equal(np.array(back.operators), np.array(ks.operators))


@pytest.mark.parametrize("class_two", [False, True])
def test_spec_round_trip(rng, class_two):
    spec = random_spec(rng, class_two=class_two)
    back = serialize.decode_spec(json.loads(serialize.dumps(serialize.encode_spec(spec))))
    assert back.is_class_two == class_two
    np.testing.assert_allclose(marginal(back), marginal(spec), atol=1e-15)


def test_w_block_derived_from_psi(rng):
    spec = random_spec(rng, class_two=True)
    obj = serialize.encode_spec(spec)
    obj["w_block"] = None
    back = serialize.decode_spec(obj)
    np.testing.assert_allclose(back.w, spec.w, atol=1e-12)


def test_decode_spec_errors():
    with pytest.raises(ValidationError):
        serialize.decode_spec([])
    with pytest.raises(ValidationError):
        serialize.decode_spec({"n": 2})
    with pytest.raises(ValidationError, match="w_block or psi_block"):
        serialize.decode_spec({"n": 2, "d": 1, "p": [1.0]})


def test_scenario_unitary_sources(tmp_path):
    sc = scenarios.named_case("figure")
    u = sc.unitary(0.9)
    fixed = serialize.scenario_from_json(serialize.scenario_to_json(sc.spec, unitary=u))
    np.testing.assert_array_equal(fixed.unitary(5.0), u)
    h = scenarios.random_hamiltonian(4, 3)
    ham = serialize.scenario_from_json(serialize.scenario_to_json(sc.spec, hamiltonian=h))
    np.testing.assert_allclose(ham.unitary(0.4), expm_hermitian(h, 0.4), atol=1e-14)
    seeded = serialize.scenario_from_json(serialize.encode_spec(sc.spec))
    again = serialize.scenario_from_json(serialize.scenario_to_json(sc.spec, seed=serialize.DEFAULT_SCENARIO_SEED))
    np.testing.assert_array_equal(seeded.unitary(0.4), again.unitary(0.4))
    with pytest.raises(ValidationError):
        serialize.scenario_from_json(serialize.scenario_to_json(sc.spec, unitary=np.eye(2)))


def test_load_scenario(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        serialize.load_scenario(path)
    good = tmp_path / "good.json"
    serialize.write_json(serialize.scenario_to_json(scenarios.named_case("cesar").spec, seed=1), good)
    assert serialize.load_scenario(good).name == "good"


def test_write_csv(tmp_path):
    text = serialize.write_csv(("a", "b"), [(1, 0.5)], tmp_path / "x.csv")
    assert text == "a,b\n1.0000000000000000e+00,5.0000000000000000e-01\n"
    assert (tmp_path / "x.csv").read_text() == text
