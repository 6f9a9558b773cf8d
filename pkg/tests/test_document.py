from __future__ import annotations

import copy
import io
import json
from importlib import resources

import jsonschema
import pytest

from helpers import fixture_json
from tropex import FIXTURES, fixture_path
from tropex.document import build_sigma, load_expansion, parse_document, parse_input, parse_string
from tropex.errors import InputError


def schema():
    return json.loads(resources.files("tropex").joinpath("schema/input-v1.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_match_schema(name):
    jsonschema.validate(fixture_json(name), schema())


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_parse(name):
    doc = parse_input(fixture_path(name))
    assert doc.name == name
    assert doc.divisors["l1"] == "D1"
    load_expansion(doc)


def test_figure1_document_data():
    doc = parse_input(fixture_path("figure1"))
    assert doc.sigma.rays == {"l1": (1, 0), "l2": (0, 1)}
    assert doc.tau.rays == {"e": (1,)}
    assert doc.upsilon.rays["v1"] == (0, 1, 1)
    assert len(doc.upsilon.cones) == 3


def test_parse_from_stream():
    text = json.dumps(fixture_json("final_example"))
    assert parse_input(io.StringIO(text)).name == "final_example"


def bad(mutate):
    d = copy.deepcopy(fixture_json("figure1"))
    mutate(d)
    return d


def test_fractional_coordinate_names_field():
    d = bad(lambda d: d["sigma"]["rays"].__setitem__("l1", [0.5, 1]))
    with pytest.raises(InputError, match=r"\$\.sigma\.rays\.l1\[0\]: expected an integer"):
        parse_document(d)
    # the schema rejects it as well
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(d, schema())


def test_empty_cone_list_is_zero_cone():
    d = bad(lambda d: d["sigma"].__setitem__("cones", []))
    d.pop("upsilon")
    sigma = build_sigma(parse_document(d))
    assert len(sigma) == 1


@pytest.mark.parametrize("mutate, pattern", [
    (lambda d: d["upsilon"]["cones"].append(["l1", "zz"]), r"unknown ray 'zz'"),
    (lambda d: d["sigma"]["rays"].__setitem__("l1", [1, 0, 0]), r"expected 2 coordinates"),
    (lambda d: d["tau"].__setitem__("rank", 2), r"\$\.tau"),
    (lambda d: d.__setitem__("schema", 2), r"unsupported schema version"),
    (lambda d: d.pop("schema"), r"missing field schema"),
    (lambda d: d.__setitem__("extra", 1), r"unknown field"),
    (lambda d: d["tau"].__setitem__("cones", [["e"]]), r"single cone"),
    (lambda d: d["sigma"]["divisors"].__setitem__("l2", "D1"), r"distinct"),
    (lambda d: d["sigma"]["divisors"].__setitem__("l7", "D7"), r"unknown ray"),
    (lambda d: d["sigma"]["rays"].__setitem__("l1", True), r"expected an array, got boolean"),
])
def test_rejections(mutate, pattern):
    with pytest.raises(InputError, match=pattern):
        parse_document(bad(mutate))


def test_rank_mismatch_in_upsilon():
    d = bad(lambda d: d["upsilon"]["rays"].__setitem__("m", [1, 1]))
    with pytest.raises(InputError, match=r"\$\.upsilon\.rays\.m"):
        parse_document(d)


def test_malformed_json_reports_position():
    with pytest.raises(InputError, match=r"line 2 column"):
        parse_string('{"schema": 1,\n  "sigma": }')


def test_missing_file():
    with pytest.raises(InputError, match="no such file"):
        parse_input("/nonexistent/input.json")


def test_custom_cone_lattice_round_trip():
    d = bad(lambda d: None)
    d["upsilon"]["cones"][0] = {"rays": ["l2", "m", "v1"],
                                "lattice": [[0, 1, 0], [1, 1, 0], [0, 1, 1]]}
    jsonschema.validate(d, schema())
    exp = load_expansion(parse_document(d))
    assert len(exp.vertices) == 2
