import json
from pathlib import Path

import pytest

from cellgap.cli import run
from conftest import FIXTURES

jsonschema = pytest.importorskip("jsonschema")
referencing = pytest.importorskip("referencing")

SCHEMAS = Path(__file__).parent.parent / "docs" / "schemas"


def validator(name):
    resources = [(p.name, referencing.Resource.from_contents(json.loads(p.read_text())))
                 for p in SCHEMAS.glob("*.schema.json")]
    registry = referencing.Registry().with_resources(resources)
    schema = json.loads((SCHEMAS / name).read_text())
    return jsonschema.Draft202012Validator(schema, registry=registry)


@pytest.mark.parametrize("fixture, schema", [
    ("c2.json", "group.schema.json"),
    ("rp2.json", "complex.schema.json"),
    ("empty.json", "complex.schema.json"),
    ("point_c2.json", "complex.schema.json"),
    ("idem_c2.json", "idempotent.schema.json"),
    ("k0_z2cube.json", "involuted-group.schema.json"),
])
def test_fixtures_match_schemas(fixture, schema):
    validator(schema).validate(json.loads((FIXTURES / fixture).read_text()))


def test_registry_entries_match_schema():
    data = json.loads((Path(__file__).parent.parent / "src" / "cellgap" / "data"
                       / "registry.json").read_text())
    v = validator("involuted-group.schema.json")
    for item in data:
        v.validate(item)


@pytest.mark.parametrize("argv", [
    ["silence", "--complex", str(FIXTURES / "rp2.json"), "--degree", "2"],
    ["validate", "--complex", str(FIXTURES / "nope.json")],
])
def test_reports_match_schema(argv):
    validator("report.schema.json").validate(json.loads(run(argv)[1]))


def test_realized_complex_matches_schema(tmp_path):
    out = tmp_path / "x.json"
    run(["realize", "--base", str(FIXTURES / "point_c2.json"), "--idempotent",
         str(FIXTURES / "idem_c2.json"), "--k", "3", "--l", "4", "--out", str(out)])
    validator("complex.schema.json").validate(json.loads(out.read_text()))
