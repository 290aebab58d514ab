"""Validate bundled documents against the schemas in this directory."""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource

here = pathlib.Path(__file__).parent
root = here.parent.parent
schemas = {n: json.loads((here / f"{n}.schema.json").read_text()) for n in ("scenario", "schedule", "result")}
registry = Registry().with_resources((s["$id"], Resource.from_contents(s)) for s in schemas.values())

pairs = [("scenario", root / "data/light_20.json")]
pairs += [("result", p) for p in sorted((root / "tests/golden").glob("*.json"))]
pairs += [("schedule", p) for p in sorted((root / "tests/golden").glob("*.json"))]
pairs += [(kind, pathlib.Path(p)) for kind, p in (a.split("=", 1) for a in sys.argv[1:])]

for kind, path in pairs:
    jsonschema.Draft202012Validator(schemas[kind], registry=registry).validate(json.loads(path.read_text()))
    print(f"ok {kind:9s} {path.relative_to(root) if path.is_relative_to(root) else path}")
