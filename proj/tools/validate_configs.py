"""Validate shipped run configs against config/schema.json."""
import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
schema = json.loads((root / "config" / "schema.json").read_text())
validator = jsonschema.Draft202012Validator(schema)
bad = 0
for path in sorted((root / "config").glob("*.json")):
    if path.name in ("schema.json", "fixture_model.json"):
        continue
    errors = list(validator.iter_errors(json.loads(path.read_text())))
    for e in errors:
        print(f"{path.name}: {'/'.join(map(str, e.path))}: {e.message}")
    bad += bool(errors)
    print(f"{path.name}: {'ok' if not errors else 'INVALID'}")
sys.exit(1 if bad else 0)
