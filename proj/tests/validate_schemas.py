import copy
import json
import sys
from pathlib import Path

from jsonschema import Draft202012Validator


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def check(validator, doc, name, expect_valid, failures):
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    ok = not errors if expect_valid else bool(errors)
    print(("ok   " if ok else "FAIL ") + name)
    if not ok:
        for e in errors[:5]:
            print("     " + "/".join(map(str, e.path)) + ": " + e.message)
        failures.append(name)


def main():
    if len(sys.argv) < 2:
        print("usage: validate_schemas.py SOURCE_DIR [REPORT_JSON...]")
        return 1
    root = Path(sys.argv[1])
    config_schema = load(root / "schemas" / "config.schema.json")
    report_schema = load(root / "schemas" / "report.schema.json")
    Draft202012Validator.check_schema(config_schema)
    Draft202012Validator.check_schema(report_schema)
    cfg = Draft202012Validator(config_schema)
    rep = Draft202012Validator(report_schema)
    failures = []

    for path in sorted((root / "configs").glob("*.json")):
        check(cfg, load(path), "config " + path.name, True, failures)

    base = load(root / "configs" / "example.json")
    bad = copy.deepcopy(base)
    bad["learning_rate"] = 0.1
    check(cfg, bad, "config rejects unknown top-level key", False, failures)
    bad = copy.deepcopy(base)
    bad.pop("master_seed")
    check(cfg, bad, "config requires master_seed", False, failures)
    bad = copy.deepcopy(base)
    bad["tasks"][0]["train"] = "x.csv"
    check(cfg, bad, "config rejects mixed task sources", False, failures)
    bad = copy.deepcopy(base)
    bad["significance"] = {"two_sided": "sometimes"}
    check(cfg, bad, "config rejects unknown two-sided rule", False, failures)

    for arg in sys.argv[2:]:
        report = load(arg)
        check(rep, report, "report " + arg, True, failures)
        bad = copy.deepcopy(report)
        bad["timestamp"] = "now"
        check(rep, bad, "report rejects extra top-level key", False, failures)
        if report.get("provenance", {}).get("config"):
            check(cfg, report["provenance"]["config"], "echoed config " + arg, True, failures)

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
