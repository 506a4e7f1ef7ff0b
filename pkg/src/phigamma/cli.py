"""`verify <suite>`: run a verification suite and write a report.

Exit status is 0 when every check passes, 1 on any failure and 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .errors import InvalidConfig, UnknownSuite
from .suites import SUITES, RunConfig, run_suite

# config-file keys that differ from RunConfig field names
_RENAMES = {"lambda": "lam", "field_degree": "field_m"}
_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def _parse_lambda(text: str, p: int | None) -> int:
    """An element index, or comma-separated coordinates over F_p (needs p)."""
    text = text.strip()
    if "," not in text:
        return int(text)
    if p is None:
        raise InvalidConfig("lambda coordinates need --p")
    coords = [int(c) for c in text.split(",")]
    return sum((c % p) * p**i for i, c in enumerate(coords))


def read_config_file(path: str | Path) -> dict:
    """Flat `key = value` lines; blank lines and `#` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[_RENAMES.get(key, key)] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Run a named verification suite.")
    ap.add_argument("suite", help="one of: " + ", ".join(SUITES + ("all",)))
    ap.add_argument("--p", type=int)
    ap.add_argument("--n", type=int)
    ap.add_argument("--r", type=int)
    ap.add_argument("--s", type=int)
    ap.add_argument("--lambda", dest="lam", help="field element index, or coordinates a0,a1,...")
    ap.add_argument("--field-degree", dest="field_m", type=int)
    ap.add_argument("--prec-x", type=int, help="series precision N")
    ap.add_argument("--prec-p", type=int, help="p-adic precision M")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--windows", type=int)
    ap.add_argument("--lifts", type=int)
    ap.add_argument("--translates", type=int)
    ap.add_argument("--case", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--config", help="key = value file; flags given on the command line win")
    ap.add_argument("--out", help="write the report here instead of standard output")
    ap.add_argument("--format", choices=("text", "json-lines"), default="text")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for name in _CONFIG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    unknown = set(values) - _CONFIG_FIELDS
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    try:
        for name, value in values.items():
            if name == "lam":
                continue
            kwargs[name] = None if str(value).lower() == "none" else int(value)
        if "lam" in values and values["lam"] is not None:
            kwargs["lam"] = _parse_lambda(str(values["lam"]), kwargs.get("p"))
    except ValueError as exc:
        raise InvalidConfig(f"not an integer: {exc}") from None
    return RunConfig(**kwargs).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_suite(args.suite, cfg)
    except (InvalidConfig, UnknownSuite) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json_lines() if args.format == "json-lines" else report.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
