"""Command line entry point: ``monster-lab <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .harness import ALIASES, DEFAULTS, EXIT_INVALID, EXIT_INVARIANT, EXIT_OK, ExperimentConfig, run

COMMANDS = {
    "expander": "expander",
    "label": "label-coverage",
    "bound": "missing-word-bound",
    "detour": "detour",
    "walk": "walk",
    "divergence": "divergence",
    "quotient": "quotient",
    "pipeline": "pipeline",
}
FLAG_ALIASES = {"n_max": ["--nmax"]}


def _count(text: str) -> int:
    """Accept ``100`` or ``random:100``."""
    return int(text.split(":", 1)[1]) if text.startswith("random:") else int(text)


def _scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _add_params(parser: argparse.ArgumentParser, kind: str):
    for name, default in DEFAULTS[kind].items():
        flags = ["--" + name.replace("_", "-")] + FLAG_ALIASES.get(name, [])
        kwargs = {"dest": f"param_{name}", "default": argparse.SUPPRESS}
        if isinstance(default, list):
            kwargs.update(nargs="+", type=_scalar)
        elif isinstance(default, bool):
            kwargs.update(action=argparse.BooleanOptionalAction)
        elif name == "triples":
            kwargs.update(type=_count)
        elif isinstance(default, (int, float)) and not isinstance(default, bool):
            kwargs.update(type=type(default))
        else:
            kwargs.update(type=_scalar)
        parser.add_argument(*flags, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monster-lab",
                                     description="Seeded experiments on expanders, labellings, "
                                                 "free-group walks, detours and divergence.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for report files")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", help="print the report to stdout")
    common.add_argument("--config", help="JSON config file; flags override its fields")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, kind in COMMANDS.items():
        p = sub.add_parser(command, parents=[common], help=f"run the {kind} experiment")
        _add_params(p, kind)
    sub.add_parser("selftest", help="quick internal consistency checks")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    kind = COMMANDS[args.command]
    data = {"kind": kind}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        data["kind"] = ALIASES.get(data.get("kind", kind), data.get("kind", kind))
        if data["kind"] != kind:
            raise ValueError(f"config is for {data['kind']!r}, not {kind!r}")
    cfg = ExperimentConfig.from_dict(data)
    for key, value in vars(args).items():
        if key.startswith("param_"):
            cfg.params[key[6:]] = value
    for key in ("seed", "out", "threads"):
        if key in args:
            setattr(cfg, key, getattr(args, key))
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        from .selftest import selftest
        failures = selftest()
        for line in failures:
            print(f"FAIL {line}", file=sys.stderr)
        print("selftest: ok" if not failures else f"selftest: {len(failures)} failures")
        return EXIT_OK if not failures else EXIT_INVARIANT
    try:
        cfg = _config(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    result = run(cfg)
    if result.error:
        print(result.error, file=sys.stderr)
        return result.exit_code
    if args.json:
        print(json.dumps(result.report, indent=2, sort_keys=True))
    else:
        for path in result.files:
            print(path)
        if not result.files:
            print(json.dumps(result.report["results"], sort_keys=True)[:2000])
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
