"""Python access to the nekwave solvers."""

import json

from ._nekwave import (
    ConfigError,
    NekwaveError,
    _run,
    apply_operator,
    characteristic_values,
    continue_branch,
    series,
    version,
)

__all__ = [
    "ConfigError",
    "NekwaveError",
    "apply_operator",
    "characteristic_values",
    "continue_branch",
    "run",
    "series",
    "version",
]

COMMANDS = ("spectrum", "series", "branching", "continue", "verify")


def run(command, config=None):
    """Run a CLI subcommand in-process and return its result document as a dict."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    return json.loads(_run(command, json.dumps(config or {})))

