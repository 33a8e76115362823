"""Fixed output schemas for the command-line tables.

The CSV header of every subcommand is the comma-joined column list
below, in order; the JSON payload is {"subcommand": <name>,
"rows": [{column: value, ...}, ...]} with exactly these columns per
row.  validate_output round-trips any payload against this contract.

Column types: "float" (finite binary64, serialized as the shortest
round-tripping decimal), "int", "str", "bool", each also admitting null
where a field is inapplicable.
"""

from __future__ import annotations

SCHEMAS: dict[str, dict[str, str]] = {
    "volume": {
        "engine": "str",
        "p": "str",
        "n": "int",
        "a_spec": "str",
        "value": "float",
        "err_bound": "float",
        "samples": "int",
        "seed": "int",
    },
    "kernel": {
        "p": "str",
        "s": "float",
        "value": "float",
        "err_bound": "float",
    },
    "crossing": {
        "p": "str",
        "n": "int",
        "a_diag": "float",
        "a_diag_err": "float",
        "a2": "float",
        "holds": "bool",
        "indeterminate": "bool",
        "first_n_holds": "int",
        "holds_for_all_tail": "bool",
    },
    "verify": {
        "suite": "str",
        "name": "str",
        "p": "str",
        "n": "int",
        "lhs": "float",
        "rhs": "float",
        "satisfied": "bool",
        "margin": "float",
    },
    "clt": {
        "p": "str",
        "n": "int",
        "estimate": "float",
        "std_err": "float",
        "c_p": "float",
    },
    "optimize": {
        "p": "str",
        "n": "int",
        "engine": "str",
        "record": "str",
        "iteration": "int",
        "value": "float",
        "err_bound": "float",
        "converged": "bool",
        "coords": "str",
    },
}

_CHECKS = {
    "float": lambda v: isinstance(v, float) and v == v,
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "str": lambda v: isinstance(v, str),
    "bool": lambda v: isinstance(v, bool),
}


def validate_output(subcommand: str, payload: dict) -> None:
    """Raise ValueError unless the payload matches the schema exactly."""
    if subcommand not in SCHEMAS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    schema = SCHEMAS[subcommand]
    if payload.get("subcommand") != subcommand:
        raise ValueError("payload subcommand mismatch")
    rows = payload.get("rows")
    if not isinstance(rows, list):
        raise ValueError("payload rows must be a list")
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or set(row) != set(schema):
            raise ValueError(f"row {i} columns do not match schema")
        for col, kind in schema.items():
            v = row[col]
            if v is None:
                continue
            if not _CHECKS[kind](v):
                raise ValueError(f"row {i} column {col!r}: expected {kind}, got {v!r}")
