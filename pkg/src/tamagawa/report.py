"""Structured verification reports and JSON rendering.

The JSON schema is versioned and intentionally boring: rationals are
rendered as strings "a/b" so nothing downstream ever sees a rounded
rational, floats that carry an error bound are rendered as
{"value": ..., "abs_err": ...} objects.  Reports must be byte-identical
across worker counts, so nothing time- or schedule-dependent may enter
these structures; wall-clock timings go to stderr in the CLI instead.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA_VERSION = 1

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

_VERDICTS = (PASS, FAIL, INCONCLUSIVE)

IDENTITIES = ("euler", "lifting", "globalinv", "local-density", "tnc", "sha-bk")


@dataclass(frozen=True)
class Real:
    """A float together with an absolute error bound, for JSON rendering."""

    value: float
    abs_err: float


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    inputs: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    verdict: str = PASS
    cause: str | None = None

    def __post_init__(self):
        if self.identity not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity!r}")
        if self.verdict not in _VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict != PASS and not self.cause:
            raise ValueError("FAIL/INCONCLUSIVE reports need a cause")


def rat_str(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_jsonable(obj):
    """Recursively convert report values to JSON-safe structures."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, Real):
        return {"value": obj.value, "abs_err": obj.abs_err}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot render {type(obj).__name__} in a report")


def report_row(rep: VerificationReport) -> dict:
    row = {
        "identity": rep.identity,
        "inputs": to_jsonable(rep.inputs),
        "values": to_jsonable(rep.values),
        "verdict": rep.verdict,
    }
    if rep.cause is not None:
        row["cause"] = rep.cause
    return row


def render_report(reports, config_echo=None) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "config_echo": to_jsonable(config_echo or {}),
        "reports": [report_row(r) for r in reports],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def worst_exit_code(reports) -> int:
    """0 if everything passed, 1 on any FAIL, 2 on INCONCLUSIVE-only."""
    verdicts = {r.verdict for r in reports}
    if FAIL in verdicts:
        return 1
    if INCONCLUSIVE in verdicts:
        return 2
    return 0


def write_report_atomic(path: str, text: str) -> None:
    dirpath = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=dirpath, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
