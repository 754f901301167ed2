"""Campaigns over parameter grids and their JSON/CSV reports."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import gmpy2

from . import __version__
from .checks import CHECKS, CheckSpec, Record, check_named, problem1_pairs, tally, validate_spec
from .interval import Interval
from .kernel import MPFR, Outcome, PrecisionPolicy, UsageError

__all__ = [
    "GridSpec", "Report", "run_campaign", "emit_report", "report_to_dict",
    "report_to_csv", "format_value", "parse_value", "exit_code",
    "CSV_HEADER", "EXIT_OK", "EXIT_FAILS", "EXIT_INDETERMINATE", "EXIT_USAGE",
]

EXIT_OK, EXIT_FAILS, EXIT_INDETERMINATE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 64, 74

CSV_HEADER = ["check", "n", "r", "alpha", "rprime", "outcome", "lhs", "rhs",
              "precision_bits", "advisory"]


@dataclass(frozen=True)
class GridSpec:
    """A campaign: one named check over ``[n_min, n_max]`` x the value lists.

    For ``problem1`` the ``r``/``r'`` lists are paired with ``r < r'``
    (and ``r' <= 2r + 1`` when ``upto_corollary``).
    """

    check: str
    n_min: int = 1
    n_max: int = 1
    r_values: tuple = ()
    alpha_values: tuple = ()
    rprime_values: tuple = ()
    mode: str = "interval"
    policy: PrecisionPolicy = field(default_factory=PrecisionPolicy)
    upto_corollary: bool = False

    def __post_init__(self):
        for key in ("r_values", "alpha_values", "rprime_values"):
            object.__setattr__(self, key, tuple(Fraction(v) for v in getattr(self, key)))

    def points(self) -> list[CheckSpec]:
        """Every grid point, validated; raises before anything is evaluated."""
        cdef = CHECKS.get(self.check)
        if cdef is None:
            raise UsageError(f"unknown check {self.check!r}; known: {', '.join(sorted(CHECKS))}")
        if "n" in cdef.needs and not (1 <= self.n_min <= self.n_max):
            raise UsageError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        lists = {"r": self.r_values, "alpha": self.alpha_values, "rprime": self.rprime_values}
        for key in cdef.needs:
            if key != "n" and not lists[key]:
                raise UsageError(f"check {self.check} needs a non-empty {key} list")
        ns = range(self.n_min, self.n_max + 1) if "n" in cdef.needs else [None]
        if self.check == "problem1":
            combos = [(r, None, rp) for r, rp in
                      problem1_pairs(self.r_values, self.rprime_values, self.upto_corollary)]
        else:
            combos = itertools.product(
                self.r_values if "r" in cdef.needs else [None],
                self.alpha_values if "alpha" in cdef.needs else [None],
                self.rprime_values if "rprime" in cdef.needs else [None])
            combos = list(combos)
        specs = [CheckSpec(self.check, n=n, r=r, alpha=a, rprime=rp, mode=self.mode)
                 for n in ns for r, a, rp in combos]
        for spec in specs:
            validate_spec(spec)
        return specs

    def echo(self) -> dict:
        return {
            "check": self.check,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "r": [str(v) for v in self.r_values],
            "alpha": [str(v) for v in self.alpha_values],
            "rprime": [str(v) for v in self.rprime_values],
            "mode": self.mode,
            "upto_corollary": self.upto_corollary,
            "precision": {"start_bits": self.policy.start_bits,
                          "max_bits": self.policy.max_bits,
                          "escalation_factor": self.policy.escalation_factor},
        }


@dataclass
class Report:
    campaign_id: str
    grid: dict
    records: list[Record]
    wall_time_ms: int = 0
    tool_version: str = __version__

    @property
    def summary(self) -> dict:
        return tally(self.records)

    @property
    def findings(self) -> list[Record]:
        return [r for r in self.records if r.outcome is Outcome.FAILS]


def campaign_id(grid_echo: dict) -> str:
    blob = json.dumps(grid_echo, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def run_campaign(grid: GridSpec) -> Report:
    """Evaluate every grid point once; records come back sorted."""
    specs = grid.points()
    t0 = time.perf_counter()
    records = [Record.from_spec(s, check_named(s, grid.policy)) for s in specs]
    records.sort(key=Record.sort_key)
    echo = grid.echo()
    return Report(campaign_id(echo), echo, records,
                  wall_time_ms=round((time.perf_counter() - t0) * 1000))


# -------------------------------------------------------------- serialization


def format_value(v) -> str | None:
    """Exact text form: ``"p/q"`` for rationals, ``"[lo,hi]"`` for intervals.

    Interval endpoints are printed with enough digits that reading them
    back at the record's precision restores them exactly.
    """
    if v is None:
        return None
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, Fraction)):
        return str(Fraction(v))
    if isinstance(v, Interval):
        return str(v)
    if isinstance(v, MPFR):
        return str(v)
    return str(v)


def parse_value(s: str, prec: int = 0):
    """Inverse of :func:`format_value` (``prec`` is needed for intervals)."""
    s = s.strip()
    if s.startswith("["):
        lo, hi = s[1:-1].split(",")
        if prec <= 0:
            raise UsageError("interval values need their precision to be parsed")
        with gmpy2.context(precision=prec):
            return Interval(gmpy2.mpfr(lo), gmpy2.mpfr(hi), prec)
    return Fraction(s)


def _record_dict(rec: Record) -> dict:
    v = rec.verdict
    d = {
        "check": rec.check,
        "n": rec.n,
        "r": format_value(rec.r),
        "alpha": format_value(rec.alpha),
        "rprime": format_value(rec.rprime),
        "outcome": v.outcome.value,
        "lhs": format_value(v.lhs),
        "rhs": format_value(v.rhs),
        "precision_bits": v.precision_used,
        "advisory": v.advisory,
        "equality": v.equality,
        "labels": list(rec.labels),
        "witness": None,
    }
    if v.outcome is Outcome.FAILS:
        d["witness"] = {"params": {k: format_value(x) for k, x in v.params},
                        "lhs": d["lhs"], "rhs": d["rhs"]}
    return d


def report_to_dict(report: Report, include_wall_time: bool = True) -> dict:
    doc = {
        "campaign": {"id": report.campaign_id, "tool": "powsum",
                     "tool_version": report.tool_version},
        "grid": report.grid,
        "records": [_record_dict(r) for r in report.records],
        "summary": report.summary,
    }
    if include_wall_time:
        doc["wall_time_ms"] = report.wall_time_ms
    return doc


def report_to_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in report.records:
        d = _record_dict(rec)
        w.writerow(["" if d[k] is None else (str(d[k]).lower() if isinstance(d[k], bool) else d[k])
                    for k in CSV_HEADER])
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", destination: str | Path | None = None) -> None:
    """Write ``report`` as JSON or CSV to ``destination`` (stdout if None/"-")."""
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
    else:
        Path(destination).write_text(text)


def report_from_dict(doc: dict) -> Report:
    """Rebuild a :class:`Report` from its JSON form (values stay textual)."""
    from .kernel import Verdict

    records = []
    for d in doc["records"]:
        prec = d["precision_bits"]

        def val(s, prec=prec):
            return None if s is None else parse_value(s, prec)

        v = Verdict(Outcome(d["outcome"]), val(d["lhs"]), val(d["rhs"]), prec,
                    equality=d.get("equality", False), advisory=d["advisory"],
                    params=tuple((k, Fraction(x)) for k, x in
                                 (d.get("witness") or {}).get("params", {}).items()))
        records.append(Record(
            d["check"], d["n"],
            *(None if d[k] is None else Fraction(d[k]) for k in ("r", "alpha", "rprime")),
            v, tuple(d.get("labels", ()))))
    return Report(doc["campaign"]["id"], doc["grid"], records,
                  doc.get("wall_time_ms", 0), doc["campaign"].get("tool_version", __version__))


def exit_code(summary: dict) -> int:
    if summary["fails"]:
        return EXIT_FAILS
    if summary["indeterminate"]:
        return EXIT_INDETERMINATE
    return EXIT_OK
