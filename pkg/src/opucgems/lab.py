"""Sequence families, coefficient-condition diagnostics and experiments.

A convergence study evaluates the sum-rule functional along a schedule of
truncation sizes through two independent routes (the GGT trace and the
per-site expansion) and classifies the family as bounded or diverging.
The classifier is an explicit desk-scale decision rule: the statements it
probes are asymptotic, so thresholds are engineering choices and are
documented on :func:`classify_values`.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .algmodel import site_functional
from .opuc import VerblunskySeq, ggt_matrix, log_term, trace_v
from .trig import CriticalPoints, build_h

DEFAULT_SCHEDULE = (50, 100, 200, 400, 800, 1600)

# classifier thresholds (per-unit-N slope over the top half of the schedule)
SLOPE_BOUNDED = 1e-4
SLOPE_DIVERGING = 1e-2
RANGE_BOUNDED = 1.0


class LabError(Exception):
    pass


@dataclass(frozen=True)
class SequenceFamily:
    """A named generator of Verblunsky sequences with JSON-safe parameters."""

    name: str
    params: dict

    @staticmethod
    def power_decay(c: float, gamma: float, phase: float = 0.0) -> "SequenceFamily":
        """``alpha_n = c * e^{-i*phase*n} / (n+1)^gamma``."""
        return SequenceFamily("powerDecay", {"c": c, "gamma": gamma, "phase": phase})

    @staticmethod
    def constant(c: float, phase: float = 0.0) -> "SequenceFamily":
        """``alpha_n = c * e^{-i*phase*n}`` (rotating constant)."""
        return SequenceFamily("constant", {"c": c, "phase": phase})

    @staticmethod
    def finite_support(values: Sequence[complex]) -> "SequenceFamily":
        return SequenceFamily(
            "finiteSupport",
            {"values": [[complex(v).real, complex(v).imag] for v in values]},
        )

    @staticmethod
    def from_file(path: str) -> "SequenceFamily":
        """Finite sequence read from a JSON file of [re, im] pairs."""
        return SequenceFamily("file", {"path": str(path)})

    def sequence(self) -> VerblunskySeq:
        if self.name == "powerDecay":
            c = complex(self.params["c"])
            gamma = float(self.params["gamma"])
            phase = float(self.params.get("phase", 0.0))
            if abs(c) >= 1.0:
                raise LabError("powerDecay needs |c| < 1")
            fn = lambda n: c * cmath.exp(-1j * phase * n) / (n + 1) ** gamma
            return VerblunskySeq(fn, support=None, description="powerDecay")
        if self.name == "constant":
            c = complex(self.params["c"])
            phase = float(self.params.get("phase", 0.0))
            if abs(c) >= 1.0:
                raise LabError("constant needs |c| < 1")
            fn = lambda n: c * cmath.exp(-1j * phase * n)
            return VerblunskySeq(fn, support=None, description="constant")
        if self.name == "finiteSupport":
            values = [complex(re, im) for re, im in self.params["values"]]
            return VerblunskySeq.from_values(values)
        if self.name == "file":
            try:
                with open(self.params["path"], "rb") as fh:
                    pairs = json.load(fh)
                values = [complex(re, im) for re, im in pairs]
            except (OSError, ValueError, TypeError) as exc:
                raise LabError(f"cannot read coefficient file: {exc}") from exc
            return VerblunskySeq.from_values(values)
        raise LabError(f"unknown family {self.name!r}")

    def to_json(self) -> dict:
        return {"name": self.name, **self.params}

    @staticmethod
    def from_json(data: Mapping) -> "SequenceFamily":
        data = dict(data)
        name = data.pop("name")
        return SequenceFamily(name, data)


def shifted_difference(values: np.ndarray, points: CriticalPoints) -> np.ndarray:
    """Apply ``prod_j (S - e^{-i theta_j})^{m_j}`` to a coefficient block.

    ``(S alpha)_n = alpha_{n+1}``; each factor shortens the block by one,
    so the input must carry d extra entries beyond the requested length.
    """
    out = np.asarray(values, dtype=complex)
    for theta, m in zip(points.numeric_angles(), points.multiplicities):
        root = cmath.exp(-1j * theta)
        for _ in range(m):
            out = out[1:] - root * out[:-1]
    return out


def condition_diagnostics(alpha: VerblunskySeq, points: CriticalPoints,
                          n: int) -> dict:
    """Partial norms behind the coefficient-side sum-rule conditions.

    Returns the squared l2 norm of the full shifted difference, the
    ``l^{2m+2}`` power sums for m = 0..d, and the l4 sum, all over the
    first n entries.
    """
    d = points.degree
    if n < d:
        raise LabError("need at least d coefficients")
    head = alpha.head(n + d)
    diff = shifted_difference(head, points)[:n]
    mods = np.abs(head[:n])
    # string keys so reports survive a JSON round trip unchanged
    powers = {str(m): float(np.sum(mods ** (2 * m + 2))) for m in range(d + 1)}
    return {
        "difference_l2_sq": float(np.sum(np.abs(diff) ** 2)),
        "power_sums": powers,
        "l2": powers["0"],
        "l4": float(np.sum(mods ** 4)),
    }


@dataclass
class GemReport:
    """One convergence experiment: schedule, both routes, verdict."""

    family: dict
    critical_points: list
    schedule: list
    trace_values: list
    site_values: list
    log_sums: list
    diagnostics: dict
    verdict: str
    slope: float
    value_range: float

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "criticalPoints": self.critical_points,
            "schedule": self.schedule,
            "traceRoute": self.trace_values,
            "corollaryRoute": self.site_values,
            "logTermSums": self.log_sums,
            "diagnostics": self.diagnostics,
            "verdict": self.verdict,
            "slope": self.slope,
            "range": self.value_range,
        }

    @staticmethod
    def from_json(data: Mapping) -> "GemReport":
        return GemReport(
            family=dict(data["family"]),
            critical_points=list(data["criticalPoints"]),
            schedule=list(data["schedule"]),
            trace_values=list(data["traceRoute"]),
            site_values=list(data["corollaryRoute"]),
            log_sums=list(data["logTermSums"]),
            diagnostics=dict(data["diagnostics"]),
            verdict=data["verdict"],
            slope=float(data["slope"]),
            value_range=float(data["range"]),
        )


def classify_values(schedule: Sequence[int], values: Sequence[float]) -> tuple:
    """Verdict from the least-squares slope over the top half of the schedule.

    ``|slope| < 1e-4`` and range < 1 over that window: bounded; ``slope >
    1e-2``: diverging; anything else: inconclusive.  Returns ``(verdict,
    slope, range)``.
    """
    if len(schedule) != len(values) or not schedule:
        raise LabError("schedule and values must align and be nonempty")
    half = len(schedule) // 2
    xs = np.asarray(schedule[half:], dtype=float)
    ys = np.asarray(values[half:], dtype=float)
    if xs.size == 1:
        slope = 0.0
    else:
        slope = float(np.polyfit(xs, ys, 1)[0])
    value_range = float(np.max(ys) - np.min(ys))
    if abs(slope) < SLOPE_BOUNDED and value_range < RANGE_BOUNDED:
        return "bounded", slope, value_range
    if slope > SLOPE_DIVERGING:
        return "diverging", slope, value_range
    return "inconclusive", slope, value_range


def convergence_study(family: SequenceFamily, points: CriticalPoints,
                      schedule: Sequence[int] = DEFAULT_SCHEDULE,
                      max_n: int = 20000) -> GemReport:
    """Run both functional routes along the schedule and classify.

    The verdict is driven by the trace route; the per-site route is
    recorded alongside (their difference stays bounded in N).
    """
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise LabError("schedule must be strictly increasing")
    if schedule and schedule[-1] > max_n:
        raise LabError("schedule exceeds the configured limit")
    alpha = family.sequence()
    h_num = build_h(points, "numeric")
    h_exact = build_h(points, "exact")
    trace_values = []
    site_values = []
    log_sums = []
    for n in schedule:
        u = ggt_matrix(alpha, n)
        log_sum = log_term(alpha, n)
        trace_values.append(float(trace_v(u, h_num) - log_sum))
        site_values.append(float(site_functional(alpha, n, h_exact)))
        log_sums.append(float(log_sum))
    verdict, slope, value_range = classify_values(schedule, trace_values)
    diagnostics = condition_diagnostics(alpha, points, schedule[-1])
    return GemReport(
        family=family.to_json(),
        critical_points=points.to_json(),
        schedule=schedule,
        trace_values=trace_values,
        site_values=site_values,
        log_sums=log_sums,
        diagnostics=diagnostics,
        verdict=verdict,
        slope=slope,
        value_range=value_range,
    )


def export_report(report: GemReport, fmt: str = "json") -> bytes:
    """Serialize a report: JSON mirrors the fields, CSV has one row per N."""
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, indent=2).encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["N", "traceRoute", "corollaryRoute", "logTermSum",
                         "diffNorm", "verdict"])
        for i, n in enumerate(report.schedule):
            diff = abs(float(report.trace_values[i]) - float(report.site_values[i]))
            writer.writerow([n, repr(float(report.trace_values[i])),
                             repr(float(report.site_values[i])),
                             repr(float(report.log_sums[i])), repr(diff),
                             report.verdict])
        return buf.getvalue().encode()
    raise LabError(f"unknown format {fmt!r}")
