"""Scenario reports and table emission.

run_report evaluates every applicable bound for a scenario (plus the
exact distance when the one-dimensional mapping makes it computable) and
emit renders rows as Markdown or CSV with a fixed column order.
Displayed bound values are rounded up: at six decimals in fixed point,
or at two significant digits in scientific notation below 1e-5.  Values
above 2 are flagged trivial, and inapplicable bounds render as "n.a.".
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .bounds import (
    BoundResult,
    CategoricalFamily,
    chained_mean_bound,
    eta_categorical,
    eta_chi2_tv_mean,
    eta_symmetric,
    expansion_bound,
    expansion_bound_simple,
    pair_determinant_bound,
    per_category_bounds,
    smoothing_bound,
)
from .expansion import ExpansionInput, exact_distance, expansion_input
from .measure import SignedMeasure
from .scenarios import (
    ScenarioSpec,
    family_for,
    gen_symmetric,
    symmetric_to_input,
    to_integer_line,
)

# Column order for categorical-report emission.
BOUND_COLUMNS = (
    "pair_determinant",
    "per_category",
    "per_category_refined",
    "chained",
    "expansion",
)


@dataclass
class ReportRow:
    scenario: str
    params: Dict[str, float] = field(default_factory=dict)
    bounds: Dict[str, BoundResult] = field(default_factory=dict)
    exact: Optional[float] = None
    seconds: float = 0.0


def _ceil_at(v: float, digits: int) -> float:
    scale = 10.0**digits
    return math.ceil(v * scale * (1.0 - 1e-12)) / scale


def format_value(v: float) -> str:
    """Round-up display: fixed six decimals, scientific below 1e-5."""
    if v < 0.0:
        raise ValueError("bound values are nonnegative")
    if v == 0.0:
        return "0.000000"
    if v > 2.0:
        return ">=2"
    if v < 1e-5:
        exp = math.floor(math.log10(v))
        mant = math.ceil(v / 10.0**exp * 10.0 * (1.0 - 1e-12)) / 10.0
        if mant >= 10.0:
            mant /= 10.0
            exp += 1
        return f"{mant:.1f}e{exp:+03d}"
    return f"{_ceil_at(v, 6):.6f}"


def format_bound(b: Optional[BoundResult]) -> str:
    if b is None or not b.applicable:
        return "n.a."
    return format_value(b.value)


def categorical_report(fam: CategoricalFamily, scenario: str, ell: int = 1,
                       inp: Optional[ExpansionInput] = None) -> ReportRow:
    """All comparator and expansion bounds for a categorical family.

    When an ExpansionInput realization is supplied, the exact distance to
    the order-ell approximant is evaluated as well.
    """
    t0 = time.perf_counter()
    row = ReportRow(scenario=scenario)
    pd = pair_determinant_bound(fam)
    row.bounds["pair_determinant"] = pd
    row.params["C1"] = pd.conditions["C1"]
    row.params["C2"] = pd.conditions["C2"]
    pc = per_category_bounds(fam)
    row.bounds["per_category"] = pc.quadratic
    row.bounds["per_category_refined"] = pc.refined
    eta = eta_categorical(fam, ell)
    if ell <= 3:
        row.bounds["chained"] = chained_mean_bound(eta.eta, ell)
    row.bounds["expansion"] = expansion_bound_simple(eta.eta, ell)
    if inp is not None:
        row.exact = exact_distance(inp, ell)
    row.seconds = time.perf_counter() - t0
    return row


def symmetric_report(spec: ScenarioSpec) -> ReportRow:
    """Bounds for the symmetric scenario: the alpha=1 route plus chains."""
    t0 = time.perf_counter()
    shape = spec.a if spec.a is not None else (spec.b if spec.b is not None else 1.0)
    sym = gen_symmetric(spec.n, shape=shape, b=min(spec.d, 5))
    inp = symmetric_to_input(sym)
    ell = spec.ell
    row = ReportRow(scenario=spec.label)
    eta1_est = eta_chi2_tv_mean(inp, max(ell, 1))
    eta_a1 = eta_symmetric(sym, max(ell, 1))
    row.bounds["expansion_alpha1"] = expansion_bound(
        eta1_est.eta, max(ell, 1), alpha=1.0, eta_ell_alpha=eta_a1.eta
    )
    row.bounds["expansion"] = expansion_bound_simple(eta1_est.eta, max(ell, 1))
    row.bounds["smoothing_mean"] = smoothing_bound(eta1_est.eta, max(ell, 1), mean_centered=True)
    if 1 <= ell <= 3:
        row.bounds["chained"] = chained_mean_bound(eta1_est.eta, ell)
    row.exact = exact_distance(inp, ell)
    row.seconds = time.perf_counter() - t0
    return row


def custom_report(measures: Sequence[SignedMeasure], ell: int = 1) -> ReportRow:
    """Bounds for user-supplied probability measures, reference = mean."""
    t0 = time.perf_counter()
    inp = expansion_input(measures)
    row = ReportRow(scenario=f"custom[n={inp.n}]")
    eta = eta_chi2_tv_mean(inp, max(ell, 1))
    row.bounds["expansion"] = expansion_bound_simple(eta.eta, max(ell, 1))
    row.bounds["smoothing_mean"] = smoothing_bound(eta.eta, max(ell, 1), mean_centered=True)
    if 1 <= ell <= 3:
        row.bounds["chained"] = chained_mean_bound(eta.eta, ell)
    if inp.dim == 1:
        row.exact = exact_distance(inp, ell)
    row.seconds = time.perf_counter() - t0
    return row


def run_report(spec: ScenarioSpec, measures: Optional[Sequence[SignedMeasure]] = None) -> ReportRow:
    """Evaluate one scenario row."""
    if spec.kind == "custom":
        if not measures:
            raise ValueError("custom scenarios need measures")
        return custom_report(measures, spec.ell)
    if spec.kind == "symmetric":
        return symmetric_report(spec)
    fam = family_for(spec)
    one_d = spec.kind in ("example3_binomial", "example3_linear") or spec.atom_mode == "integer-line"
    inp = to_integer_line(fam) if one_d else None
    row = categorical_report(fam, spec.label, spec.ell, inp)
    if spec.a is not None:
        row.params["a"] = spec.a
    if spec.b is not None:
        row.params["b"] = spec.b
    return row


# ---------------------------------------------------------------------------
# the six report tables


def _t1_specs() -> List[ScenarioSpec]:
    return [
        ScenarioSpec("example1", n, a=a)
        for (n, a) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]
    ]


def _t3_specs() -> List[ScenarioSpec]:
    return [
        ScenarioSpec("example2", n, b=b)
        for (n, b) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]
    ]


def _emit_matrix(header: List[str], body: List[List[str]], fmt: str) -> str:
    if fmt == "csv":
        out = io.StringIO()
        out.write(",".join(header) + "\n")
        for row in body:
            out.write(",".join(row) + "\n")
        return out.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |"]
        lines.append("|" + "|".join(" --- " for _ in header) + "|")
        for row in body:
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(rows: Sequence[ReportRow], fmt: str = "markdown") -> str:
    """Render report rows; timing is excluded so output is deterministic."""
    header = ["scenario", "C1", "C2", *BOUND_COLUMNS, "exact"]
    body = []
    for row in rows:
        cells = [row.scenario]
        for key in ("C1", "C2"):
            cells.append(f"{row.params[key]:.1f}" if key in row.params else "")
        for col in BOUND_COLUMNS:
            cells.append(format_bound(row.bounds.get(col)))
        cells.append(format_value(row.exact) if row.exact is not None else "")
        body.append(cells)
    return _emit_matrix(header, body, fmt)


def bound_table(specs: Sequence[ScenarioSpec], param_name: str, fmt: str) -> str:
    rows = [run_report(s) for s in specs]
    header = ["n", param_name, "C1", "C2", *BOUND_COLUMNS]
    body = []
    for spec, row in zip(specs, rows):
        cells = [str(spec.n), f"{getattr(spec, param_name):g}"]
        cells.append(f"{row.params['C1']:.1f}")
        cells.append(f"{row.params['C2']:.1f}")
        for col in BOUND_COLUMNS:
            cells.append(format_bound(row.bounds.get(col)))
        body.append(cells)
    return _emit_matrix(header, body, fmt)


def mean_prob_table(spec: ScenarioSpec, fmt: str) -> str:
    fam = family_for(spec)
    header = ["r", "mean_prob"]
    body = [[str(r), f"{fam.pbar[r]:.5f}"] for r in range(fam.d + 1)]
    return _emit_matrix(header, body, fmt)


def exact_table(specs: Sequence[ScenarioSpec], param_name: str, fmt: str) -> str:
    header = ["n", param_name, "distance", "distance_raw"]
    body = []
    for spec in specs:
        inp = to_integer_line(family_for(spec))
        dist = exact_distance(inp, spec.ell)
        body.append(
            [str(spec.n), f"{getattr(spec, param_name):g}", format_value(dist), f"{dist:.12e}"]
        )
    return _emit_matrix(header, body, fmt)


def paper_table(table_id: int, fmt: str = "markdown") -> str:
    """The six standard report tables (bounds, mean probabilities, exacts)."""
    if table_id == 1:
        return bound_table(_t1_specs(), "a", fmt)
    if table_id == 2:
        return mean_prob_table(ScenarioSpec("example1", 100, a=1), fmt)
    if table_id == 3:
        return bound_table(_t3_specs(), "b", fmt)
    if table_id == 4:
        return mean_prob_table(ScenarioSpec("example2", 100, b=1), fmt)
    if table_id == 5:
        return exact_table(
            [ScenarioSpec("example3_binomial", n, a=a) for (n, a) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]],
            "a",
            fmt,
        )
    if table_id == 6:
        return exact_table(
            [ScenarioSpec("example3_linear", n, b=b) for (n, b) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]],
            "b",
            fmt,
        )
    raise ValueError("table id must be 1..6")
