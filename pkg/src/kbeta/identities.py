"""Identity audit: every claimed relation becomes a numerical report.

Each check evaluates both sides of one identity from independent code
paths and returns an IdentityReport carrying the two values, their error
estimates, the observed discrepancy, and a three-way verdict: Holds (the
gap stays within tolerance even after widening by the reported error
bars), Fails (the gap exceeds tolerance even after narrowing by them), or
Inconclusive (the error bars are too large to decide either way, so the
identity was not actually tested at that point).
Evaluation failures never escape as exceptions; they become Inconclusive
reports with the failure recorded in the note field.  Invalid inputs
(violated preconditions) still raise, since they are caller errors rather
than evaluation outcomes.

The checks fall into two groups:

* asserted identities, expected to hold everywhere: the beta recurrence
  (FunctionalRelation), argument symmetry (Symmetry), agreement of every
  corrected integral representation with the direct one (ReprEquivalence),
  and the classical-mode reduction rows (Remark22, Remark25);
* erratum probes, carried in uncorrected textual form so the audit can
  measure how far each misprinted claim sits from the truth:
  MellinPaperLiteral and Lemma23PaperLiteral, plus the deformed-mode
  reduction rows.  These produce complete reports but are never asserted.

`run_audit` sweeps a deterministic parameter grid, evaluates every
applicable check in a fixed order, and renders the results as a JSON
document and CSV table whose bytes depend only on the grid, so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import ConvergenceError, DomainError, KBetaError
from .extfun import (
    ExtBetaArgs,
    extended_beta_k,
    extended_gamma_closed_form_claimed,
    extended_gamma_k,
)
from .kcore import (
    DEFAULT_SERIES,
    GammaMode,
    MLParams,
    SeriesConfig,
    k_beta,
)
from .quad import (
    DEFAULT_QUAD,
    QuadConfig,
    _rescaled,
    integrate_01_singular,
    integrate_interval,
)
from .repr import CANONICAL_REPRESENTATIONS, Representation, eval_representation


class Verdict(Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of testing one identity at one parameter point."""

    identity_id: str
    inputs: dict
    lhs: float | None
    rhs: float | None
    abs_diff: float | None
    rel_diff: float | None
    verdict: Verdict
    lhs_error: float | None
    rhs_error: float | None
    note: str = ""


#: default tolerances, by identity family
TOLERANCES = {
    "FunctionalRelation": 1e-9,
    "Symmetry": 1e-10,
    "ReprEquivalence": 1e-7,
    "MellinPaperLiteral": 1e-6,
    "MellinCorrected": 1e-6,
    "Lemma23PaperLiteral": 1e-9,
    "Remark22": 1e-10,
    "Remark25": 1e-10,
}


def _params_inputs(params: MLParams) -> dict:
    return {
        "k": params.k,
        "p": params.p,
        "q": params.q,
        "r": params.r,
        "mode": params.denominator_gamma.value,
    }


def _finish(
    identity_id: str,
    inputs: dict,
    lhs: float,
    rhs: float,
    lhs_error: float,
    rhs_error: float,
    tol: float,
    note: str = "",
) -> IdentityReport:
    """Decide the verdict from the observed gap and the reported error bars.

    With uncertainty U = lhs_error + rhs_error and scale D = max(|lhs|,
    |rhs|): the identity provably holds at tolerance tol when even the
    widened gap fits (abs_diff + U <= tol*D), provably fails when the
    narrowed gap still exceeds it (abs_diff - U > tol*D), and is otherwise
    undecidable at this tolerance, hence Inconclusive.  NaN anywhere means
    the comparison never happened.
    """
    if math.isnan(lhs) or math.isnan(rhs):
        return IdentityReport(
            identity_id, inputs, None, None, None, None,
            Verdict.INCONCLUSIVE, None, None, note or "nan produced",
        )
    abs_diff = abs(lhs - rhs)
    denom = max(abs(lhs), abs(rhs))
    if abs_diff == 0.0:
        rel_diff = 0.0
    elif denom > 0.0:
        rel_diff = min(abs_diff / denom, 9.9e307)
    else:
        rel_diff = 9.9e307
    uncertainty = lhs_error + rhs_error
    bound = tol * denom
    if abs_diff + uncertainty <= bound:
        verdict = Verdict.HOLDS
    elif abs_diff - uncertainty > bound:
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return IdentityReport(
        identity_id, inputs, lhs, rhs, abs_diff, rel_diff, verdict,
        lhs_error, rhs_error, note,
    )


def _inconclusive(identity_id: str, inputs: dict, reason: str) -> IdentityReport:
    return IdentityReport(
        identity_id, inputs, None, None, None, None,
        Verdict.INCONCLUSIVE, None, None, reason,
    )


def _tightened(config: QuadConfig) -> QuadConfig:
    """Quadrature tolerances for evaluations feeding a verdict.

    An identity can only be certified at tolerance tol when the error bars
    of both sides sit well below tol, so the sides are evaluated two
    decades tighter than the config the caller would use for plain values.
    """
    return replace(
        config, abs_tol=config.abs_tol * 1e-2, rel_tol=config.rel_tol * 1e-2
    )


@lru_cache(maxsize=None)
def _beta(s, t, v, params, config, series):
    # deterministic, so safe to memoize across an audit sweep
    return extended_beta_k(s, t, v, params, config, series)


def check_functional_relation(
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["FunctionalRelation"],
) -> IdentityReport:
    """beta(s, t+k) + beta(s+k, t) == beta(s, t), any kernel parameters.

    Splitting the weight via (1-m) + m = 1 raises one exponent by 1, and
    the exponents carry their argument divided by k, so the shift in the
    argument itself is k.  (At k=1 this is the familiar unit-shift beta
    recurrence; a unit shift at k != 1 does not satisfy the relation.)
    """
    args.validate()
    params.validate()
    config = _tightened(config)
    s, t, v = args.s, args.t, args.v
    inputs = {"s": s, "t": t, "v": v, **_params_inputs(params)}
    try:
        a = _beta(s, t + params.k, v, params, config, series)
        b = _beta(s + params.k, t, v, params, config, series)
        c = _beta(s, t, v, params, config, series)
    except KBetaError as exc:
        return _inconclusive("FunctionalRelation", inputs, str(exc))
    return _finish(
        "FunctionalRelation",
        inputs,
        a.value + b.value,
        c.value,
        a.error_estimate + b.error_estimate,
        c.error_estimate,
        tol,
    )


def check_symmetry(
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["Symmetry"],
) -> IdentityReport:
    """beta(s, t) == beta(t, s)."""
    args.validate()
    params.validate()
    config = _tightened(config)
    s, t, v = args.s, args.t, args.v
    inputs = {"s": s, "t": t, "v": v, **_params_inputs(params)}
    try:
        a = _beta(s, t, v, params, config, series)
        b = _beta(t, s, v, params, config, series)
    except KBetaError as exc:
        return _inconclusive("Symmetry", inputs, str(exc))
    return _finish(
        "Symmetry",
        inputs,
        a.value,
        b.value,
        a.error_estimate,
        b.error_estimate,
        tol,
    )


def check_representation(
    rep: Representation,
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["ReprEquivalence"],
) -> IdentityReport:
    """Corrected representation == direct integral."""
    args.validate()
    params.validate()
    config = _tightened(config)
    identity_id = f"ReprEquivalence({rep.label()})"
    inputs = {
        "s": args.s, "t": args.t, "v": args.v, **_params_inputs(params),
    }
    try:
        lhs = eval_representation(rep, args, params, config, series)
        rhs = _beta(args.s, args.t, args.v, params, config, series)
    except KBetaError as exc:
        return _inconclusive(identity_id, inputs, str(exc))
    return _finish(
        identity_id,
        inputs,
        lhs.value,
        rhs.value,
        lhs.error_estimate,
        rhs.error_estimate,
        tol,
    )


@dataclass(frozen=True)
class MellinQuery:
    """Transform order g for the Mellin checks.

    Requires 0 < g, s - k*k*g > 0, t - k*k*g > 0 so both the nested
    integral and the claimed closed forms are defined; in classical mode
    additionally g < r so the gamma factor's integral converges.
    """

    g: float

    def validate(self, args: ExtBetaArgs, params: MLParams) -> None:
        g, k = self.g, params.k
        if not (isinstance(g, (int, float)) and math.isfinite(g) and g > 0.0):
            raise DomainError(f"g must be a finite positive real, got {g}")
        if args.s - k * k * g <= 0.0 or args.t - k * k * g <= 0.0:
            raise DomainError(
                "Mellin order g must satisfy s - k*k*g > 0 and "
                f"t - k*k*g > 0, got s={args.s}, t={args.t}, k={k}, g={g}"
            )
        if params.denominator_gamma is GammaMode.CLASSICAL and g >= params.r:
            raise DomainError(
                f"classical mode requires g < r, got g={g}, r={params.r}"
            )


def _mellin_oracle(
    args: ExtBetaArgs,
    g: float,
    params: MLParams,
    config: QuadConfig,
    series: SeriesConfig,
):
    """int_0^inf v**(g-1) beta(s, t, v) dv by nested quadrature.

    Substituting v = w/(1-w) maps the transform onto the unit interval.
    The integral is truncated at v_cut, beyond which the beta factor sits
    in its v**(-d) decay regime with d = min(s,t)/k**2 (set by the weight
    endpoint the kernel cannot suppress); the cut targets a relative tail
    near 1e-9 and the remainder, estimated from the decay law, is added
    to the value and counted in full as uncertainty.

    The inner beta evaluations report their own error estimates.  Far out
    in the tail those claims are absolute noise floors vastly above the
    tiny values, so maxing their ratios into one relative bound would be
    useless; instead claims above 1e-13 enter a relative pool (bounded by
    the worst ratio times the bulk value) and smaller claims enter an
    absolute pool, bounded through the closed-form transform mass
    int_0^v_cut v**(g-1) dv = v_cut**g / g.
    """
    s, t = args.s, args.t
    k = params.k
    d = min(s, t) / (k * k)
    exp10 = 9.0 / (d - g)
    v_cut = 1e8 if exp10 >= 8.0 else max(1e4, 10.0**exp10)
    w_cut = v_cut / (1.0 + v_cut)
    state = {"ratio": 0.0, "floor": 0.0}

    def beta_at(v: float, cfg: QuadConfig):
        peak = v * 4.0**-k
        ser = series
        if peak > series.max_abs_argument:
            ser = replace(series, max_abs_argument=peak * (1.0 + 1e-9))
        return _beta(s, t, v, params, cfg, ser)

    def f(w, wm0, cmw):
        out = np.empty_like(w)
        for i in range(w.size):
            omw = 1.0 - w[i]
            res = beta_at(w[i] / omw, _rescaled(config, omw ** -(g + 1.0)))
            if res.error_estimate > 1e-13:
                ratio = res.error_estimate / max(abs(res.value), 1e-300)
                state["ratio"] = max(state["ratio"], ratio)
            else:
                state["floor"] = max(state["floor"], res.error_estimate)
            out[i] = res.value * omw ** -(g + 1.0)
        return out

    res = integrate_interval(f, 0.0, w_cut, g - 1.0, 0.0, config)
    tail = abs(beta_at(v_cut, config).value) * v_cut**g / (d - g)
    err = (
        res.error_estimate
        + state["ratio"] * abs(res.value)
        + state["floor"] * v_cut**g / g
        + tail
    )
    return res.value + tail, err


def check_mellin(
    args: ExtBetaArgs,
    query: MellinQuery,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["MellinCorrected"],
) -> list[IdentityReport]:
    """Mellin transform of beta in v against two claimed closed forms.

    The oracle side is the nested quadrature.  The first report
    (MellinPaperLiteral) compares it to the uncorrected textual closed
    form beta_k(s - k^2 g, t - k^2 g) * gamma_ext(s), whose second factor
    carries the wrong argument; the second (MellinCorrected) compares to
    the same expression with gamma_ext(g).  Both factor evaluations can
    legitimately fail off the gamma integral's strip; those reports come
    back Inconclusive.
    """
    args.validate()
    params.validate()
    query.validate(args, params)
    g = query.g
    k = params.k
    base_inputs = {
        "s": args.s, "t": args.t, "g": g, **_params_inputs(params),
    }
    try:
        oracle, oracle_err = _mellin_oracle(args, g, params, config, series)
    except KBetaError as exc:
        reason = f"transform quadrature failed: {exc}"
        return [
            _inconclusive("MellinPaperLiteral", dict(base_inputs), reason),
            _inconclusive("MellinCorrected", dict(base_inputs), reason),
        ]
    bk = k_beta(args.s - k * k * g, args.t - k * k * g, k)
    reports = []
    for identity_id, gamma_arg in (
        ("MellinPaperLiteral", args.s),
        ("MellinCorrected", g),
    ):
        try:
            gam = extended_gamma_k(gamma_arg, params, config, series)
        except KBetaError as exc:
            reports.append(
                _inconclusive(
                    identity_id,
                    dict(base_inputs),
                    f"gamma factor at {gamma_arg} failed: {exc}",
                )
            )
            continue
        rhs = bk * gam.value
        rhs_err = bk * gam.error_estimate
        reports.append(
            _finish(
                identity_id,
                dict(base_inputs),
                oracle,
                rhs,
                oracle_err,
                rhs_err,
                tol,
            )
        )
    return reports


def check_lemma_closed_form(
    s: float,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["Lemma23PaperLiteral"],
) -> IdentityReport:
    """Gamma integral against its claimed closed form, kept in literal form.

    The closed form disagrees with the quadrature already at classical
    unit parameters, so Fails is the expected verdict; the report records
    the size of the gap.  Points where either side is undefined (poles,
    off-strip) come back Inconclusive.
    """
    params.validate()
    config = _tightened(config)
    inputs = {"s": s, **_params_inputs(params)}
    try:
        lhs = extended_gamma_k(s, params, config, series)
    except KBetaError as exc:
        return _inconclusive(
            "Lemma23PaperLiteral", inputs, f"integral side failed: {exc}"
        )
    try:
        rhs = extended_gamma_closed_form_claimed(s, params)
    except KBetaError as exc:
        return _inconclusive(
            "Lemma23PaperLiteral", inputs, f"closed form side failed: {exc}"
        )
    return _finish(
        "Lemma23PaperLiteral",
        inputs,
        lhs.value,
        rhs,
        lhs.error_estimate,
        abs(rhs) * 1e-15,
        tol,
    )


def _plain_kernel_coeffs(k: float, p: float, ymax: float) -> np.ndarray:
    """Taylor coefficients of the two-parameter kernel sum_j (1)_{k,j}
    (-y)^j / (j! Gamma(p j + 1)), grown until the tail at ymax is below
    1e-20 relative."""
    coeffs = [1.0]
    log_poch = 0.0
    biggest = 1.0
    j = 0
    while True:
        log_poch += math.log1p(j * k)
        j += 1
        log_c = log_poch - math.lgamma(j + 1.0) - math.lgamma(p * j + 1.0)
        c = math.exp(log_c)
        coeffs.append(c)
        term = c * ymax**j
        biggest = max(biggest, term)
        if j >= 4 and term <= 1e-20 * biggest:
            return np.array(coeffs)
        if j >= 500:
            raise ConvergenceError(
                "independent kernel series needs more than 500 terms at "
                f"|y| <= {ymax}"
            )


def _remark22_beta(
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig,
    series: SeriesConfig,
    tol: float,
) -> IdentityReport:
    """q = r = 1 collapse of the beta integral, right side summed from an
    independently coded kernel series with plain-gamma denominators."""
    s, t, v = args.s, args.t, args.v
    k = params.k
    inputs = {
        "variant": "beta", "s": s, "t": t, "v": v, **_params_inputs(params),
    }
    try:
        lhs = extended_beta_k(s, t, v, params, config, series)
    except KBetaError as exc:
        return _inconclusive("Remark22", inputs, str(exc))
    ymax = v * 4.0**-k
    try:
        coeffs = _plain_kernel_coeffs(k, params.p, ymax)
    except KBetaError as exc:
        return _inconclusive("Remark22", inputs, str(exc))
    rev = coeffs[::-1]
    # rounding noise of the alternating Horner sum, sized by the
    # same-coefficient positive series
    noise = 1e-15 * float(np.polyval(rev, ymax))

    def f(m, omm):
        return np.polyval(rev, -v * (m * omm) ** k)

    res = integrate_01_singular(f, s / k - 1.0, t / k - 1.0, config)
    mass = math.exp(
        math.lgamma(s / k) + math.lgamma(t / k) - math.lgamma((s + t) / k)
    )
    rhs = res.value / k
    rhs_err = (res.error_estimate + noise * mass) / k
    return _finish(
        "Remark22",
        inputs,
        lhs.value,
        rhs,
        lhs.error_estimate,
        rhs_err,
        tol,
    )


def _remark22_gamma(
    s: float,
    params: MLParams,
    config: QuadConfig,
    series: SeriesConfig,
    tol: float,
) -> IdentityReport:
    """q = r = 1 collapse of the gamma integral.  At these parameters the
    collapsed definition is the deformed-denominator integral reread with
    plain gammas, so the check compares the two denominator modes; it is
    only emitted in deformed mode, where the comparison has content."""
    inputs = {"variant": "gamma", "s": s, **_params_inputs(params)}
    try:
        lhs = extended_gamma_k(s, params, config, series)
    except KBetaError as exc:
        return _inconclusive("Remark22", inputs, str(exc))
    classical = replace(params, denominator_gamma=GammaMode.CLASSICAL)
    try:
        rhs = extended_gamma_k(s, classical, config, series)
    except KBetaError as exc:
        return _inconclusive("Remark22", inputs, str(exc))
    return _finish(
        "Remark22",
        inputs,
        lhs.value,
        rhs.value,
        lhs.error_estimate,
        rhs.error_estimate,
        tol,
    )


def _remark25(
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig,
    series: SeriesConfig,
    tol: float,
) -> IdentityReport:
    """p = q = r = 1, v = 0 collapse to the classical beta closed form."""
    s, t = args.s, args.t
    inputs = {"s": s, "t": t, "v": 0.0, **_params_inputs(params)}
    try:
        lhs = extended_beta_k(s, t, 0.0, params, config, series)
    except KBetaError as exc:
        return _inconclusive("Remark25", inputs, str(exc))
    rhs = k_beta(s, t, params.k)
    return _finish(
        "Remark25",
        inputs,
        lhs.value,
        rhs,
        lhs.error_estimate,
        abs(rhs) * 1e-15,
        tol,
    )


def check_reductions(
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    tol: float = TOLERANCES["Remark22"],
) -> list[IdentityReport]:
    """All reduction rows applicable at this parameter point.

    At q = r = 1 the beta collapse is always checked; the gamma collapse
    only in deformed mode (in classical mode both sides are the same
    expression).  At p = q = r = 1 and v = 0 the classical closed form is
    checked too.  In deformed mode at k != 1 the collapses are expected
    to fail; those rows quantify the gap rather than assert it away.
    """
    args.validate()
    params.validate()
    config = _tightened(config)
    reports: list[IdentityReport] = []
    if params.q == 1.0 and params.r == 1.0:
        reports.append(_remark22_beta(args, params, config, series, tol))
        if params.denominator_gamma is GammaMode.K_DEFORMED:
            reports.append(
                _remark22_gamma(args.s, params, config, series, tol)
            )
        if params.p == 1.0 and args.v == 0.0:
            reports.append(
                _remark25(args, params, config, series, TOLERANCES["Remark25"])
            )
    return reports


@dataclass(frozen=True)
class GridSpec:
    """Deterministic parameter sweep for run_audit.

    The point checks (FunctionalRelation, Symmetry, ReprEquivalence,
    reductions) run over the full Cartesian product of modes, k, p, q, r,
    s, t, v, in that nesting order.  The Mellin rows run at classical unit
    kernel parameters over (g, s, t) from the mellin_* axes, and the
    closed-form probe over lemma_ss, since those claims are only sharp
    there; the generic check functions remain available for other points.
    """

    name: str
    modes: tuple[GammaMode, ...]
    ks: tuple[float, ...]
    ss: tuple[float, ...]
    ts: tuple[float, ...]
    vs: tuple[float, ...]
    ps: tuple[float, ...]
    qs: tuple[float, ...]
    rs: tuple[float, ...]
    representations: tuple[Representation, ...]
    mellin_ss: tuple[float, ...]
    mellin_ts: tuple[float, ...]
    mellin_gs: tuple[float, ...]
    lemma_ss: tuple[float, ...]


DEFAULT_GRID = GridSpec(
    name="default",
    modes=(GammaMode.CLASSICAL, GammaMode.K_DEFORMED),
    ks=(0.5, 1.0, 2.0),
    ss=(0.6, 1.0, 2.5),
    ts=(0.6, 1.0, 2.5),
    vs=(0.0, 0.5, 2.0),
    ps=(0.75, 1.0, 1.5),
    qs=(0.75, 1.0, 1.5),
    rs=(0.75, 1.0, 1.5),
    representations=CANONICAL_REPRESENTATIONS,
    mellin_ss=(2.0, 3.0),
    mellin_ts=(2.0, 3.0),
    mellin_gs=(0.25, 0.5),
    lemma_ss=(0.5, 0.9),
)

SMOKE_GRID = GridSpec(
    name="smoke",
    modes=(GammaMode.CLASSICAL, GammaMode.K_DEFORMED),
    ks=(1.0, 2.0),
    ss=(1.0, 2.5),
    ts=(1.0,),
    vs=(0.0, 0.5),
    ps=(1.0,),
    qs=(1.0,),
    rs=(1.0,),
    representations=(
        Representation.trig(),
        Representation.two_parameter(2.0, 3.0),
        Representation.half_line(),
    ),
    mellin_ss=(2.0,),
    mellin_ts=(2.0,),
    mellin_gs=(0.5,),
    lemma_ss=(0.5,),
)

EMPTY_GRID = GridSpec(
    name="empty",
    modes=(),
    ks=(),
    ss=(),
    ts=(),
    vs=(),
    ps=(),
    qs=(),
    rs=(),
    representations=(),
    mellin_ss=(),
    mellin_ts=(),
    mellin_gs=(),
    lemma_ss=(),
)

GRIDS = {"default": DEFAULT_GRID, "smoke": SMOKE_GRID, "empty": EMPTY_GRID}

#: audit sections selectable through run_audit's include argument
AUDIT_SECTIONS = (
    "FunctionalRelation",
    "Symmetry",
    "ReprEquivalence",
    "Reductions",
    "Mellin",
    "Lemma23PaperLiteral",
)

_UNIT_CLASSICAL = MLParams(
    k=1.0, p=1.0, q=1.0, r=1.0, denominator_gamma=GammaMode.CLASSICAL
)


def _is_asserted(report: IdentityReport) -> bool:
    """Whether a Fails verdict on this row should fail the audit.

    The recurrence, symmetry, and representation rows are asserted
    everywhere; reduction rows only in classical mode.  The literal-form
    probes are never asserted: they exist to measure misprints.
    """
    family = report.identity_id.split("(")[0]
    if family in ("FunctionalRelation", "Symmetry", "ReprEquivalence"):
        return True
    if family in ("Remark22", "Remark25"):
        return report.inputs.get("mode") == GammaMode.CLASSICAL.value
    return False


def audit_passed(reports: Iterable[IdentityReport]) -> bool:
    return not any(
        r.verdict is Verdict.FAILS and _is_asserted(r) for r in reports
    )


def run_audit(
    grid: GridSpec = DEFAULT_GRID,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    include: Iterable[str] | None = None,
    json_path=None,
    csv_path=None,
) -> dict:
    """Sweep the grid, evaluate every applicable check, render reports.

    Returns the audit document (config echo, one dict per check, verdict
    summary); optionally writes its JSON and CSV renderings.  The
    document depends only on the arguments, so identical invocations
    produce byte-identical files.
    """
    if include is None:
        chosen = set(AUDIT_SECTIONS)
    else:
        chosen = set(include)
        unknown = chosen.difference(AUDIT_SECTIONS)
        if unknown:
            raise DomainError(
                f"unknown audit sections {sorted(unknown)}; "
                f"expected a subset of {AUDIT_SECTIONS}"
            )
    reports: list[IdentityReport] = []
    for mode in grid.modes:
        for k in grid.ks:
            for p in grid.ps:
                for q in grid.qs:
                    for r in grid.rs:
                        params = MLParams(
                            k=k, p=p, q=q, r=r, denominator_gamma=mode
                        )
                        for s in grid.ss:
                            for t in grid.ts:
                                for v in grid.vs:
                                    args = ExtBetaArgs(s, t, v)
                                    if "FunctionalRelation" in chosen:
                                        reports.append(
                                            check_functional_relation(
                                                args, params, config, series
                                            )
                                        )
                                    if "Symmetry" in chosen:
                                        reports.append(
                                            check_symmetry(
                                                args, params, config, series
                                            )
                                        )
                                    if "ReprEquivalence" in chosen:
                                        for rep in grid.representations:
                                            reports.append(
                                                check_representation(
                                                    rep, args, params,
                                                    config, series,
                                                )
                                            )
                                    if "Reductions" in chosen:
                                        reports.extend(
                                            check_reductions(
                                                args, params, config, series
                                            )
                                        )
    if "Mellin" in chosen:
        for g in grid.mellin_gs:
            for s in grid.mellin_ss:
                for t in grid.mellin_ts:
                    reports.extend(
                        check_mellin(
                            ExtBetaArgs(s, t, 0.0),
                            MellinQuery(g),
                            _UNIT_CLASSICAL,
                            config,
                            series,
                        )
                    )
    if "Lemma23PaperLiteral" in chosen:
        for s in grid.lemma_ss:
            reports.append(
                check_lemma_closed_form(s, _UNIT_CLASSICAL, config, series)
            )
    doc = _document(grid, config, series, sorted(chosen), reports)
    if json_path is not None:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(render_audit_json(doc))
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_audit_csv(doc))
    return doc


def _report_dict(r: IdentityReport) -> dict:
    return {
        "identity_id": r.identity_id,
        "inputs": {key: r.inputs[key] for key in sorted(r.inputs)},
        "lhs": r.lhs,
        "rhs": r.rhs,
        "abs_diff": r.abs_diff,
        "rel_diff": r.rel_diff,
        "verdict": r.verdict.value,
        "lhs_error": r.lhs_error,
        "rhs_error": r.rhs_error,
        "note": r.note,
    }


def _document(grid, config, series, sections, reports) -> dict:
    by_identity: dict[str, dict[str, int]] = {}
    for r in reports:
        counts = by_identity.setdefault(
            r.identity_id, {"Holds": 0, "Fails": 0, "Inconclusive": 0}
        )
        counts[r.verdict.value] += 1
    asserted_failures = sum(
        1
        for r in reports
        if r.verdict is Verdict.FAILS and _is_asserted(r)
    )
    return {
        "config": {
            "grid": {
                "name": grid.name,
                "modes": [m.value for m in grid.modes],
                "ks": list(grid.ks),
                "ss": list(grid.ss),
                "ts": list(grid.ts),
                "vs": list(grid.vs),
                "ps": list(grid.ps),
                "qs": list(grid.qs),
                "rs": list(grid.rs),
                "representations": [
                    rep.label() for rep in grid.representations
                ],
                "mellin_ss": list(grid.mellin_ss),
                "mellin_ts": list(grid.mellin_ts),
                "mellin_gs": list(grid.mellin_gs),
                "lemma_ss": list(grid.lemma_ss),
            },
            "sections": list(sections),
            "quad": {
                "abs_tol": config.abs_tol,
                "rel_tol": config.rel_tol,
                "max_subdivisions": config.max_subdivisions,
                "semi_infinite_cutoff": config.semi_infinite_cutoff,
            },
            "series": {
                "rel_tol": series.rel_tol,
                "max_terms": series.max_terms,
                "max_abs_argument": series.max_abs_argument,
            },
            "tolerances": dict(sorted(TOLERANCES.items())),
        },
        "checks": [_report_dict(r) for r in reports],
        "summary": {
            "total": len(reports),
            "by_identity": {
                key: by_identity[key] for key in sorted(by_identity)
            },
            "asserted_failures": asserted_failures,
            "passed": asserted_failures == 0,
        },
    }


def _json_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"unsupported JSON value {x!r}")


def _json_render(obj) -> str:
    if isinstance(obj, dict):
        body = ",".join(
            f"{_json_scalar(str(key))}:{_json_render(val)}"
            for key, val in obj.items()
        )
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_render(val) for val in obj) + "]"
    return _json_scalar(obj)


def render_audit_json(doc: dict) -> str:
    """Deterministic JSON rendering with 17 significant digits."""
    return _json_render(doc) + "\n"


def render_audit_csv(doc: dict) -> str:
    """Deterministic CSV rendering of the check rows."""
    input_keys = sorted(
        {key for check in doc["checks"] for key in check["inputs"]}
    )
    columns = (
        ["identity_id"]
        + input_keys
        + ["lhs", "rhs", "abs_diff", "rel_diff", "verdict"]
    )

    def cell(x) -> str:
        if x is None:
            return ""
        if isinstance(x, float):
            return format(x, ".17g")
        return str(x)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for check in doc["checks"]:
        row = [check["identity_id"]]
        row += [cell(check["inputs"].get(key)) for key in input_keys]
        row += [
            cell(check["lhs"]),
            cell(check["rhs"]),
            cell(check["abs_diff"]),
            cell(check["rel_diff"]),
            check["verdict"],
        ]
        writer.writerow(row)
    return buf.getvalue()
